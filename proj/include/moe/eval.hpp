#ifndef MOE_EVAL_HPP
#define MOE_EVAL_HPP

#include <Eigen/Dense>
#include <string>
#include <utility>

#include "moe/data.hpp"
#include "moe/predictive.hpp"
#include "moe/smc2.hpp"

namespace moe {

// Generating law of a synthetic benchmark evaluated on a normalized grid:
// a Gaussian in raw units pushed through the dataset normalization.
struct GroundTruthDensity {
    Eigen::MatrixXd density;  // same shape as the matching PredictiveGrid
    Eigen::VectorXd median;   // normalized noise-free curve
};

GroundTruthDensity ground_truth_density(const std::string& generator,
                                        const Eigen::MatrixXd& x_grid,
                                        const Eigen::VectorXd& y_grid,
                                        const NormalizationRecord& norm);

// Unweighted vector norms over grid cells: (sum |a-b|, sqrt(sum (a-b)^2)).
std::pair<double, double> density_distance(const Eigen::MatrixXd& a,
                                           const Eigen::MatrixXd& b);

double median_distance(const Eigen::VectorXd& est, const Eigen::VectorXd& truth);

// Posterior co-clustering probabilities: entry (i, i') is the weighted
// fraction of particles allocating i and i' to the same expert.
Eigen::MatrixXd psm(const PosteriorSample& sample);

// Weighted histogram of the number of distinct experts used per particle;
// entry k-1 is the mass on exactly k non-empty experts.
Eigen::VectorXd expert_count_posterior(const PosteriorSample& sample, int k_max);

void save_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);
void save_histogram_csv(const std::string& path, const Eigen::VectorXd& h);

}  // namespace moe

#endif
