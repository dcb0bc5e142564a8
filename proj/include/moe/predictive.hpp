#ifndef MOE_PREDICTIVE_HPP
#define MOE_PREDICTIVE_HPP

#include <Eigen/Dense>
#include <string>

#include "moe/smc2.hpp"

namespace moe {

// Compound predictive over a rectangular (x*, y*) grid: mixture over outer
// particles, experts (gating-weighted), and inner ensemble members.
struct PredictiveGrid {
    Eigen::MatrixXd x_grid;   // G x D input points, sorted for D = 1
    Eigen::VectorXd y_grid;   // H output values, sorted
    Eigen::MatrixXd density;  // G x H, nonnegative
    Eigen::VectorXd mean;     // G, exact mixture first moment
};

Eigen::MatrixXd default_x_grid(int size, int dim = 1);

// Output grid spanning the data range padded by 3 sample sds.
Eigen::VectorXd default_y_grid(const Eigen::VectorXd& outputs, int size);

// The dataset is needed to rebuild each particle's expert subsets from its
// allocation.  Cell sums accumulate in log space.
PredictiveGrid predictive_density(const PosteriorSample& sample,
                                  const Eigen::MatrixXd& inputs,
                                  const Eigen::VectorXd& outputs,
                                  const Eigen::MatrixXd& x_grid,
                                  const Eigen::VectorXd& y_grid, int workers = 1);

Eigen::VectorXd predictive_mean(const PosteriorSample& sample,
                                const Eigen::MatrixXd& inputs,
                                const Eigen::VectorXd& outputs,
                                const Eigen::MatrixXd& x_grid, int workers = 1);

// Per x*, the y value where cumulative trapezoidal mass reaches half the
// total, linearly interpolated between grid points.
Eigen::VectorXd predictive_median(const PredictiveGrid& grid);

// Trapezoidal mass over y_grid for one x* row.
double row_mass(const PredictiveGrid& grid, Eigen::Index row);

void save_grid_csv(const std::string& path, const PredictiveGrid& grid);
void save_mean_median_csv(const std::string& path, const PredictiveGrid& grid,
                          const Eigen::VectorXd& median);

// Inverse of save_grid_csv; the mean column is left empty.
PredictiveGrid load_grid_csv(const std::string& path);

// Returns (x, mean, median) columns from save_mean_median_csv output.
struct MeanMedian {
    Eigen::VectorXd x;
    Eigen::VectorXd mean;
    Eigen::VectorXd median;
};
MeanMedian load_mean_median_csv(const std::string& path);

}  // namespace moe

#endif
