#ifndef MOE_GATING_HPP
#define MOE_GATING_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "moe/gp.hpp"
#include "moe/rng.hpp"

namespace moe {

// Gating network parameters: unnormalized Gamma weights (stored on the log
// scale, tiny shapes underflow in linear scale), normal-kernel means and
// diagonal standard deviations.
struct GatingParams {
    struct Component {
        double log_nu = 0.0;
        Eigen::VectorXd mean;  // D
        Eigen::VectorXd sd;    // D, strictly positive
    };
    std::vector<Component> comps;

    int K() const { return static_cast<int>(comps.size()); }
    int dim() const { return comps.empty() ? 0 : static_cast<int>(comps[0].mean.size()); }
};

// Hyperparameters of all prior families.  standard() fills the values used
// for the benchmark runs: gating means on a linearly-spaced grid, half-normal
// scales for every positive parameter, uniform GP mean on [0, y_max].
struct PriorSpec {
    int K = 1;
    double alpha = 1.0;
    int D = 1;
    double y_max = 1.0;

    Eigen::MatrixXd mu_grid;       // K x D prior mean locations
    double mu_sd = 0.125;          // shared gating-mean prior sd
    double gating_sd_scale = 0.125;  // half-normal scale for sigma_{k,d}
    double noise_sd_scale = 0.25;
    double signal_sd_scale = 0.25;
    double length_scale_scale = 0.125;

    static PriorSpec standard(int K, double alpha, int D, double y_max);
    void validate() const;
};

// Labels are stored zero-based: c_i in {0, ..., K-1}.
using Allocation = std::vector<int>;

double log_kernel_value(const Eigen::VectorXd& x, int k, const GatingParams& psi);
double kernel_value(const Eigen::VectorXd& x, int k, const GatingParams& psi);

Eigen::VectorXd gating_log_probs(const Eigen::VectorXd& x, const GatingParams& psi);
Eigen::VectorXd gating_probs(const Eigen::VectorXd& x, const GatingParams& psi);

Allocation sample_allocation(const Eigen::MatrixXd& inputs, const GatingParams& psi,
                             RngStream& rng);

GatingParams sample_gating_prior(const PriorSpec& spec, RngStream& rng);
ExpertParams sample_expert_prior(const PriorSpec& spec, RngStream& rng);
std::pair<GatingParams, std::vector<ExpertParams>> sample_prior(const PriorSpec& spec,
                                                                RngStream& rng);

double log_gating_prior_density(const GatingParams& psi, const PriorSpec& spec);
double log_expert_prior_density(const ExpertParams& theta, const PriorSpec& spec);
double log_prior_density(const GatingParams& psi, const std::vector<ExpertParams>& thetas,
                         const PriorSpec& spec);

// Rousseau overfitting-avoidance condition alpha/K < rho/2.  rho defaults to
// the gating parameter count per component, 1 + 2D.
bool sparsity_condition(double alpha, int K, int D, int rho = -1);

// Data subsets induced by an allocation.
std::vector<DataSubset> partition_data(const Eigen::MatrixXd& inputs,
                                       const Eigen::VectorXd& outputs,
                                       const Allocation& alloc, int K);

}  // namespace moe

#endif
