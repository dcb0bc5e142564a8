#ifndef MOE_GP_HPP
#define MOE_GP_HPP

#include <Eigen/Dense>
#include <vector>

namespace moe {

// Parameters of one GP expert: constant mean, noise / signal standard
// deviations and per-dimension length scales.  Parameter count is D + 3.
struct ExpertParams {
    double mean = 0.0;
    double noise_sd = 0.1;
    double signal_sd = 1.0;
    Eigen::VectorXd length_scales;  // strictly positive, size D

    int dim() const { return static_cast<int>(length_scales.size()); }
    int param_count() const { return dim() + 3; }

    // Flat layout (mean, noise_sd, signal_sd, l_1..l_D), used by the
    // random-walk mutation and the MAP optimizer.
    Eigen::VectorXd to_vector() const;
    static ExpertParams from_vector(const Eigen::VectorXd& v);

    // All scales nonnegative, length scales strictly positive.
    bool in_support() const;
};

// The data points currently assigned to one expert.  Empty subsets are valid.
struct DataSubset {
    Eigen::MatrixXd inputs;   // N_k x D
    Eigen::VectorXd outputs;  // N_k
    std::vector<int> indices;  // original row indices, may be empty for synthetic subsets

    Eigen::Index size() const { return outputs.size(); }
};

// Covariance matrix between two point sets.  The noise term sigma_eps^2 is
// added on entry (i,j) only when same_set is true and i == j: the Kronecker
// delta is interpreted as observation-index equality, so duplicated input
// locations stay well-posed.
Eigen::MatrixXd cov_matrix(const Eigen::MatrixXd& xa, const Eigen::MatrixXd& xb,
                           const ExpertParams& params, bool same_set);

// Cholesky factorization of a covariance matrix with the project jitter
// policy: on failure add 1e-10 * mean(diag) to the diagonal and escalate
// by x10 up to 1e-4 * mean(diag), then throw numerical_error carrying the
// attempted levels.
Eigen::LLT<Eigen::MatrixXd> chol_with_jitter(Eigen::MatrixXd cov);

// log N(Y_k | m, Sigma); 0 for an empty subset.
double log_marginal_likelihood(const DataSubset& data, const ExpertParams& params);

struct GpPrediction {
    double mean = 0.0;
    double variance = 0.0;
    bool prior = false;  // set when the subset was empty
};

// Factorized posterior for repeated predictions from the same subset.
class GpPosterior {
public:
    GpPosterior(const DataSubset& data, const ExpertParams& params);

    GpPrediction predict(const Eigen::VectorXd& x_star) const;

private:
    ExpertParams params_;
    Eigen::MatrixXd inputs_;
    Eigen::LLT<Eigen::MatrixXd> chol_;
    Eigen::VectorXd alpha_;  // Sigma^{-1} (y - m)
    bool empty_ = true;
};

// One-shot predictive moments for a noisy observation at x_star.  An empty
// subset yields the prior moments (m, sigma_eps^2 + sigma_f^2), flagged.
GpPrediction gp_predict(const Eigen::VectorXd& x_star, const DataSubset& data,
                        const ExpertParams& params);

}  // namespace moe

#endif
