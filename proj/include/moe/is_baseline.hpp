#ifndef MOE_IS_BASELINE_HPP
#define MOE_IS_BASELINE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "moe/gating.hpp"
#include "moe/gp.hpp"
#include "moe/rng.hpp"
#include "moe/smc2.hpp"

namespace moe {

struct ISConfig {
    int particles = 2000;  // J
    int map_starts = 5;
    int map_iters = 200;
    std::uint64_t seed = 0;
    int workers = 1;
    PriorSpec prior;

    void validate() const;
};

// One importance-sampling draw: gating parameters and allocation from the
// prior, expert parameters fixed at their per-subset MAP estimates.
struct ISParticle {
    Allocation alloc;
    GatingParams psi;
    std::vector<ExpertParams> map_params;  // K entries
    std::vector<double> map_log_lik;       // per-expert marginal log-likelihood at the MAP
    double log_weight = 0.0;  // normalized across the returned set
};

struct ISResult {
    std::vector<ISParticle> particles;
    long long lik_evals = 0;  // marginal-likelihood evaluations across all fits
    std::vector<std::string> warnings;
};

// Approximate maximizer of log-likelihood + log-prior over one expert's
// parameters: simplex search from prior-drawn starts on log-transformed
// scales, scales clamped to >= 1e-3.  Empty subsets return the prior mode.
ExpertParams map_estimate(const DataSubset& data, const PriorSpec& spec, int starts,
                          int iters, RngStream& rng, long long* lik_evals = nullptr);

ISResult run_is(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                const ISConfig& config);

// Repackages an IS run in the shared posterior format (method tag "is",
// single inner member per particle) so prediction and evaluation are
// method-agnostic.
PosteriorSample as_posterior(const ISResult& result);

// Illustrative particle-count requirement K^N / (C(K,t) t!), computed in the
// log domain when the direct product overflows.
double is_sample_bound(int n, int k, int t);

}  // namespace moe

#endif
