#ifndef MOE_RESAMPLE_HPP
#define MOE_RESAMPLE_HPP

#include <span>
#include <vector>

#include "moe/rng.hpp"

namespace moe {

// Effective sample size 1 / sum(w^2) of normalized weights.
double ess(std::span<const double> weights);

// Normalized weights from log-weights via log-sum-exp.
std::vector<double> normalize_log_weights(std::span<const double> log_weights);

// Systematic resampling with explicit uniform offset u in [0,1).  Returns
// ancestor indices in nondecreasing order; offspring counts are deterministic
// given u.
std::vector<std::size_t> systematic_resample(std::span<const double> weights, double u);
std::vector<std::size_t> systematic_resample(std::span<const double> weights,
                                             RngStream& rng);

}  // namespace moe

#endif
