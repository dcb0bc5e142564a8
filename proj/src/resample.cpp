#include "moe/resample.hpp"

#include <cmath>

#include "moe/errors.hpp"
#include "moe/math.hpp"

namespace moe {

double ess(std::span<const double> weights) {
    double sum = 0.0;
    double sumsq = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw degenerate_weights_error("ess: negative weight");
        sum += w;
        sumsq += w * w;
    }
    if (sumsq == 0.0) throw degenerate_weights_error("ess: all weights are zero");
    if (std::abs(sum - 1.0) > 1e-9) {
        throw degenerate_weights_error("ess: weights do not sum to 1");
    }
    return 1.0 / sumsq;
}

std::vector<double> normalize_log_weights(std::span<const double> log_weights) {
    const double norm = log_sum_exp(log_weights);
    if (!std::isfinite(norm)) {
        throw degenerate_weights_error("normalize_log_weights: total weight is zero");
    }
    std::vector<double> w(log_weights.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_weights[i] - norm);
    return w;
}

std::vector<std::size_t> systematic_resample(std::span<const double> weights, double u) {
    const std::size_t n = weights.size();
    std::vector<std::size_t> ancestors;
    ancestors.reserve(n);
    double cum = 0.0;
    std::size_t i = 0;
    for (std::size_t j = 0; j < n && i < n; ++j) {
        cum += weights[j];
        while (i < n && (u + static_cast<double>(i)) / static_cast<double>(n) < cum) {
            ancestors.push_back(j);
            ++i;
        }
    }
    while (ancestors.size() < n) ancestors.push_back(n - 1);  // guard round-off
    return ancestors;
}

std::vector<std::size_t> systematic_resample(std::span<const double> weights,
                                             RngStream& rng) {
    double sumsq = 0.0;
    for (double w : weights) sumsq += w * w;
    if (sumsq == 0.0) throw degenerate_weights_error("resample: all weights are zero");
    return systematic_resample(weights, rng.uniform());
}

}  // namespace moe
