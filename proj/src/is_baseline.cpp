#include "moe/is_baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "moe/errors.hpp"
#include "moe/math.hpp"
#include "moe/nelder_mead.hpp"
#include "moe/parallel.hpp"
#include "moe/resample.hpp"

namespace moe {

namespace {

constexpr std::uint64_t kIsTag = 5;
constexpr double kScaleFloor = 1e-3;

Eigen::VectorXd transform(const ExpertParams& p) {
    Eigen::VectorXd v(p.param_count());
    v[0] = p.mean;
    v[1] = std::log(std::max(p.noise_sd, kScaleFloor));
    v[2] = std::log(std::max(p.signal_sd, kScaleFloor));
    for (int d = 0; d < p.dim(); ++d) v[3 + d] = std::log(std::max(p.length_scales[d], kScaleFloor));
    return v;
}

ExpertParams untransform(const Eigen::VectorXd& v, const PriorSpec& spec) {
    ExpertParams p;
    p.mean = std::clamp(v[0], 0.0, spec.y_max);
    p.noise_sd = std::max(std::exp(v[1]), kScaleFloor);
    p.signal_sd = std::max(std::exp(v[2]), kScaleFloor);
    p.length_scales.resize(v.size() - 3);
    for (Eigen::Index d = 0; d + 3 < v.size(); ++d) {
        p.length_scales[d] = std::max(std::exp(v[3 + d]), kScaleFloor);
    }
    return p;
}

ExpertParams prior_mode(const PriorSpec& spec) {
    ExpertParams p;
    p.mean = spec.y_max / 2.0;
    p.noise_sd = kScaleFloor;
    p.signal_sd = kScaleFloor;
    p.length_scales = Eigen::VectorXd::Constant(spec.D, kScaleFloor);
    return p;
}

}  // namespace

void ISConfig::validate() const {
    if (particles < 1) throw config_error("ISConfig: J must be >= 1");
    if (map_starts < 1) throw config_error("ISConfig: map_starts must be >= 1");
    if (map_iters < 1) throw config_error("ISConfig: map_iters must be >= 1");
    prior.validate();
}

ExpertParams map_estimate(const DataSubset& data, const PriorSpec& spec, int starts,
                          int iters, RngStream& rng, long long* lik_evals) {
    if (data.size() == 0) return prior_mode(spec);

    auto objective = [&](const Eigen::VectorXd& v) {
        const ExpertParams p = untransform(v, spec);
        if (lik_evals) ++*lik_evals;
        try {
            const double ll = log_marginal_likelihood(data, p);
            const double lp = log_expert_prior_density(p, spec);
            const double obj = ll + lp;
            return std::isfinite(obj) ? -obj : std::numeric_limits<double>::infinity();
        } catch (const numerical_error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_x;
    for (int s = 0; s < starts; ++s) {
        const Eigen::VectorXd x0 = transform(sample_expert_prior(spec, rng));
        const NelderMeadResult res = nelder_mead(objective, x0, 0.1, iters);
        if (res.value < best) {
            best = res.value;
            best_x = res.x;
        }
    }
    if (!std::isfinite(best)) {
        throw numerical_error("map_estimate: every optimizer start failed");
    }
    return untransform(best_x, spec);
}

ISResult run_is(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                const ISConfig& config) {
    config.validate();
    if (inputs.rows() != outputs.size()) {
        throw dimension_error("run_is: X and Y row counts differ");
    }
    const int J = config.particles;
    const int K = config.prior.K;

    std::vector<ISParticle> particles(J);
    std::vector<long long> evals(J, 0);
    std::vector<std::vector<std::string>> warnings(J);

    parallel_for(J, config.workers, [&](std::size_t j) {
        RngStream rng = RngStream::derive(config.seed, {kIsTag, j});
        ISParticle& p = particles[j];
        p.psi = sample_gating_prior(config.prior, rng);
        p.alloc = sample_allocation(inputs, p.psi, rng);
        const std::vector<DataSubset> subsets = partition_data(inputs, outputs, p.alloc, K);
        p.map_params.resize(K);
        p.map_log_lik.assign(K, 0.0);
        double lw = 0.0;
        for (int k = 0; k < K; ++k) {
            try {
                p.map_params[k] = map_estimate(subsets[k], config.prior, config.map_starts,
                                               config.map_iters, rng, &evals[j]);
            } catch (const numerical_error& e) {
                p.map_params[k] = prior_mode(config.prior);
                warnings[j].push_back("run_is: expert fit failed, using prior mode: " +
                                      std::string(e.what()));
            }
            p.map_log_lik[k] = log_marginal_likelihood(subsets[k], p.map_params[k]);
            ++evals[j];
            lw += p.map_log_lik[k];
        }
        p.log_weight = lw;
    });

    std::vector<double> lw(J);
    for (int j = 0; j < J; ++j) lw[j] = particles[j].log_weight;
    const double norm = log_sum_exp(lw);
    if (!std::isfinite(norm)) {
        throw degenerate_weights_error("run_is: every particle has zero weight");
    }
    for (int j = 0; j < J; ++j) particles[j].log_weight -= norm;

    ISResult result;
    result.particles = std::move(particles);
    for (int j = 0; j < J; ++j) {
        result.lik_evals += evals[j];
        result.warnings.insert(result.warnings.end(), warnings[j].begin(),
                               warnings[j].end());
    }
    return result;
}

PosteriorSample as_posterior(const ISResult& result) {
    PosteriorSample sample;
    sample.method = "is";
    sample.diag.warnings = result.warnings;
    sample.diag.lik_evals = result.lik_evals;
    for (const auto& isp : result.particles) {
        OuterParticle p;
        p.alloc = isp.alloc;
        p.psi = isp.psi;
        p.inner.members.resize(1);
        p.inner.block_ll.resize(1);
        for (std::size_t k = 0; k < isp.map_params.size(); ++k) {
            p.inner.members[0].push_back(isp.map_params[k].to_vector());
            p.inner.block_ll[0].push_back(isp.map_log_lik[k]);
        }
        p.log_weight = isp.log_weight;
        p.log_zhat = isp.log_weight;
        sample.particles.push_back(std::move(p));
    }
    return sample;
}

double is_sample_bound(int n, int k, int t) {
    if (k < 1 || t < 1 || t > k || n < 0) {
        throw config_error("is_sample_bound: need 1 <= t <= K and N >= 0");
    }
    double binom = 1.0;
    for (int i = 1; i <= t; ++i) binom *= static_cast<double>(k - t + i) / i;
    double t_fact = 1.0;
    for (int i = 2; i <= t; ++i) t_fact *= i;

    double pow_kn = 1.0;
    for (int i = 0; i < n; ++i) {
        pow_kn *= k;
        if (!std::isfinite(pow_kn)) break;
    }
    if (std::isfinite(pow_kn)) return pow_kn / (binom * t_fact);
    const double log_bound = n * std::log(static_cast<double>(k)) - std::log(binom) -
                             std::lgamma(static_cast<double>(t) + 1.0);
    return std::exp(log_bound);
}

}  // namespace moe
