#include "moe/smc2.hpp"

#include <cmath>

#include "moe/errors.hpp"
#include "moe/math.hpp"
#include "moe/parallel.hpp"
#include "moe/resample.hpp"
#include "moe/serialize.hpp"

namespace moe {

namespace {

// Stream family tags for counter-derived RNG keys.
enum : std::uint64_t { kInitTag = 0, kOuterResampleTag = 2, kInnerStepTag = 3, kPmmhTag = 4 };

Eigen::MatrixXd chol_or_diag(Eigen::MatrixXd cov, double floor) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success && cov.diagonal().minCoeff() > 0.0) {
        return llt.matrixL();
    }
    Eigen::VectorXd diag = cov.diagonal().array() + floor;
    return diag.array().sqrt().matrix().asDiagonal();
}

Eigen::VectorXd flatten_mu_sigma(const GatingParams& psi) {
    const int K = psi.K();
    const int D = psi.dim();
    Eigen::VectorXd v(2 * D * K);
    int idx = 0;
    for (int k = 0; k < K; ++k) {
        for (int d = 0; d < D; ++d) v[idx++] = psi.comps[k].mean[d];
        for (int d = 0; d < D; ++d) v[idx++] = psi.comps[k].sd[d];
    }
    return v;
}

Eigen::VectorXd flatten_log_nu(const GatingParams& psi) {
    Eigen::VectorXd v(psi.K());
    for (int k = 0; k < psi.K(); ++k) v[k] = psi.comps[k].log_nu;
    return v;
}

Eigen::MatrixXd weighted_cov_chol(const std::vector<Eigen::VectorXd>& vecs,
                                  std::span<const double> weights, double scale,
                                  double floor) {
    const Eigen::Index dim = vecs[0].size();
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
    for (std::size_t j = 0; j < vecs.size(); ++j) mean += weights[j] * vecs[j];
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t j = 0; j < vecs.size(); ++j) {
        const Eigen::VectorXd d = vecs[j] - mean;
        cov += weights[j] * (d * d.transpose());
    }
    cov *= scale * scale;
    return chol_or_diag(std::move(cov), floor);
}

MutationConfig mutation_config(const SMC2Config& config) {
    MutationConfig m;
    m.delta = config.delta;
    m.max_sweeps = config.max_mcmc_steps;
    m.proposal_scale = config.proposal_scale;
    return m;
}

struct LoopState {
    int t = 0;
    double kappa = 0.0;
    std::vector<double> kappa_history;
    std::vector<OuterParticle> particles;
    std::vector<SlotCounters> counters;
    std::vector<TemperRecord> steps;
    std::vector<std::string> warnings;
};

LoopState state_from_checkpoint(Smc2Checkpoint&& cp, const Eigen::MatrixXd& inputs,
                                const Eigen::VectorXd& outputs, int K) {
    LoopState st;
    st.t = cp.t;
    st.kappa = cp.kappa_history.empty() ? 0.0 : cp.kappa_history.back();
    st.kappa_history = std::move(cp.kappa_history);
    st.particles = std::move(cp.particles);
    st.counters = std::move(cp.counters);
    st.steps = std::move(cp.steps);
    st.warnings = std::move(cp.warnings);
    for (auto& p : st.particles) {
        p.subsets = partition_data(inputs, outputs, p.alloc, K);
    }
    return st;
}

Smc2Checkpoint checkpoint_from_state(const LoopState& st, std::uint64_t seed) {
    Smc2Checkpoint cp;
    cp.t = st.t;
    cp.seed = seed;
    cp.kappa_history = st.kappa_history;
    cp.particles = st.particles;
    cp.counters = st.counters;
    cp.steps = st.steps;
    cp.warnings = st.warnings;
    return cp;
}

PosteriorSample run_loop(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                         const SMC2Config& config, LoopState st) {
    const int J = config.outer_particles;
    const MutationConfig mcfg = mutation_config(config);

    while (st.kappa < 1.0) {
        ++st.t;
        try {
            std::vector<double> weights = outer_weights(st.particles);
            const double ess_before = ess(weights);
            const double kappa_new =
                adapt_kappa(st.kappa, st.particles, weights, config.eta, &st.warnings);

            reweight_outer(st.particles, st.kappa, kappa_new);
            weights = outer_weights(st.particles);
            const double ess_after = ess(weights);

            RngStream resample_rng =
                RngStream::derive(config.seed, {kOuterResampleTag, static_cast<std::uint64_t>(st.t)});
            resample_outer(st.particles, weights, resample_rng);
            st.kappa_history.push_back(kappa_new);

            const long long sweeps_before = [&] {
                long long s = 0;
                for (const auto& c : st.counters) s += c.inner.sweeps;
                return s;
            }();

            const double kappa_prev = st.kappa;
            parallel_for(J, config.workers, [&](std::size_t j) {
                RngStream rng = RngStream::derive(
                    config.seed, {kInnerStepTag, static_cast<std::uint64_t>(st.t), j});
                InnerBlockModel model =
                    expert_block_model(&st.particles[j].subsets, &config.prior);
                inner_smc_step(st.particles[j].inner, model, kappa_prev, kappa_new, mcfg,
                               rng, &st.counters[j].inner);
            });

            // PMMH mutation sweeps over the whole cloud; the stopping metric is
            // the mean displacement of the log-likelihood estimates, which is
            // invariant to label switching.
            std::vector<double> ref_logz(J);
            for (int j = 0; j < J; ++j) ref_logz[j] = st.particles[j].log_zhat;
            const std::vector<double> uniform(J, 1.0 / J);
            std::vector<double> d_trace;
            std::vector<std::vector<std::string>> sweep_warnings(J);
            int outer_sweeps = 0;
            for (int n = 1; n <= config.max_mcmc_steps; ++n) {
                const PmmhPoolStats pool = pmmh_pool_stats(st.particles, uniform, config);
                parallel_for(J, config.workers, [&](std::size_t j) {
                    RngStream rng = RngStream::derive(
                        config.seed, {kPmmhTag, static_cast<std::uint64_t>(st.t), j,
                                      static_cast<std::uint64_t>(n)});
                    pmmh_mutate(st.particles[j], pool, inputs, outputs, st.kappa_history,
                                config, rng, st.counters[j], &sweep_warnings[j]);
                });
                ++outer_sweeps;
                double d = 0.0;
                for (int j = 0; j < J; ++j) d += std::abs(st.particles[j].log_zhat - ref_logz[j]);
                d /= J;
                d_trace.push_back(d);
                if (mcmc_stop_rule(d_trace, config.delta, config.max_mcmc_steps)) break;
            }
            for (auto& w : sweep_warnings) {
                st.warnings.insert(st.warnings.end(), w.begin(), w.end());
            }

            long long sweeps_after = 0;
            for (const auto& c : st.counters) sweeps_after += c.inner.sweeps;

            TemperRecord rec;
            rec.t = st.t;
            rec.kappa = kappa_new;
            rec.ess_pre_resample = ess_after;
            rec.ess_ratio = ess_after / ess_before;
            rec.outer_sweeps = outer_sweeps;
            rec.inner_sweeps = sweeps_after - sweeps_before;
            st.steps.push_back(rec);
            st.kappa = kappa_new;

            if (!config.checkpoint_path.empty()) {
                save_checkpoint(config.checkpoint_path, checkpoint_from_state(st, config.seed));
            }
        } catch (const numerical_error&) {
            if (!config.checkpoint_path.empty()) {
                save_checkpoint(config.checkpoint_path + ".abort",
                                checkpoint_from_state(st, config.seed));
            }
            throw;
        }
    }

    PosteriorSample result;
    result.particles = std::move(st.particles);
    result.kappa_history = std::move(st.kappa_history);
    result.diag.steps = std::move(st.steps);
    result.diag.warnings = std::move(st.warnings);
    for (const auto& c : st.counters) {
        result.diag.lik_evals += c.inner.lik_evals;
        result.diag.support_skips += c.inner.support_skips;
        result.diag.inner_sweeps += c.inner.sweeps;
        result.diag.ensemble_inits += c.inner.ensemble_inits;
        result.diag.pmmh_proposals += c.pmmh_proposals;
        result.diag.pmmh_accepts += c.pmmh_accepts;
        result.diag.pmmh_support_rejects += c.pmmh_support_rejects;
    }
    return result;
}

}  // namespace

void SMC2Config::validate() const {
    if (outer_particles < 2) throw config_error("SMC2Config: J must be >= 2");
    if (inner_particles < 2) throw config_error("SMC2Config: M must be >= 2");
    if (!(eta > 0.0 && eta < 1.0)) throw config_error("SMC2Config: eta must lie in (0,1)");
    if (!(delta > 0.0)) throw config_error("SMC2Config: delta must be positive");
    if (max_mcmc_steps < 1) throw config_error("SMC2Config: max_mcmc_steps must be >= 1");
    if (resampling != "systematic") {
        throw config_error("SMC2Config: unknown resampling method " + resampling);
    }
    prior.validate();
}

InnerBlockModel expert_block_model(const std::vector<DataSubset>* subsets,
                                   const PriorSpec* prior) {
    InnerBlockModel model;
    model.num_blocks = prior->K;
    model.sample_prior = [prior](int, RngStream& rng) {
        return sample_expert_prior(*prior, rng).to_vector();
    };
    model.log_prior = [prior](int, const Eigen::VectorXd& v) {
        return log_expert_prior_density(ExpertParams::from_vector(v), *prior);
    };
    model.log_lik = [subsets](int block, const Eigen::VectorXd& v) {
        return log_marginal_likelihood((*subsets)[block], ExpertParams::from_vector(v));
    };
    return model;
}

double adapt_kappa(double kappa, const std::vector<OuterParticle>& particles,
                   std::span<const double> weights, double eta,
                   std::vector<std::string>* warnings) {
    const int J = static_cast<int>(particles.size());
    const int M = particles[0].inner.size();
    std::vector<std::vector<double>> member_ll(J, std::vector<double>(M));
    for (int j = 0; j < J; ++j) {
        for (int m = 0; m < M; ++m) member_ll[j][m] = particles[j].inner.member_log_lik(m);
    }
    const double ess0 = ess(weights);
    const double log_m = std::log(static_cast<double>(M));

    auto ratio_ok = [&](double kp) {
        std::vector<double> lw(J);
        std::vector<double> tmp(M);
        for (int j = 0; j < J; ++j) {
            for (int m = 0; m < M; ++m) tmp[m] = (kp - kappa) * member_ll[j][m];
            lw[j] = std::log(weights[j]) + log_sum_exp(tmp) - log_m;
        }
        const std::vector<double> wn = normalize_log_weights(lw);
        return ess(wn) / ess0 >= eta;
    };

    if (ratio_ok(1.0)) return 1.0;
    double lo = kappa;
    double hi = 1.0;
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        if (ratio_ok(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (lo <= kappa) {
        if (warnings) {
            warnings->push_back("adapt_kappa: ESS target violated by an infinitesimal step");
        }
        return hi;
    }
    return lo;
}

void reweight_outer(std::vector<OuterParticle>& particles, double kappa_prev,
                    double kappa_new) {
    if (!(kappa_new > kappa_prev)) {
        throw config_error("reweight_outer: kappa must strictly increase");
    }
    const double dk = kappa_new - kappa_prev;
    for (auto& p : particles) {
        const int M = p.inner.size();
        std::vector<double> tmp(M);
        for (int m = 0; m < M; ++m) tmp[m] = dk * p.inner.member_log_lik(m);
        const double inc = log_sum_exp(tmp) - std::log(static_cast<double>(M));
        p.log_weight += inc;
        p.log_zhat += inc;
    }
}

std::vector<double> outer_weights(const std::vector<OuterParticle>& particles) {
    std::vector<double> lw(particles.size());
    for (std::size_t j = 0; j < particles.size(); ++j) lw[j] = particles[j].log_weight;
    return normalize_log_weights(lw);
}

void resample_outer(std::vector<OuterParticle>& particles,
                    std::span<const double> weights, RngStream& rng) {
    const std::vector<std::size_t> anc = systematic_resample(weights, rng);
    std::vector<OuterParticle> next;
    next.reserve(particles.size());
    for (std::size_t a : anc) next.push_back(particles[a]);
    for (auto& p : next) p.log_weight = 0.0;
    particles = std::move(next);
}

PmmhPoolStats pmmh_pool_stats(const std::vector<OuterParticle>& particles,
                              std::span<const double> weights,
                              const SMC2Config& config) {
    std::vector<Eigen::VectorXd> ms;
    std::vector<Eigen::VectorXd> ln;
    ms.reserve(particles.size());
    ln.reserve(particles.size());
    for (const auto& p : particles) {
        ms.push_back(flatten_mu_sigma(p.psi));
        ln.push_back(flatten_log_nu(p.psi));
    }
    PmmhPoolStats pool;
    pool.chol_mu_sigma = weighted_cov_chol(ms, weights, config.proposal_scale, 1e-8);
    pool.chol_log_nu = weighted_cov_chol(ln, weights, config.proposal_scale, 1e-8);
    return pool;
}

bool pmmh_mutate(OuterParticle& particle, const PmmhPoolStats& pool,
                 const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                 std::span<const double> kappas, const SMC2Config& config,
                 RngStream& rng, SlotCounters& counters,
                 std::vector<std::string>* warnings) {
    ++counters.pmmh_proposals;
    const int K = config.prior.K;
    const int D = config.prior.D;

    // random walk on (mu, sigma)
    Eigen::VectorXd z(2 * D * K);
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
    const Eigen::VectorXd step = pool.chol_mu_sigma * z;
    GatingParams psi_star = particle.psi;
    int idx = 0;
    bool support_ok = true;
    for (int k = 0; k < K; ++k) {
        for (int d = 0; d < D; ++d) psi_star.comps[k].mean[d] += step[idx++];
        for (int d = 0; d < D; ++d) {
            psi_star.comps[k].sd[d] += step[idx++];
            if (!(psi_star.comps[k].sd[d] > 0.0)) support_ok = false;
        }
    }
    // random walk on log nu
    Eigen::VectorXd z2(K);
    for (int k = 0; k < K; ++k) z2[k] = rng.normal();
    const Eigen::VectorXd step_nu = pool.chol_log_nu * z2;
    double jacobian = 0.0;
    for (int k = 0; k < K; ++k) {
        psi_star.comps[k].log_nu += step_nu[k];
        jacobian += step_nu[k];
    }
    if (!support_ok) {
        // negative sigma proposal: rejected before any likelihood work
        ++counters.pmmh_support_rejects;
        return false;
    }

    Allocation alloc_star = sample_allocation(inputs, psi_star, rng);
    std::vector<DataSubset> subsets_star = partition_data(inputs, outputs, alloc_star, K);
    const InnerBlockModel model = expert_block_model(&subsets_star, &config.prior);

    double log_z_star = 0.0;
    InnerEnsemble ens_star;
    try {
        ens_star = run_inner_schedule(model, config.inner_particles, kappas,
                                      mutation_config(config), rng, log_z_star,
                                      &counters.inner);
    } catch (const numerical_error& e) {
        if (warnings) {
            warnings->push_back(std::string("pmmh proposal likelihood failed: ") + e.what());
        }
        return false;
    }

    // Partition-prior proposal cancels the p(C | X, Psi) terms; the log-nu
    // walk contributes the product-of-nu Jacobian.
    const double log_accept =
        (log_z_star - particle.log_zhat) +
        (log_gating_prior_density(psi_star, config.prior) -
         log_gating_prior_density(particle.psi, config.prior)) +
        jacobian;
    if (std::log(rng.uniform_pos()) < log_accept) {
        particle.psi = std::move(psi_star);
        particle.alloc = std::move(alloc_star);
        particle.subsets = std::move(subsets_star);
        particle.inner = std::move(ens_star);
        particle.log_zhat = log_z_star;
        ++counters.pmmh_accepts;
        return true;
    }
    return false;
}

PosteriorSample run_smc2(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                         const SMC2Config& config) {
    config.validate();
    if (inputs.rows() != outputs.size()) {
        throw dimension_error("run_smc2: X and Y row counts differ");
    }
    if (inputs.rows() > 0 && inputs.cols() != config.prior.D) {
        throw dimension_error("run_smc2: input dimension does not match prior spec");
    }
    const int J = config.outer_particles;

    LoopState st;
    st.particles.resize(J);
    st.counters.resize(J);
    parallel_for(J, config.workers, [&](std::size_t j) {
        RngStream rng = RngStream::derive(config.seed, {kInitTag, j});
        OuterParticle& p = st.particles[j];
        p.psi = sample_gating_prior(config.prior, rng);
        p.alloc = sample_allocation(inputs, p.psi, rng);
        p.subsets = partition_data(inputs, outputs, p.alloc, config.prior.K);
        const InnerBlockModel model = expert_block_model(&p.subsets, &config.prior);
        p.inner = sample_inner_ensemble(model, config.inner_particles, rng,
                                        &st.counters[j].inner);
        p.log_zhat = 0.0;
        p.log_weight = 0.0;
    });
    return run_loop(inputs, outputs, config, std::move(st));
}

PosteriorSample resume_smc2(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                            const SMC2Config& config, const std::string& checkpoint_file) {
    config.validate();
    Smc2Checkpoint cp = load_checkpoint(checkpoint_file);
    if (cp.seed != config.seed) {
        throw config_error("resume_smc2: checkpoint seed does not match config seed");
    }
    return run_loop(inputs, outputs, config,
                    state_from_checkpoint(std::move(cp), inputs, outputs, config.prior.K));
}

std::vector<ExpertParams> draw_member(const OuterParticle& particle, RngStream& rng) {
    const std::size_t m = rng.uniform_index(particle.inner.size());
    std::vector<ExpertParams> out;
    out.reserve(particle.inner.members[m].size());
    for (const auto& v : particle.inner.members[m]) {
        out.push_back(ExpertParams::from_vector(v));
    }
    return out;
}

}  // namespace moe
