#include "moe/inner_smc.hpp"

#include <cmath>

#include "moe/errors.hpp"
#include "moe/math.hpp"
#include "moe/resample.hpp"

namespace moe {

namespace {

// Empirical covariance Cholesky factor of one block across members, with the
// diagonal fallback when the factorization fails.
Eigen::MatrixXd block_proposal_chol(const InnerEnsemble& ens, int block,
                                    const MutationConfig& cfg) {
    const int m_count = ens.size();
    const Eigen::Index dim = ens.members[0][block].size();
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
    for (int m = 0; m < m_count; ++m) mean += ens.members[m][block];
    mean /= m_count;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
    for (int m = 0; m < m_count; ++m) {
        const Eigen::VectorXd d = ens.members[m][block] - mean;
        cov += d * d.transpose();
    }
    cov /= m_count;
    cov *= cfg.proposal_scale * cfg.proposal_scale;
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success && cov.diagonal().minCoeff() > 0.0) {
        return llt.matrixL();
    }
    Eigen::VectorXd diag = cov.diagonal().array() + cfg.cov_floor;
    return diag.array().sqrt().matrix().asDiagonal();
}

void mutate_sweeps(InnerEnsemble& ens, const InnerBlockModel& model, double kappa,
                   const MutationConfig& cfg, RngStream& rng, MutationStats* stats) {
    const int m_count = ens.size();
    const int blocks = model.num_blocks;
    const bool indep = static_cast<bool>(model.indep_proposal);

    // reference state for the displacement metric
    std::vector<std::vector<Eigen::VectorXd>> ref = ens.members;
    std::vector<double> d_trace;

    std::vector<double> log_prior_cur(static_cast<std::size_t>(m_count) * blocks);
    for (int m = 0; m < m_count; ++m) {
        for (int b = 0; b < blocks; ++b) {
            log_prior_cur[m * blocks + b] = model.log_prior(b, ens.members[m][b]);
        }
    }

    for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
        std::vector<Eigen::MatrixXd> chol;
        if (!indep) {
            chol.reserve(blocks);
            for (int b = 0; b < blocks; ++b) chol.push_back(block_proposal_chol(ens, b, cfg));
        }
        for (int m = 0; m < m_count; ++m) {
            for (int b = 0; b < blocks; ++b) {
                Eigen::VectorXd prop;
                if (indep) {
                    prop = model.indep_proposal(b, rng);
                } else {
                    Eigen::VectorXd z(ens.members[m][b].size());
                    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
                    prop = ens.members[m][b] + chol[b] * z;
                }
                if (stats) ++stats->proposals;
                const double lp_prop = model.log_prior(b, prop);
                if (lp_prop == kNegInf) {
                    if (stats) ++stats->support_skips;
                    continue;
                }
                const double ll_prop = model.log_lik(b, prop);
                if (stats) ++stats->lik_evals;
                double log_accept = lp_prop + kappa * ll_prop - log_prior_cur[m * blocks + b]
                                    - kappa * ens.block_ll[m][b];
                if (indep) {
                    log_accept += model.indep_log_density(b, ens.members[m][b])
                                  - model.indep_log_density(b, prop);
                }
                const double u = rng.uniform_pos();
                if (std::log(u) < log_accept) {
                    ens.members[m][b] = std::move(prop);
                    ens.block_ll[m][b] = ll_prop;
                    log_prior_cur[m * blocks + b] = lp_prop;
                    if (stats) ++stats->accepts;
                }
            }
        }
        if (stats) ++stats->sweeps;

        double d = 0.0;
        for (int m = 0; m < m_count; ++m) {
            double sq = 0.0;
            for (int b = 0; b < blocks; ++b) {
                sq += (ens.members[m][b] - ref[m][b]).squaredNorm();
            }
            d += std::sqrt(sq);
        }
        d /= m_count;
        d_trace.push_back(d);
        if (mcmc_stop_rule(d_trace, cfg.delta, cfg.max_sweeps)) break;
    }
}

}  // namespace

bool mcmc_stop_rule(std::span<const double> d_trace, double delta, int cap) {
    const int n = static_cast<int>(d_trace.size());
    if (n < 1) return false;
    if (n >= cap) return true;
    if (n < 2) return false;
    const double prev = d_trace[n - 2];
    if (prev == 0.0) return false;  // nothing moved yet, keep going
    return std::abs(d_trace[n - 1] - prev) / prev < delta;
}

InnerEnsemble sample_inner_ensemble(const InnerBlockModel& model, int m_particles,
                                    RngStream& rng, MutationStats* stats) {
    InnerEnsemble ens;
    ens.members.resize(m_particles);
    ens.block_ll.resize(m_particles);
    for (int m = 0; m < m_particles; ++m) {
        ens.members[m].resize(model.num_blocks);
        ens.block_ll[m].resize(model.num_blocks);
        for (int b = 0; b < model.num_blocks; ++b) {
            ens.members[m][b] = model.sample_prior(b, rng);
            ens.block_ll[m][b] = model.log_lik(b, ens.members[m][b]);
            if (stats) ++stats->lik_evals;
        }
    }
    if (stats) ++stats->ensemble_inits;
    return ens;
}

double inner_smc_step(InnerEnsemble& ens, const InnerBlockModel& model, double kappa_prev,
                      double kappa_new, const MutationConfig& cfg, RngStream& rng,
                      MutationStats* stats) {
    if (!(kappa_new > kappa_prev)) {
        throw config_error("inner_smc_step: kappa must strictly increase");
    }
    const int m_count = ens.size();
    const double dk = kappa_new - kappa_prev;
    std::vector<double> logw(m_count);
    for (int m = 0; m < m_count; ++m) logw[m] = dk * ens.member_log_lik(m);
    const double increment = log_sum_exp(logw) - std::log(static_cast<double>(m_count));

    const std::vector<double> w = normalize_log_weights(logw);
    const std::vector<std::size_t> anc = systematic_resample(w, rng);
    std::vector<std::vector<Eigen::VectorXd>> new_members(m_count);
    std::vector<std::vector<double>> new_ll(m_count);
    for (int m = 0; m < m_count; ++m) {
        new_members[m] = ens.members[anc[m]];
        new_ll[m] = ens.block_ll[anc[m]];
    }
    ens.members = std::move(new_members);
    ens.block_ll = std::move(new_ll);

    mutate_sweeps(ens, model, kappa_new, cfg, rng, stats);
    return increment;
}

InnerEnsemble run_inner_schedule(const InnerBlockModel& model, int m_particles,
                                 std::span<const double> kappas, const MutationConfig& cfg,
                                 RngStream& rng, double& log_zhat, MutationStats* stats) {
    InnerEnsemble ens = sample_inner_ensemble(model, m_particles, rng, stats);
    log_zhat = 0.0;
    double prev = 0.0;
    for (double kappa : kappas) {
        log_zhat += inner_smc_step(ens, model, prev, kappa, cfg, rng, stats);
        prev = kappa;
    }
    return ens;
}

}  // namespace moe
