#ifndef MOE_INNER_SMC_HPP
#define MOE_INNER_SMC_HPP

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "moe/rng.hpp"

namespace moe {

// Block-structured target for one inner SMC: each member carries one
// parameter vector per block (one block per expert), the likelihood and
// prior factorize across blocks.  Hooks are plain std::functions so the same
// machinery drives both the GP experts and enumerable test targets.
struct InnerBlockModel {
    int num_blocks = 1;
    std::function<Eigen::VectorXd(int block, RngStream&)> sample_prior;
    std::function<double(int block, const Eigen::VectorXd&)> log_prior;
    std::function<double(int block, const Eigen::VectorXd&)> log_lik;

    // Optional independence proposal for the mutation kernel (used by targets
    // where a random walk cannot move, e.g. discrete supports).  When unset,
    // mutation is a random walk with the ensemble's empirical covariance.
    std::function<Eigen::VectorXd(int block, RngStream&)> indep_proposal;
    std::function<double(int block, const Eigen::VectorXd&)> indep_log_density;
};

// M joint members; member m holds one parameter vector and one cached
// log-likelihood per block.  Weights are uniform between steps (the ensemble
// is resampled inside every step).
struct InnerEnsemble {
    std::vector<std::vector<Eigen::VectorXd>> members;  // [m][block]
    std::vector<std::vector<double>> block_ll;          // [m][block]

    int size() const { return static_cast<int>(members.size()); }

    double member_log_lik(int m) const {
        double s = 0.0;
        for (double v : block_ll[m]) s += v;
        return s;
    }
};

struct MutationConfig {
    double delta = 0.05;      // relative-decrease stopping threshold
    int max_sweeps = 10;
    double proposal_scale = 1.0;
    double cov_floor = 1e-8;  // diagonal fallback floor for singular covariances
};

struct MutationStats {
    long long sweeps = 0;
    long long proposals = 0;
    long long accepts = 0;
    long long support_skips = 0;   // proposals rejected on support, likelihood not evaluated
    long long lik_evals = 0;
    long long ensemble_inits = 0;  // prior initializations (each costs blocks x M evals)
};

// Adaptive MCMC-step criterion: stop once the relative change of the mean
// displacement d^(n) from the sweep-0 state falls below delta, or n reaches
// the cap.  d trace has one entry per completed sweep; zero previous
// distance means "keep going".
bool mcmc_stop_rule(std::span<const double> d_trace, double delta, int cap);

// Draw a fresh prior ensemble and fill the likelihood cache.
InnerEnsemble sample_inner_ensemble(const InnerBlockModel& model, int m_particles,
                                    RngStream& rng, MutationStats* stats = nullptr);

// One tempering step: returns the unbiased log increment
// log( (1/M) sum_m exp((kappa_new - kappa_prev) * l_m) ), then resamples the
// joint members systematically by the tempered weights and mutates each block
// with adaptive Metropolis sweeps targeting prior * likelihood^kappa_new.
double inner_smc_step(InnerEnsemble& ensemble, const InnerBlockModel& model,
                      double kappa_prev, double kappa_new, const MutationConfig& cfg,
                      RngStream& rng, MutationStats* stats = nullptr);

// Fresh inner SMC from the prior through a whole kappa schedule; returns the
// final ensemble and accumulates the log normalizing estimate into log_zhat.
InnerEnsemble run_inner_schedule(const InnerBlockModel& model, int m_particles,
                                 std::span<const double> kappas, const MutationConfig& cfg,
                                 RngStream& rng, double& log_zhat,
                                 MutationStats* stats = nullptr);

}  // namespace moe

#endif
