#ifndef MOE_SMC2_HPP
#define MOE_SMC2_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "moe/gating.hpp"
#include "moe/gp.hpp"
#include "moe/inner_smc.hpp"
#include "moe/rng.hpp"

namespace moe {

struct SMC2Config {
    int outer_particles = 100;  // J
    int inner_particles = 30;   // M
    double eta = 0.9;           // target ESS reduction ratio per tempering step
    double delta = 0.05;        // MCMC stopping threshold (outer and inner)
    int max_mcmc_steps = 10;
    double proposal_scale = 1.0;
    std::uint64_t seed = 0;
    int workers = 1;
    std::string resampling = "systematic";
    PriorSpec prior;
    std::string checkpoint_path;  // empty disables checkpointing

    void validate() const;
};

// One outer particle: allocation, gating parameters, the joint inner ensemble
// over all experts, and the running tempered-marginal-likelihood estimate.
struct OuterParticle {
    Allocation alloc;
    GatingParams psi;
    InnerEnsemble inner;
    std::vector<DataSubset> subsets;  // derived from alloc, rebuilt on change
    double log_zhat = 0.0;
    double log_weight = 0.0;
};

struct TemperRecord {
    int t = 0;
    double kappa = 0.0;
    double ess_pre_resample = 0.0;
    double ess_ratio = 0.0;   // realized ESS reduction at this step
    int outer_sweeps = 0;
    long long inner_sweeps = 0;
};

// Per-particle-slot cost counters; survive resampling (they belong to the
// slot, not the particle state).
struct SlotCounters {
    MutationStats inner;
    long long pmmh_proposals = 0;
    long long pmmh_accepts = 0;
    long long pmmh_support_rejects = 0;
};

struct Smc2Diagnostics {
    std::vector<TemperRecord> steps;
    long long lik_evals = 0;
    long long support_skips = 0;
    long long inner_sweeps = 0;
    long long ensemble_inits = 0;
    long long pmmh_proposals = 0;
    long long pmmh_accepts = 0;
    long long pmmh_support_rejects = 0;
    std::vector<std::string> warnings;
};

struct PosteriorSample {
    std::string method = "smc2";
    std::vector<OuterParticle> particles;  // equally weighted
    std::vector<double> kappa_history;     // kappa_1 .. kappa_T = 1
    Smc2Diagnostics diag;
};

// Block model exposing the K experts of one particle to the inner SMC.
// The subset vector is captured by pointer and must outlive the model.
InnerBlockModel expert_block_model(const std::vector<DataSubset>* subsets,
                                   const PriorSpec* prior);

// Largest kappa' in (kappa, 1] whose reweighting keeps
// ESS(kappa') / ESS(kappa) >= eta, found by bisection to 1e-6.
double adapt_kappa(double kappa, const std::vector<OuterParticle>& particles,
                   std::span<const double> weights, double eta,
                   std::vector<std::string>* warnings = nullptr);

// Adds the tempered log increment to each particle's log-weight and log_zhat.
void reweight_outer(std::vector<OuterParticle>& particles, double kappa_prev,
                    double kappa_new);

std::vector<double> outer_weights(const std::vector<OuterParticle>& particles);

// Systematic resampling of the outer cloud; weights become uniform.
void resample_outer(std::vector<OuterParticle>& particles,
                    std::span<const double> weights, RngStream& rng);

struct PmmhPoolStats {
    Eigen::MatrixXd chol_mu_sigma;  // 2DK x 2DK proposal factor
    Eigen::MatrixXd chol_log_nu;    // K x K proposal factor
};

PmmhPoolStats pmmh_pool_stats(const std::vector<OuterParticle>& particles,
                              std::span<const double> weights,
                              const SMC2Config& config);

// One PMMH sweep on one particle: random-walk proposal on the gating
// parameters, partition proposal from the prior, fresh inner SMC through the
// kappa schedule, pseudo-marginal accept/reject.  Returns true on acceptance.
bool pmmh_mutate(OuterParticle& particle, const PmmhPoolStats& pool,
                 const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                 std::span<const double> kappas, const SMC2Config& config,
                 RngStream& rng, SlotCounters& counters,
                 std::vector<std::string>* warnings = nullptr);

PosteriorSample run_smc2(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                         const SMC2Config& config);

// Continue an interrupted run from a checkpoint written by run_smc2.
PosteriorSample resume_smc2(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                            const SMC2Config& config, const std::string& checkpoint_file);

// Uniformly chosen inner member of each expert (single-Theta estimation).
std::vector<ExpertParams> draw_member(const OuterParticle& particle, RngStream& rng);

}  // namespace moe

#endif
