#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "moe/data.hpp"
#include "moe/errors.hpp"
#include "moe/math.hpp"
#include "moe/resample.hpp"
#include "moe/serialize.hpp"
#include "moe/smc2.hpp"

using namespace moe;

namespace {

OuterParticle particle_with_lls(std::initializer_list<double> lls) {
    OuterParticle p;
    for (double ll : lls) {
        p.inner.members.push_back({Eigen::VectorXd::Zero(1)});
        p.inner.block_ll.push_back({ll});
    }
    return p;
}

double ess_ratio_at(double kappa_new, const std::vector<OuterParticle>& particles,
                    const std::vector<double>& weights) {
    std::vector<double> lw(particles.size());
    for (std::size_t j = 0; j < particles.size(); ++j) {
        std::vector<double> tmp(particles[j].inner.size());
        for (int m = 0; m < particles[j].inner.size(); ++m) {
            tmp[static_cast<std::size_t>(m)] = kappa_new * particles[j].inner.member_log_lik(m);
        }
        lw[j] = std::log(weights[j]) + log_sum_exp(tmp) -
                std::log(static_cast<double>(particles[j].inner.size()));
    }
    const auto w = normalize_log_weights(lw);
    return ess(w) / ess(weights);
}

SMC2Config tiny_config(int K, std::uint64_t seed, double y_max) {
    SMC2Config cfg;
    cfg.outer_particles = 8;
    cfg.inner_particles = 4;
    cfg.eta = 0.8;
    cfg.max_mcmc_steps = 2;
    cfg.seed = seed;
    cfg.prior = PriorSpec::standard(K, 1.0, 1, y_max);
    return cfg;
}

}  // namespace

TEST_CASE("config validation") {
    SMC2Config cfg = tiny_config(2, 1, 1.0);
    CHECK_NOTHROW(cfg.validate());
    cfg.outer_particles = 1;
    CHECK_THROWS_AS(cfg.validate(), config_error);
    cfg = tiny_config(2, 1, 1.0);
    cfg.eta = 1.0;
    CHECK_THROWS_AS(cfg.validate(), config_error);
    cfg = tiny_config(2, 1, 1.0);
    cfg.resampling = "multinomial";
    CHECK_THROWS_AS(cfg.validate(), config_error);
}

TEST_CASE("adapt_kappa returns 1 when the target holds at full tempering") {
    std::vector<OuterParticle> particles;
    for (int j = 0; j < 4; ++j) particles.push_back(particle_with_lls({2.0, 2.0}));
    const std::vector<double> weights(4, 0.25);
    CHECK(adapt_kappa(0.0, particles, weights, 0.9, nullptr) == 1.0);
}

TEST_CASE("adapt_kappa matches a grid-search oracle") {
    std::vector<OuterParticle> particles;
    particles.push_back(particle_with_lls({-3.0, 1.0}));
    particles.push_back(particle_with_lls({4.0, 2.0}));
    particles.push_back(particle_with_lls({-1.0, -2.0}));
    particles.push_back(particle_with_lls({0.5, 0.0}));
    const std::vector<double> weights(4, 0.25);
    const double eta = 0.9;
    const double found = adapt_kappa(0.0, particles, weights, eta, nullptr);
    REQUIRE(found > 0.0);
    REQUIRE(found < 1.0);

    double oracle = 0.0;
    for (double k = 1e-4; k <= 1.0; k += 1e-4) {
        if (ess_ratio_at(k, particles, weights) >= eta) oracle = k;
    }
    CHECK(std::abs(found - oracle) < 2e-4);
    CHECK(ess_ratio_at(found, particles, weights) >= eta);
}

TEST_CASE("reweight_outer adds the tempered increment to weight and estimate") {
    std::vector<OuterParticle> particles;
    particles.push_back(particle_with_lls({1.0, 3.0}));
    particles[0].log_weight = 0.7;
    particles[0].log_zhat = 0.2;
    reweight_outer(particles, 0.2, 0.5);
    const std::vector<double> terms = {0.3 * 1.0, 0.3 * 3.0};
    const double inc = log_sum_exp(terms) - std::log(2.0);
    CHECK(particles[0].log_weight == doctest::Approx(0.7 + inc).epsilon(1e-12));
    CHECK(particles[0].log_zhat == doctest::Approx(0.2 + inc).epsilon(1e-12));
    CHECK_THROWS_AS(reweight_outer(particles, 0.5, 0.5), config_error);
}

TEST_CASE("outer resampling copies ancestors and resets weights") {
    std::vector<OuterParticle> particles;
    particles.push_back(particle_with_lls({1.0}));
    particles.push_back(particle_with_lls({9.0}));
    particles[0].log_weight = 0.0;
    particles[1].log_weight = -500.0;
    const std::vector<double> w = outer_weights(particles);
    CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-12));
    RngStream rng = RngStream::derive(1, {0});
    resample_outer(particles, w, rng);
    REQUIRE(particles.size() == 2);
    for (const auto& p : particles) {
        CHECK(p.inner.block_ll[0][0] == 1.0);
        CHECK(p.log_weight == 0.0);
    }
}

TEST_CASE("proposal pool scales linearly with the configured factor") {
    SMC2Config cfg = tiny_config(2, 1, 1.0);
    std::vector<OuterParticle> particles(8);  // enough for a full-rank pool covariance
    RngStream rng = RngStream::derive(5, {0});
    for (auto& p : particles) p.psi = sample_gating_prior(cfg.prior, rng);
    const std::vector<double> weights(8, 1.0 / 8.0);
    const PmmhPoolStats a = pmmh_pool_stats(particles, weights, cfg);
    cfg.proposal_scale = 2.0;
    const PmmhPoolStats b = pmmh_pool_stats(particles, weights, cfg);
    REQUIRE(a.chol_mu_sigma.rows() == 4);  // 2DK with D = 1, K = 2
    REQUIRE(a.chol_log_nu.rows() == 2);
    const double tol = 1e-9 * (1.0 + a.chol_mu_sigma.norm());
    CHECK((b.chol_mu_sigma - 2.0 * a.chol_mu_sigma).norm() < tol);
    CHECK((b.chol_log_nu - 2.0 * a.chol_log_nu).norm() < tol);
}

TEST_CASE("end-to-end run satisfies the tempering and accounting contracts") {
    const Dataset data = normalize(gen_synth1(25, 11));
    SMC2Config cfg = tiny_config(2, 5, data.Y.maxCoeff());
    const PosteriorSample sample = run_smc2(data.X, data.Y, cfg);

    REQUIRE_FALSE(sample.kappa_history.empty());
    CHECK(sample.kappa_history.back() == 1.0);
    double prev = 0.0;
    for (double k : sample.kappa_history) {
        CHECK(k > prev);
        prev = k;
    }
    REQUIRE(sample.particles.size() == 8);
    for (const auto& p : sample.particles) {
        CHECK(p.alloc.size() == 25);
        CHECK(p.inner.size() == 4);
        CHECK(std::isfinite(p.log_zhat));
    }
    if (sample.diag.warnings.empty()) {
        for (const auto& s : sample.diag.steps) {
            CHECK(s.ess_ratio >= cfg.eta - 1e-9);
            CHECK(s.ess_ratio <= 1.0 + 1e-9);
        }
    }
    // every likelihood evaluation or support skip stems from an ensemble
    // initialization or a mutation sweep over K blocks and M members
    const long long expected =
        2LL * 4LL * (sample.diag.ensemble_inits + sample.diag.inner_sweeps);
    CHECK(sample.diag.lik_evals + sample.diag.support_skips == expected);
    CHECK(sample.diag.pmmh_proposals > 0);
}

TEST_CASE("runs are deterministic and worker-count invariant") {
    const Dataset data = normalize(gen_synth1(20, 3));
    SMC2Config cfg = tiny_config(2, 9, data.Y.maxCoeff());
    const PosteriorSample a = run_smc2(data.X, data.Y, cfg);
    const PosteriorSample b = run_smc2(data.X, data.Y, cfg);
    cfg.workers = 4;
    const PosteriorSample c = run_smc2(data.X, data.Y, cfg);
    REQUIRE(a.particles.size() == b.particles.size());
    REQUIRE(a.particles.size() == c.particles.size());
    CHECK(a.kappa_history == b.kappa_history);
    CHECK(a.kappa_history == c.kappa_history);
    for (std::size_t j = 0; j < a.particles.size(); ++j) {
        CHECK(a.particles[j].log_zhat == b.particles[j].log_zhat);
        CHECK(a.particles[j].log_zhat == c.particles[j].log_zhat);
        CHECK(a.particles[j].alloc == c.particles[j].alloc);
        CHECK(a.particles[j].psi.comps[0].log_nu == c.particles[j].psi.comps[0].log_nu);
    }
}

TEST_CASE("checkpointing round-trips and resume validates the seed") {
    const Dataset data = normalize(gen_synth1(15, 21));
    SMC2Config cfg = tiny_config(2, 13, data.Y.maxCoeff());
    const auto dir = std::filesystem::temp_directory_path() / "moe_smc2_test";
    std::filesystem::create_directories(dir);
    cfg.checkpoint_path = (dir / "cp.json").string();
    const PosteriorSample a = run_smc2(data.X, data.Y, cfg);
    REQUIRE(std::filesystem::exists(cfg.checkpoint_path));

    // the final checkpoint has kappa = 1, so resuming returns immediately
    const PosteriorSample b = resume_smc2(data.X, data.Y, cfg, cfg.checkpoint_path);
    REQUIRE(b.particles.size() == a.particles.size());
    for (std::size_t j = 0; j < a.particles.size(); ++j) {
        CHECK(a.particles[j].log_zhat == b.particles[j].log_zhat);
        CHECK(a.particles[j].alloc == b.particles[j].alloc);
    }
    CHECK(a.kappa_history == b.kappa_history);

    SMC2Config other = cfg;
    other.seed = 999;
    CHECK_THROWS_AS(resume_smc2(data.X, data.Y, other, cfg.checkpoint_path), config_error);
    std::filesystem::remove_all(dir);
}

TEST_CASE("draw_member extracts one expert parameter set per block") {
    const Dataset data = normalize(gen_synth1(12, 2));
    SMC2Config cfg = tiny_config(3, 17, data.Y.maxCoeff());
    const PosteriorSample sample = run_smc2(data.X, data.Y, cfg);
    RngStream rng = RngStream::derive(0, {42});
    const auto thetas = draw_member(sample.particles[0], rng);
    REQUIRE(thetas.size() == 3);
    for (const auto& t : thetas) {
        CHECK(t.dim() == 1);
        CHECK(t.in_support());
    }
}

TEST_CASE("input validation") {
    const Dataset data = normalize(gen_synth1(10, 2));
    SMC2Config cfg = tiny_config(2, 1, 1.0);
    Eigen::VectorXd short_y = data.Y.head(5);
    CHECK_THROWS_AS(run_smc2(data.X, short_y, cfg), dimension_error);
}
