#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "moe/data.hpp"
#include "moe/errors.hpp"
#include "moe/eval.hpp"
#include "moe/math.hpp"
#include "moe/rng.hpp"

using namespace moe;

namespace {

PosteriorSample sample_from_allocs(const std::vector<Allocation>& allocs,
                                   const std::vector<double>& log_weights) {
    PosteriorSample s;
    for (std::size_t j = 0; j < allocs.size(); ++j) {
        OuterParticle p;
        p.alloc = allocs[j];
        p.log_weight = log_weights[j];
        s.particles.push_back(std::move(p));
    }
    return s;
}

}  // namespace

TEST_CASE("density distance basics") {
    Eigen::MatrixXd a(2, 2);
    a << 1.0, 2.0, 3.0, 4.0;
    auto [l1, l2] = density_distance(a, a);
    CHECK(l1 == 0.0);
    CHECK(l2 == 0.0);

    const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 2);
    std::tie(l1, l2) = density_distance(a, zero);
    CHECK(l1 == doctest::Approx(10.0));
    CHECK(l2 == doctest::Approx(std::sqrt(30.0)));

    Eigen::MatrixXd b = a;
    b(0, 0) -= 1.0;
    b(0, 1) += 1.0;
    b(1, 0) -= 2.0;
    std::tie(l1, l2) = density_distance(a, b);
    CHECK(l1 == doctest::Approx(4.0));
    CHECK(l2 == doctest::Approx(std::sqrt(6.0)));

    CHECK_THROWS_AS(density_distance(a, Eigen::MatrixXd::Zero(3, 2)), dimension_error);
}

TEST_CASE("density distance is a metric on random triples") {
    RngStream rng = RngStream::derive(1, {0});
    for (int rep = 0; rep < 30; ++rep) {
        Eigen::MatrixXd a(3, 4);
        Eigen::MatrixXd b(3, 4);
        Eigen::MatrixXd c(3, 4);
        for (Eigen::Index i = 0; i < 3; ++i) {
            for (Eigen::Index j = 0; j < 4; ++j) {
                a(i, j) = rng.uniform();
                b(i, j) = rng.uniform();
                c(i, j) = rng.uniform();
            }
        }
        const auto [ab1, ab2] = density_distance(a, b);
        const auto [ba1, ba2] = density_distance(b, a);
        const auto [ac1, ac2] = density_distance(a, c);
        const auto [cb1, cb2] = density_distance(c, b);
        CHECK(ab1 == doctest::Approx(ba1).epsilon(1e-12));
        CHECK(ab2 == doctest::Approx(ba2).epsilon(1e-12));
        CHECK(ab1 <= ac1 + cb1 + 1e-9);
        CHECK(ab2 <= ac2 + cb2 + 1e-9);
    }
}

TEST_CASE("median distance") {
    Eigen::VectorXd a(4);
    a << 1.0, 2.0, 3.0, 4.0;
    CHECK(median_distance(a, a) == 0.0);
    const Eigen::VectorXd b = a.array() + 0.5;
    CHECK(median_distance(a, b) == doctest::Approx(2.0));
    RngStream rng = RngStream::derive(2, {0});
    Eigen::VectorXd u(6);
    Eigen::VectorXd v(6);
    double direct = 0.0;
    for (int i = 0; i < 6; ++i) {
        u[i] = rng.normal();
        v[i] = rng.normal();
        direct += std::abs(u[i] - v[i]);
    }
    CHECK(median_distance(u, v) == doctest::Approx(direct).epsilon(1e-12));
    CHECK_THROWS_AS(median_distance(a, u), dimension_error);
}

TEST_CASE("single-particle similarity matrix is the 0/1 partition matrix") {
    const PosteriorSample s = sample_from_allocs({{0, 0, 1, 1, 2}}, {0.0});
    const Eigen::MatrixXd m = psm(s);
    REQUIRE(m.rows() == 5);
    CHECK(m(0, 1) == 1.0);
    CHECK(m(0, 2) == 0.0);
    CHECK(m(2, 3) == 1.0);
    CHECK(m(3, 4) == 0.0);
    for (int i = 0; i < 5; ++i) CHECK(m(i, i) == 1.0);
}

TEST_CASE("two equally weighted particles average their indicators") {
    const PosteriorSample s =
        sample_from_allocs({{0, 0, 1, 1}, {0, 1, 0, 1}}, {0.0, 0.0});
    const Eigen::MatrixXd m = psm(s);
    CHECK(m(0, 1) == doctest::Approx(0.5));
    CHECK(m(0, 2) == doctest::Approx(0.5));
    CHECK(m(0, 3) == doctest::Approx(0.0));
    CHECK(m(1, 3) == doctest::Approx(0.5));
}

TEST_CASE("similarity matrix properties and relabeling invariance") {
    RngStream rng = RngStream::derive(3, {0});
    std::vector<Allocation> allocs;
    std::vector<double> lw;
    for (int j = 0; j < 6; ++j) {
        Allocation a(8);
        for (int& c : a) c = static_cast<int>(rng.uniform_index(3));
        allocs.push_back(a);
        lw.push_back(rng.normal());
    }
    const PosteriorSample s = sample_from_allocs(allocs, lw);
    const Eigen::MatrixXd m = psm(s);
    CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(m.minCoeff() >= 0.0);
    CHECK(m.maxCoeff() <= 1.0 + 1e-12);
    for (int i = 0; i < 8; ++i) CHECK(m(i, i) == 1.0);

    std::vector<Allocation> relabeled = allocs;
    const int perm[3] = {2, 0, 1};
    for (auto& a : relabeled) {
        for (int& c : a) c = perm[c];
    }
    const Eigen::MatrixXd m2 = psm(sample_from_allocs(relabeled, lw));
    CHECK((m - m2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("expert count histogram") {
    const PosteriorSample one = sample_from_allocs({{0, 0, 0, 0}}, {0.0});
    const Eigen::VectorXd h1 = expert_count_posterior(one, 4);
    CHECK(h1[0] == doctest::Approx(1.0));
    CHECK(h1.sum() == doctest::Approx(1.0));

    const PosteriorSample mixed = sample_from_allocs({{0, 3, 5, 3}}, {0.0});
    const Eigen::VectorXd h2 = expert_count_posterior(mixed, 7);
    CHECK(h2[2] == doctest::Approx(1.0));  // three distinct labels

    const PosteriorSample two =
        sample_from_allocs({{0, 0, 0}, {0, 1, 2}}, {std::log(0.25), std::log(0.75)});
    const Eigen::VectorXd h3 = expert_count_posterior(two, 3);
    CHECK(h3[0] == doctest::Approx(0.25));
    CHECK(h3[2] == doctest::Approx(0.75));
    CHECK(h3.sum() == doctest::Approx(1.0));
}

TEST_CASE("ground truth density for the smooth benchmark") {
    const NormalizationRecord norm = NormalizationRecord::identity(1);
    const Eigen::MatrixXd xg = Eigen::MatrixXd::Constant(1, 1, 0.5);
    const Eigen::VectorXd yg = Eigen::VectorXd::LinSpaced(301, -2.0, 1.0);
    const GroundTruthDensity gt = ground_truth_density("synth1", xg, yg, norm);
    const double f = synth1_mean(0.5);
    CHECK(gt.median[0] == doctest::Approx(f).epsilon(1e-12));
    for (Eigen::Index h = 0; h < yg.size(); ++h) {
        const double expect = std::exp(log_normal_pdf(yg[h], f, 0.0225));
        CHECK(gt.density(0, h) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("ground truth density maps through normalization with unit mass") {
    // synth1's noise sd is wide relative to the grid spacing, so trapezoidal
    // mass is reliable; synth2's spikes are checked through the median only
    const Dataset d = normalize(gen_synth1(400, 11));
    const Eigen::MatrixXd xg = default_x_grid(21);
    const Eigen::VectorXd yg = default_y_grid(d.Y, 400);
    const GroundTruthDensity gt = ground_truth_density("synth1", xg, yg, d.norm);
    for (Eigen::Index g = 0; g < xg.rows(); ++g) {
        double mass = 0.0;
        for (Eigen::Index h = 1; h < yg.size(); ++h) {
            mass += 0.5 * (gt.density(g, h) + gt.density(g, h - 1)) * (yg[h] - yg[h - 1]);
        }
        CHECK(mass >= 0.97);
        CHECK(mass <= 1.0 + 1e-6);
    }

    const Dataset d2 = normalize(gen_synth2(400, 11));
    const Eigen::VectorXd yg2 = default_y_grid(d2.Y, 400);
    // the x = 0.4 regime in raw units is a narrow Gaussian at 10
    const double x_norm = (0.4 - d2.norm.x_offset[0]) / d2.norm.x_scale[0];
    Eigen::MatrixXd xq(1, 1);
    xq << x_norm;
    const GroundTruthDensity at = ground_truth_density("synth2", xq, yg2, d2.norm);
    CHECK(at.median[0] == doctest::Approx(d2.norm.norm_y(10.0)).epsilon(1e-12));
}

TEST_CASE("unknown generator tag is rejected") {
    const NormalizationRecord norm = NormalizationRecord::identity(1);
    CHECK_THROWS_AS(
        ground_truth_density("synth9", default_x_grid(3), Eigen::VectorXd::LinSpaced(3, 0, 1), norm),
        config_error);
}
