#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "moe/errors.hpp"
#include "moe/resample.hpp"
#include "moe/rng.hpp"

using namespace moe;

TEST_CASE("ess of uniform weights is n") {
    const std::vector<double> w(10, 0.1);
    CHECK(ess(w) == doctest::Approx(10.0));
}

TEST_CASE("ess of a point mass is 1") {
    const std::vector<double> w = {1.0, 0.0, 0.0, 0.0};
    CHECK(ess(w) == doctest::Approx(1.0));
}

TEST_CASE("ess rejects bad weights") {
    CHECK_THROWS_AS(ess(std::vector<double>{0.0, 0.0}), degenerate_weights_error);
    CHECK_THROWS_AS(ess(std::vector<double>{0.7, -0.1, 0.4}), degenerate_weights_error);
    CHECK_THROWS_AS(ess(std::vector<double>{0.3, 0.3}), degenerate_weights_error);
}

TEST_CASE("normalize_log_weights is shift invariant and normalized") {
    const std::vector<double> lw = {-1.0, -2.0, -3.0};
    const std::vector<double> lw_shift = {99.0, 98.0, 97.0};
    const auto a = normalize_log_weights(lw);
    const auto b = normalize_log_weights(lw_shift);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
        sum += a[i];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a[0] / a[1] == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
}

TEST_CASE("normalize_log_weights rejects all -inf") {
    const double ninf = -std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(normalize_log_weights(std::vector<double>{ninf, ninf}),
                    degenerate_weights_error);
}

TEST_CASE("systematic resampling of (0.75, 0.25) has deterministic counts per offset") {
    // grid points (u + i) / 2: the first always lands on ancestor 0, the
    // second crosses the 0.75 boundary exactly at u = 0.5
    const std::vector<double> w = {0.75, 0.25};
    for (double u : {0.0, 0.2, 0.49}) {
        const std::vector<std::size_t> anc = systematic_resample(w, u);
        REQUIRE(anc.size() == 2);
        CHECK(anc[0] == 0);
        CHECK(anc[1] == 0);
    }
    for (double u : {0.5, 0.99}) {
        const std::vector<std::size_t> anc = systematic_resample(w, u);
        REQUIRE(anc.size() == 2);
        CHECK(anc[0] == 0);
        CHECK(anc[1] == 1);
    }
}

TEST_CASE("systematic resampling counts are within one of n*w") {
    RngStream rng = RngStream::derive(123, {0});
    for (int rep = 0; rep < 50; ++rep) {
        const int n = 1 + static_cast<int>(rng.uniform_index(30));
        std::vector<double> w(n);
        double sum = 0.0;
        for (double& v : w) {
            v = rng.uniform_pos();
            sum += v;
        }
        for (double& v : w) v /= sum;
        const auto anc = systematic_resample(w, rng);
        REQUIRE(anc.size() == static_cast<std::size_t>(n));
        std::vector<int> counts(n, 0);
        for (std::size_t a : anc) {
            REQUIRE(a < static_cast<std::size_t>(n));
            ++counts[a];
        }
        for (int i = 0; i < n; ++i) {
            CHECK(std::abs(counts[i] - n * w[i]) <= 1.0 + 1e-9);
        }
    }
}

TEST_CASE("systematic resampling keeps ancestors sorted") {
    const std::vector<double> w = {0.2, 0.3, 0.1, 0.4};
    const auto anc = systematic_resample(w, 0.37);
    for (std::size_t i = 1; i < anc.size(); ++i) CHECK(anc[i - 1] <= anc[i]);
}

TEST_CASE("resample rejects zero weights") {
    RngStream rng = RngStream::derive(5, {0});
    CHECK_THROWS_AS(systematic_resample(std::vector<double>{0.0, 0.0}, rng),
                    degenerate_weights_error);
}
