#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "moe/data.hpp"
#include "moe/errors.hpp"

using namespace moe;

namespace {

const std::filesystem::path kTmp = std::filesystem::temp_directory_path() / "moe_data_test";

std::string write_file(const std::string& name, const std::string& content) {
    std::filesystem::create_directories(kTmp);
    const std::string path = (kTmp / name).string();
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("smooth benchmark curve values") {
    CHECK(synth1_mean(0.0) == 0.0);
    // sin(pi/2) cos((pi/2)^3)
    CHECK(synth1_mean(0.5) == doctest::Approx(-0.742372).epsilon(1e-5));
    CHECK(synth1_sd(0.3) == 0.15);
}

TEST_CASE("discontinuous benchmark curve values and regions") {
    CHECK(synth2_mean(0.4) == 10.0);
    CHECK(synth2_mean(0.75) == doctest::Approx(-10.0).epsilon(1e-12));
    CHECK(synth2_mean(0.3) == doctest::Approx(std::sin(18.0) - 2.0).epsilon(1e-12));
    CHECK(synth2_mean(0.30000001) == 10.0);  // boundary: x <= 0.3 belongs to regime 1
    CHECK(synth2_mean(0.5) == 10.0);
    CHECK(synth2_sd(0.1) == 0.05);
    CHECK(synth2_sd(0.45) == 0.025);
    CHECK(synth2_sd(0.9) == 0.10);
}

TEST_CASE("homoskedastic residual sd matches the generator spec") {
    const int n = 1000000;
    const Dataset d = gen_synth1(n, 42);
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = d.Y[i] - synth1_mean(d.X(i, 0));
        ss += r * r;
    }
    CHECK(std::sqrt(ss / (n - 1)) == doctest::Approx(0.15).epsilon(0.0067));
}

TEST_CASE("heteroskedastic residual sds match per region") {
    const int n = 100000;
    const Dataset d = gen_synth2(n, 7);
    double ss[3] = {0, 0, 0};
    long cnt[3] = {0, 0, 0};
    for (int i = 0; i < n; ++i) {
        const double x = d.X(i, 0);
        const int r = (x <= 0.3) ? 0 : (x <= 0.5 ? 1 : 2);
        const double res = d.Y[i] - synth2_mean(x);
        ss[r] += res * res;
        ++cnt[r];
    }
    const double expect[3] = {0.05, 0.025, 0.10};
    for (int r = 0; r < 3; ++r) {
        CHECK(std::sqrt(ss[r] / cnt[r]) == doctest::Approx(expect[r]).epsilon(0.1));
    }
}

TEST_CASE("generators are deterministic per seed") {
    const Dataset a = gen_synth1(100, 5);
    const Dataset b = gen_synth1(100, 5);
    const Dataset c = gen_synth1(100, 6);
    CHECK((a.X - b.X).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.Y - b.Y).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.Y - c.Y).cwiseAbs().maxCoeff() > 0.0);
    CHECK(a.provenance == "synth1");
}

TEST_CASE("normalization invariants") {
    const Dataset raw = gen_synth2(500, 3);
    const Dataset d = normalize(raw);
    CHECK(d.X.minCoeff() >= 0.0);
    CHECK(d.X.maxCoeff() <= 1.0);
    CHECK(std::abs(d.Y.minCoeff()) < 1e-12);
    const double mean = d.Y.mean();
    const double var = (d.Y.array() - mean).square().sum() / (d.Y.size() - 1);
    CHECK(std::abs(var - 1.0) < 1e-9);
}

TEST_CASE("already-normalized output scale stays the identity") {
    Dataset raw;
    raw.X.resize(3, 1);
    raw.X << 0.0, 0.5, 1.0;
    raw.Y.resize(3);
    raw.Y << 0.0, 1.0, 2.0;
    raw.norm = NormalizationRecord::identity(1);
    const Dataset d = normalize(raw);
    CHECK(d.Y[0] == 0.0);
    CHECK(d.Y[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.Y[2] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(d.norm.y_scale == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.norm.x_scale[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("normalization round-trips within 1e-12") {
    const Dataset raw = gen_synth2(200, 9);
    const Dataset d = normalize(raw);
    const Dataset back = denormalize(d);
    CHECK((back.X - raw.X).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((back.Y - raw.Y).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("degenerate data is rejected") {
    Dataset d;
    d.X.resize(3, 1);
    d.X << 0.5, 0.5, 0.5;  // constant input
    d.Y.resize(3);
    d.Y << 1.0, 2.0, 3.0;
    CHECK_THROWS_AS(normalize(d), data_error);
    d.X << 0.0, 0.5, 1.0;
    d.Y << 2.0, 2.0, 2.0;  // constant output
    CHECK_THROWS_AS(normalize(d), data_error);
    Dataset one;
    one.X.resize(1, 1);
    one.X << 0.0;
    one.Y.resize(1);
    one.Y << 1.0;
    CHECK_THROWS_AS(normalize(one), data_error);
}

TEST_CASE("csv round trip preserves values exactly") {
    const Dataset d = normalize(gen_synth1(50, 4));
    std::filesystem::create_directories(kTmp);
    const std::string path = (kTmp / "roundtrip.csv").string();
    save_csv(path, d);
    const Dataset back = load_csv(path, 1);
    REQUIRE(back.size() == 50);
    CHECK((back.X - d.X).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.Y - d.Y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("load_csv handles blank lines and rejects malformed input") {
    const std::string ok = write_file("ok.csv", "x1,y\n0.1,2.0\n\n0.2,3.0\n");
    const Dataset d = load_csv(ok, 1);
    CHECK(d.size() == 2);
    CHECK(d.Y[1] == 3.0);

    const std::string headonly = write_file("head.csv", "x1,y\n");
    CHECK_THROWS_AS(load_csv(headonly, 1), data_error);

    const std::string bad = write_file("bad.csv", "x1,y\n0.1,2.0\n0.2,oops\n");
    try {
        load_csv(bad, 1);
        FAIL("expected data_error");
    } catch (const data_error& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }

    const std::string wide = write_file("wide.csv", "x1,y\n0.1,2.0,9.9\n");
    CHECK_THROWS_AS(load_csv(wide, 1), data_error);
    CHECK_THROWS_AS(load_csv((kTmp / "missing.csv").string(), 1), io_error);
}

TEST_CASE("multidimensional csv loading") {
    const std::string path = write_file("d2.csv", "x1,x2,y\n0.1,0.9,1.5\n0.2,0.8,2.5\n");
    const Dataset d = load_csv(path, 2);
    REQUIRE(d.dim() == 2);
    CHECK(d.X(1, 1) == 0.8);
    CHECK(d.Y[0] == 1.5);
}

TEST_CASE("normalization record persists") {
    const Dataset d = normalize(gen_synth2(60, 8));
    std::filesystem::create_directories(kTmp);
    const std::string path = (kTmp / "norm.json").string();
    save_normalization(path, d.norm);
    const NormalizationRecord rec = load_normalization(path);
    CHECK(rec.y_scale == d.norm.y_scale);
    CHECK(rec.y_offset == d.norm.y_offset);
    CHECK(rec.x_scale[0] == d.norm.x_scale[0]);
    CHECK(rec.x_offset[0] == d.norm.x_offset[0]);
    CHECK(rec.denorm_y(rec.norm_y(3.7)) == doctest::Approx(3.7).epsilon(1e-12));
}

TEST_CASE("generator rejects nonpositive sizes") {
    CHECK_THROWS_AS(gen_synth1(0, 1), config_error);
}
