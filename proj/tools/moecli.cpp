#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "moe/data.hpp"
#include "moe/digest.hpp"
#include "moe/errors.hpp"
#include "moe/eval.hpp"
#include "moe/is_baseline.hpp"
#include "moe/predictive.hpp"
#include "moe/serialize.hpp"
#include "moe/smc2.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "smc2moe 0.1.0";
constexpr const char* kRngName =
    "mt19937_64 keyed by splitmix64 counter chains; box-muller normals, "
    "marsaglia-tsang gammas";

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct Options {
    // dataset source
    std::string generator;  // synth1 | synth2, empty when loading a CSV
    int n = 300;
    std::uint64_t data_seed = 1;
    std::string data_csv;
    int dim = 1;

    // model and method
    std::string method = "smc2";
    int k = 5;
    double alpha = 1.0;
    int j = 100;
    int m = 30;
    double eta = 0.9;
    double delta = 0.05;
    int max_mcmc_steps = 10;
    double proposal_scale = 1.0;

    int x_grid = 200;
    int y_grid = 200;
    int workers = 1;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    std::string run_id = "run";
    std::string resume_from;
};

void write_real(std::ostream& os, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
}

void save_distances(const std::string& path, const std::string& run_id, double l1,
                    double l2, double med, int gx, int gy) {
    std::ofstream out(path);
    if (!out) throw moe::io_error("cannot open " + path);
    out << "run_id,l1,l2,median_l1,x_grid,y_grid\n" << run_id << ",";
    write_real(out, l1);
    out << ",";
    write_real(out, l2);
    out << ",";
    write_real(out, med);
    out << "," << gx << "," << gy << "\n";
}

json config_echo(const Options& opt) {
    json j;
    j["generator"] = opt.generator;
    j["n"] = opt.n;
    j["data_seed"] = opt.data_seed;
    j["data_csv"] = opt.data_csv;
    j["dim"] = opt.dim;
    j["method"] = opt.method;
    j["k"] = opt.k;
    j["alpha"] = opt.alpha;
    j["j"] = opt.j;
    j["m"] = opt.m;
    j["eta"] = opt.eta;
    j["delta"] = opt.delta;
    j["max_mcmc_steps"] = opt.max_mcmc_steps;
    j["proposal_scale"] = opt.proposal_scale;
    j["x_grid"] = opt.x_grid;
    j["y_grid"] = opt.y_grid;
    j["workers"] = opt.workers;
    j["seed"] = opt.seed;
    j["run_id"] = opt.run_id;
    return j;
}

moe::Dataset make_dataset(const Options& opt) {
    moe::Dataset raw;
    if (!opt.data_csv.empty()) {
        raw = moe::load_csv(opt.data_csv, opt.dim);
    } else if (opt.generator == "synth1") {
        raw = moe::gen_synth1(opt.n, opt.data_seed);
    } else if (opt.generator == "synth2") {
        raw = moe::gen_synth2(opt.n, opt.data_seed);
    } else {
        throw moe::config_error("no dataset source: set --generator or --data");
    }
    return moe::normalize(raw);
}

int cmd_generate(const Options& opt) {
    const moe::Dataset data = make_dataset(opt);
    fs::create_directories(opt.out_dir);
    moe::save_csv(opt.out_dir + "/dataset.csv", data);
    moe::save_normalization(opt.out_dir + "/normalization.json", data.norm);
    std::cout << "wrote " << opt.out_dir << "/dataset.csv (" << data.size()
              << " rows)\n";
    return 0;
}

int cmd_fit(const Options& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const moe::Dataset data = make_dataset(opt);
    fs::create_directories(opt.out_dir);
    moe::save_csv(opt.out_dir + "/dataset.csv", data);
    moe::save_normalization(opt.out_dir + "/normalization.json", data.norm);

    const double y_max = data.Y.maxCoeff();
    const moe::PriorSpec prior =
        moe::PriorSpec::standard(opt.k, opt.alpha, data.dim(), y_max);

    moe::PosteriorSample sample;
    if (opt.method == "smc2") {
        moe::SMC2Config cfg;
        cfg.outer_particles = opt.j;
        cfg.inner_particles = opt.m;
        cfg.eta = opt.eta;
        cfg.delta = opt.delta;
        cfg.max_mcmc_steps = opt.max_mcmc_steps;
        cfg.proposal_scale = opt.proposal_scale;
        cfg.seed = opt.seed;
        cfg.workers = opt.workers;
        cfg.prior = prior;
        cfg.checkpoint_path = opt.out_dir + "/checkpoint.json";
        if (opt.resume_from.empty()) {
            sample = moe::run_smc2(data.X, data.Y, cfg);
        } else {
            sample = moe::resume_smc2(data.X, data.Y, cfg, opt.resume_from);
        }
    } else if (opt.method == "is") {
        if (opt.j < 2) throw moe::config_error("method is: J must be >= 2");
        moe::ISConfig cfg;
        cfg.particles = opt.j;
        cfg.seed = opt.seed;
        cfg.workers = opt.workers;
        cfg.prior = prior;
        sample = moe::as_posterior(moe::run_is(data.X, data.Y, cfg));
    } else {
        throw moe::config_error("unknown method " + opt.method);
    }

    moe::save_posterior(opt.out_dir + "/posterior.json", sample);

    const Eigen::MatrixXd x_grid = moe::default_x_grid(opt.x_grid, data.dim());
    const Eigen::VectorXd y_grid = moe::default_y_grid(data.Y, opt.y_grid);
    const moe::PredictiveGrid grid =
        moe::predictive_density(sample, data.X, data.Y, x_grid, y_grid, opt.workers);
    const Eigen::VectorXd median = moe::predictive_median(grid);
    moe::save_grid_csv(opt.out_dir + "/predictive_grid.csv", grid);
    moe::save_mean_median_csv(opt.out_dir + "/mean_median.csv", grid, median);

    moe::save_matrix_csv(opt.out_dir + "/psm.csv", moe::psm(sample));
    moe::save_histogram_csv(opt.out_dir + "/expert_counts.csv",
                            moe::expert_count_posterior(sample, opt.k));

    bool have_truth = false;
    if (!opt.generator.empty() && data.dim() == 1) {
        const moe::GroundTruthDensity gt =
            moe::ground_truth_density(opt.generator, x_grid, y_grid, data.norm);
        const auto [l1, l2] = moe::density_distance(grid.density, gt.density);
        const double med = moe::median_distance(median, gt.median);
        save_distances(opt.out_dir + "/distances.csv", opt.run_id, l1, l2, med,
                       opt.x_grid, opt.y_grid);
        have_truth = true;
    }

    const auto t1 = std::chrono::steady_clock::now();
    json manifest;
    manifest["version"] = kVersion;
    manifest["rng"] = kRngName;
    manifest["config"] = config_echo(opt);
    manifest["wall_time_seconds"] =
        std::chrono::duration<double>(t1 - t0).count();
    manifest["lik_evals"] = sample.diag.lik_evals;
    manifest["kappa_schedule"] = sample.kappa_history;
    json steps = json::array();
    for (const auto& s : sample.diag.steps) {
        steps.push_back({{"t", s.t},
                         {"kappa", s.kappa},
                         {"ess_pre_resample", s.ess_pre_resample},
                         {"ess_ratio", s.ess_ratio},
                         {"outer_sweeps", s.outer_sweeps},
                         {"inner_sweeps", s.inner_sweeps}});
    }
    manifest["steps"] = std::move(steps);
    manifest["pmmh_acceptance_rate"] =
        sample.diag.pmmh_proposals > 0
            ? static_cast<double>(sample.diag.pmmh_accepts) / sample.diag.pmmh_proposals
            : 0.0;
    manifest["warnings"] = sample.diag.warnings;
    std::vector<std::string> files = {"dataset.csv",        "normalization.json",
                                      "posterior.json",     "predictive_grid.csv",
                                      "mean_median.csv",    "psm.csv",
                                      "expert_counts.csv"};
    if (have_truth) files.push_back("distances.csv");
    json inventory = json::object();
    for (const auto& f : files) {
        inventory[f] = moe::sha256_file(opt.out_dir + "/" + f);
    }
    manifest["files"] = std::move(inventory);
    std::ofstream out(opt.out_dir + "/manifest.json");
    if (!out) throw moe::io_error("cannot open " + opt.out_dir + "/manifest.json");
    out << manifest.dump(2) << "\n";
    std::cout << "fit complete: " << sample.particles.size() << " particles, "
              << sample.kappa_history.size() << " tempering steps, outputs in "
              << opt.out_dir << "\n";
    return 0;
}

int cmd_evaluate(const Options& opt) {
    const moe::PredictiveGrid grid =
        moe::load_grid_csv(opt.out_dir + "/predictive_grid.csv");
    const moe::MeanMedian mm =
        moe::load_mean_median_csv(opt.out_dir + "/mean_median.csv");
    const moe::NormalizationRecord norm =
        moe::load_normalization(opt.out_dir + "/normalization.json");
    if (opt.generator.empty()) {
        throw moe::config_error("evaluate: --generator is required");
    }
    if (mm.x.size() != grid.x_grid.rows()) {
        throw moe::data_error("evaluate: mean/median and grid x sizes differ");
    }
    const moe::GroundTruthDensity gt =
        moe::ground_truth_density(opt.generator, grid.x_grid, grid.y_grid, norm);
    const auto [l1, l2] = moe::density_distance(grid.density, gt.density);
    const double med = moe::median_distance(mm.median, gt.median);
    save_distances(opt.out_dir + "/distances.csv", opt.run_id, l1, l2, med,
                   static_cast<int>(grid.x_grid.rows()),
                   static_cast<int>(grid.y_grid.size()));
    std::cout << "l1=" << l1 << " l2=" << l2 << " median_l1=" << med << "\n";
    return 0;
}

int cmd_psm(const Options& opt) {
    const moe::PosteriorSample sample =
        moe::load_posterior(opt.out_dir + "/posterior.json");
    moe::save_matrix_csv(opt.out_dir + "/psm.csv", moe::psm(sample));
    std::cout << "wrote " << opt.out_dir << "/psm.csv\n";
    return 0;
}

int cmd_self_check(const Options& opt) {
    std::ifstream in(opt.out_dir + "/manifest.json");
    if (!in) throw moe::io_error("cannot open " + opt.out_dir + "/manifest.json");
    json manifest;
    try {
        in >> manifest;
    } catch (const std::exception& e) {
        throw moe::io_error("malformed manifest: " + std::string(e.what()));
    }
    bool ok = true;
    for (const auto& [name, digest] : manifest.at("files").items()) {
        const std::string actual = moe::sha256_file(opt.out_dir + "/" + name);
        const bool match = actual == digest.get<std::string>();
        std::cout << (match ? "ok   " : "FAIL ") << name << "\n";
        ok = ok && match;
    }
    if (!ok) throw moe::io_error("self-check: digest mismatch");
    return 0;
}

void add_dataset_flags(CLI::App* cmd, Options& opt) {
    cmd->add_option("--generator", opt.generator, "synthetic generator: synth1 or synth2")
        ->check(CLI::IsMember({"synth1", "synth2"}));
    cmd->add_option("--n", opt.n, "synthetic sample size")->check(CLI::PositiveNumber);
    cmd->add_option("--data-seed", opt.data_seed, "generator seed");
    cmd->add_option("--data", opt.data_csv, "input CSV path");
    cmd->add_option("--dim", opt.dim, "input dimension for CSV data")
        ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixture-of-GP-experts inference via nested SMC"};
    app.set_config("--config", "", "flat key=value config file; flags override");
    app.require_subcommand(1);

    Options opt;

    CLI::App* gen = app.add_subcommand("generate", "write a normalized dataset");
    add_dataset_flags(gen, opt);
    gen->add_option("--out-dir", opt.out_dir, "output directory");

    CLI::App* fit = app.add_subcommand("fit", "run inference and emit artifacts");
    add_dataset_flags(fit, opt);
    fit->add_option("--method", opt.method, "smc2 or is")
        ->check(CLI::IsMember({"smc2", "is"}));
    fit->add_option("--k", opt.k, "number of experts")->check(CLI::PositiveNumber);
    fit->add_option("--alpha", opt.alpha, "gating concentration")
        ->check(CLI::PositiveNumber);
    fit->add_option("--j", opt.j, "outer particle count")->check(CLI::PositiveNumber);
    fit->add_option("--m", opt.m, "inner particle count")->check(CLI::PositiveNumber);
    fit->add_option("--eta", opt.eta, "tempering ESS target ratio");
    fit->add_option("--delta", opt.delta, "MCMC stopping threshold");
    fit->add_option("--max-mcmc-steps", opt.max_mcmc_steps, "mutation sweep cap")
        ->check(CLI::PositiveNumber);
    fit->add_option("--proposal-scale", opt.proposal_scale, "random-walk scale factor");
    fit->add_option("--x-grid", opt.x_grid, "predictive x grid size")
        ->check(CLI::PositiveNumber);
    fit->add_option("--y-grid", opt.y_grid, "predictive y grid size")
        ->check(CLI::PositiveNumber);
    fit->add_option("--workers", opt.workers, "worker thread count")
        ->check(CLI::PositiveNumber);
    fit->add_option("--seed", opt.seed, "inference seed");
    fit->add_option("--out-dir", opt.out_dir, "output directory");
    fit->add_option("--run-id", opt.run_id, "identifier used in distance reports");
    fit->add_option("--resume-from", opt.resume_from, "checkpoint file to continue");

    CLI::App* eval = app.add_subcommand("evaluate", "distances against ground truth");
    eval->add_option("--generator", opt.generator, "synth1 or synth2")
        ->check(CLI::IsMember({"synth1", "synth2"}));
    eval->add_option("--out-dir", opt.out_dir, "run directory to evaluate");
    eval->add_option("--run-id", opt.run_id, "identifier used in distance reports");

    CLI::App* psm_cmd = app.add_subcommand("psm", "posterior similarity matrix");
    psm_cmd->add_option("--out-dir", opt.out_dir, "run directory");

    CLI::App* check = app.add_subcommand("self-check", "verify manifest digests");
    check->add_option("--out-dir", opt.out_dir, "run directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    }

    try {
        if (gen->parsed()) return cmd_generate(opt);
        if (fit->parsed()) return cmd_fit(opt);
        if (eval->parsed()) return cmd_evaluate(opt);
        if (psm_cmd->parsed()) return cmd_psm(opt);
        if (check->parsed()) return cmd_self_check(opt);
    } catch (const moe::config_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const moe::dimension_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const moe::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const moe::degenerate_weights_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const moe::data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitIo;
    } catch (const moe::io_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
