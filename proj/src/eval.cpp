#include "moe/eval.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "moe/errors.hpp"
#include "moe/math.hpp"
#include "moe/resample.hpp"

namespace moe {

namespace {

void write_real(std::ostream& os, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
}

std::vector<double> particle_weights(const PosteriorSample& sample) {
    if (sample.particles.empty()) throw config_error("eval: empty particle set");
    std::vector<double> lw(sample.particles.size());
    for (std::size_t j = 0; j < sample.particles.size(); ++j) {
        lw[j] = sample.particles[j].log_weight;
    }
    return normalize_log_weights(lw);
}

}  // namespace

GroundTruthDensity ground_truth_density(const std::string& generator,
                                        const Eigen::MatrixXd& x_grid,
                                        const Eigen::VectorXd& y_grid,
                                        const NormalizationRecord& norm) {
    double (*mean_fn)(double) = nullptr;
    double (*sd_fn)(double) = nullptr;
    if (generator == "synth1") {
        mean_fn = synth1_mean;
        sd_fn = synth1_sd;
    } else if (generator == "synth2") {
        mean_fn = synth2_mean;
        sd_fn = synth2_sd;
    } else {
        throw config_error("ground_truth_density: unknown generator " + generator);
    }
    if (x_grid.cols() != 1) {
        throw dimension_error("ground_truth_density: synthetic benchmarks are 1-D");
    }
    GroundTruthDensity gt;
    const Eigen::Index G = x_grid.rows();
    const Eigen::Index H = y_grid.size();
    gt.density.resize(G, H);
    gt.median.resize(G);
    for (Eigen::Index g = 0; g < G; ++g) {
        const double x_raw = x_grid(g, 0) * norm.x_scale[0] + norm.x_offset[0];
        const double f = mean_fn(x_raw);
        const double sd = sd_fn(x_raw);
        gt.median[g] = norm.norm_y(f);
        for (Eigen::Index h = 0; h < H; ++h) {
            const double y_raw = norm.denorm_y(y_grid[h]);
            // raw-space Gaussian times the Jacobian of the output map
            gt.density(g, h) =
                std::exp(log_normal_pdf(y_raw, f, sd * sd)) * norm.y_scale;
        }
    }
    return gt;
}

std::pair<double, double> density_distance(const Eigen::MatrixXd& a,
                                           const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw dimension_error("density_distance: grid shapes differ");
    }
    const Eigen::ArrayXXd d = (a - b).array();
    return {d.abs().sum(), std::sqrt(d.square().sum())};
}

double median_distance(const Eigen::VectorXd& est, const Eigen::VectorXd& truth) {
    if (est.size() != truth.size()) {
        throw dimension_error("median_distance: vector lengths differ");
    }
    return (est - truth).array().abs().sum();
}

Eigen::MatrixXd psm(const PosteriorSample& sample) {
    const std::vector<double> w = particle_weights(sample);
    const std::size_t n = sample.particles[0].alloc.size();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < sample.particles.size(); ++j) {
        const Allocation& c = sample.particles[j].alloc;
        if (c.size() != n) throw dimension_error("psm: allocation lengths differ");
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t ip = i; ip < n; ++ip) {
                if (c[i] == c[ip]) {
                    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(ip)) += w[j];
                }
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
        for (std::size_t ip = i + 1; ip < n; ++ip) {
            m(static_cast<Eigen::Index>(ip), static_cast<Eigen::Index>(i)) =
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(ip));
        }
    }
    return m;
}

Eigen::VectorXd expert_count_posterior(const PosteriorSample& sample, int k_max) {
    if (k_max < 1) throw config_error("expert_count_posterior: k_max must be >= 1");
    const std::vector<double> w = particle_weights(sample);
    Eigen::VectorXd hist = Eigen::VectorXd::Zero(k_max);
    for (std::size_t j = 0; j < sample.particles.size(); ++j) {
        const std::set<int> labels(sample.particles[j].alloc.begin(),
                                   sample.particles[j].alloc.end());
        const int count = static_cast<int>(labels.size());
        if (count < 1 || count > k_max) {
            throw dimension_error("expert_count_posterior: label count out of range");
        }
        hist[count - 1] += w[j];
    }
    return hist;
}

void save_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path);
    if (!out) throw io_error("save_matrix_csv: cannot open " + path);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out << ",";
            write_real(out, m(i, j));
        }
        out << "\n";
    }
    if (!out) throw io_error("save_matrix_csv: write failed for " + path);
}

void save_histogram_csv(const std::string& path, const Eigen::VectorXd& h) {
    std::ofstream out(path);
    if (!out) throw io_error("save_histogram_csv: cannot open " + path);
    out << "count,mass\n";
    for (Eigen::Index i = 0; i < h.size(); ++i) {
        out << (i + 1) << ",";
        write_real(out, h[i]);
        out << "\n";
    }
    if (!out) throw io_error("save_histogram_csv: write failed for " + path);
}

}  // namespace moe
