#include "moe/predictive.hpp"

#include <cmath>
#include <fstream>

#include "moe/errors.hpp"
#include "moe/math.hpp"
#include "moe/parallel.hpp"
#include "moe/resample.hpp"

namespace moe {

namespace {

void write_real(std::ostream& os, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
}

struct ParticleCtx {
    double log_w = 0.0;
    const OuterParticle* particle = nullptr;
    // posteriors[m][k], one factorized GP per inner member and expert
    std::vector<std::vector<GpPosterior>> posteriors;
};

std::vector<ParticleCtx> build_contexts(const PosteriorSample& sample,
                                        const Eigen::MatrixXd& inputs,
                                        const Eigen::VectorXd& outputs,
                                        std::vector<std::vector<DataSubset>>& subsets) {
    if (sample.particles.empty()) {
        throw config_error("predictive: empty particle set");
    }
    std::vector<double> lw(sample.particles.size());
    for (std::size_t j = 0; j < sample.particles.size(); ++j) {
        lw[j] = sample.particles[j].log_weight;
    }
    const std::vector<double> w = normalize_log_weights(lw);

    std::vector<ParticleCtx> ctx(sample.particles.size());
    subsets.resize(sample.particles.size());
    for (std::size_t j = 0; j < sample.particles.size(); ++j) {
        const OuterParticle& p = sample.particles[j];
        const int K = p.psi.K();
        subsets[j] = partition_data(inputs, outputs, p.alloc, K);
        ctx[j].log_w = std::log(w[j]);
        ctx[j].particle = &p;
        const int M = p.inner.size();
        ctx[j].posteriors.resize(M);
        for (int m = 0; m < M; ++m) {
            ctx[j].posteriors[m].reserve(K);
            for (int k = 0; k < K; ++k) {
                ctx[j].posteriors[m].emplace_back(
                    subsets[j][k], ExpertParams::from_vector(p.inner.members[m][k]));
            }
        }
    }
    return ctx;
}

void check_sorted(const Eigen::VectorXd& v, const char* name) {
    for (Eigen::Index i = 1; i < v.size(); ++i) {
        if (!(v[i] > v[i - 1])) {
            throw config_error(std::string("predictive: ") + name + " must be sorted");
        }
    }
}

}  // namespace

Eigen::MatrixXd default_x_grid(int size, int dim) {
    if (size < 2) throw config_error("default_x_grid: need at least 2 points");
    Eigen::MatrixXd g(size, dim);
    for (int i = 0; i < size; ++i) {
        g.row(i).setConstant(static_cast<double>(i) / (size - 1));
    }
    return g;
}

Eigen::VectorXd default_y_grid(const Eigen::VectorXd& outputs, int size) {
    if (size < 2) throw config_error("default_y_grid: need at least 2 points");
    if (outputs.size() < 2) throw data_error("default_y_grid: need at least 2 outputs");
    const double mean = outputs.mean();
    const double sd = std::sqrt((outputs.array() - mean).square().sum() /
                                static_cast<double>(outputs.size() - 1));
    const double lo = outputs.minCoeff() - 3.0 * sd;
    const double hi = outputs.maxCoeff() + 3.0 * sd;
    return Eigen::VectorXd::LinSpaced(size, lo, hi);
}

PredictiveGrid predictive_density(const PosteriorSample& sample,
                                  const Eigen::MatrixXd& inputs,
                                  const Eigen::VectorXd& outputs,
                                  const Eigen::MatrixXd& x_grid,
                                  const Eigen::VectorXd& y_grid, int workers) {
    if (x_grid.rows() == 0 || y_grid.size() == 0) {
        throw config_error("predictive_density: empty grid");
    }
    if (x_grid.cols() == 1) check_sorted(x_grid.col(0), "x_grid");
    check_sorted(y_grid, "y_grid");

    std::vector<std::vector<DataSubset>> subsets;
    const std::vector<ParticleCtx> ctx = build_contexts(sample, inputs, outputs, subsets);

    PredictiveGrid grid;
    grid.x_grid = x_grid;
    grid.y_grid = y_grid;
    const Eigen::Index G = x_grid.rows();
    const Eigen::Index H = y_grid.size();
    grid.density.resize(G, H);
    grid.mean.resize(G);

    parallel_for(static_cast<std::size_t>(G), workers, [&](std::size_t g) {
        const Eigen::VectorXd x_star = x_grid.row(static_cast<Eigen::Index>(g)).transpose();
        std::vector<LogSumExpAcc> acc(static_cast<std::size_t>(H));
        double mean_acc = 0.0;
        for (const ParticleCtx& c : ctx) {
            const Eigen::VectorXd log_gate = gating_log_probs(x_star, c.particle->psi);
            const int M = c.particle->inner.size();
            const double log_m = std::log(static_cast<double>(M));
            for (int m = 0; m < M; ++m) {
                for (int k = 0; k < c.particle->psi.K(); ++k) {
                    const GpPrediction pred = c.posteriors[m][k].predict(x_star);
                    const double base = c.log_w - log_m + log_gate[k];
                    mean_acc += std::exp(base) * pred.mean;
                    for (Eigen::Index h = 0; h < H; ++h) {
                        acc[static_cast<std::size_t>(h)].add(
                            base + log_normal_pdf(y_grid[h], pred.mean, pred.variance));
                    }
                }
            }
        }
        for (Eigen::Index h = 0; h < H; ++h) {
            const double lv = acc[static_cast<std::size_t>(h)].value();
            grid.density(static_cast<Eigen::Index>(g), h) = (lv == kNegInf) ? 0.0 : std::exp(lv);
        }
        grid.mean[static_cast<Eigen::Index>(g)] = mean_acc;
    });
    return grid;
}

Eigen::VectorXd predictive_mean(const PosteriorSample& sample,
                                const Eigen::MatrixXd& inputs,
                                const Eigen::VectorXd& outputs,
                                const Eigen::MatrixXd& x_grid, int workers) {
    if (x_grid.rows() == 0) throw config_error("predictive_mean: empty grid");
    std::vector<std::vector<DataSubset>> subsets;
    const std::vector<ParticleCtx> ctx = build_contexts(sample, inputs, outputs, subsets);
    const Eigen::Index G = x_grid.rows();
    Eigen::VectorXd mean(G);
    parallel_for(static_cast<std::size_t>(G), workers, [&](std::size_t g) {
        const Eigen::VectorXd x_star = x_grid.row(static_cast<Eigen::Index>(g)).transpose();
        double mean_acc = 0.0;
        for (const ParticleCtx& c : ctx) {
            const Eigen::VectorXd log_gate = gating_log_probs(x_star, c.particle->psi);
            const int M = c.particle->inner.size();
            const double log_m = std::log(static_cast<double>(M));
            for (int m = 0; m < M; ++m) {
                for (int k = 0; k < c.particle->psi.K(); ++k) {
                    const GpPrediction pred = c.posteriors[m][k].predict(x_star);
                    mean_acc += std::exp(c.log_w - log_m + log_gate[k]) * pred.mean;
                }
            }
        }
        mean[static_cast<Eigen::Index>(g)] = mean_acc;
    });
    return mean;
}

double row_mass(const PredictiveGrid& grid, Eigen::Index row) {
    double mass = 0.0;
    for (Eigen::Index h = 1; h < grid.y_grid.size(); ++h) {
        mass += 0.5 * (grid.density(row, h) + grid.density(row, h - 1)) *
                (grid.y_grid[h] - grid.y_grid[h - 1]);
    }
    return mass;
}

Eigen::VectorXd predictive_median(const PredictiveGrid& grid) {
    const Eigen::Index G = grid.density.rows();
    const Eigen::Index H = grid.y_grid.size();
    Eigen::VectorXd median(G);
    for (Eigen::Index g = 0; g < G; ++g) {
        const double total = row_mass(grid, g);
        if (!(total > 0.0)) {
            throw numerical_error("predictive_median: zero predictive mass at a grid point");
        }
        const double half = 0.5 * total;
        double cum = 0.0;
        bool found = false;
        for (Eigen::Index h = 1; h < H; ++h) {
            const double seg = 0.5 * (grid.density(g, h) + grid.density(g, h - 1)) *
                               (grid.y_grid[h] - grid.y_grid[h - 1]);
            if (cum + seg >= half) {
                const double frac = (seg > 0.0) ? (half - cum) / seg : 0.0;
                median[g] = grid.y_grid[h - 1] + frac * (grid.y_grid[h] - grid.y_grid[h - 1]);
                found = true;
                break;
            }
            cum += seg;
        }
        if (!found) median[g] = grid.y_grid[H - 1];
    }
    return median;
}

void save_grid_csv(const std::string& path, const PredictiveGrid& grid) {
    std::ofstream out(path);
    if (!out) throw io_error("save_grid_csv: cannot open " + path);
    out << "x,y,density\n";
    for (Eigen::Index g = 0; g < grid.density.rows(); ++g) {
        for (Eigen::Index h = 0; h < grid.density.cols(); ++h) {
            write_real(out, grid.x_grid(g, 0));
            out << ",";
            write_real(out, grid.y_grid[h]);
            out << ",";
            write_real(out, grid.density(g, h));
            out << "\n";
        }
    }
    if (!out) throw io_error("save_grid_csv: write failed for " + path);
}

void save_mean_median_csv(const std::string& path, const PredictiveGrid& grid,
                          const Eigen::VectorXd& median) {
    if (median.size() != grid.mean.size()) {
        throw dimension_error("save_mean_median_csv: median length mismatch");
    }
    std::ofstream out(path);
    if (!out) throw io_error("save_mean_median_csv: cannot open " + path);
    out << "x,mean,median\n";
    for (Eigen::Index g = 0; g < grid.mean.size(); ++g) {
        write_real(out, grid.x_grid(g, 0));
        out << ",";
        write_real(out, grid.mean[g]);
        out << ",";
        write_real(out, median[g]);
        out << "\n";
    }
    if (!out) throw io_error("save_mean_median_csv: write failed for " + path);
}

namespace {

std::vector<std::vector<double>> read_numeric_csv(const std::string& path, int cols,
                                                  const char* who) {
    std::ifstream in(path);
    if (!in) throw io_error(std::string(who) + ": cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    bool seen_header = false;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!seen_header) {
            seen_header = true;
            continue;
        }
        std::vector<double> row;
        std::size_t start = 0;
        while (start <= line.size()) {
            const std::size_t comma = line.find(',', start);
            const std::string field =
                line.substr(start, comma == std::string::npos ? std::string::npos
                                                              : comma - start);
            try {
                std::size_t pos = 0;
                row.push_back(std::stod(field, &pos));
                if (pos != field.size()) throw std::invalid_argument(field);
            } catch (const std::exception&) {
                throw data_error(std::string(who) + ": non-numeric field at line " +
                                 std::to_string(line_no));
            }
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (static_cast<int>(row.size()) != cols) {
            throw data_error(std::string(who) + ": expected " + std::to_string(cols) +
                             " columns at line " + std::to_string(line_no));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw data_error(std::string(who) + ": no data rows in " + path);
    return rows;
}

}  // namespace

PredictiveGrid load_grid_csv(const std::string& path) {
    const auto rows = read_numeric_csv(path, 3, "load_grid_csv");
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& r : rows) {
        if (xs.empty() || r[0] != xs.back()) xs.push_back(r[0]);
    }
    for (const auto& r : rows) {
        if (r[0] != rows[0][0]) break;
        ys.push_back(r[1]);
    }
    PredictiveGrid grid;
    const Eigen::Index G = static_cast<Eigen::Index>(xs.size());
    const Eigen::Index H = static_cast<Eigen::Index>(ys.size());
    if (static_cast<Eigen::Index>(rows.size()) != G * H) {
        throw data_error("load_grid_csv: grid is not rectangular");
    }
    grid.x_grid.resize(G, 1);
    for (Eigen::Index g = 0; g < G; ++g) grid.x_grid(g, 0) = xs[static_cast<std::size_t>(g)];
    grid.y_grid = Eigen::Map<const Eigen::VectorXd>(ys.data(), H);
    grid.density.resize(G, H);
    for (Eigen::Index g = 0; g < G; ++g) {
        for (Eigen::Index h = 0; h < H; ++h) {
            const auto& r = rows[static_cast<std::size_t>(g * H + h)];
            if (r[0] != grid.x_grid(g, 0) || r[1] != grid.y_grid[h]) {
                throw data_error("load_grid_csv: rows are not in grid order");
            }
            grid.density(g, h) = r[2];
        }
    }
    return grid;
}

MeanMedian load_mean_median_csv(const std::string& path) {
    const auto rows = read_numeric_csv(path, 3, "load_mean_median_csv");
    MeanMedian mm;
    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    mm.x.resize(n);
    mm.mean.resize(n);
    mm.median.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        mm.x[i] = rows[static_cast<std::size_t>(i)][0];
        mm.mean[i] = rows[static_cast<std::size_t>(i)][1];
        mm.median[i] = rows[static_cast<std::size_t>(i)][2];
    }
    return mm;
}

}  // namespace moe
