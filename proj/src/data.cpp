#include "moe/data.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>
#include <vector>

#include "moe/errors.hpp"
#include "moe/rng.hpp"

namespace moe {

namespace {

constexpr std::uint64_t kDataTag = 1;

void write_real(std::ostream& os, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
}

Dataset gen_with(int n, std::uint64_t seed, double (*mean_fn)(double),
                 double (*sd_fn)(double), const std::string& tag) {
    if (n < 1) throw config_error("synthetic generator: N must be >= 1");
    Dataset d;
    d.X.resize(n, 1);
    d.Y.resize(n);
    d.norm = NormalizationRecord::identity(1);
    d.provenance = tag;
    RngStream rng = RngStream::derive(seed, {kDataTag});
    for (int i = 0; i < n; ++i) {
        const double x = rng.uniform();
        d.X(i, 0) = x;
        d.Y[i] = mean_fn(x) + sd_fn(x) * rng.normal();
    }
    return d;
}

double sample_sd(const Eigen::VectorXd& y) {
    const double mean = y.mean();
    const double ss = (y.array() - mean).square().sum();
    return std::sqrt(ss / static_cast<double>(y.size() - 1));
}

}  // namespace

NormalizationRecord NormalizationRecord::identity(int D) {
    NormalizationRecord rec;
    rec.x_scale = Eigen::VectorXd::Ones(D);
    rec.x_offset = Eigen::VectorXd::Zero(D);
    return rec;
}

Eigen::VectorXd NormalizationRecord::denorm_x(const Eigen::VectorXd& x) const {
    return (x.array() * x_scale.array() + x_offset.array()).matrix();
}

double synth1_mean(double x) {
    const double px = std::numbers::pi * x;
    return std::sin(px) * std::cos(px * px * px);
}

double synth1_sd(double) { return 0.15; }

double synth2_mean(double x) {
    if (x <= 0.3) return std::sin(60.0 * x) - 2.0;
    if (x <= 0.5) return 10.0;
    return std::sin(4.0 * std::numbers::pi * x) - 10.0;
}

double synth2_sd(double x) {
    if (x <= 0.3) return 0.05;
    if (x <= 0.5) return 0.025;
    return 0.10;
}

Dataset gen_synth1(int n, std::uint64_t seed) {
    return gen_with(n, seed, synth1_mean, synth1_sd, "synth1");
}

Dataset gen_synth2(int n, std::uint64_t seed) {
    return gen_with(n, seed, synth2_mean, synth2_sd, "synth2");
}

Dataset normalize(const Dataset& raw) {
    const Eigen::Index n = raw.size();
    if (n < 2) throw data_error("normalize: need at least 2 points");
    Dataset out = raw;
    const int D = raw.dim();
    out.norm.x_scale.resize(D);
    out.norm.x_offset.resize(D);
    for (int d = 0; d < D; ++d) {
        const double lo = raw.X.col(d).minCoeff();
        const double hi = raw.X.col(d).maxCoeff();
        if (!(hi > lo)) throw data_error("normalize: constant input dimension");
        out.norm.x_offset[d] = lo;
        out.norm.x_scale[d] = hi - lo;
        out.X.col(d) = (raw.X.col(d).array() - lo) / (hi - lo);
    }
    const double sd = sample_sd(raw.Y);
    if (!(sd > 0.0)) throw data_error("normalize: constant outputs");
    out.norm.y_offset = raw.Y.minCoeff();
    out.norm.y_scale = sd;
    out.Y = (raw.Y.array() - out.norm.y_offset) / sd;
    return out;
}

Dataset denormalize(const Dataset& data) {
    Dataset out = data;
    const int D = data.dim();
    for (int d = 0; d < D; ++d) {
        out.X.col(d) = data.X.col(d).array() * data.norm.x_scale[d] + data.norm.x_offset[d];
    }
    out.Y = data.Y.array() * data.norm.y_scale + data.norm.y_offset;
    out.norm = NormalizationRecord::identity(D);
    return out;
}

Dataset load_csv(const std::string& path, int d) {
    if (d < 1) throw config_error("load_csv: D must be >= 1");
    std::ifstream in(path);
    if (!in) throw io_error("load_csv: cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    long line_no = 0;
    bool seen_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string trimmed = line;
        trimmed.erase(0, trimmed.find_first_not_of(" \t"));
        if (trimmed.empty() || trimmed[0] == '#') continue;
        if (!seen_header) {
            seen_header = true;
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(trimmed);
        std::string field;
        while (std::getline(ss, field, ',')) {
            std::size_t pos = 0;
            double v = 0.0;
            try {
                v = std::stod(field, &pos);
            } catch (const std::exception&) {
                throw data_error("load_csv: non-numeric field at line " +
                                 std::to_string(line_no));
            }
            while (pos < field.size() && (field[pos] == ' ' || field[pos] == '\t')) ++pos;
            if (pos != field.size()) {
                throw data_error("load_csv: non-numeric field at line " +
                                 std::to_string(line_no));
            }
            row.push_back(v);
        }
        if (static_cast<int>(row.size()) != d + 1) {
            throw data_error("load_csv: expected " + std::to_string(d + 1) +
                             " columns at line " + std::to_string(line_no));
        }
        rows.push_back(std::move(row));
    }
    if (!seen_header) throw data_error("load_csv: missing header row");
    if (rows.empty()) throw data_error("load_csv: no data rows");
    Dataset out;
    out.X.resize(static_cast<Eigen::Index>(rows.size()), d);
    out.Y.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (int c = 0; c < d; ++c) out.X(static_cast<Eigen::Index>(i), c) = rows[i][c];
        out.Y[static_cast<Eigen::Index>(i)] = rows[i][d];
    }
    out.norm = NormalizationRecord::identity(d);
    out.provenance = path;
    return out;
}

void save_csv(const std::string& path, const Dataset& data) {
    std::ofstream out(path);
    if (!out) throw io_error("save_csv: cannot open " + path);
    if (!data.provenance.empty()) out << "# source: " << data.provenance << "\n";
    const int D = data.dim();
    for (int c = 0; c < D; ++c) out << "x" << (c + 1) << ",";
    out << "y\n";
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        for (int c = 0; c < D; ++c) {
            write_real(out, data.X(i, c));
            out << ",";
        }
        write_real(out, data.Y[i]);
        out << "\n";
    }
    if (!out) throw io_error("save_csv: write failed for " + path);
}

void save_normalization(const std::string& path, const NormalizationRecord& rec) {
    nlohmann::json j;
    j["x_scale"] = std::vector<double>(rec.x_scale.begin(), rec.x_scale.end());
    j["x_offset"] = std::vector<double>(rec.x_offset.begin(), rec.x_offset.end());
    j["y_scale"] = rec.y_scale;
    j["y_offset"] = rec.y_offset;
    std::ofstream out(path);
    if (!out) throw io_error("save_normalization: cannot open " + path);
    out << j.dump(2) << "\n";
}

NormalizationRecord load_normalization(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("load_normalization: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw io_error("load_normalization: " + std::string(e.what()));
    }
    NormalizationRecord rec;
    const auto xs = j.at("x_scale").get<std::vector<double>>();
    const auto xo = j.at("x_offset").get<std::vector<double>>();
    rec.x_scale = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    rec.x_offset = Eigen::Map<const Eigen::VectorXd>(xo.data(), static_cast<Eigen::Index>(xo.size()));
    rec.y_scale = j.at("y_scale").get<double>();
    rec.y_offset = j.at("y_offset").get<double>();
    return rec;
}

}  // namespace moe
