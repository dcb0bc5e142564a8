#ifndef MOE_DATA_HPP
#define MOE_DATA_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace moe {

// Inverse maps of the dataset normalization: raw = norm * scale + offset
// per input dimension, y_raw = y_norm * y_scale + y_offset.
struct NormalizationRecord {
    Eigen::VectorXd x_scale;   // D, per-dimension range
    Eigen::VectorXd x_offset;  // D, per-dimension minimum
    double y_scale = 1.0;      // sample sd of raw Y
    double y_offset = 0.0;     // raw minimum of Y

    static NormalizationRecord identity(int D);

    Eigen::VectorXd denorm_x(const Eigen::VectorXd& x) const;
    double denorm_y(double y) const { return y * y_scale + y_offset; }
    double norm_y(double y) const { return (y - y_offset) / y_scale; }
};

struct Dataset {
    Eigen::MatrixXd X;  // N x D
    Eigen::VectorXd Y;  // N
    NormalizationRecord norm;  // identity until normalize() is applied
    std::string provenance;

    Eigen::Index size() const { return Y.size(); }
    int dim() const { return static_cast<int>(X.cols()); }
};

// Noise-free curves and noise levels of the two synthetic benchmarks,
// exposed for ground-truth evaluation.
double synth1_mean(double x);
double synth1_sd(double x);
double synth2_mean(double x);
double synth2_sd(double x);

// x uniform on [0,1]; smooth curve with homoskedastic noise.
Dataset gen_synth1(int n, std::uint64_t seed);

// x uniform on [0,1]; discontinuous three-regime curve with
// heteroskedastic noise.
Dataset gen_synth2(int n, std::uint64_t seed);

// Affine-maps every input dimension onto [0,1], shifts Y to minimum zero and
// scales it to unit sample variance.  The returned record holds the inverse.
Dataset normalize(const Dataset& raw);

Dataset denormalize(const Dataset& data);

// Header row, D input columns then the output column.  Blank lines and
// '#' comment lines are skipped; malformed rows are reported with their
// line number.
Dataset load_csv(const std::string& path, int d);

void save_csv(const std::string& path, const Dataset& data);

void save_normalization(const std::string& path, const NormalizationRecord& rec);
NormalizationRecord load_normalization(const std::string& path);

}  // namespace moe

#endif
