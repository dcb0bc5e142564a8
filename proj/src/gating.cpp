#include "moe/gating.hpp"

#include <cmath>

#include "moe/errors.hpp"
#include "moe/math.hpp"

namespace moe {

PriorSpec PriorSpec::standard(int K, double alpha, int D, double y_max) {
    PriorSpec spec;
    spec.K = K;
    spec.alpha = alpha;
    spec.D = D;
    spec.y_max = y_max;
    spec.mu_grid.resize(K, D);
    if (D == 1) {
        for (int k = 0; k < K; ++k) {
            spec.mu_grid(k, 0) = static_cast<double>(k + 1) / (K + 1);
        }
        spec.mu_sd = 0.25 / (K + 1);
        spec.gating_sd_scale = 0.25 / (K + 1);
    } else {
        // Cartesian grid with ceil(K^(1/D)) cell centers per axis, components
        // assigned in row-major order, extras truncated.
        const double root = std::pow(static_cast<double>(K), 1.0 / D);
        const int per_axis = static_cast<int>(std::ceil(root - 1e-9));
        for (int k = 0; k < K; ++k) {
            int idx = k;
            for (int d = D - 1; d >= 0; --d) {
                const int cell = idx % per_axis;
                idx /= per_axis;
                spec.mu_grid(k, d) = (cell + 0.5) / per_axis;
            }
        }
        spec.mu_sd = 0.05 / (root + 1.0);
        spec.gating_sd_scale = 0.01 / (root + 1.0);
    }
    spec.validate();
    return spec;
}

void PriorSpec::validate() const {
    if (K < 1) throw config_error("PriorSpec: K must be >= 1");
    if (!(alpha > 0.0)) throw config_error("PriorSpec: alpha must be positive");
    if (D < 1) throw config_error("PriorSpec: D must be >= 1");
    if (!(mu_sd > 0.0) || !(gating_sd_scale > 0.0) || !(noise_sd_scale > 0.0) ||
        !(signal_sd_scale > 0.0) || !(length_scale_scale > 0.0)) {
        throw config_error("PriorSpec: scale hyperparameters must be positive");
    }
    if (mu_grid.rows() != K || mu_grid.cols() != D) {
        throw config_error("PriorSpec: mu_grid shape must be K x D");
    }
}

double log_kernel_value(const Eigen::VectorXd& x, int k, const GatingParams& psi) {
    const auto& c = psi.comps.at(k);
    if (x.size() != c.mean.size()) {
        throw dimension_error("kernel_value: input dimension mismatch");
    }
    double lp = c.log_nu;
    for (Eigen::Index d = 0; d < x.size(); ++d) {
        lp += log_normal_pdf(x[d], c.mean[d], c.sd[d] * c.sd[d]);
    }
    return lp;
}

double kernel_value(const Eigen::VectorXd& x, int k, const GatingParams& psi) {
    return std::exp(log_kernel_value(x, k, psi));
}

Eigen::VectorXd gating_log_probs(const Eigen::VectorXd& x, const GatingParams& psi) {
    const int K = psi.K();
    Eigen::VectorXd lp(K);
    for (int k = 0; k < K; ++k) lp[k] = log_kernel_value(x, k, psi);
    const double norm = log_sum_exp({lp.data(), static_cast<std::size_t>(K)});
    if (!std::isfinite(norm)) {
        throw numerical_error("gating_probs: all kernel values vanished");
    }
    return lp.array() - norm;
}

Eigen::VectorXd gating_probs(const Eigen::VectorXd& x, const GatingParams& psi) {
    return gating_log_probs(x, psi).array().exp();
}

Allocation sample_allocation(const Eigen::MatrixXd& inputs, const GatingParams& psi,
                             RngStream& rng) {
    const Eigen::Index n = inputs.rows();
    Allocation alloc(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd p = gating_probs(inputs.row(i).transpose(), psi);
        alloc[i] = static_cast<int>(
            rng.categorical({p.data(), static_cast<std::size_t>(p.size())}));
    }
    return alloc;
}

GatingParams sample_gating_prior(const PriorSpec& spec, RngStream& rng) {
    GatingParams psi;
    psi.comps.resize(spec.K);
    for (int k = 0; k < spec.K; ++k) {
        auto& c = psi.comps[k];
        c.log_nu = rng.log_gamma(spec.alpha / spec.K);
        c.mean.resize(spec.D);
        c.sd.resize(spec.D);
        for (int d = 0; d < spec.D; ++d) {
            c.mean[d] = rng.normal(spec.mu_grid(k, d), spec.mu_sd);
            double s;
            do {
                s = rng.half_normal(spec.gating_sd_scale);
            } while (s == 0.0);
            c.sd[d] = s;
        }
    }
    return psi;
}

ExpertParams sample_expert_prior(const PriorSpec& spec, RngStream& rng) {
    ExpertParams theta;
    theta.mean = rng.uniform(0.0, spec.y_max);
    theta.noise_sd = rng.half_normal(spec.noise_sd_scale);
    theta.signal_sd = rng.half_normal(spec.signal_sd_scale);
    theta.length_scales.resize(spec.D);
    for (int d = 0; d < spec.D; ++d) {
        double l;
        do {
            l = rng.half_normal(spec.length_scale_scale);
        } while (l == 0.0);
        theta.length_scales[d] = l;
    }
    return theta;
}

std::pair<GatingParams, std::vector<ExpertParams>> sample_prior(const PriorSpec& spec,
                                                                RngStream& rng) {
    GatingParams psi = sample_gating_prior(spec, rng);
    std::vector<ExpertParams> thetas;
    thetas.reserve(spec.K);
    for (int k = 0; k < spec.K; ++k) thetas.push_back(sample_expert_prior(spec, rng));
    return {std::move(psi), std::move(thetas)};
}

double log_gating_prior_density(const GatingParams& psi, const PriorSpec& spec) {
    double lp = 0.0;
    for (int k = 0; k < psi.K(); ++k) {
        const auto& c = psi.comps[k];
        lp += log_gamma_pdf_from_log(c.log_nu, spec.alpha / spec.K);
        for (int d = 0; d < spec.D; ++d) {
            lp += log_normal_pdf(c.mean[d], spec.mu_grid(k, d), spec.mu_sd * spec.mu_sd);
            if (!(c.sd[d] > 0.0)) return kNegInf;
            lp += log_half_normal_pdf(c.sd[d], spec.gating_sd_scale);
        }
    }
    return lp;
}

double log_expert_prior_density(const ExpertParams& theta, const PriorSpec& spec) {
    if (theta.mean < 0.0 || theta.mean > spec.y_max) return kNegInf;
    if (!theta.in_support()) return kNegInf;
    double lp = -std::log(spec.y_max);
    lp += log_half_normal_pdf(theta.noise_sd, spec.noise_sd_scale);
    lp += log_half_normal_pdf(theta.signal_sd, spec.signal_sd_scale);
    for (int d = 0; d < theta.dim(); ++d) {
        lp += log_half_normal_pdf(theta.length_scales[d], spec.length_scale_scale);
    }
    return lp;
}

double log_prior_density(const GatingParams& psi, const std::vector<ExpertParams>& thetas,
                         const PriorSpec& spec) {
    double lp = log_gating_prior_density(psi, spec);
    for (const auto& theta : thetas) lp += log_expert_prior_density(theta, spec);
    return lp;
}

bool sparsity_condition(double alpha, int K, int D, int rho) {
    if (rho < 0) rho = 1 + 2 * D;
    return alpha / K < rho / 2.0;
}

std::vector<DataSubset> partition_data(const Eigen::MatrixXd& inputs,
                                       const Eigen::VectorXd& outputs,
                                       const Allocation& alloc, int K) {
    std::vector<std::vector<int>> idx(K);
    for (std::size_t i = 0; i < alloc.size(); ++i) idx[alloc[i]].push_back(static_cast<int>(i));
    std::vector<DataSubset> subsets(K);
    for (int k = 0; k < K; ++k) {
        const auto& rows = idx[k];
        DataSubset& s = subsets[k];
        s.inputs.resize(rows.size(), inputs.cols());
        s.outputs.resize(rows.size());
        s.indices = rows;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            s.inputs.row(r) = inputs.row(rows[r]);
            s.outputs[r] = outputs[rows[r]];
        }
    }
    return subsets;
}

}  // namespace moe
