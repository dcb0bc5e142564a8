#include "moe/gp.hpp"

#include <cmath>

#include "moe/errors.hpp"
#include "moe/math.hpp"

namespace moe {

Eigen::VectorXd ExpertParams::to_vector() const {
    Eigen::VectorXd v(param_count());
    v[0] = mean;
    v[1] = noise_sd;
    v[2] = signal_sd;
    v.tail(dim()) = length_scales;
    return v;
}

ExpertParams ExpertParams::from_vector(const Eigen::VectorXd& v) {
    ExpertParams p;
    p.mean = v[0];
    p.noise_sd = v[1];
    p.signal_sd = v[2];
    p.length_scales = v.tail(v.size() - 3);
    return p;
}

bool ExpertParams::in_support() const {
    if (noise_sd < 0.0 || signal_sd < 0.0) return false;
    for (int d = 0; d < dim(); ++d) {
        if (!(length_scales[d] > 0.0)) return false;
    }
    return true;
}

Eigen::MatrixXd cov_matrix(const Eigen::MatrixXd& xa, const Eigen::MatrixXd& xb,
                           const ExpertParams& params, bool same_set) {
    const Eigen::Index d = params.dim();
    if ((xa.rows() > 0 && xa.cols() != d) || (xb.rows() > 0 && xb.cols() != d)) {
        throw dimension_error("cov_matrix: point dimension does not match length scales");
    }
    const double sf2 = params.signal_sd * params.signal_sd;
    const double se2 = params.noise_sd * params.noise_sd;
    Eigen::MatrixXd cov(xa.rows(), xb.rows());
    for (Eigen::Index i = 0; i < xa.rows(); ++i) {
        for (Eigen::Index j = 0; j < xb.rows(); ++j) {
            double expo = 0.0;
            for (Eigen::Index k = 0; k < d; ++k) {
                const double diff = xa(i, k) - xb(j, k);
                const double l = params.length_scales[k];
                expo -= diff * diff / (l * l);
            }
            double v = sf2 * std::exp(expo);
            if (same_set && i == j) v += se2;
            cov(i, j) = v;
        }
    }
    return cov;
}

Eigen::LLT<Eigen::MatrixXd> chol_with_jitter(Eigen::MatrixXd cov) {
    const double base = cov.diagonal().mean();
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success) return llt;

    std::vector<double> attempts;
    double jitter = 1e-10 * base;
    const double cap = 1e-4 * base;
    double added = 0.0;
    while (jitter <= cap * (1.0 + 1e-12)) {
        cov.diagonal().array() += jitter - added;
        added = jitter;
        attempts.push_back(jitter);
        llt.compute(cov);
        if (llt.info() == Eigen::Success) return llt;
        jitter *= 10.0;
    }
    throw numerical_error("covariance factorization failed after jitter escalation",
                          attempts);
}

double log_marginal_likelihood(const DataSubset& data, const ExpertParams& params) {
    const Eigen::Index n = data.size();
    if (n == 0) return 0.0;  // empty product of likelihoods
    Eigen::MatrixXd cov = cov_matrix(data.inputs, data.inputs, params, true);
    Eigen::LLT<Eigen::MatrixXd> llt = chol_with_jitter(std::move(cov));
    const Eigen::VectorXd resid = data.outputs.array() - params.mean;
    const Eigen::VectorXd alpha = llt.solve(resid);
    const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    return -0.5 * resid.dot(alpha) - 0.5 * log_det
           - 0.5 * static_cast<double>(n) * kLogTwoPi;
}

GpPosterior::GpPosterior(const DataSubset& data, const ExpertParams& params)
    : params_(params) {
    if (data.size() == 0) return;
    inputs_ = data.inputs;
    Eigen::MatrixXd cov = cov_matrix(inputs_, inputs_, params_, true);
    chol_ = chol_with_jitter(std::move(cov));
    const Eigen::VectorXd resid = data.outputs.array() - params_.mean;
    alpha_ = chol_.solve(resid);
    empty_ = false;
}

GpPrediction GpPosterior::predict(const Eigen::VectorXd& x_star) const {
    const double prior_var =
        params_.noise_sd * params_.noise_sd + params_.signal_sd * params_.signal_sd;
    if (empty_) {
        return {params_.mean, prior_var, true};
    }
    // cross covariance carries no noise term; Sigma_** includes it
    Eigen::MatrixXd xs = x_star.transpose();
    Eigen::MatrixXd kstar = cov_matrix(xs, inputs_, params_, false);  // 1 x N
    const Eigen::VectorXd k = kstar.row(0).transpose();
    const double mean = k.dot(alpha_) + params_.mean;
    const Eigen::VectorXd v = chol_.solve(k);
    double variance = prior_var - k.dot(v);
    // noise floor; clamp tiny negative round-off
    const double floor = params_.noise_sd * params_.noise_sd;
    if (variance < floor) variance = floor;
    return {mean, variance, false};
}

GpPrediction gp_predict(const Eigen::VectorXd& x_star, const DataSubset& data,
                        const ExpertParams& params) {
    return GpPosterior(data, params).predict(x_star);
}

}  // namespace moe
