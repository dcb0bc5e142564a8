#include "moe/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace moe {

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0, double step, int max_iters,
                             double tol) {
    const Eigen::Index n = x0.size();
    std::vector<Eigen::VectorXd> simplex;
    std::vector<double> values;
    simplex.reserve(n + 1);
    simplex.push_back(x0);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXd v = x0;
        v[i] += step;
        simplex.push_back(std::move(v));
    }
    for (const auto& v : simplex) values.push_back(f(v));

    auto order = [&] {
        std::vector<std::size_t> idx(simplex.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        std::vector<Eigen::VectorXd> s2;
        std::vector<double> v2;
        for (std::size_t i : idx) {
            s2.push_back(simplex[i]);
            v2.push_back(values[i]);
        }
        simplex = std::move(s2);
        values = std::move(v2);
    };

    NelderMeadResult res;
    int it = 0;
    for (; it < max_iters; ++it) {
        order();
        if (std::isfinite(values[0]) && std::isfinite(values.back()) &&
            values.back() - values[0] < tol) {
            res.converged = true;
            break;
        }
        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (Eigen::Index i = 0; i < n; ++i) centroid += simplex[static_cast<std::size_t>(i)];
        centroid /= static_cast<double>(n);

        const Eigen::VectorXd& worst = simplex.back();
        const Eigen::VectorXd reflected = centroid + (centroid - worst);
        const double fr = f(reflected);
        if (fr < values[0]) {
            const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - worst);
            const double fe = f(expanded);
            if (fe < fr) {
                simplex.back() = expanded;
                values.back() = fe;
            } else {
                simplex.back() = reflected;
                values.back() = fr;
            }
            continue;
        }
        if (fr < values[values.size() - 2]) {
            simplex.back() = reflected;
            values.back() = fr;
            continue;
        }
        const bool outside = fr < values.back();
        Eigen::VectorXd contracted;
        if (outside) {
            contracted = centroid + 0.5 * (reflected - centroid);
        } else {
            contracted = centroid - 0.5 * (centroid - worst);
        }
        const double fc = f(contracted);
        if (fc < std::min(fr, values.back())) {
            simplex.back() = contracted;
            values.back() = fc;
            continue;
        }
        for (std::size_t i = 1; i < simplex.size(); ++i) {
            simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
            values[i] = f(simplex[i]);
        }
    }
    order();
    res.x = simplex[0];
    res.value = values[0];
    res.iterations = it;
    return res;
}

}  // namespace moe
