#ifndef MOE_NELDER_MEAD_HPP
#define MOE_NELDER_MEAD_HPP

#include <Eigen/Dense>
#include <functional>

namespace moe {

struct NelderMeadResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Derivative-free simplex minimization with the standard reflection /
// expansion / contraction / shrink coefficients.  Stops when the simplex
// value spread falls below tol or the iteration cap is hit.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0, double step = 0.1,
                             int max_iters = 200, double tol = 1e-10);

}  // namespace moe

#endif
