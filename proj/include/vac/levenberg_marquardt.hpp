#pragma once

#include <Eigen/Core>
#include <functional>
#include <stdexcept>
#include <string>

namespace vac {

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Box-constrained nonlinear least squares problem: minimise sum r_i(x)^2.
struct LeastSquaresProblem {
    Eigen::Index num_residuals = 0;
    /// Fills `r`. Non-finite entries mark `x` as infeasible.
    std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& r)> residuals;
    /// Fills `J` with dr_i/dx_j.
    std::function<void(const Eigen::VectorXd& x, Eigen::MatrixXd& J)> jacobian;
    Eigen::VectorXd lower;  // empty = unbounded
    Eigen::VectorXd upper;
};

struct LmOptions {
    int max_iterations = 200;
    double relative_rss_tolerance = 1e-10;
    double step_tolerance = 1e-12;  // infinity norm
    double initial_damping = 1e-3;
    double max_damping = 1e8;
};

struct LmResult {
    Eigen::VectorXd x;
    double rss = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string stop_reason;
};

/// Levenberg-Marquardt with Marquardt (Moré) diagonal scaling. Each damped
/// step is solved by QR of the augmented system and projected onto the
/// bounds. Stops when an accepted step lowers the RSS by a relative amount
/// below the tolerance, when the step falls below the step tolerance, or at
/// the iteration limit (converged = false). Throws FitError if the damping
/// has to grow past `max_damping`, or if the start point is infeasible.
LmResult levenberg_marquardt(const LeastSquaresProblem& problem, Eigen::VectorXd x0, const LmOptions& options = {});

/// Central finite-difference Jacobian with relative step `rel_step`.
Eigen::MatrixXd finite_difference_jacobian(const LeastSquaresProblem& problem, const Eigen::VectorXd& x,
                                           double rel_step = 1e-7);

}  // namespace vac
