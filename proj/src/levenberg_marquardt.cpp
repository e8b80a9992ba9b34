#include "vac/levenberg_marquardt.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace vac {
namespace {

// Fixed-order accumulation keeps the RSS bit-identical across runs.
double sum_of_squares(const Eigen::VectorXd& r) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) s += r[i] * r[i];
    return s;
}

Eigen::VectorXd project(const LeastSquaresProblem& p, Eigen::VectorXd x) {
    if (p.lower.size() == x.size()) x = x.cwiseMax(p.lower);
    if (p.upper.size() == x.size()) x = x.cwiseMin(p.upper);
    return x;
}

}  // namespace

LmResult levenberg_marquardt(const LeastSquaresProblem& problem, Eigen::VectorXd x0, const LmOptions& options) {
    const Eigen::Index n = x0.size();
    const Eigen::Index m = problem.num_residuals;
    LmResult result;
    result.x = project(problem, std::move(x0));

    Eigen::VectorXd r(m), r_trial(m);
    Eigen::MatrixXd J(m, n);
    problem.residuals(result.x, r);
    if (!r.allFinite()) throw FitError("initial parameters are infeasible");
    result.rss = sum_of_squares(r);

    Eigen::VectorXd scale = Eigen::VectorXd::Zero(n);
    double damping = options.initial_damping;
    bool need_jacobian = true;

    Eigen::MatrixXd augmented(m + n, n);
    Eigen::VectorXd rhs(m + n);

    while (result.iterations < options.max_iterations) {
        if (result.rss == 0.0) {
            result.converged = true;
            result.stop_reason = "zero residual";
            return result;
        }
        if (need_jacobian) {
            problem.jacobian(result.x, J);
            for (Eigen::Index j = 0; j < n; ++j) scale[j] = std::max(scale[j], J.col(j).squaredNorm());
            need_jacobian = false;
        }

        augmented.topRows(m) = J;
        augmented.bottomRows(n).setZero();
        for (Eigen::Index j = 0; j < n; ++j) {
            augmented(m + j, j) = std::sqrt(damping * (scale[j] > 0.0 ? scale[j] : 1.0));
        }
        rhs.head(m) = -r;
        rhs.tail(n).setZero();
        const Eigen::VectorXd step = augmented.colPivHouseholderQr().solve(rhs);

        const Eigen::VectorXd x_trial = project(problem, result.x + step);
        const Eigen::VectorXd taken = x_trial - result.x;
        ++result.iterations;

        if (taken.lpNorm<Eigen::Infinity>() < options.step_tolerance) {
            result.converged = true;
            result.stop_reason = "step below tolerance";
            return result;
        }

        problem.residuals(x_trial, r_trial);
        const double rss_trial = r_trial.allFinite() ? sum_of_squares(r_trial) : INFINITY;
        if (rss_trial < result.rss) {
            const double reduction = (result.rss - rss_trial) / result.rss;
            result.x = x_trial;
            r.swap(r_trial);
            result.rss = rss_trial;
            damping = std::max(damping * 0.1, 1e-20);
            need_jacobian = true;
            if (reduction < options.relative_rss_tolerance) {
                result.converged = true;
                result.stop_reason = "relative RSS reduction below tolerance";
                return result;
            }
        } else {
            damping *= 10.0;
            if (damping > options.max_damping) {
                throw FitError("damping exceeded " + std::to_string(options.max_damping) +
                               " without reducing the residual");
            }
        }
    }
    result.stop_reason = "iteration limit";
    return result;
}

Eigen::MatrixXd finite_difference_jacobian(const LeastSquaresProblem& problem, const Eigen::VectorXd& x,
                                           double rel_step) {
    const Eigen::Index n = x.size();
    Eigen::MatrixXd J(problem.num_residuals, n);
    Eigen::VectorXd plus(problem.num_residuals), minus(problem.num_residuals);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double h = rel_step * std::max(std::abs(x[j]), 1.0);
        Eigen::VectorXd xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        problem.residuals(xp, plus);
        problem.residuals(xm, minus);
        J.col(j) = (plus - minus) / (xp[j] - xm[j]);
    }
    return J;
}

}  // namespace vac
