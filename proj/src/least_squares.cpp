#include "polariton/least_squares.hpp"

#include "polariton/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace polariton {

namespace {

Eigen::VectorXd project(Eigen::VectorXd x, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
    return x.cwiseMax(lower).cwiseMin(upper);
}

// Gradient components pushing against an active bound do not count.
double projected_gradient_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& grad, const Eigen::VectorXd& lower,
                               const Eigen::VectorXd& upper) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if ((x(i) <= lower(i) && grad(i) > 0.0) || (x(i) >= upper(i) && grad(i) < 0.0)) continue;
        worst = std::max(worst, std::abs(grad(i)));
    }
    return worst;
}

}  // namespace

Eigen::MatrixXd numerical_jacobian(const ResidualFunction& f, const Eigen::VectorXd& x, const Eigen::VectorXd& lower,
                                   const Eigen::VectorXd& upper, double relative_step) {
    Eigen::MatrixXd jac;
    Eigen::VectorXd probe = x;
    Eigen::VectorXd base;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double h = relative_step * std::max(std::abs(x(j)), 1e-3);
        const bool up_ok = x(j) + h <= upper(j);
        const bool down_ok = x(j) - h >= lower(j);
        Eigen::VectorXd column;
        if (up_ok && down_ok) {
            probe(j) = x(j) + h;
            const Eigen::VectorXd fp = f(probe);
            probe(j) = x(j) - h;
            column = (fp - f(probe)) / (2.0 * h);
        } else {
            if (base.size() == 0) base = f(x);
            probe(j) = up_ok ? x(j) + h : x(j) - h;
            column = (f(probe) - base) / (up_ok ? h : -h);
        }
        probe(j) = x(j);
        if (jac.size() == 0) jac.resize(column.size(), x.size());
        jac.col(j) = column;
    }
    return jac;
}

LsqResult levenberg_marquardt(const ResidualFunction& f, Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                              const Eigen::VectorXd& upper, const LsqOptions& options) {
    const Eigen::Index p = x0.size();
    if (lower.size() != p || upper.size() != p) throw StructureError("bound vectors do not match the parameter count");
    if ((lower.array() > upper.array()).any()) throw DomainError("lower bound above upper bound");

    LsqResult out;
    out.x = project(std::move(x0), lower, upper);
    out.residual = f(out.x);
    if (out.residual.size() < p) throw IdentifiabilityError("fewer residuals than parameters");
    out.cost = 0.5 * out.residual.squaredNorm();

    double damping = 1e-3;
    bool refresh = true;
    Eigen::VectorXd grad;
    Eigen::MatrixXd normal;
    for (out.iterations = 0; out.iterations < options.max_iterations; ++out.iterations) {
        if (refresh) {
            out.jacobian = numerical_jacobian(f, out.x, lower, upper, options.jacobian_step);
            grad = out.jacobian.transpose() * out.residual;
            normal = out.jacobian.transpose() * out.jacobian;
            refresh = false;
        }
        if (out.cost == 0.0 || projected_gradient_norm(out.x, grad, lower, upper) <=
                                   options.gradient_tolerance * std::max(1.0, out.cost)) {
            out.converged = true;
            out.stop_reason = "gradient";
            break;
        }

        Eigen::MatrixXd lhs = normal;
        for (Eigen::Index i = 0; i < p; ++i) lhs(i, i) += damping * std::max(normal(i, i), 1e-12);
        const Eigen::VectorXd step = lhs.ldlt().solve(-grad);
        const Eigen::VectorXd trial = project(out.x + step, lower, upper);
        const Eigen::VectorXd actual_step = trial - out.x;

        const Eigen::VectorXd trial_residual = f(trial);
        const double trial_cost = 0.5 * trial_residual.squaredNorm();
        if (std::isfinite(trial_cost) && trial_cost < out.cost) {
            const double decrease = (out.cost - trial_cost) / out.cost;
            out.x = trial;
            out.residual = trial_residual;
            out.cost = trial_cost;
            damping = std::max(damping / 3.0, 1e-12);
            refresh = true;
            if (decrease < options.cost_tolerance) {
                out.converged = true;
                out.stop_reason = "cost";
                break;
            }
            if (actual_step.norm() <= options.step_tolerance * (out.x.norm() + options.step_tolerance)) {
                out.converged = true;
                out.stop_reason = "step";
                break;
            }
        } else {
            damping *= 4.0;
            if (damping > 1e16 ||
                actual_step.norm() <= options.step_tolerance * (out.x.norm() + options.step_tolerance)) {
                // no decrease possible along any damped direction
                out.converged = true;
                out.stop_reason = "stalled";
                break;
            }
        }
    }
    if (refresh) out.jacobian = numerical_jacobian(f, out.x, lower, upper, options.jacobian_step);
    if (!out.converged) out.stop_reason = "iteration limit";
    return out;
}

Eigen::MatrixXd parameter_covariance(const LsqResult& result) {
    const Eigen::Index m = result.residual.size();
    const Eigen::Index p = result.x.size();
    const Eigen::MatrixXd normal = result.jacobian.transpose() * result.jacobian;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
    if (lu.rank() < p) return {};
    const double variance = m > p ? 2.0 * result.cost / static_cast<double>(m - p) : 0.0;
    return variance * lu.inverse();
}

}  // namespace polariton
