#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>

namespace polariton {

using ResidualFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct LsqOptions {
    int max_iterations{300};
    double cost_tolerance{1e-15};   // relative cost decrease
    double step_tolerance{1e-12};   // relative parameter step
    double gradient_tolerance{1e-14};
    double jacobian_step{1e-6};     // relative central-difference step
};

struct LsqResult {
    Eigen::VectorXd x;
    Eigen::VectorXd residual;
    Eigen::MatrixXd jacobian;  // at x
    double cost{};             // 0.5 |r|^2
    int iterations{};
    bool converged{false};
    std::string stop_reason;
};

// Central differences with a relative step; falls back to a one-sided
// difference when the symmetric stencil would leave the box.
Eigen::MatrixXd numerical_jacobian(const ResidualFunction& f, const Eigen::VectorXd& x, const Eigen::VectorXd& lower,
                                   const Eigen::VectorXd& upper, double relative_step);

// Box-constrained Levenberg-Marquardt with Marquardt diagonal scaling.  Trial
// points are projected onto [lower, upper].
LsqResult levenberg_marquardt(const ResidualFunction& f, Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                              const Eigen::VectorXd& upper, const LsqOptions& options = {});

// (J^T J)^-1 scaled by the residual variance; empty when rank deficient.
Eigen::MatrixXd parameter_covariance(const LsqResult& result);

}  // namespace polariton
