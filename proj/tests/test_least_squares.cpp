#include "polariton/least_squares.hpp"

#include <doctest.h>

#include <cmath>

using namespace polariton;

TEST_CASE("linear problem solves exactly") {
    Eigen::MatrixXd a(4, 2);
    a << 1, 0, 1, 1, 1, 2, 1, 3;
    const Eigen::Vector4d b(1.0, 3.0, 5.0, 7.0);
    auto f = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return a * x - b; };
    const Eigen::VectorXd lo = Eigen::VectorXd::Constant(2, -10.0), hi = Eigen::VectorXd::Constant(2, 10.0);
    const auto r = levenberg_marquardt(f, Eigen::VectorXd::Zero(2), lo, hi);
    CHECK(r.converged);
    CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r.x(1) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(r.cost < 1e-20);
}

TEST_CASE("Rosenbrock") {
    auto f = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd r(2);
        r << 10.0 * (x(1) - x(0) * x(0)), 1.0 - x(0);
        return r;
    };
    const Eigen::VectorXd lo = Eigen::VectorXd::Constant(2, -5.0), hi = Eigen::VectorXd::Constant(2, 5.0);
    Eigen::VectorXd x0(2);
    x0 << -1.2, 1.0;
    const auto r = levenberg_marquardt(f, x0, lo, hi);
    CHECK(r.converged);
    CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(r.x(1) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("active bound") {
    auto f = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x - Eigen::VectorXd::Constant(1, 3.0); };
    const auto r = levenberg_marquardt(f, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, -1.0),
                                       Eigen::VectorXd::Constant(1, 2.0));
    CHECK(r.x(0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("numerical Jacobian of an exponential model") {
    auto f = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd r(3);
        for (int i = 0; i < 3; ++i) r(i) = x(0) * std::exp(-x(1) * i);
        return r;
    };
    Eigen::VectorXd x(2);
    x << 2.0, 0.5;
    const auto j = numerical_jacobian(f, x, Eigen::VectorXd::Constant(2, -1e3), Eigen::VectorXd::Constant(2, 1e3), 1e-6);
    for (int i = 0; i < 3; ++i) {
        CHECK(j(i, 0) == doctest::Approx(std::exp(-0.5 * i)).epsilon(1e-8));
        CHECK(j(i, 1) == doctest::Approx(-2.0 * i * std::exp(-0.5 * i)).epsilon(1e-7));
    }
    // one-sided at the bound
    const auto jb = numerical_jacobian(f, x, Eigen::VectorXd::Constant(2, 0.5), Eigen::VectorXd::Constant(2, 1e3), 1e-6);
    CHECK(jb(2, 1) == doctest::Approx(j(2, 1)).epsilon(1e-5));
}

TEST_CASE("covariance is empty for a rank-deficient fit") {
    auto f = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd r(3);
        r << x(0) + x(1) - 1.0, x(0) + x(1) - 1.1, x(0) + x(1) - 0.9;
        return r;
    };
    const auto r = levenberg_marquardt(f, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Constant(2, -5.0),
                                       Eigen::VectorXd::Constant(2, 5.0));
    CHECK(parameter_covariance(r).size() == 0);
}
