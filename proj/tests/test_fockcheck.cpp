#include "fixtures.hpp"
#include "oracles.hpp"

#include "polariton/correlations.hpp"
#include "polariton/errors.hpp"
#include "polariton/fockcheck.hpp"

#include <doctest.h>

using namespace polariton;

TEST_CASE("Fock space layout") {
    const FockSpace space({3, 4});
    CHECK(space.dim() == 12);
    CHECK(space.index_of({1, 2}) == 6);
    const Eigen::MatrixXd a1 = space.annihilation(1);
    // a|0,2> = sqrt(2)|0,1>
    CHECK(a1(space.index_of({0, 1}), space.index_of({0, 2})) == doctest::Approx(std::sqrt(2.0)));
    const Eigen::MatrixXd a0 = space.annihilation(0);
    const Eigen::MatrixXd comm = a0 * a1 - a1 * a0;
    CHECK(comm.norm() == 0.0);
    CHECK_THROWS(FockSpace({0, 2}));
}

TEST_CASE("single mode exact spectrum") {
    FockConfig cfg;
    cfg.cutoff = 12;
    const auto spec = exact_spectrum(fixture::single(1.0, 1.0, 0.2, 0.0), cfg);
    const auto [lo, hi] = oracle::single_mode_frequencies(1.0, 1.0, 0.2);
    REQUIRE(spec.single_excitations.size() == 2);
    CHECK(spec.single_excitations[0] == doctest::Approx(lo).epsilon(1e-6));
    CHECK(spec.single_excitations[1] == doctest::Approx(hi).epsilon(1e-6));
    CHECK(spec.convergence < 1e-6);
    CHECK(spec.basis_size == 144);
}

TEST_CASE("two-mode weak coupling against Bogoliubov") {
    const auto s = fixture::two_mode(0.96, 0.05, 0.05, 0.0);
    FockConfig cfg;
    cfg.cutoff = 6;
    const auto sol = exact_solution(s, cfg);
    const auto basis = diagonalize(s);
    const auto f = basis.frequencies();
    for (std::size_t k = 0; k < f.size(); ++k) CHECK(sol.spectrum.single_excitations[k] == doctest::Approx(f[k]).epsilon(1e-8));
    const auto corr = correlators(basis, ThermalState::of(basis, 0.0));
    CHECK((sol.correlators.normal - corr.normal).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((sol.correlators.anomalous - corr.anomalous).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("iterative solver matches the dense one") {
    const auto s = fixture::two_mode(0.96, 0.2, 0.2, 0.0);
    const FockSpace space({13, 13, 13});
    REQUIRE(space.dim() > FockConfig::kDenseLimit);
    FockConfig cfg;
    cfg.cutoff = 13;
    cfg.check_convergence = false;
    const auto sparse = exact_spectrum(s, cfg);
    const auto f = diagonalize(s).frequencies();
    for (std::size_t k = 0; k < f.size(); ++k) CHECK(sparse.single_excitations[k] == doctest::Approx(f[k]).epsilon(1e-5));
}

TEST_CASE("lanczos on a known diagonal matrix") {
    Eigen::SparseMatrix<double> h(300, 300);
    for (int i = 0; i < 300; ++i) h.insert(i, i) = 0.5 * (300 - i);
    const auto pairs = lanczos_lowest(h, 4);
    REQUIRE(pairs.values.size() >= 4);
    CHECK(pairs.values(0) == doctest::Approx(0.5));
    CHECK(pairs.values(3) == doctest::Approx(2.0));
}

TEST_CASE("oversized basis suggests a cutoff") {
    FockConfig cfg;
    cfg.cutoff = 80;
    try {
        exact_spectrum(fixture::bulk_main(0.96, 0.0), cfg);
        FAIL("expected BasisSizeError");
    } catch (const BasisSizeError& e) {
        CHECK(e.suggested_cutoff() > 1);
        CHECK(static_cast<Eigen::Index>(e.suggested_cutoff()) * e.suggested_cutoff() * e.suggested_cutoff() <= FockConfig::kMaxBasis);
    }
}
