#pragma once

#include "polariton/model.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <vector>

namespace polariton {

// Tensor-product occupation basis; mode 0 is the most significant digit.
class FockSpace {
public:
    explicit FockSpace(std::vector<int> dims);

    Eigen::Index dim() const noexcept { return dim_; }
    std::size_t mode_count() const noexcept { return dims_.size(); }
    const std::vector<int>& dims() const noexcept { return dims_; }

    Eigen::SparseMatrix<double> identity() const;
    // Truncated annihilation operator of one mode, embedded in the full space.
    Eigen::SparseMatrix<double> annihilation(std::size_t mode) const;
    Eigen::Index index_of(const std::vector<int>& occupation) const;

private:
    std::vector<int> dims_;
    Eigen::Index dim_{1};
};

struct FockConfig {
    int cutoff{10};                 // levels per mode (occupations 0 .. cutoff-1)
    std::vector<int> mode_cutoffs;  // optional per-mode override, phonons first, cavity last
    bool check_convergence{true};   // repeat with every cutoff raised by two
    int levels{24};                 // eigenpairs requested from the iterative solver

    static constexpr Eigen::Index kMaxBasis = 200000;
    static constexpr Eigen::Index kDenseLimit = 2000;
};

struct FockSpectrum {
    std::vector<double> excitations;         // E_k - E_0, k >= 1, ascending
    std::vector<double> single_excitations;  // one per polariton branch, ascending
    double ground_energy{};
    double convergence{};  // max single-excitation shift at cutoff + 2 (0 when unchecked)
    std::vector<int> cutoffs;
    Eigen::Index basis_size{};
};

struct FockCorrelators {
    Eigen::MatrixXcd normal;     // <b_l^dag b_l'> in the ground state
    Eigen::MatrixXcd anomalous;  // <b_l b_l'> in the ground state
    double convergence{};        // max entry change at cutoff + 2 (0 when unchecked)
    std::vector<int> cutoffs;
    Eigen::Index basis_size{};
};

// Excitation energies of the minimal-coupling Hamiltonian by exact
// diagonalization in a truncated Fock basis.
FockSpectrum exact_spectrum(const HybridSystem& system, const FockConfig& config = {});
FockCorrelators exact_ground_correlators(const HybridSystem& system, const FockConfig& config = {});

struct FockSolution {
    FockSpectrum spectrum;
    FockCorrelators correlators;
};

// Both of the above from one pair of eigensolves.
FockSolution exact_solution(const HybridSystem& system, const FockConfig& config = {});

struct EigenPairs {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // columns
};

// Lowest `count` eigenpairs of a real symmetric sparse matrix by Lanczos with
// full reorthogonalization.  Exact multiplicities of degenerate levels are not
// guaranteed.
EigenPairs lanczos_lowest(const Eigen::SparseMatrix<double>& h, int count);

}  // namespace polariton
