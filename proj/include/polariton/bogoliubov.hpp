#pragma once

#include "polariton/model.hpp"

#include <Eigen/Dense>

#include <complex>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace polariton {

// p = sum_l X_l b_l + sum_l X~_l b_l^dagger + Y a + Y~ a^dagger
struct PolaritonBranch {
    std::string label;
    double omega{};
    Eigen::VectorXcd X;
    Eigen::VectorXcd X_tilde;
    std::complex<double> Y{};
    std::complex<double> Y_tilde{};

    double symplectic_norm() const;
    // [p_this, p_other^dagger]
    std::complex<double> symplectic_product(const PolaritonBranch& other) const;
    // Multiplies every coefficient by a unit phase.
    PolaritonBranch rephased(std::complex<double> phase) const;
};

struct PolaritonBasis {
    std::vector<PolaritonBranch> branches;  // ascending omega
    Representation source{Representation::MinimalCoupling};

    std::size_t phonon_count() const { return branches.empty() ? 0 : static_cast<std::size_t>(branches.front().X.size()); }
    std::vector<double> frequencies() const;
    // max_{a,b} |[p_a, p_b^dagger] - delta_ab|
    double orthonormality_defect() const;
};

struct BranchWeights {
    std::vector<double> phonon;  // |X_l|^2 - |X~_l|^2
    double cavity{};             // |Y|^2 - |Y~|^2
    double total() const;
};

using PolaritonWeights = std::vector<BranchWeights>;

// LP/UP for two branches, LP/MP/UP for three, P1..Pn otherwise.
std::vector<std::string> branch_labels(std::size_t branch_count);
// Index of the branch with the given label, or throws StructureError.
std::size_t branch_index(const std::string& label, std::size_t branch_count);

inline constexpr double kStabilityTolerance = 1e-9;
inline constexpr double kMinimumFrequency = 1e-9;

// Bogoliubov diagonalization of eta*M.  Positive-norm eigenvectors are
// normalized to +1 symplectic norm and the largest-magnitude coefficient of
// each branch is made real positive.
PolaritonBasis diagonalize(const QuadraticForm& form);
// Convenience: diagonalize the minimal-coupling form of `system`.
PolaritonBasis diagonalize(const HybridSystem& system);

// Independent roots of omega^2 (1 + sum_l nu_l^2/(omega_l^2 - omega^2)) = omega_c^2.
std::vector<double> secular_frequencies(const HybridSystem& system);

// omega_c -> 0 limits of the phonon-like branches: zeros of
// 1 + sum_l nu_l^2/(omega_l^2 - omega^2), one above each omega_l.
std::vector<double> zero_cavity_limits(const HybridSystem& system);

PolaritonWeights weights(const PolaritonBasis& basis);

struct AsymptoticCoefficients {
    PolaritonBasis basis;  // frequencies are the bare LP ~ omega_c, omega_l
    double frequency_ratio{};  // omega_c / min omega
    bool valid{false};
};

inline constexpr double kAsymptoticMaxRatio = 0.2;
// Leading low-cavity-frequency Hopfield coefficients.
AsymptoticCoefficients asymptotic_coefficients(const HybridSystem& system);

struct SweepPoint {
    double omega_c{};
    PolaritonBasis basis;
    PolaritonWeights weights;
};

std::vector<SweepPoint> dispersion_sweep(const HybridSystem& templ, std::span<const double> omega_c_grid);

void write_dispersion_csv(std::ostream& os, const std::vector<SweepPoint>& sweep);
void write_weights_csv(std::ostream& os, const std::vector<SweepPoint>& sweep);

}  // namespace polariton
