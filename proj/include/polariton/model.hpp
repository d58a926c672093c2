#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace polariton {

// A transverse optical phonon: bare frequency and effective ion plasma
// frequency, both ordinary frequencies in THz.
struct PhononMode {
    std::string label;
    double omega{};
    double nu{};
};

struct SlotGeometry {
    double slot_length_um{};
    double eps_sub{};
    double eps_air{1.0};
};

struct CavityMode {
    double omega_c{};
    std::optional<SlotGeometry> geometry;
};

// Cavity plus N >= 1 phonon modes kept sorted by ascending bare frequency.
class HybridSystem {
public:
    HybridSystem(CavityMode cavity, std::vector<PhononMode> phonons, double temperature_K = 300.0);

    const CavityMode& cavity() const noexcept { return cavity_; }
    double omega_c() const noexcept { return cavity_.omega_c; }
    const std::vector<PhononMode>& phonons() const noexcept { return phonons_; }
    const PhononMode& phonon(std::size_t i) const { return phonons_.at(i); }
    std::size_t phonon_count() const noexcept { return phonons_.size(); }
    std::size_t mode_count() const noexcept { return phonons_.size() + 1; }
    double temperature_K() const noexcept { return temperature_K_; }

    HybridSystem with_cavity_frequency(double omega_c) const;
    HybridSystem with_plasma_frequencies(const std::vector<double>& nu) const;
    HybridSystem with_temperature(double temperature_K) const;
    // Multiplies every frequency (cavity, omega, nu) by factor.
    HybridSystem scaled(double factor) const;

private:
    CavityMode cavity_;
    std::vector<PhononMode> phonons_;
    double temperature_K_;
};

enum class Representation { MinimalCoupling, PZW };

std::string to_string(Representation rep);

// H = 1/2 v^dagger M v + const in the ordered basis
// v = (b_1 .. b_N, a, b_1^dagger .. b_N^dagger, a^dagger).
// Entries are frequencies in THz (hbar factored out).  The bosonic metric is
// eta = diag(+1 x (N+1), -1 x (N+1)).
struct QuadraticForm {
    Representation representation{Representation::MinimalCoupling};
    Eigen::MatrixXcd matrix;

    Eigen::Index mode_count() const noexcept { return matrix.rows() / 2; }
    Eigen::Index dim() const noexcept { return matrix.rows(); }
    // ||M - M^dagger|| / ||M||
    double hermiticity_defect() const;
    Eigen::MatrixXcd normal_block() const { return matrix.topLeftCorner(mode_count(), mode_count()); }
    Eigen::MatrixXcd anomalous_block() const { return matrix.topRightCorner(mode_count(), mode_count()); }
};

struct SqueezedPhonon {
    double omega_tilde{};
    double g_tilde{};
    // beta = c_plus * b + c_minus * b^dagger, c_plus^2 - c_minus^2 = 1
    double c_plus{};
    double c_minus{};
};

// Low-cavity-frequency effective Hamiltonian after integrating out the
// cavity in the squeezed-phonon picture.
//
// `cavity_shift` and `phonon_coupling` are the closed forms
//   sum_l gt_l^2/wt_l   and   K_ll' = (gt_l gt_l'/2)(wt_l + wt_l')/(wt_l wt_l').
// The `*_second_order` members hold the complete second-order
// Schrieffer-Wolff coefficients, including both energy denominators:
//   H' contains + kappa (a - a^dagger)^2 + sum_ll' J_ll' (beta_l + beta_l^dagger)(beta_l' + beta_l'^dagger)
//   kappa = sum_l gt_l^2 wt_l/(wt_l^2 - wc^2),
//   J_ll' = (gt_l gt_l' wc/2) [1/(wt_l^2 - wc^2) + 1/(wt_l'^2 - wc^2)].
// The closed-form phonon coupling does not reproduce the second-order
// coefficient (it lacks the overall wc/wt suppression); see the fockcheck
// tests for the brute-force comparison.
struct EffectiveHamiltonian {
    double cavity_shift{};
    Eigen::MatrixXd phonon_coupling;
    double cavity_shift_second_order{};
    Eigen::MatrixXd phonon_coupling_second_order;
    double frequency_ratio{};  // omega_c / min omega
    bool regime_warning{false};
};

enum class ResonanceConvention { Bare, Blueshifted };

std::string to_string(ResonanceConvention convention);

// omega_c = c0 / (2 l sqrt(eps_avg)), eps_avg = (eps_air + eps_sub)/2, in THz.
double cavity_frequency_from_length(double slot_length_um, double eps_sub, double eps_air = 1.0);

// g = (nu/2) sqrt(omega/omega_c)
double coupling_strength(const PhononMode& mode, double omega_c);

// g/omega evaluated at the resonance omega_c = omega (Bare) or
// omega_c = sqrt(omega^2 + nu^2) (Blueshifted).
double resonant_coupling_ratio(const PhononMode& mode, ResonanceConvention convention);

QuadraticForm build_minimal_coupling(const HybridSystem& system);
QuadraticForm build_pzw(const HybridSystem& system, bool include_cross_terms = true);

std::vector<SqueezedPhonon> squeezed_params(const HybridSystem& system);

inline constexpr double kSchriefferWolffMaxRatio = 0.5;
EffectiveHamiltonian schrieffer_wolff(const HybridSystem& system);

}  // namespace polariton
