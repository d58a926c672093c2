#pragma once

#include "polariton/bogoliubov.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace polariton {

// Bose factor 1/(exp(h f / k_B T) - 1) for an ordinary frequency f in THz.
// Exactly zero at T = 0.
double thermal_population(double omega_thz, double temperature_K);

// Thermal state of the polariton branches.
struct ThermalState {
    double temperature_K{};
    std::vector<double> populations;  // per branch, ascending frequency

    static ThermalState of(const PolaritonBasis& basis, double temperature_K);
};

struct CorrelationSet {
    Eigen::MatrixXcd normal;     // <b_l^dag b_l'>
    Eigen::MatrixXcd anomalous;  // <b_l b_l'>
    double temperature_K{};

    // <b_l b_l'^dag> = <b_l'^dag b_l> + delta_ll'
    Eigen::MatrixXcd antinormal() const;
};

CorrelationSet correlators(const PolaritonBasis& basis, const ThermalState& state);

inline constexpr double kG2ImaginaryTolerance = 1e-10;

// Equal-time phonon g2 from Wick factorization of the Gaussian state.
Eigen::MatrixXd g2_equal_time(const CorrelationSet& corr);

struct PerturbativeG2 {
    Eigen::MatrixXd values;
    double expansion_parameter{};  // max_l (nu_l/omega_l) sqrt(omega_l/omega_c)
    bool valid{false};
};

inline constexpr double kPerturbativeMaxParameter = 0.3;

// Leading-order small-coupling g2.  `state` supplies the branch populations
// (lowest branch first, then one phonon-like branch per mode).
PerturbativeG2 g2_perturbative(const HybridSystem& system, const ThermalState& state);

struct G2Point {
    double omega_c{};
    double temperature_K{};
    Eigen::MatrixXd g2;
    std::vector<double> populations;
};

struct G2Sweep {
    std::vector<std::string> branch_labels;
    std::vector<G2Point> points;  // temperature-major, omega_c ascending within each temperature
    // Largest increase of a diagonal entry between consecutive omega_c at fixed T.
    double worst_monotonicity_violation{};
    bool monotone{true};
};

inline constexpr double kMonotonicitySlack = 1e-9;

G2Sweep g2_sweep(const HybridSystem& templ, std::span<const double> omega_c_grid,
                 std::span<const double> temperature_grid);

// omega_c_thz, T_K, g2_11 .. g2_NN, g2_lk (l < k), n_<branch> ...
void write_g2_csv(std::ostream& os, const G2Sweep& sweep);

}  // namespace polariton
