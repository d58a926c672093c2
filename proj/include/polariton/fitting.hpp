#pragma once

#include "polariton/least_squares.hpp"
#include "polariton/model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace polariton {

struct PeakObservation {
    double omega_c{};  // THz
    std::string branch;
    double omega_obs{};  // THz
    double weight{1.0};
    std::optional<SlotGeometry> geometry;  // set when omega_c came from a slot length
};

struct PeakTable {
    std::vector<PeakObservation> rows;
};

// Columns: omega_c_thz or (slot_length_um, eps_sub), branch, omega_obs_thz, optional weight.
PeakTable read_peak_table(std::istream& is);
PeakTable read_peak_table_file(const std::filesystem::path& path);
void write_peak_table(std::ostream& os, const PeakTable& table);

// Rows for every branch of `truth` at each cavity frequency; optional
// multiplicative Gaussian noise of relative size `noise`.
PeakTable synthesize_peak_table(const HybridSystem& truth, const std::vector<double>& omega_c_values, double noise = 0.0,
                                std::uint64_t seed = 42);

struct FitOptions {
    std::vector<bool> free_nu;  // per phonon; empty frees every nu
    bool free_omega{false};     // also fit omega for modes with a free nu
    std::vector<double> start_ratios{0.1, 0.3, 0.6, 0.9};  // nu/omega multi-start grid
    LsqOptions lsq{};
};

struct ModeCoupling {
    std::string label;
    double omega{};
    double nu{};
    double nu_stderr{};
    double omega_stderr{};
    double ratio_bare{};         // g/omega at omega_c = omega
    double ratio_blueshifted{};  // g/omega at omega_c = sqrt(omega^2 + nu^2)
};

struct FitResult {
    std::vector<PhononMode> phonons;  // fitted parameters, ascending omega
    std::vector<ModeCoupling> modes;
    Eigen::VectorXd residuals;  // sqrt(w) (omega_model - omega_obs), THz
    double residual_norm{};
    int degrees_of_freedom{};
    double cost{};
    bool converged{false};
    std::string stop_reason;
    int starts{};
    double optimality{};  // max |J^T r| / (|J_col| |r|)
    double temperature_K{};

    HybridSystem system(double omega_c) const;
};

// Bound-constrained least squares of polariton peak positions.
FitResult fit_plasma_frequencies(const PeakTable& table, const HybridSystem& templ, const FitOptions& options = {});

// g1 g2/(omega1 omega2) for the two lowest phonons, each ratio at its own
// resonance under `convention`.
double figure_of_merit(const HybridSystem& system, ResonanceConvention convention = ResonanceConvention::Bare);
double figure_of_merit(const FitResult& result, ResonanceConvention convention = ResonanceConvention::Bare);
// Same product with both couplings evaluated at one cavity frequency.
double figure_of_merit_at(const HybridSystem& system, double omega_c);

}  // namespace polariton
