#include "polariton/model.hpp"

#include "polariton/constants.hpp"
#include "polariton/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace polariton {

namespace {

using cd = std::complex<double>;
constexpr cd I{0.0, 1.0};

void validate(const CavityMode& cavity, const std::vector<PhononMode>& phonons, double temperature_K) {
    if (!(cavity.omega_c > 0.0) || !std::isfinite(cavity.omega_c)) {
        throw DomainError("cavity frequency must be positive, got " + std::to_string(cavity.omega_c));
    }
    if (phonons.empty()) {
        throw StructureError("a hybrid system needs at least one phonon mode");
    }
    std::set<std::string> labels;
    for (const auto& p : phonons) {
        if (!(p.omega > 0.0) || !std::isfinite(p.omega)) {
            throw DomainError("phonon '" + p.label + "': omega must be positive");
        }
        if (!(p.nu >= 0.0) || !std::isfinite(p.nu)) {
            throw DomainError("phonon '" + p.label + "': nu must be non-negative");
        }
        if (!labels.insert(p.label).second) {
            throw StructureError("duplicate phonon label '" + p.label + "'");
        }
    }
    if (!(temperature_K >= 0.0) || !std::isfinite(temperature_K)) {
        throw DomainError("temperature must be non-negative");
    }
}

// Symmetric 2n x 2n assembly from normal (A) and anomalous (B) blocks.
Eigen::MatrixXcd assemble(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
    const Eigen::Index n = A.rows();
    Eigen::MatrixXcd M(2 * n, 2 * n);
    M.topLeftCorner(n, n) = A;
    M.topRightCorner(n, n) = B;
    M.bottomLeftCorner(n, n) = B.conjugate();
    M.bottomRightCorner(n, n) = A.conjugate();
    return M;
}

}  // namespace

HybridSystem::HybridSystem(CavityMode cavity, std::vector<PhononMode> phonons, double temperature_K)
    : cavity_(std::move(cavity)), phonons_(std::move(phonons)), temperature_K_(temperature_K) {
    validate(cavity_, phonons_, temperature_K_);
    std::stable_sort(phonons_.begin(), phonons_.end(),
                     [](const PhononMode& a, const PhononMode& b) { return a.omega < b.omega; });
}

HybridSystem HybridSystem::with_cavity_frequency(double omega_c) const {
    return HybridSystem(CavityMode{omega_c, std::nullopt}, phonons_, temperature_K_);
}

HybridSystem HybridSystem::with_plasma_frequencies(const std::vector<double>& nu) const {
    if (nu.size() != phonons_.size()) {
        throw StructureError("plasma frequency count does not match phonon count");
    }
    auto modes = phonons_;
    for (std::size_t i = 0; i < modes.size(); ++i) modes[i].nu = nu[i];
    return HybridSystem(cavity_, std::move(modes), temperature_K_);
}

HybridSystem HybridSystem::with_temperature(double temperature_K) const {
    return HybridSystem(cavity_, phonons_, temperature_K);
}

HybridSystem HybridSystem::scaled(double factor) const {
    if (!(factor > 0.0)) throw DomainError("scale factor must be positive");
    auto modes = phonons_;
    for (auto& m : modes) {
        m.omega *= factor;
        m.nu *= factor;
    }
    return HybridSystem(CavityMode{cavity_.omega_c * factor, std::nullopt}, std::move(modes), temperature_K_);
}

std::string to_string(Representation rep) {
    return rep == Representation::MinimalCoupling ? "minimal_coupling" : "pzw";
}

std::string to_string(ResonanceConvention convention) {
    return convention == ResonanceConvention::Bare ? "bare" : "blueshifted";
}

double QuadraticForm::hermiticity_defect() const {
    const double norm = matrix.norm();
    if (norm == 0.0) return 0.0;
    return (matrix - matrix.adjoint()).norm() / norm;
}

double cavity_frequency_from_length(double slot_length_um, double eps_sub, double eps_air) {
    if (!(slot_length_um > 0.0)) throw DomainError("slot length must be positive");
    if (!(eps_sub >= 1.0)) throw DomainError("substrate permittivity must be >= 1");
    if (!(eps_air > 0.0)) throw DomainError("air permittivity must be positive");
    const double eps_avg = 0.5 * (eps_air + eps_sub);
    const double f_hz = constants::speed_of_light / (2.0 * slot_length_um * 1e-6 * std::sqrt(eps_avg));
    return f_hz / constants::terahertz;
}

double coupling_strength(const PhononMode& mode, double omega_c) {
    if (!(omega_c > 0.0)) throw DomainError("cavity frequency must be positive");
    return 0.5 * mode.nu * std::sqrt(mode.omega / omega_c);
}

double resonant_coupling_ratio(const PhononMode& mode, ResonanceConvention convention) {
    const double omega_c = convention == ResonanceConvention::Bare
                               ? mode.omega
                               : std::hypot(mode.omega, mode.nu);
    return coupling_strength(mode, omega_c) / mode.omega;
}

QuadraticForm build_minimal_coupling(const HybridSystem& system) {
    const auto n_ph = static_cast<Eigen::Index>(system.phonon_count());
    const Eigen::Index n = n_ph + 1;
    const Eigen::Index c = n_ph;  // photon index
    const double wc = system.omega_c();

    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
    Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(n, n);
    double diamagnetic = 0.0;  // sum g^2/omega
    for (Eigen::Index l = 0; l < n_ph; ++l) {
        const auto& mode = system.phonon(static_cast<std::size_t>(l));
        const double g = coupling_strength(mode, wc);
        A(l, l) = mode.omega;
        // -i g (b^dag - b)(a + a^dag)
        A(l, c) = -I * g;
        A(c, l) = I * g;
        B(l, c) = -I * g;
        B(c, l) = -I * g;
        diamagnetic += g * g / mode.omega;
    }
    // D (a + a^dag)^2 = D (a a + a^dag a^dag + 2 a^dag a + 1)
    A(c, c) = wc + 2.0 * diamagnetic;
    B(c, c) = 2.0 * diamagnetic;
    return {Representation::MinimalCoupling, assemble(A, B)};
}

QuadraticForm build_pzw(const HybridSystem& system, bool include_cross_terms) {
    const auto n_ph = static_cast<Eigen::Index>(system.phonon_count());
    const Eigen::Index n = n_ph + 1;
    const Eigen::Index c = n_ph;
    const double wc = system.omega_c();

    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
    Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(n, n);
    A(c, c) = wc;
    for (Eigen::Index l = 0; l < n_ph; ++l) {
        const auto& mode = system.phonon(static_cast<std::size_t>(l));
        const double G = 0.5 * mode.nu * std::sqrt(wc / mode.omega);
        A(l, l) = mode.omega;
        // -i G (b + b^dag)(a - a^dag)
        A(l, c) = -I * G;
        A(c, l) = I * G;
        B(l, c) = I * G;
        B(c, l) = I * G;
    }
    // sum_{l,l'} C_ll' (b_l + b_l^dag)(b_l' + b_l'^dag), C = nu nu' / (4 sqrt(w w'))
    for (Eigen::Index l = 0; l < n_ph; ++l) {
        for (Eigen::Index k = 0; k < n_ph; ++k) {
            if (!include_cross_terms && k != l) continue;
            const auto& p = system.phonon(static_cast<std::size_t>(l));
            const auto& q = system.phonon(static_cast<std::size_t>(k));
            const double C = p.nu * q.nu / (4.0 * std::sqrt(p.omega * q.omega));
            A(l, k) += 2.0 * C;
            B(l, k) += 2.0 * C;
        }
    }
    return {Representation::PZW, assemble(A, B)};
}

std::vector<SqueezedPhonon> squeezed_params(const HybridSystem& system) {
    std::vector<SqueezedPhonon> out;
    out.reserve(system.phonon_count());
    for (const auto& mode : system.phonons()) {
        SqueezedPhonon s;
        s.omega_tilde = std::hypot(mode.omega, mode.nu);
        s.g_tilde = 0.5 * mode.nu * std::sqrt(system.omega_c() / s.omega_tilde);
        const double denom = 2.0 * std::sqrt(mode.omega * s.omega_tilde);
        s.c_plus = (s.omega_tilde + mode.omega) / denom;
        s.c_minus = (s.omega_tilde - mode.omega) / denom;
        out.push_back(s);
    }
    return out;
}

EffectiveHamiltonian schrieffer_wolff(const HybridSystem& system) {
    const auto sq = squeezed_params(system);
    const auto n = static_cast<Eigen::Index>(sq.size());
    const double wc = system.omega_c();

    EffectiveHamiltonian eff;
    eff.phonon_coupling = Eigen::MatrixXd::Zero(n, n);
    eff.phonon_coupling_second_order = Eigen::MatrixXd::Zero(n, n);

    double min_omega = system.phonon(0).omega;
    for (Eigen::Index l = 0; l < n; ++l) {
        const auto& p = sq[static_cast<std::size_t>(l)];
        eff.cavity_shift += p.g_tilde * p.g_tilde / p.omega_tilde;
        eff.cavity_shift_second_order +=
            p.g_tilde * p.g_tilde * p.omega_tilde / (p.omega_tilde * p.omega_tilde - wc * wc);
        for (Eigen::Index k = 0; k < n; ++k) {
            const auto& q = sq[static_cast<std::size_t>(k)];
            const double gg = p.g_tilde * q.g_tilde;
            eff.phonon_coupling(l, k) =
                0.5 * gg * (p.omega_tilde + q.omega_tilde) / (p.omega_tilde * q.omega_tilde);
            eff.phonon_coupling_second_order(l, k) =
                0.5 * gg * wc *
                (1.0 / (p.omega_tilde * p.omega_tilde - wc * wc) + 1.0 / (q.omega_tilde * q.omega_tilde - wc * wc));
        }
    }
    eff.frequency_ratio = wc / min_omega;
    eff.regime_warning = eff.frequency_ratio > kSchriefferWolffMaxRatio;
    return eff;
}

}  // namespace polariton
