#include "polariton/correlations.hpp"

#include "polariton/constants.hpp"
#include "polariton/errors.hpp"
#include "polariton/io.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace polariton {

double thermal_population(double omega_thz, double temperature_K) {
    if (!(omega_thz > 0.0)) throw DomainError("thermal population needs a positive frequency");
    if (!(temperature_K >= 0.0)) throw DomainError("temperature must be non-negative");
    if (temperature_K == 0.0) return 0.0;
    const double x = constants::planck * omega_thz * constants::terahertz / (constants::boltzmann * temperature_K);
    return 1.0 / std::expm1(x);  // expm1 -> inf gives exactly 0
}

ThermalState ThermalState::of(const PolaritonBasis& basis, double temperature_K) {
    ThermalState s;
    s.temperature_K = temperature_K;
    for (const auto& br : basis.branches) s.populations.push_back(thermal_population(br.omega, temperature_K));
    return s;
}

Eigen::MatrixXcd CorrelationSet::antinormal() const {
    const Eigen::Index n = normal.rows();
    return normal.transpose() + Eigen::MatrixXcd::Identity(n, n);
}

CorrelationSet correlators(const PolaritonBasis& basis, const ThermalState& state) {
    if (state.populations.size() != basis.branches.size()) {
        throw StructureError("thermal state has " + std::to_string(state.populations.size()) +
                             " populations for " + std::to_string(basis.branches.size()) + " branches");
    }
    const auto n = static_cast<Eigen::Index>(basis.phonon_count());
    CorrelationSet out;
    out.temperature_K = state.temperature_K;
    out.normal = Eigen::MatrixXcd::Zero(n, n);
    out.anomalous = Eigen::MatrixXcd::Zero(n, n);

    for (std::size_t a = 0; a < basis.branches.size(); ++a) {
        const auto& br = basis.branches[a];
        if (br.X.size() != n) throw StructureError("inconsistent phonon count across branches");
        const double occ = state.populations[a];
        // <b^dag_l b_l'> = sum X~*_l X~_l' (1+n) + X_l X*_l' n
        out.normal += (1.0 + occ) * br.X_tilde.conjugate() * br.X_tilde.transpose() +
                      occ * br.X * br.X.adjoint();
        // <b_l b_l'> = -sum X*_l X~_l' (1+n) + X*_l' X~_l n
        const Eigen::MatrixXcd cross = br.X.conjugate() * br.X_tilde.transpose();
        out.anomalous -= (1.0 + occ) * cross + occ * cross.transpose();
    }
    return out;
}

Eigen::MatrixXd g2_equal_time(const CorrelationSet& corr) {
    const Eigen::Index n = corr.normal.rows();
    const Eigen::MatrixXcd anti = corr.antinormal();
    Eigen::MatrixXd g2(n, n);
    for (Eigen::Index l = 0; l < n; ++l) {
        if (!(anti(l, l).real() >= 1.0 - 1e-12)) {
            throw InstabilityError("<b b^dag> below one for phonon " + std::to_string(l + 1));
        }
    }
    for (Eigen::Index l = 0; l < n; ++l) {
        for (Eigen::Index k = l; k < n; ++k) {
            std::complex<double> value;
            if (k == l) {
                value = 2.0 + std::norm(corr.anomalous(l, l)) / (anti(l, l) * anti(l, l));
            } else {
                const auto denom = anti(l, l) * anti(k, k);
                value = 1.0 + anti(l, k) * anti(k, l) / denom +
                        corr.anomalous(l, k) * std::conj(corr.anomalous(k, l)) / denom;
            }
            if (std::abs(value.imag()) > kG2ImaginaryTolerance) {
                throw InstabilityError("g2 has imaginary residue " + io::format_number(value.imag()));
            }
            g2(l, k) = g2(k, l) = value.real();
        }
    }
    return g2;
}

PerturbativeG2 g2_perturbative(const HybridSystem& system, const ThermalState& state) {
    const auto n = static_cast<Eigen::Index>(system.phonon_count());
    if (state.populations.size() != system.mode_count()) {
        throw StructureError("thermal state does not match the system's branch count");
    }
    const double wc = system.omega_c();
    const double lower = 1.0 + 2.0 * state.populations.front();

    Eigen::VectorXd ratio2(n);  // (g_l/omega_l)^2
    Eigen::VectorXd upper(n);   // 1 + n of the branch tied to phonon l
    PerturbativeG2 out;
    for (Eigen::Index l = 0; l < n; ++l) {
        const auto& mode = system.phonon(static_cast<std::size_t>(l));
        const double r = coupling_strength(mode, wc) / mode.omega;
        ratio2(l) = r * r;
        upper(l) = 1.0 + state.populations[static_cast<std::size_t>(l + 1)];
        out.expansion_parameter = std::max(out.expansion_parameter, (mode.nu / mode.omega) * std::sqrt(mode.omega / wc));
    }
    out.valid = out.expansion_parameter < kPerturbativeMaxParameter;

    out.values.resize(n, n);
    for (Eigen::Index l = 0; l < n; ++l) {
        for (Eigen::Index k = 0; k < n; ++k) {
            if (k == l) {
                const double q = lower / upper(l);
                out.values(l, l) = 2.0 + ratio2(l) * ratio2(l) * q * q;
            } else {
                out.values(l, k) = 1.0 + 2.0 * ratio2(l) * ratio2(k) * lower * lower / (upper(l) * upper(k));
            }
        }
    }
    return out;
}

G2Sweep g2_sweep(const HybridSystem& templ, std::span<const double> omega_c_grid,
                 std::span<const double> temperature_grid) {
    if (omega_c_grid.empty() || temperature_grid.empty()) throw StructureError("g2 sweep grids must be non-empty");
    for (const double t : temperature_grid) {
        if (!(t >= 0.0)) throw DomainError("temperatures must be non-negative");
    }
    const auto sweep = dispersion_sweep(templ, omega_c_grid);

    G2Sweep out;
    out.branch_labels = branch_labels(templ.mode_count());
    out.points.reserve(sweep.size() * temperature_grid.size());
    for (const double t : temperature_grid) {
        for (std::size_t i = 0; i < sweep.size(); ++i) {
            const auto& pt = sweep[i];
            const auto state = ThermalState::of(pt.basis, t);
            out.points.push_back({pt.omega_c, t, g2_equal_time(correlators(pt.basis, state)), state.populations});
            if (i > 0) {
                const auto& cur = out.points[out.points.size() - 1];
                const auto& prev = out.points[out.points.size() - 2];
                const double rise = (cur.g2.diagonal() - prev.g2.diagonal()).maxCoeff();
                out.worst_monotonicity_violation = std::max(out.worst_monotonicity_violation, rise);
            }
        }
    }
    out.monotone = out.worst_monotonicity_violation <= kMonotonicitySlack;
    return out;
}

void write_g2_csv(std::ostream& os, const G2Sweep& sweep) {
    if (sweep.points.empty()) return;
    const Eigen::Index n = sweep.points.front().g2.rows();
    std::vector<std::string> header{"omega_c_thz", "T_K"};
    for (Eigen::Index l = 1; l <= n; ++l) header.push_back("g2_" + std::to_string(l) + std::to_string(l));
    for (Eigen::Index l = 1; l <= n; ++l) {
        for (Eigen::Index k = l + 1; k <= n; ++k) header.push_back("g2_" + std::to_string(l) + std::to_string(k));
    }
    for (const auto& label : sweep.branch_labels) header.push_back("n_" + label);
    io::write_csv_row(os, header);

    using io::format_number;
    for (const auto& pt : sweep.points) {
        std::vector<std::string> row{format_number(pt.omega_c), format_number(pt.temperature_K)};
        for (Eigen::Index l = 0; l < n; ++l) row.push_back(format_number(pt.g2(l, l)));
        for (Eigen::Index l = 0; l < n; ++l) {
            for (Eigen::Index k = l + 1; k < n; ++k) row.push_back(format_number(pt.g2(l, k)));
        }
        for (const double occ : pt.populations) row.push_back(format_number(occ));
        io::write_csv_row(os, row);
    }
}

}  // namespace polariton
