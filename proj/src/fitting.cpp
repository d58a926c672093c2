#include "polariton/fitting.hpp"

#include "polariton/bogoliubov.hpp"
#include "polariton/errors.hpp"
#include "polariton/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>

namespace polariton {

namespace {

// Parameter vector layout: free nu first, then free omega (same modes).
struct Layout {
    std::vector<std::size_t> modes;  // indices of modes with a free nu
    bool free_omega{false};

    Eigen::Index size() const { return static_cast<Eigen::Index>(modes.size() * (free_omega ? 2 : 1)); }

    std::vector<PhononMode> apply(const std::vector<PhononMode>& base, const Eigen::VectorXd& x) const {
        auto out = base;
        for (std::size_t k = 0; k < modes.size(); ++k) {
            out[modes[k]].nu = x(static_cast<Eigen::Index>(k));
            if (free_omega) out[modes[k]].omega = x(static_cast<Eigen::Index>(modes.size() + k));
        }
        return out;
    }
};

class PeakModel {
public:
    PeakModel(const PeakTable& table, const HybridSystem& templ, Layout layout)
        : table_(table), templ_(templ), layout_(std::move(layout)) {
        for (const auto& row : table_.rows) {
            branch_.push_back(branch_index(row.branch, templ_.mode_count()));
            sqrt_weight_.push_back(std::sqrt(row.weight));
            auto it = std::find(cavities_.begin(), cavities_.end(), row.omega_c);
            if (it == cavities_.end()) {
                cavities_.push_back(row.omega_c);
                it = cavities_.end() - 1;
            }
            cavity_of_.push_back(static_cast<std::size_t>(it - cavities_.begin()));
        }
    }

    Eigen::VectorXd predicted(const Eigen::VectorXd& x) const {
        const auto phonons = layout_.apply(templ_.phonons(), x);
        std::vector<std::vector<double>> freqs;
        for (const double wc : cavities_) {
            freqs.push_back(diagonalize(HybridSystem(CavityMode{wc, std::nullopt}, phonons, templ_.temperature_K())).frequencies());
        }
        Eigen::VectorXd out(static_cast<Eigen::Index>(table_.rows.size()));
        for (std::size_t i = 0; i < table_.rows.size(); ++i) {
            out(static_cast<Eigen::Index>(i)) = freqs[cavity_of_[i]][branch_[i]];
        }
        return out;
    }

    Eigen::VectorXd residual(const Eigen::VectorXd& x) const {
        const Eigen::VectorXd model = predicted(x);
        Eigen::VectorXd r(model.size());
        for (Eigen::Index i = 0; i < model.size(); ++i) {
            r(i) = sqrt_weight_[static_cast<std::size_t>(i)] * (model(i) - table_.rows[static_cast<std::size_t>(i)].omega_obs);
        }
        return r;
    }

private:
    const PeakTable& table_;
    const HybridSystem& templ_;
    Layout layout_;
    std::vector<std::size_t> branch_;
    std::vector<double> sqrt_weight_;
    std::vector<double> cavities_;
    std::vector<std::size_t> cavity_of_;
};

void check_table(const PeakTable& table) {
    if (table.rows.empty()) throw IdentifiabilityError("peak table is empty");
    for (const auto& row : table.rows) {
        if (!(row.omega_c > 0.0)) throw DomainError("peak table cavity frequencies must be positive");
        if (!(row.omega_obs > 0.0)) throw DomainError("observed peak frequencies must be positive");
        if (!(row.weight > 0.0)) throw DomainError("peak weights must be positive");
    }
}

// Every free nu must move at least two rows at a representative point.
void check_identifiable(const PeakModel& model, const Layout& layout, const std::vector<PhononMode>& base,
                        std::size_t rows) {
    if (static_cast<Eigen::Index>(rows) < layout.size()) {
        throw IdentifiabilityError(std::to_string(rows) + " peak rows cannot determine " +
                                   std::to_string(layout.size()) + " parameters");
    }
    Eigen::VectorXd x(layout.size());
    for (std::size_t k = 0; k < layout.modes.size(); ++k) {
        x(static_cast<Eigen::Index>(k)) = 0.5 * base[layout.modes[k]].omega;
        if (layout.free_omega) x(static_cast<Eigen::Index>(layout.modes.size() + k)) = base[layout.modes[k]].omega;
    }
    const Eigen::VectorXd lower = Eigen::VectorXd::Zero(x.size());
    const Eigen::VectorXd upper = Eigen::VectorXd::Constant(x.size(), std::numeric_limits<double>::infinity());
    const Eigen::MatrixXd jac = numerical_jacobian([&](const Eigen::VectorXd& p) { return model.predicted(p); }, x,
                                                   lower, upper, 1e-6);
    const Eigen::VectorXd at = model.predicted(x);
    for (std::size_t k = 0; k < layout.modes.size(); ++k) {
        int sensitive = 0;
        for (Eigen::Index i = 0; i < jac.rows(); ++i) {
            if (std::abs(jac(i, static_cast<Eigen::Index>(k))) * x(static_cast<Eigen::Index>(k)) / at(i) > 1e-4) ++sensitive;
        }
        if (sensitive < 2) {
            throw IdentifiabilityError("plasma frequency of '" + base[layout.modes[k]].label + "' is constrained by " +
                                       std::to_string(sensitive) + " peak row(s); need at least two");
        }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    if (lu.rank() < jac.cols()) throw IdentifiabilityError("peak positions do not separate the free parameters");
}

}  // namespace

PeakTable read_peak_table(std::istream& is) {
    const auto csv = io::read_csv(is);
    const bool by_frequency = csv.find("omega_c_thz") >= 0;
    const bool by_length = csv.find("slot_length_um") >= 0 && csv.find("eps_sub") >= 0;
    if (!by_frequency && !by_length) {
        throw StructureError("peak table needs omega_c_thz or slot_length_um and eps_sub columns");
    }
    const auto branch_col = csv.column("branch");
    const auto obs_col = csv.column("omega_obs_thz");
    const int weight_col = csv.find("weight");

    PeakTable table;
    for (const auto& fields : csv.rows) {
        PeakObservation row;
        row.branch = fields[branch_col];
        row.omega_obs = io::parse_number(fields[obs_col]);
        if (weight_col >= 0 && !fields[static_cast<std::size_t>(weight_col)].empty()) {
            row.weight = io::parse_number(fields[static_cast<std::size_t>(weight_col)]);
        }
        if (by_frequency) {
            row.omega_c = io::parse_number(fields[csv.column("omega_c_thz")]);
        } else {
            SlotGeometry geo{io::parse_number(fields[csv.column("slot_length_um")]),
                             io::parse_number(fields[csv.column("eps_sub")]), 1.0};
            row.omega_c = cavity_frequency_from_length(geo.slot_length_um, geo.eps_sub, geo.eps_air);
            row.geometry = geo;
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

PeakTable read_peak_table_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw StructureError("cannot open peak table " + path.string());
    return read_peak_table(in);
}

void write_peak_table(std::ostream& os, const PeakTable& table) {
    io::write_csv_row(os, {"omega_c_thz", "branch", "omega_obs_thz", "weight"});
    for (const auto& row : table.rows) {
        io::write_csv_row(os, {io::format_number(row.omega_c), row.branch, io::format_number(row.omega_obs),
                               io::format_number(row.weight)});
    }
}

PeakTable synthesize_peak_table(const HybridSystem& truth, const std::vector<double>& omega_c_values, double noise,
                                std::uint64_t seed) {
    if (!(noise >= 0.0)) throw DomainError("noise level must be non-negative");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    PeakTable table;
    for (const double wc : omega_c_values) {
        const auto basis = diagonalize(truth.with_cavity_frequency(wc));
        for (const auto& br : basis.branches) {
            const double jitter = noise > 0.0 ? noise * gauss(rng) : 0.0;
            table.rows.push_back({wc, br.label, br.omega * (1.0 + jitter), 1.0, std::nullopt});
        }
    }
    return table;
}

HybridSystem FitResult::system(double omega_c) const {
    return HybridSystem(CavityMode{omega_c, std::nullopt}, phonons, temperature_K);
}

FitResult fit_plasma_frequencies(const PeakTable& table, const HybridSystem& templ, const FitOptions& options) {
    check_table(table);
    const std::size_t n_ph = templ.phonon_count();
    if (!options.free_nu.empty() && options.free_nu.size() != n_ph) {
        throw StructureError("free-parameter mask has " + std::to_string(options.free_nu.size()) + " entries for " +
                             std::to_string(n_ph) + " phonons");
    }
    if (options.start_ratios.empty()) throw StructureError("multi-start grid is empty");

    Layout layout;
    layout.free_omega = options.free_omega;
    for (std::size_t l = 0; l < n_ph; ++l) {
        if (options.free_nu.empty() || options.free_nu[l]) layout.modes.push_back(l);
    }
    if (layout.modes.empty()) throw IdentifiabilityError("no free parameters");

    const auto& base = templ.phonons();
    const PeakModel model(table, templ, layout);
    check_identifiable(model, layout, base, table.rows.size());

    const Eigen::Index p = layout.size();
    Eigen::VectorXd lower = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd upper(p);
    for (std::size_t k = 0; k < layout.modes.size(); ++k) {
        const double w = base[layout.modes[k]].omega;
        upper(static_cast<Eigen::Index>(k)) = 10.0 * w;
        if (layout.free_omega) {
            lower(static_cast<Eigen::Index>(layout.modes.size() + k)) = 0.05 * w;
            upper(static_cast<Eigen::Index>(layout.modes.size() + k)) = 20.0 * w;
        }
    }
    const ResidualFunction residual = [&](const Eigen::VectorXd& x) { return model.residual(x); };

    // Deterministic multi-start over start_ratios^k.
    const std::size_t k = layout.modes.size();
    const std::size_t grid = options.start_ratios.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < k; ++i) total *= grid;
    std::optional<LsqResult> best;
    for (std::size_t s = 0; s < total; ++s) {
        Eigen::VectorXd x0(p);
        std::size_t code = s;
        for (std::size_t i = 0; i < k; ++i) {
            const double w = base[layout.modes[i]].omega;
            x0(static_cast<Eigen::Index>(i)) = options.start_ratios[code % grid] * w;
            code /= grid;
            if (layout.free_omega) x0(static_cast<Eigen::Index>(k + i)) = w;
        }
        LsqResult trial;
        try {
            trial = levenberg_marquardt(residual, x0, lower, upper, options.lsq);
        } catch (const InstabilityError&) {
            continue;  // start point outside the physical region
        } catch (const DegeneracyError&) {
            continue;
        }
        if (!best || trial.cost < best->cost) best = std::move(trial);
    }
    if (!best) throw InstabilityError("every multi-start point failed to evaluate");

    FitResult out;
    out.starts = static_cast<int>(total);
    out.phonons = layout.apply(base, best->x);
    out.residuals = best->residual;
    out.residual_norm = best->residual.norm();
    out.cost = best->cost;
    out.degrees_of_freedom = static_cast<int>(best->residual.size() - p);
    out.converged = best->converged;
    out.stop_reason = best->stop_reason;
    out.temperature_K = templ.temperature_K();

    const Eigen::VectorXd grad = best->jacobian.transpose() * best->residual;
    const double rnorm = best->residual.norm();
    for (Eigen::Index j = 0; j < p; ++j) {
        const double scale = best->jacobian.col(j).norm() * rnorm;
        if (scale > 0.0) out.optimality = std::max(out.optimality, std::abs(grad(j)) / scale);
    }

    const Eigen::MatrixXd cov = parameter_covariance(*best);
    for (std::size_t l = 0; l < n_ph; ++l) {
        const auto& mode = out.phonons[l];
        ModeCoupling mc{mode.label, mode.omega, mode.nu, 0.0, 0.0, resonant_coupling_ratio(mode, ResonanceConvention::Bare),
                        resonant_coupling_ratio(mode, ResonanceConvention::Blueshifted)};
        const auto it = std::find(layout.modes.begin(), layout.modes.end(), l);
        if (it != layout.modes.end() && cov.size() > 0) {
            const auto j = static_cast<Eigen::Index>(it - layout.modes.begin());
            mc.nu_stderr = std::sqrt(std::max(cov(j, j), 0.0));
            if (layout.free_omega) {
                const auto jw = static_cast<Eigen::Index>(k) + j;
                mc.omega_stderr = std::sqrt(std::max(cov(jw, jw), 0.0));
            }
        }
        out.modes.push_back(mc);
    }
    return out;
}

double figure_of_merit(const HybridSystem& system, ResonanceConvention convention) {
    if (system.phonon_count() < 2) throw StructureError("figure of merit needs at least two phonon modes");
    return resonant_coupling_ratio(system.phonon(0), convention) * resonant_coupling_ratio(system.phonon(1), convention);
}

double figure_of_merit(const FitResult& result, ResonanceConvention convention) {
    if (result.phonons.size() < 2) throw StructureError("figure of merit needs at least two phonon modes");
    return resonant_coupling_ratio(result.phonons[0], convention) * resonant_coupling_ratio(result.phonons[1], convention);
}

double figure_of_merit_at(const HybridSystem& system, double omega_c) {
    if (system.phonon_count() < 2) throw StructureError("figure of merit needs at least two phonon modes");
    const auto& a = system.phonon(0);
    const auto& b = system.phonon(1);
    return coupling_strength(a, omega_c) / a.omega * coupling_strength(b, omega_c) / b.omega;
}

}  // namespace polariton
