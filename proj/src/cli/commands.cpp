#include "polariton/cli/commands.hpp"

#include "polariton/bogoliubov.hpp"
#include "polariton/cli/config.hpp"
#include "polariton/correlations.hpp"
#include "polariton/errors.hpp"
#include "polariton/fitting.hpp"
#include "polariton/fockcheck.hpp"
#include "polariton/io.hpp"
#include "polariton/spectra.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>

namespace polariton::cli {

namespace {

using nlohmann::json;

std::ostream& log_of(const CommandContext& ctx) { return ctx.log ? *ctx.log : std::cout; }

json num(double v) {
    if (!std::isfinite(v)) return nullptr;
    return io::round_significant(v);
}

std::filesystem::path prepare_output(const CommandContext& ctx, const std::string& name) {
    std::filesystem::create_directories(ctx.out_dir);
    return ctx.out_dir / name;
}

std::ofstream open_output(const CommandContext& ctx, const std::string& name) {
    const auto path = prepare_output(ctx, name);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw StructureError("cannot write " + path.string());
    if (!ctx.quiet) log_of(ctx) << "wrote " << path.string() << "\n";
    return out;
}

void write_json(const CommandContext& ctx, const std::string& name, const json& doc) {
    auto out = open_output(ctx, name);
    out << doc.dump(2) << "\n";
}

json system_json(const HybridSystem& s) {
    json phonons = json::array();
    for (const auto& p : s.phonons()) phonons.push_back({{"label", p.label}, {"omega_thz", num(p.omega)}, {"nu_thz", num(p.nu)}});
    return {{"omega_c_thz", num(s.omega_c())}, {"phonons", phonons}, {"temperature_K", num(s.temperature_K())}};
}

std::string verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

// Sample/reference traces or a transmission CSV, whichever the section names.
ComplexSpectrum load_transmission(const Config& cfg, const json& sec, bool hann) {
    if (sec.contains("traces")) {
        const auto& tr = sec.at("traces");
        const auto sample = read_trace_file(cfg.resolve(tr.at("sample").get<std::string>()));
        const auto reference = read_trace_file(cfg.resolve(tr.at("reference").get<std::string>()));
        TransmissionOptions opt;
        opt.hann_window = hann;
        opt.mask_floor = number_or(tr, "mask_floor", opt.mask_floor);
        return transmission(sample, reference, opt);
    }
    if (sec.contains("transmission")) {
        const auto path = cfg.resolve(sec.at("transmission").get<std::string>());
        std::ifstream in(path);
        if (!in) throw StructureError("cannot open spectrum " + path.string());
        return read_spectrum_csv(in, SpectrumKind::Transmission);
    }
    throw StructureError("section needs 'traces' {sample, reference} or 'transmission'");
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"dispersion", "hopfield", "g2", "fit", "peaks", "tinkham", "oracle", "synth"};
    return names;
}

int run_command(const std::string& name, const CommandContext& ctx) {
    static const std::map<std::string, std::function<int(const CommandContext&)>> table{
        {"dispersion", cmd_dispersion}, {"hopfield", cmd_hopfield}, {"g2", cmd_g2},         {"fit", cmd_fit},
        {"peaks", cmd_peaks},           {"tinkham", cmd_tinkham},   {"oracle", cmd_oracle}, {"synth", cmd_synth}};
    const auto it = table.find(name);
    if (it == table.end()) throw StructureError("unknown command '" + name + "'");
    return it->second(ctx);
}

int cmd_dispersion(const CommandContext& ctx) {
    const auto cfg = load_config(ctx.config);
    const auto system = system_from_json(cfg.doc);
    const auto grid = grid_from_json(cfg.section("dispersion").at("omega_c_thz"), "dispersion.omega_c_thz");
    const auto sweep = dispersion_sweep(system, grid);
    {
        auto out = open_output(ctx, "dispersion.csv");
        write_dispersion_csv(out, sweep);
    }
    auto out = open_output(ctx, "weights.csv");
    write_weights_csv(out, sweep);
    return 0;
}

int cmd_hopfield(const CommandContext& ctx) {
    const auto cfg = load_config(ctx.config);
    const auto system = system_from_json(cfg.doc);
    const auto grid = grid_from_json(cfg.section("hopfield").at("omega_c_thz"), "hopfield.omega_c_thz");
    const auto n_ph = system.phonon_count();

    auto out = open_output(ctx, "hopfield.csv");
    std::vector<std::string> header{"omega_c_thz", "branch", "method", "omega_thz"};
    for (std::size_t l = 1; l <= n_ph; ++l) {
        header.push_back("abs_X" + std::to_string(l));
        header.push_back("abs_Xt" + std::to_string(l));
    }
    for (const char* h : {"abs_Y", "abs_Yt", "valid"}) header.emplace_back(h);
    io::write_csv_row(out, header);

    using io::format_number;
    for (const double wc : grid) {
        const auto s = system.with_cavity_frequency(wc);
        const auto exact = diagonalize(s);
        const auto approx = asymptotic_coefficients(s);
        for (const auto* basis : {&exact, &approx.basis}) {
            const bool is_exact = basis == &exact;
            for (const auto& br : basis->branches) {
                std::vector<std::string> row{format_number(wc), br.label, is_exact ? "exact" : "asymptotic",
                                             format_number(br.omega)};
                for (Eigen::Index l = 0; l < br.X.size(); ++l) {
                    row.push_back(format_number(std::abs(br.X(l))));
                    row.push_back(format_number(std::abs(br.X_tilde(l))));
                }
                row.push_back(format_number(std::abs(br.Y)));
                row.push_back(format_number(std::abs(br.Y_tilde)));
                row.emplace_back(is_exact || approx.valid ? "1" : "0");
                io::write_csv_row(out, row);
            }
        }
    }
    return 0;
}

int cmd_g2(const CommandContext& ctx) {
    const auto cfg = load_config(ctx.config);
    const auto system = system_from_json(cfg.doc);
    const auto& sec = cfg.section("g2");
    const auto wc_grid = grid_from_json(sec.at("omega_c_thz"), "g2.omega_c_thz");
    const auto t_grid = sec.contains("temperature_K") ? grid_from_json(sec.at("temperature_K"), "g2.temperature_K")
                                                     : std::vector<double>{system.temperature_K()};
    const auto sweep = g2_sweep(system, wc_grid, t_grid);
    {
        auto out = open_output(ctx, "g2.csv");
        write_g2_csv(out, sweep);
    }

    json summary{{"system", system_json(system)},
                 {"monotone_in_omega_c", sweep.monotone},
                 {"worst_monotonicity_violation", num(sweep.worst_monotonicity_violation)}};
    if (sec.contains("reference")) {
        const auto& ref = sec.at("reference");
        const double wc = ref.at("omega_c_thz").get<double>();
        const double t = number_or(ref, "temperature_K", system.temperature_K());
        const double tol = number_or(ref, "tolerance", 0.1);
        const auto s = system.with_cavity_frequency(wc);
        const auto basis = diagonalize(s);
        const auto state = ThermalState::of(basis, t);
        const auto g2 = g2_equal_time(correlators(basis, state));
        const auto pert = g2_perturbative(s, state);

        json checks = json::array();
        bool all_ok = true;
        for (const auto& [key, value] : ref.at("values").items()) {
            if (key.size() != 5 || key.rfind("g2_", 0) != 0) throw StructureError("reference key '" + key + "' is not g2_lk");
            const int l = key[3] - '1';
            const int k = key[4] - '1';
            if (l < 0 || k < 0 || l >= g2.rows() || k >= g2.rows()) throw StructureError("reference key '" + key + "' out of range");
            const double computed = g2(l, k);
            const double expected = value.get<double>();
            const bool ok = std::abs(computed - expected) <= tol;
            all_ok = all_ok && ok;
            checks.push_back({{"entry", key}, {"computed", num(computed)}, {"reference", num(expected)},
                              {"tolerance", num(tol)}, {"pass", ok}});
            if (!ctx.quiet) {
                log_of(ctx) << verdict(ok) << " " << key << " = " << io::format_number(io::round_significant(computed))
                            << " (reference " << io::format_number(expected) << " +/- " << io::format_number(tol)
                            << ", omega_c = " << io::format_number(wc) << " THz, T = " << io::format_number(t) << " K)\n";
            }
        }
        json populations = json::object();
        for (std::size_t a = 0; a < basis.branches.size(); ++a) populations[basis.branches[a].label] = num(state.populations[a]);
        json pert_values = json::array();
        for (Eigen::Index l = 0; l < pert.values.rows(); ++l) {
            json row = json::array();
            for (Eigen::Index k = 0; k < pert.values.cols(); ++k) row.push_back(num(pert.values(l, k)));
            pert_values.push_back(row);
        }
        summary["reference"] = {{"omega_c_thz", num(wc)},
                                {"temperature_K", num(t)},
                                {"checks", checks},
                                {"all_pass", all_ok},
                                {"populations", populations},
                                {"perturbative", {{"values", pert_values},
                                                  {"expansion_parameter", num(pert.expansion_parameter)},
                                                  {"valid", pert.valid}}}};
    }
    write_json(ctx, "g2_summary.json", summary);
    return 0;
}

int cmd_fit(const CommandContext& ctx) {
    const auto cfg = load_config(ctx.config);
    const auto system = system_from_json(cfg.doc);
    const auto& sec = cfg.section("fit");
    const auto table = read_peak_table_file(cfg.resolve(sec.at("peak_table").get<std::string>()));

    FitOptions opt;
    if (sec.contains("free")) {
        opt.free_nu.assign(system.phonon_count(), false);
        for (const auto& label : sec.at("free")) {
            bool found = false;
            for (std::size_t l = 0; l < system.phonon_count(); ++l) {
                if (system.phonon(l).label == label.get<std::string>()) {
                    opt.free_nu[l] = true;
                    found = true;
                }
            }
            if (!found) throw StructureError("fit.free names unknown phonon '" + label.get<std::string>() + "'");
        }
    }
    opt.free_omega = sec.value("free_omega", false);
    const auto result = fit_plasma_frequencies(table, system, opt);

    json modes = json::array();
    for (const auto& m : result.modes) {
        modes.push_back({{"label", m.label},
                         {"omega_thz", num(m.omega)},
                         {"omega_stderr_thz", num(m.omega_stderr)},
                         {"nu_thz", num(m.nu)},
                         {"nu_stderr_thz", num(m.nu_stderr)},
                         {"coupling_ratio", {{"bare", num(m.ratio_bare)}, {"blueshifted", num(m.ratio_blueshifted)}}}});
    }
    json residuals = json::array();
    for (Eigen::Index i = 0; i < result.residuals.size(); ++i) residuals.push_back(num(result.residuals(i)));
    json doc{{"modes", modes},
             {"residuals_thz", residuals},
             {"residual_norm_thz", num(result.residual_norm)},
             {"degrees_of_freedom", result.degrees_of_freedom},
             {"converged", result.converged},
             {"stop_reason", result.stop_reason},
             {"multistart_points", result.starts},
             {"optimality", num(result.optimality)}};
    if (result.phonons.size() >= 2) {
        doc["figure_of_merit"] = {{"bare", num(figure_of_merit(result, ResonanceConvention::Bare))},
                                  {"blueshifted", num(figure_of_merit(result, ResonanceConvention::Blueshifted))}};
        if (sec.contains("figure_of_merit_omega_c_thz")) {
            const double wc = sec.at("figure_of_merit_omega_c_thz").get<double>();
            doc["figure_of_merit"]["at_omega_c"] = {{"omega_c_thz", num(wc)},
                                                    {"value", num(figure_of_merit_at(result.system(wc), wc))}};
        }
    }
    write_json(ctx, "fit.json", doc);
    if (!ctx.quiet) {
        for (const auto& m : result.modes) {
            log_of(ctx) << m.label << ": nu = " << io::format_number(io::round_significant(m.nu)) << " +/- "
                        << io::format_number(io::round_significant(m.nu_stderr)) << " THz, g/omega = "
                        << io::format_number(io::round_significant(m.ratio_bare)) << " (bare), "
                        << io::format_number(io::round_significant(m.ratio_blueshifted)) << " (blueshifted)\n";
        }
    }
    return result.converged ? 0 : 3;
}

int cmd_peaks(const CommandContext& ctx) {
    const auto cfg = load_config(ctx.config);
    const auto& sec = cfg.section("peaks");
    const auto spec = load_transmission(cfg, sec, sec.value("hann", false));
    const int max_peaks = sec.value("max_peaks", 3);
    const auto window = sec.at("window_thz");
    PeakOptions opt;
    opt.min_prominence = number_or(sec, "min_prominence", opt.min_prominence);
    opt.condition_threshold = number_or(sec, "condition_threshold", opt.condition_threshold);
    auto extraction = extract_peaks(spec, max_peaks, window.at(0).get<double>(), window.at(1).get<double>(), opt);

    std::optional<double> wc;
    if (sec.contains("omega_c_thz")) wc = sec.at("omega_c_thz").get<double>();
    if (wc) {
        const auto labels = branch_labels(extraction.peaks.size());
        for (std::size_t i = 0; i < extraction.peaks.size(); ++i) extraction.peaks[i].branch = labels[i];
    }
    {
        auto out = open_output(ctx, "peaks.csv");
        write_peaks_csv(out, extraction);
    }
    if (wc) {
        PeakTable table;
        for (const auto& p : extraction.peaks) table.rows.push_back({*wc, *p.branch, p.center, 1.0, std::nullopt});
        auto out = open_output(ctx, "peak_table.csv");
        write_peak_table(out, table);
    }
    write_json(ctx, "peaks.json",
               {{"baseline", num(extraction.baseline)},
                {"residual_norm", num(extraction.residual_norm)},
                {"iterations", extraction.iterations},
                {"converged", extraction.converged},
                {"ill_conditioned", extraction.ill_conditioned},
                {"condition_number", num(extraction.condition_number)},
                {"max_correlation", num(extraction.max_correlation)},
                {"notes", spec.notes}});
    if (!ctx.quiet && extraction.ill_conditioned) log_of(ctx) << "warning: peak fit is ill-conditioned\n";
    return extraction.converged ? 0 : 3;
}

int cmd_tinkham(const CommandContext& ctx) {
    const auto cfg = load_config(ctx.config);
    const auto& sec = cfg.section("tinkham");
    const auto t = load_transmission(cfg, sec, sec.value("hann", false));
    const auto sigma = tinkham_conductivity(t, number_or(sec, "n_sub", kDefaultSubstrateIndex), sec.at("thickness_m").get<double>());
    const auto eps = dielectric_function(sigma, number_or(sec, "eps_inf", 5.0));
    {
        auto out = open_output(ctx, "conductivity.csv");
        write_spectrum_csv(out, sigma);
    }
    auto out = open_output(ctx, "dielectric.csv");
    write_spectrum_csv(out, eps);
    if (!ctx.quiet) {
        for (const auto& note : eps.notes) log_of(ctx) << "note: " << note << "\n";
    }
    return 0;
}

int cmd_oracle(const CommandContext& ctx) {
    const auto cfg = load_config(ctx.config);
    const auto system = system_from_json(cfg.doc);
    const json sec = cfg.has_section("oracle") ? cfg.section("oracle") : json::object();
    FockConfig fc;
    fc.cutoff = sec.value("cutoff", fc.cutoff);
    fc.check_convergence = sec.value("check_convergence", fc.check_convergence);
    const double tol = number_or(sec, "tolerance", 1e-4);
    const double freq_tol = number_or(sec, "frequency_tolerance", 1e-3);

    const auto basis = diagonalize(system);
    const auto corr = correlators(basis, ThermalState::of(basis, 0.0));
    const auto solution = exact_solution(system, fc);
    const auto& spectrum = solution.spectrum;
    const auto& fock = solution.correlators;

    json branches = json::array();
    double worst_freq = 0.0;
    for (std::size_t a = 0; a < basis.branches.size(); ++a) {
        const double exact = spectrum.single_excitations[a];
        const double bog = basis.branches[a].omega;
        const double rel = std::abs(exact - bog) / bog;
        worst_freq = std::max(worst_freq, rel);
        branches.push_back({{"branch", basis.branches[a].label}, {"bogoliubov_thz", num(bog)}, {"fock_thz", num(exact)},
                            {"relative_delta", num(rel)}});
    }
    const double d_normal = (fock.normal - corr.normal).cwiseAbs().maxCoeff();
    const double d_anomalous = (fock.anomalous - corr.anomalous).cwiseAbs().maxCoeff();
    const double worst_corr = std::max(d_normal, d_anomalous);

    auto matrix = [](const Eigen::MatrixXcd& m) {
        json rows = json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            json row = json::array();
            for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({num(m(i, j).real()), num(m(i, j).imag())});
            rows.push_back(row);
        }
        return rows;
    };
    const bool ok = worst_freq <= freq_tol && worst_corr <= tol;
    write_json(ctx, "oracle.json",
               {{"system", system_json(system)},
                {"cutoffs", spectrum.cutoffs},
                {"basis_size", spectrum.basis_size},
                {"frequency_convergence_thz", num(spectrum.convergence)},
                {"correlator_convergence", num(fock.convergence)},
                {"branches", branches},
                {"normal", {{"bogoliubov", matrix(corr.normal)}, {"fock", matrix(fock.normal)}, {"max_delta", num(d_normal)}}},
                {"anomalous",
                 {{"bogoliubov", matrix(corr.anomalous)}, {"fock", matrix(fock.anomalous)}, {"max_delta", num(d_anomalous)}}},
                {"max_relative_frequency_delta", num(worst_freq)},
                {"max_correlator_delta", num(worst_corr)},
                {"pass", ok}});
    if (!ctx.quiet) {
        log_of(ctx) << verdict(worst_freq <= freq_tol) << " max relative frequency delta "
                    << io::format_number(io::round_significant(worst_freq)) << " (tolerance " << io::format_number(freq_tol) << ")\n"
                    << verdict(worst_corr <= tol) << " max correlator delta "
                    << io::format_number(io::round_significant(worst_corr)) << " (tolerance " << io::format_number(tol) << ")\n";
    }
    return 0;
}

int cmd_synth(const CommandContext& ctx) {
    const auto cfg = load_config(ctx.config);
    const auto& sec = cfg.section("synth");
    bool wrote = false;

    if (sec.contains("spectrum")) {
        const auto& sp = sec.at("spectrum");
        auto system = system_from_json(cfg.doc);
        if (sp.contains("omega_c_thz")) system = system.with_cavity_frequency(sp.at("omega_c_thz").get<double>());
        const auto grid = grid_from_json(sp.at("grid_thz"), "synth.spectrum.grid_thz");
        std::vector<double> widths;
        if (sp.at("linewidth_thz").is_array()) {
            widths = sp.at("linewidth_thz").get<std::vector<double>>();
        } else {
            widths.push_back(sp.at("linewidth_thz").get<double>());
        }
        SynthesisOptions opt;
        opt.noise = number_or(sp, "noise", 0.0);
        opt.seed = ctx.seed;
        const Eigen::VectorXd f = Eigen::Map<const Eigen::VectorXd>(grid.data(), static_cast<Eigen::Index>(grid.size()));
        auto out = open_output(ctx, "spectrum.csv");
        write_spectrum_csv(out, synthesize_polariton_spectrum(system, widths, f, opt));
        wrote = true;
    }
    if (sec.contains("traces")) {
        const auto& tr = sec.at("traces");
        std::vector<LorentzTerm> terms;
        for (const auto& t : tr.at("terms")) {
            terms.push_back({t.at("center_thz").get<double>(), t.at("fwhm_thz").get<double>(), t.at("amplitude").get<double>()});
        }
        const auto pair = synthesize_trace_pair(terms, number_or(tr, "background", 1.0), tr.value("samples", 1024),
                                                number_or(tr, "spacing_ps", 0.02));
        {
            auto out = open_output(ctx, "sample.csv");
            write_trace_csv(out, pair.sample);
        }
        {
            auto out = open_output(ctx, "reference.csv");
            write_trace_csv(out, pair.reference);
        }
        auto out = open_output(ctx, "applied_transmission.csv");
        write_spectrum_csv(out, pair.applied);
        wrote = true;
    }
    if (sec.contains("peak_table")) {
        const auto& pt = sec.at("peak_table");
        const auto system = system_from_json(cfg.doc);
        std::vector<double> cavities;
        if (pt.contains("slot_length_um")) {
            const double eps_sub = pt.at("eps_sub").get<double>();
            for (const double l : grid_from_json(pt.at("slot_length_um"), "synth.peak_table.slot_length_um")) {
                cavities.push_back(cavity_frequency_from_length(l, eps_sub));
            }
        } else {
            cavities = grid_from_json(pt.at("omega_c_thz"), "synth.peak_table.omega_c_thz");
        }
        auto out = open_output(ctx, "peak_table.csv");
        write_peak_table(out, synthesize_peak_table(system, cavities, number_or(pt, "noise", 0.0), ctx.seed));
        wrote = true;
    }
    if (!wrote) throw StructureError("synth section needs 'spectrum', 'traces', or 'peak_table'");
    return 0;
}

}  // namespace polariton::cli
