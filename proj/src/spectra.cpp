#include "polariton/spectra.hpp"

#include "polariton/bogoliubov.hpp"
#include "polariton/constants.hpp"
#include "polariton/errors.hpp"
#include "polariton/io.hpp"
#include "polariton/least_squares.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

namespace polariton {

namespace {

using cd = std::complex<double>;

std::vector<double> padded(const TimeTrace& trace, std::size_t length, bool hann) {
    std::vector<double> out(length, 0.0);
    const std::size_t m = trace.field.size();
    for (std::size_t i = 0; i < m; ++i) {
        double w = 1.0;
        if (hann) w = 0.5 * (1.0 - std::cos(2.0 * constants::pi * static_cast<double>(i) / static_cast<double>(m - 1)));
        out[i] = w * trace.field[i];
    }
    return out;
}

double lorentzian(double f, double center, double fwhm) {
    const double x = 2.0 * (f - center) / fwhm;
    return 1.0 / (1.0 + x * x);
}

// Topographic prominence of the local maximum at i.
double prominence(const std::vector<double>& y, std::size_t i) {
    double left = y[i];
    for (std::size_t j = i; j-- > 0;) {
        if (y[j] > y[i]) break;
        left = std::min(left, y[j]);
    }
    double right = y[i];
    for (std::size_t j = i + 1; j < y.size(); ++j) {
        if (y[j] > y[i]) break;
        right = std::min(right, y[j]);
    }
    return y[i] - std::max(left, right);
}

struct Seed {
    double center, fwhm, amplitude;
};

}  // namespace

void TimeTrace::validate() const {
    if (field.size() < kMinSamples) {
        throw StructureError("trace '" + label + "' has " + std::to_string(field.size()) + " samples, need at least " +
                             std::to_string(kMinSamples));
    }
    if (!(spacing_ps > 0.0)) throw DomainError("trace '" + label + "' needs a positive sample spacing");
}

TimeTrace read_trace_csv(std::istream& is, std::string label) {
    const auto table = io::read_csv(is);
    const auto time = table.numeric_column("time_ps");
    TimeTrace trace;
    trace.label = std::move(label);
    trace.field = table.numeric_column("field");
    if (time.size() < 2) throw StructureError("trace needs at least two samples");
    trace.spacing_ps = time[1] - time[0];
    for (std::size_t i = 2; i < time.size(); ++i) {
        const double step = time[i] - time[i - 1];
        if (std::abs(step - trace.spacing_ps) > 1e-6 * std::abs(trace.spacing_ps)) {
            throw StructureError("trace time axis is not uniformly spaced at row " + std::to_string(i + 1));
        }
    }
    trace.validate();
    return trace;
}

TimeTrace read_trace_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw StructureError("cannot open trace file " + path.string());
    return read_trace_csv(in, path.stem().string());
}

void write_trace_csv(std::ostream& os, const TimeTrace& trace) {
    io::write_csv_row(os, {"time_ps", "field"});
    for (std::size_t i = 0; i < trace.field.size(); ++i) {
        io::write_csv_row(os, {io::format_number(static_cast<double>(i) * trace.spacing_ps), io::format_number(trace.field[i])});
    }
}

std::string to_string(SpectrumKind kind) {
    switch (kind) {
        case SpectrumKind::Field: return "field";
        case SpectrumKind::Transmission: return "transmission";
        case SpectrumKind::Conductivity: return "conductivity";
        case SpectrumKind::Dielectric: return "dielectric";
    }
    return "unknown";
}

Eigen::Index ComplexSpectrum::unmasked_count() const {
    return static_cast<Eigen::Index>(std::count(masked.begin(), masked.end(), false));
}

void write_spectrum_csv(std::ostream& os, const ComplexSpectrum& spec) {
    io::write_csv_row(os, {"freq_thz", "re", "im", "masked"});
    for (Eigen::Index i = 0; i < spec.size(); ++i) {
        io::write_csv_row(os, {io::format_number(spec.freq_thz(i)), io::format_number(spec.values(i).real()),
                               io::format_number(spec.values(i).imag()), spec.masked[static_cast<std::size_t>(i)] ? "1" : "0"});
    }
}

ComplexSpectrum read_spectrum_csv(std::istream& is, SpectrumKind kind) {
    const auto table = io::read_csv(is);
    const auto f = table.numeric_column("freq_thz");
    const auto re = table.numeric_column("re");
    const auto im = table.numeric_column("im");
    ComplexSpectrum spec;
    spec.kind = kind;
    spec.freq_thz = Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
    spec.values.resize(static_cast<Eigen::Index>(f.size()));
    for (std::size_t i = 0; i < f.size(); ++i) {
        spec.values(static_cast<Eigen::Index>(i)) = {re[i], im[i]};
        if (i > 0 && !(f[i] > f[i - 1])) throw StructureError("spectrum frequencies must be strictly ascending");
    }
    if (table.find("masked") >= 0) {
        for (const double m : table.numeric_column("masked")) spec.masked.push_back(m != 0.0);
    } else {
        spec.masked.assign(f.size(), false);
    }
    return spec;
}

ComplexSpectrum field_spectrum(const TimeTrace& trace, std::size_t padded_length, bool hann_window) {
    trace.validate();
    const std::size_t n = std::max(padded_length, trace.field.size());
    const auto input = padded(trace, n, hann_window);
    Eigen::FFT<double> fft;
    std::vector<cd> full;
    fft.fwd(full, input);

    const std::size_t half = n / 2 + 1;
    ComplexSpectrum spec;
    spec.kind = SpectrumKind::Field;
    spec.freq_thz.resize(static_cast<Eigen::Index>(half));
    spec.values.resize(static_cast<Eigen::Index>(half));
    spec.masked.assign(half, false);
    const double df = 1.0 / (static_cast<double>(n) * trace.spacing_ps);  // ps -> THz
    for (std::size_t k = 0; k < half; ++k) {
        spec.freq_thz(static_cast<Eigen::Index>(k)) = static_cast<double>(k) * df;
        spec.values(static_cast<Eigen::Index>(k)) = full[k] * trace.spacing_ps;
    }
    return spec;
}

ComplexSpectrum transmission(const TimeTrace& sample, const TimeTrace& reference, const TransmissionOptions& options) {
    sample.validate();
    reference.validate();
    if (std::abs(sample.spacing_ps - reference.spacing_ps) > 1e-9 * reference.spacing_ps) {
        throw StructureError("sample and reference traces have different sample spacings");
    }
    const std::size_t n = std::max(sample.field.size(), reference.field.size());
    const auto es = field_spectrum(sample, n, options.hann_window);
    const auto er = field_spectrum(reference, n, options.hann_window);

    ComplexSpectrum t;
    t.kind = SpectrumKind::Transmission;
    t.freq_thz = er.freq_thz;
    t.values = Eigen::VectorXcd::Zero(er.size());
    t.masked.assign(static_cast<std::size_t>(er.size()), true);
    if (sample.field.size() != reference.field.size()) {
        t.notes.push_back("zero-padded the shorter trace to " + std::to_string(n) + " samples");
    }
    const double floor = options.mask_floor * er.values.cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < er.size(); ++k) {
        if (std::abs(er.values(k)) < floor || std::abs(er.values(k)) == 0.0) continue;
        t.values(k) = es.values(k) / er.values(k);
        t.masked[static_cast<std::size_t>(k)] = false;
    }
    if (t.unmasked_count() == 0) throw DomainError("every transmission bin is below the reference floor");
    return t;
}

PeakExtraction extract_peaks(const ComplexSpectrum& spec, int max_peaks, double window_lo, double window_hi,
                             const PeakOptions& options) {
    if (max_peaks < 1) throw DomainError("max_peaks must be at least 1");
    if (!(window_hi > window_lo)) throw DomainError("empty fit window");

    std::vector<double> f, y;
    for (Eigen::Index i = 0; i < spec.size(); ++i) {
        if (spec.masked[static_cast<std::size_t>(i)]) continue;
        const double fi = spec.freq_thz(i);
        if (fi < window_lo || fi > window_hi) continue;
        f.push_back(fi);
        y.push_back(std::norm(spec.values(i)));
    }
    const auto n_params = static_cast<std::size_t>(1 + 3 * max_peaks);
    if (f.size() < 2 * n_params) {
        throw StructureError("fit window holds " + std::to_string(f.size()) + " usable bins, too few for " +
                             std::to_string(max_peaks) + " peaks");
    }
    // Normalizing makes the fit exactly scale invariant.
    const double scale = *std::max_element(y.begin(), y.end());
    if (!(scale > 0.0)) throw DomainError("spectrum is identically zero in the fit window");
    for (auto& v : y) v /= scale;
    const double y_min = *std::min_element(y.begin(), y.end());
    const double range = 1.0 - y_min;
    const double bin = (f.back() - f.front()) / static_cast<double>(f.size() - 1);

    struct Candidate {
        std::size_t index;
        double prominence;
    };
    std::vector<Candidate> maxima;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (y[i] > y[i - 1] && y[i] >= y[i + 1]) {
            const double p = prominence(y, i);
            if (p >= options.min_prominence * range) maxima.push_back({i, p});
        }
    }
    std::stable_sort(maxima.begin(), maxima.end(),
                     [](const Candidate& a, const Candidate& b) { return a.prominence > b.prominence; });
    if (maxima.empty()) {
        const auto top = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
        maxima.push_back({top, range});
    }

    std::vector<Seed> seeds;
    for (std::size_t s = 0; s < maxima.size() && seeds.size() < static_cast<std::size_t>(max_peaks); ++s) {
        const std::size_t i = maxima[s].index;
        const double half = y[i] - 0.5 * maxima[s].prominence;
        std::size_t lo = i, hi = i;
        while (lo > 0 && y[lo] > half) --lo;
        while (hi + 1 < y.size() && y[hi] > half) ++hi;
        seeds.push_back({f[i], std::max(f[hi] - f[lo], 2.0 * bin), maxima[s].prominence});
    }
    while (seeds.size() < static_cast<std::size_t>(max_peaks)) {
        auto widest = std::max_element(seeds.begin(), seeds.end(),
                                       [](const Seed& a, const Seed& b) { return a.fwhm < b.fwhm; });
        const Seed parent = *widest;
        *widest = {parent.center - 0.25 * parent.fwhm, 0.5 * parent.fwhm, 0.5 * parent.amplitude};
        seeds.push_back({parent.center + 0.25 * parent.fwhm, 0.5 * parent.fwhm, 0.5 * parent.amplitude});
    }
    std::sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) { return a.center < b.center; });

    const auto p = static_cast<Eigen::Index>(n_params);
    Eigen::VectorXd x0(p), lower(p), upper(p);
    x0(0) = y_min;
    lower(0) = -1.0;
    upper(0) = 1.0;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
        const auto j = static_cast<Eigen::Index>(1 + 3 * k);
        x0.segment(j, 3) << seeds[k].center, seeds[k].fwhm, std::max(seeds[k].amplitude, 1e-3);
        lower.segment(j, 3) << window_lo, bin, 0.0;
        upper.segment(j, 3) << window_hi, window_hi - window_lo, 10.0;
    }
    x0 = x0.cwiseMax(lower).cwiseMin(upper);

    const Eigen::Map<const Eigen::VectorXd> fv(f.data(), static_cast<Eigen::Index>(f.size()));
    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
    auto residual = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd r = Eigen::VectorXd::Constant(fv.size(), x(0)) - yv;
        for (int k = 0; k < max_peaks; ++k) {
            const double c = x(1 + 3 * k), w = x(2 + 3 * k), a = x(3 + 3 * k);
            for (Eigen::Index i = 0; i < fv.size(); ++i) r(i) += a * lorentzian(fv(i), c, w);
        }
        return r;
    };
    LsqOptions lsq;
    lsq.max_iterations = options.max_iterations;
    const auto fit = levenberg_marquardt(residual, x0, lower, upper, lsq);

    PeakExtraction out;
    out.baseline = fit.x(0) * scale;
    out.residual_norm = fit.residual.norm() * scale;
    out.iterations = fit.iterations;
    out.converged = fit.converged;

    // Conditioning of the unit-diagonal normal matrix.
    const Eigen::MatrixXd normal = fit.jacobian.transpose() * fit.jacobian;
    const Eigen::VectorXd diag = normal.diagonal();
    if ((diag.array() <= 0.0).any()) {
        out.ill_conditioned = true;
        out.condition_number = std::numeric_limits<double>::infinity();
        out.max_correlation = 1.0;
    } else {
        const Eigen::VectorXd inv_sqrt = diag.cwiseSqrt().cwiseInverse();
        const Eigen::MatrixXd unit = inv_sqrt.asDiagonal() * normal * inv_sqrt.asDiagonal();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(unit, Eigen::EigenvaluesOnly);
        const double lo_ev = es.eigenvalues().minCoeff();
        out.condition_number = lo_ev > 0.0 ? es.eigenvalues().maxCoeff() / lo_ev : std::numeric_limits<double>::infinity();
        Eigen::FullPivLU<Eigen::MatrixXd> lu(unit);
        if (lu.isInvertible()) {
            const Eigen::MatrixXd cov = lu.inverse();
            for (Eigen::Index i = 0; i < p; ++i) {
                for (Eigen::Index j = i + 1; j < p; ++j) {
                    out.max_correlation = std::max(out.max_correlation, std::abs(cov(i, j)) / std::sqrt(cov(i, i) * cov(j, j)));
                }
            }
        } else {
            out.max_correlation = 1.0;
        }
        out.ill_conditioned = !(out.condition_number <= options.condition_threshold);
    }

    for (int k = 0; k < max_peaks; ++k) {
        PeakRecord rec;
        rec.center = fit.x(1 + 3 * k);
        rec.fwhm = fit.x(2 + 3 * k);
        rec.amplitude = fit.x(3 + 3 * k) * scale;
        rec.residual_norm = out.residual_norm;
        out.peaks.push_back(rec);
    }
    std::sort(out.peaks.begin(), out.peaks.end(), [](const PeakRecord& a, const PeakRecord& b) { return a.center < b.center; });
    return out;
}

void write_peaks_csv(std::ostream& os, const PeakExtraction& extraction) {
    io::write_csv_row(os, {"center_thz", "fwhm_thz", "amplitude", "residual_norm", "branch"});
    for (const auto& p : extraction.peaks) {
        io::write_csv_row(os, {io::format_number(p.center), io::format_number(p.fwhm), io::format_number(p.amplitude),
                               io::format_number(p.residual_norm), p.branch.value_or("")});
    }
}

ComplexSpectrum tinkham_conductivity(const ComplexSpectrum& t, double n_sub, double thickness_m) {
    if (!(thickness_m > 0.0)) throw DomainError("film thickness must be positive");
    if (!(n_sub > 0.0)) throw DomainError("substrate index must be positive");
    ComplexSpectrum sigma = t;
    sigma.kind = SpectrumKind::Conductivity;
    const double prefactor = (1.0 + n_sub) / (constants::vacuum_impedance * thickness_m);
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        if (sigma.masked[idx] || std::abs(t.values(i)) < kTransmissionFloor) {
            sigma.masked[idx] = true;
            sigma.values(i) = 0.0;
            continue;
        }
        sigma.values(i) = prefactor * (1.0 / t.values(i) - 1.0);
    }
    return sigma;
}

ComplexSpectrum tinkham_transmission(const ComplexSpectrum& sigma, double n_sub, double thickness_m) {
    if (!(thickness_m > 0.0)) throw DomainError("film thickness must be positive");
    if (!(n_sub > 0.0)) throw DomainError("substrate index must be positive");
    ComplexSpectrum t = sigma;
    t.kind = SpectrumKind::Transmission;
    const double factor = constants::vacuum_impedance * thickness_m / (1.0 + n_sub);
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        if (t.masked[static_cast<std::size_t>(i)]) continue;
        t.values(i) = 1.0 / (1.0 + sigma.values(i) * factor);
    }
    return t;
}

ComplexSpectrum dielectric_function(const ComplexSpectrum& sigma, double eps_inf) {
    ComplexSpectrum eps;
    eps.kind = SpectrumKind::Dielectric;
    eps.notes = sigma.notes;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        if (sigma.freq_thz(i) > 0.0) keep.push_back(i);
    }
    const auto dropped = static_cast<std::size_t>(sigma.size()) - keep.size();
    if (dropped > 0) eps.notes.push_back("dropped " + std::to_string(dropped) + " bin(s) with f <= 0");
    eps.freq_thz.resize(static_cast<Eigen::Index>(keep.size()));
    eps.values.resize(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
        const Eigen::Index i = keep[j];
        const double omega = 2.0 * constants::pi * sigma.freq_thz(i) * constants::terahertz;
        const auto jj = static_cast<Eigen::Index>(j);
        eps.freq_thz(jj) = sigma.freq_thz(i);
        const bool masked = sigma.masked[static_cast<std::size_t>(i)];
        eps.masked.push_back(masked);
        eps.values(jj) = masked ? cd{0.0} : eps_inf + cd{0.0, 1.0} * sigma.values(i) / (omega * constants::vacuum_permittivity);
    }
    return eps;
}

ComplexSpectrum lorentz_conductivity(const Eigen::VectorXd& freq_thz, const std::vector<PhononMode>& phonons,
                                     double damping_thz, double eps_inf) {
    if (!(damping_thz >= 0.0)) throw DomainError("damping must be non-negative");
    ComplexSpectrum sigma;
    sigma.kind = SpectrumKind::Conductivity;
    sigma.freq_thz = freq_thz;
    sigma.values.resize(freq_thz.size());
    sigma.masked.assign(static_cast<std::size_t>(freq_thz.size()), false);
    for (Eigen::Index i = 0; i < freq_thz.size(); ++i) {
        const double f = freq_thz(i);
        cd chi = 0.0;
        for (const auto& m : phonons) chi += m.nu * m.nu / cd{m.omega * m.omega - f * f, -damping_thz * f};
        const double omega = 2.0 * constants::pi * f * constants::terahertz;
        // sigma = -i omega eps0 (eps - eps_inf)
        sigma.values(i) = cd{0.0, -1.0} * omega * constants::vacuum_permittivity * eps_inf * chi;
    }
    return sigma;
}

ComplexSpectrum synthesize_polariton_spectrum(const HybridSystem& system, const std::vector<double>& linewidths,
                                              const Eigen::VectorXd& freq_thz, const SynthesisOptions& options) {
    const auto basis = diagonalize(system);
    const auto w = weights(basis);
    const std::size_t branches = basis.branches.size();
    if (linewidths.size() != 1 && linewidths.size() != branches) {
        throw StructureError("need one linewidth or one per branch (" + std::to_string(branches) + ")");
    }
    for (const double g : linewidths) {
        if (!(g > 0.0)) throw DomainError("linewidths must be positive");
    }
    if (!(options.noise >= 0.0)) throw DomainError("noise level must be non-negative");

    // Each branch couples to the transmitted field through its photon content.
    Eigen::VectorXd power = Eigen::VectorXd::Zero(freq_thz.size());
    for (std::size_t a = 0; a < branches; ++a) {
        const double fwhm = linewidths.size() == 1 ? linewidths[0] : linewidths[a];
        for (Eigen::Index i = 0; i < freq_thz.size(); ++i) {
            power(i) += w[a].cavity * lorentzian(freq_thz(i), basis.branches[a].omega, fwhm);
        }
    }
    if (options.noise > 0.0) {
        std::mt19937_64 rng(options.seed);
        std::normal_distribution<double> gauss(0.0, options.noise * power.maxCoeff());
        for (Eigen::Index i = 0; i < power.size(); ++i) power(i) += gauss(rng);
    }
    ComplexSpectrum spec;
    spec.kind = SpectrumKind::Transmission;
    spec.freq_thz = freq_thz;
    spec.values = power.cwiseMax(0.0).cwiseSqrt().cast<cd>();
    spec.masked.assign(static_cast<std::size_t>(freq_thz.size()), false);
    return spec;
}

TracePair synthesize_trace_pair(const std::vector<LorentzTerm>& terms, double background, std::size_t samples,
                                double spacing_ps) {
    if (samples < TimeTrace::kMinSamples) throw StructureError("too few samples for a trace");
    if (!(spacing_ps > 0.0)) throw DomainError("sample spacing must be positive");
    for (const auto& t : terms) {
        if (!(t.fwhm > 0.0)) throw DomainError("Lorentz term widths must be positive");
    }

    TracePair pair;
    pair.reference.label = "reference";
    pair.reference.spacing_ps = spacing_ps;
    pair.reference.field.resize(samples);
    const double t0 = 0.25 * static_cast<double>(samples) * spacing_ps;
    const double tau = 0.15;  // ps
    for (std::size_t i = 0; i < samples; ++i) {
        const double s = (static_cast<double>(i) * spacing_ps - t0) / tau;
        pair.reference.field[i] = -s * std::exp(-s * s);
    }

    auto response = [&](double f) {
        cd t = background;
        for (const auto& term : terms) t += term.amplitude / cd{1.0, -2.0 * (f - term.center) / term.fwhm};
        return t;
    };

    Eigen::FFT<double> fft;
    std::vector<cd> spectrum;
    fft.fwd(spectrum, pair.reference.field);
    const std::size_t n = samples;
    const std::size_t half = n / 2 + 1;
    const double df = 1.0 / (static_cast<double>(n) * spacing_ps);

    pair.applied.kind = SpectrumKind::Transmission;
    pair.applied.freq_thz.resize(static_cast<Eigen::Index>(half));
    pair.applied.values.resize(static_cast<Eigen::Index>(half));
    pair.applied.masked.assign(half, false);
    for (std::size_t k = 0; k < half; ++k) {
        cd t = response(static_cast<double>(k) * df);
        if (k == 0 || 2 * k == n) t = t.real();  // self-conjugate bins
        pair.applied.freq_thz(static_cast<Eigen::Index>(k)) = static_cast<double>(k) * df;
        pair.applied.values(static_cast<Eigen::Index>(k)) = t;
        spectrum[k] *= t;
        if (k != 0 && 2 * k != n) spectrum[n - k] *= std::conj(t);
    }
    std::vector<cd> filtered;
    fft.inv(filtered, spectrum);
    pair.sample.label = "sample";
    pair.sample.spacing_ps = spacing_ps;
    pair.sample.field.resize(n);
    for (std::size_t i = 0; i < n; ++i) pair.sample.field[i] = filtered[i].real();
    return pair;
}

}  // namespace polariton
