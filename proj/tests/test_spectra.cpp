#include "fixtures.hpp"
#include "oracles.hpp"

#include "polariton/bogoliubov.hpp"
#include "polariton/errors.hpp"
#include "polariton/spectra.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace polariton;

namespace {

TimeTrace random_trace(std::size_t n, double dt, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    TimeTrace t{"x", dt, {}};
    for (std::size_t i = 0; i < n; ++i) t.field.push_back(g(rng));
    return t;
}

// |T|^2 = baseline + sum of Lorentzians, stored with zero phase.
ComplexSpectrum lorentz_spectrum(const std::vector<LorentzTerm>& peaks, double baseline, double df, int bins) {
    ComplexSpectrum s;
    s.kind = SpectrumKind::Transmission;
    s.freq_thz.resize(bins);
    s.values.resize(bins);
    s.masked.assign(static_cast<std::size_t>(bins), false);
    for (int i = 0; i < bins; ++i) {
        const double f = df * i;
        double y = baseline;
        for (const auto& p : peaks) {
            const double u = 2.0 * (f - p.center) / p.fwhm;
            y += p.amplitude / (1.0 + u * u);
        }
        s.freq_thz(i) = f;
        s.values(i) = std::sqrt(y);
    }
    return s;
}

}  // namespace

TEST_CASE("field spectrum against a direct DFT") {
    for (std::size_t n : {64u, 100u, 257u}) {
        const auto trace = random_trace(n, 0.05, n);
        const auto spec = field_spectrum(trace);
        const auto ref = oracle::naive_dft(trace.field);
        REQUIRE(spec.size() == static_cast<Eigen::Index>(n / 2 + 1));
        double worst = 0.0;
        for (Eigen::Index k = 0; k < spec.size(); ++k) {
            worst = std::max(worst, std::abs(spec.values(k) - 0.05 * ref[static_cast<std::size_t>(k)]));
        }
        CHECK(worst < 1e-11);
        CHECK(spec.freq_thz(1) == doctest::Approx(1.0 / (n * 0.05)));
    }
}

TEST_CASE("Parseval") {
    const std::size_t n = 128;
    const auto trace = random_trace(n, 0.02, 9);
    const auto spec = field_spectrum(trace);
    double time_energy = 0.0;
    for (double v : trace.field) time_energy += v * v;
    // one-sided sum: DC and Nyquist once, the rest twice
    double freq_energy = std::norm(spec.values(0)) + std::norm(spec.values(spec.size() - 1));
    for (Eigen::Index k = 1; k + 1 < spec.size(); ++k) freq_energy += 2.0 * std::norm(spec.values(k));
    CHECK(freq_energy / (0.02 * 0.02 * n) == doctest::Approx(time_energy).epsilon(1e-12));
}

TEST_CASE("zero padding refines the grid") {
    const auto trace = random_trace(64, 0.05, 1);
    const auto padded = field_spectrum(trace, 256);
    CHECK(padded.size() == 129);
    CHECK(padded.values(0) == field_spectrum(trace).values(0));
}

TEST_CASE("trace validation and CSV round trip") {
    CHECK_THROWS_AS(random_trace(10, 0.05, 1).validate(), StructureError);
    CHECK_THROWS(random_trace(64, -0.05, 1).validate());
    const auto trace = random_trace(80, 0.033, 4);
    std::stringstream ss;
    write_trace_csv(ss, trace);
    const auto back = read_trace_csv(ss);
    REQUIRE(back.field.size() == trace.field.size());
    CHECK(back.spacing_ps == doctest::Approx(0.033).epsilon(1e-10));
    for (std::size_t i = 0; i < trace.field.size(); ++i) CHECK(back.field[i] == doctest::Approx(trace.field[i]).epsilon(1e-11));
    std::istringstream uneven("time_ps,field\n0,1\n0.1,2\n0.3,3\n");
    CHECK_THROWS(read_trace_csv(uneven));
}

TEST_CASE("transmission of identical traces is one") {
    const auto trace = random_trace(128, 0.05, 3);
    const auto t = transmission(trace, trace);
    for (Eigen::Index k = 0; k < t.size(); ++k) {
        if (!t.masked[static_cast<std::size_t>(k)]) CHECK(std::abs(t.values(k) - 1.0) < 1e-12);
    }
    TimeTrace other = trace;
    other.spacing_ps = 0.06;
    CHECK_THROWS_AS(transmission(trace, other), StructureError);
}

TEST_CASE("synthetic trace pair recovers the imposed transmission") {
    const auto pair = synthesize_trace_pair({{1.0, 0.1, 0.5}, {1.8, 0.2, 0.3}}, 0.2, 1024, 0.05);
    const auto t = transmission(pair.sample, pair.reference);
    double worst = 0.0;
    for (Eigen::Index k = 0; k < t.size(); ++k) {
        if (t.masked[static_cast<std::size_t>(k)]) continue;
        worst = std::max(worst, std::abs(t.values(k) - pair.applied.values(k)));
    }
    CHECK(t.unmasked_count() > 50);
    CHECK(worst < 1e-8);
}

TEST_CASE("single peak") {
    const auto spec = lorentz_spectrum({{1.2, 0.15, 0.8}}, 0.05, 0.01, 300);
    const auto fit = extract_peaks(spec, 1, 0.5, 2.0);
    CHECK(fit.converged);
    REQUIRE(fit.peaks.size() == 1);
    CHECK(fit.peaks[0].center == doctest::Approx(1.2).epsilon(1e-8));
    CHECK(fit.peaks[0].fwhm == doctest::Approx(0.15).epsilon(1e-6));
    CHECK(fit.peaks[0].amplitude == doctest::Approx(0.8).epsilon(1e-6));
    CHECK(fit.baseline == doctest::Approx(0.05).epsilon(1e-6));
    CHECK_FALSE(fit.ill_conditioned);
}

TEST_CASE("peak fit is scale invariant") {
    auto spec = lorentz_spectrum({{1.0, 0.1, 0.6}, {1.6, 0.12, 0.4}}, 0.02, 0.01, 300);
    const auto a = extract_peaks(spec, 2, 0.5, 2.5);
    spec.values *= 7.0;
    const auto b = extract_peaks(spec, 2, 0.5, 2.5);
    for (std::size_t k = 0; k < 2; ++k) {
        CHECK(b.peaks[k].center == doctest::Approx(a.peaks[k].center).epsilon(1e-10));
        CHECK(b.peaks[k].amplitude == doctest::Approx(49.0 * a.peaks[k].amplitude).epsilon(1e-8));
    }
}

TEST_CASE("overlapping peaks are flagged") {
    const auto apart = extract_peaks(lorentz_spectrum({{1.0, 0.1, 0.5}, {1.3, 0.1, 0.5}}, 0.0, 0.005, 500), 2, 0.5, 2.0);
    CHECK_FALSE(apart.ill_conditioned);
    const auto merged = extract_peaks(lorentz_spectrum({{1.0, 0.1, 0.5}, {1.05, 0.1, 0.5}}, 0.0, 0.005, 500), 2, 0.5, 2.0);
    CHECK(merged.ill_conditioned);
    CHECK(merged.condition_number > apart.condition_number);
}

TEST_CASE("peak extraction rejects a thin window") {
    const auto spec = lorentz_spectrum({{1.0, 0.1, 0.5}}, 0.0, 0.1, 30);
    CHECK_THROWS_AS(extract_peaks(spec, 3, 0.9, 1.1), StructureError);
    CHECK_THROWS_AS(extract_peaks(spec, 1, 1.1, 0.9), DomainError);
}

TEST_CASE("polariton spectrum peaks sit at branch frequencies") {
    const auto s = fixture::bulk_alt(1.14);
    Eigen::VectorXd freq = Eigen::VectorXd::LinSpaced(541, 0.3, 3.0);
    const auto spec = synthesize_polariton_spectrum(s, {0.06}, freq);
    const auto fit = extract_peaks(spec, 3, 0.3, 3.0);
    const auto f = diagonalize(s).frequencies();
    REQUIRE(fit.peaks.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) CHECK(fit.peaks[k].center == doctest::Approx(f[k]).epsilon(1e-6));
}

TEST_CASE("Tinkham inversion round trip") {
    Eigen::VectorXd freq = Eigen::VectorXd::LinSpaced(200, 0.05, 3.0);
    const std::vector<PhononMode> modes{{"TO1", 0.96, 0.5376}, {"TO2", 1.9, 1.14}};
    const auto sigma = lorentz_conductivity(freq, modes, 0.05, 5.0);
    const auto t = tinkham_transmission(sigma, 2.1, 2e-7);
    const auto back = tinkham_conductivity(t, 2.1, 2e-7);
    double worst = 0.0;
    for (Eigen::Index k = 0; k < freq.size(); ++k) worst = std::max(worst, std::abs(back.values(k) - sigma.values(k)) / std::abs(sigma.values(k)));
    CHECK(worst < 1e-9);
    // a transparent film has zero conductivity
    ComplexSpectrum unit = t;
    unit.values.setOnes();
    CHECK(tinkham_conductivity(unit, 2.1, 2e-7).values.norm() == 0.0);
    CHECK_THROWS_AS(tinkham_conductivity(t, 2.1, 0.0), DomainError);
}

TEST_CASE("dielectric function recovers the Lorentz model") {
    Eigen::VectorXd freq = Eigen::VectorXd::LinSpaced(100, 0.0, 3.0);
    const std::vector<PhononMode> modes{{"TO1", 0.96, 0.5376}};
    const auto sigma = lorentz_conductivity(freq, modes, 0.05, 5.0);
    const auto eps = dielectric_function(sigma, 5.0);
    CHECK(eps.size() == 99);
    CHECK_FALSE(eps.notes.empty());
    const double f = eps.freq_thz(10);
    const std::complex<double> model = 5.0 * (1.0 + 0.5376 * 0.5376 / std::complex<double>(0.96 * 0.96 - f * f, -0.05 * f));
    CHECK(std::abs(eps.values(10) - model) < 1e-9 * std::abs(model));
}

TEST_CASE("spectrum CSV round trip") {
    const auto spec = lorentz_spectrum({{1.0, 0.1, 0.5}}, 0.1, 0.02, 100);
    std::stringstream ss;
    write_spectrum_csv(ss, spec);
    const auto back = read_spectrum_csv(ss, SpectrumKind::Transmission);
    REQUIRE(back.size() == spec.size());
    CHECK((back.values - spec.values).norm() < 1e-10);
}
