#pragma once

#include "polariton/model.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace polariton {

// Uniformly sampled field vs delay time.
struct TimeTrace {
    std::string label;
    double spacing_ps{};
    std::vector<double> field;

    static constexpr std::size_t kMinSamples = 64;
    void validate() const;
};

// CSV with columns time_ps, field.
TimeTrace read_trace_csv(std::istream& is, std::string label = {});
TimeTrace read_trace_file(const std::filesystem::path& path);
void write_trace_csv(std::ostream& os, const TimeTrace& trace);

enum class SpectrumKind { Field, Transmission, Conductivity, Dielectric };
std::string to_string(SpectrumKind kind);

struct ComplexSpectrum {
    SpectrumKind kind{SpectrumKind::Field};
    Eigen::VectorXd freq_thz;    // strictly ascending
    Eigen::VectorXcd values;
    std::vector<bool> masked;    // true where the bin carries no usable value
    std::vector<std::string> notes;

    Eigen::Index size() const noexcept { return freq_thz.size(); }
    Eigen::Index unmasked_count() const;
};

// freq_thz, re, im, masked
void write_spectrum_csv(std::ostream& os, const ComplexSpectrum& spec);
ComplexSpectrum read_spectrum_csv(std::istream& is, SpectrumKind kind);

// Non-negative-frequency half of the DFT; `padded_length` >= samples.
ComplexSpectrum field_spectrum(const TimeTrace& trace, std::size_t padded_length = 0, bool hann_window = false);

struct TransmissionOptions {
    double mask_floor{1e-3};  // relative to max |E_ref|
    bool hann_window{false};
};

// E_sample(f) / E_ref(f); the shorter trace is zero-padded to the longer one.
ComplexSpectrum transmission(const TimeTrace& sample, const TimeTrace& reference, const TransmissionOptions& options = {});

struct PeakRecord {
    double center{};  // THz
    double fwhm{};    // THz
    double amplitude{};
    double residual_norm{};
    std::optional<std::string> branch;
};

struct PeakOptions {
    double min_prominence{0.05};        // relative to the window's dynamic range
    double condition_threshold{1e3};    // unit-diagonal normal matrix; ~FWHM/2 overlap
    int max_iterations{400};
};

struct PeakExtraction {
    std::vector<PeakRecord> peaks;  // ascending center
    double baseline{};
    double residual_norm{};
    int iterations{};
    bool converged{false};
    bool ill_conditioned{false};
    double condition_number{};
    double max_correlation{};
};

// Least-squares fit of a constant plus max_peaks Lorentzians to |T|^2 inside
// [window_lo, window_hi].  Seeds come from the most prominent local maxima;
// when there are fewer maxima than peaks, the broadest seed is split.
PeakExtraction extract_peaks(const ComplexSpectrum& spec, int max_peaks, double window_lo, double window_hi,
                             const PeakOptions& options = {});

void write_peaks_csv(std::ostream& os, const PeakExtraction& extraction);

inline constexpr double kDefaultSubstrateIndex = 2.1;
inline constexpr double kTransmissionFloor = 1e-6;

// Thin-film conductivity (S/m): sigma = (1 + n_sub)(1/t - 1)/(Z0 d).
ComplexSpectrum tinkham_conductivity(const ComplexSpectrum& t, double n_sub, double thickness_m);
// Inverse relation: t = 1/(1 + sigma Z0 d/(1 + n_sub)).
ComplexSpectrum tinkham_transmission(const ComplexSpectrum& sigma, double n_sub, double thickness_m);

// eps = eps_inf + i sigma/(2 pi f eps0); bins with f <= 0 are dropped.
ComplexSpectrum dielectric_function(const ComplexSpectrum& sigma, double eps_inf);

// Conductivity of eps = eps_inf (1 + sum nu^2/(omega^2 - f^2 - i gamma f)).
ComplexSpectrum lorentz_conductivity(const Eigen::VectorXd& freq_thz, const std::vector<PhononMode>& phonons,
                                     double damping_thz, double eps_inf);

struct SynthesisOptions {
    double noise{0.0};  // Gaussian sigma on |T|^2, relative to its maximum
    std::uint64_t seed{42};
};

// Transmission whose |T|^2 is a sum of unit Lorentzians at the polariton
// frequencies of `system`.  `linewidths` holds one FWHM per branch or a single
// shared value.
ComplexSpectrum synthesize_polariton_spectrum(const HybridSystem& system, const std::vector<double>& linewidths,
                                              const Eigen::VectorXd& freq_thz, const SynthesisOptions& options = {});

struct LorentzTerm {
    double center{};
    double fwhm{};
    double amplitude{};
};

struct TracePair {
    TimeTrace sample;
    TimeTrace reference;
    ComplexSpectrum applied;  // transmission imposed on the reference, non-negative bins
};

// Reference: a single-cycle pulse.  Sample: reference filtered by
// T(f) = background + sum A/(1 - 2i (f - f0)/fwhm), made Hermitian.
TracePair synthesize_trace_pair(const std::vector<LorentzTerm>& terms, double background, std::size_t samples,
                                double spacing_ps);

}  // namespace polariton
