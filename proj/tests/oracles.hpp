#pragma once

// Reference computations used only by the tests.  Each one is derived
// independently of the library code it checks.

#include "polariton/fockcheck.hpp"
#include "polariton/model.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

namespace oracle {

// Roots of w^4 - (wc^2 + w1^2 + nu^2) w^2 + wc^2 w1^2 = 0, smaller one via the
// product of roots to avoid cancellation.
inline std::pair<double, double> single_mode_frequencies(double w1, double wc, double nu) {
    const long double s = static_cast<long double>(wc) * wc + static_cast<long double>(w1) * w1 + static_cast<long double>(nu) * nu;
    const long double p = static_cast<long double>(wc) * wc * w1 * w1;
    const long double upper = 0.5L * (s + std::sqrt(s * s - 4.0L * p));
    const long double lower = p / upper;
    return {static_cast<double>(std::sqrt(lower)), static_cast<double>(std::sqrt(upper))};
}

// O(n^2) DFT, X_k = sum_j x_j exp(-2 pi i jk/n).
inline std::vector<std::complex<double>> naive_dft(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<long double> acc = 0.0L;
        for (std::size_t j = 0; j < n; ++j) {
            const long double phase = -2.0L * 3.14159265358979323846264338L * static_cast<long double>((j * k) % n) / static_cast<long double>(n);
            acc += static_cast<long double>(x[j]) * std::complex<long double>(std::cos(phase), std::sin(phase));
        }
        out[k] = {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
    }
    return out;
}

inline double bose(double f_thz, double t_kelvin) {
    if (t_kelvin == 0.0) return 0.0;
    const long double x = 6.62607015e-34L * f_thz * 1e12L / (1.380649e-23L * t_kelvin);
    return static_cast<double>(1.0L / (std::exp(x) - 1.0L));
}

// Second-order effective coupling between the one-phonon states |1_l> and
// |1_k> (photon vacuum) of H0 = wc a^dag a + sum wt_j beta_j^dag beta_j with
// V = -i sum_j gt_j (beta_j + beta_j^dag)(a - a^dag), by explicit sums over
// intermediate states of a truncated Fock space.
inline double schrieffer_wolff_element(const polariton::HybridSystem& system, std::size_t l, std::size_t k, int cutoff = 4) {
    const auto sq = polariton::squeezed_params(system);
    const std::size_t n_ph = sq.size();
    std::vector<int> dims(n_ph + 1, cutoff);
    const polariton::FockSpace space(dims);
    const Eigen::SparseMatrix<double> a = space.annihilation(n_ph);
    const Eigen::SparseMatrix<double> quad = a - Eigen::SparseMatrix<double>(a.transpose());
    // V = -i R with R real
    Eigen::SparseMatrix<double> r(space.dim(), space.dim());
    for (std::size_t j = 0; j < n_ph; ++j) {
        const Eigen::SparseMatrix<double> b = space.annihilation(j);
        r += sq[j].g_tilde * (Eigen::SparseMatrix<double>(b + Eigen::SparseMatrix<double>(b.transpose())) * quad);
    }
    const Eigen::MatrixXd rd = r;

    auto energy = [&](Eigen::Index idx) {
        double e = 0.0;
        Eigen::Index rest = idx;
        for (std::size_t m = dims.size(); m-- > 0;) {
            const int occ = static_cast<int>(rest % dims[m]);
            rest /= dims[m];
            e += occ * (m == n_ph ? system.omega_c() : sq[m].omega_tilde);
        }
        return e;
    };
    auto photons = [&](Eigen::Index idx) { return idx % dims[n_ph]; };

    std::vector<int> occ_i(n_ph + 1, 0), occ_j(n_ph + 1, 0);
    occ_i[l] = 1;
    occ_j[k] = 1;
    const Eigen::Index i = space.index_of(occ_i);
    const Eigen::Index j = space.index_of(occ_j);
    const double ei = energy(i);
    const double ej = energy(j);
    double sum = 0.0;
    for (Eigen::Index m = 0; m < space.dim(); ++m) {
        if (photons(m) == 0) continue;  // P space: photon vacuum
        const double em = energy(m);
        // <i|V|m><m|V|j> = (-i)^2 R_im R_mj
        sum += -rd(i, m) * rd(m, j) * 0.5 * (1.0 / (ei - em) + 1.0 / (ej - em));
    }
    return sum;
}

}  // namespace oracle
