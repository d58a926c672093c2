#include "polariton/bogoliubov.hpp"

#include "polariton/errors.hpp"
#include "polariton/io.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

namespace polariton {

namespace {

using cd = std::complex<double>;

std::string describe(cd z) {
    std::ostringstream os;
    os << "(" << io::format_number(z.real()) << (z.imag() < 0 ? " - " : " + ")
       << io::format_number(std::abs(z.imag())) << "i)";
    return os.str();
}

// Symplectic inner product <u, v> = u^dagger eta v.
cd symplectic_dot(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v, Eigen::Index n) {
    return u.head(n).dot(v.head(n)) - u.tail(n).dot(v.tail(n));
}

struct Pole {
    double omega;
    double weight;  // sum of nu^2 over modes sharing this frequency
};

// Distinct coupled poles plus the frequencies of decoupled combinations.
void split_poles(const HybridSystem& system, std::vector<Pole>& poles, std::vector<double>& decoupled) {
    for (const auto& mode : system.phonons()) {
        if (mode.nu == 0.0) {
            decoupled.push_back(mode.omega);
            continue;
        }
        if (!poles.empty() && std::abs(poles.back().omega - mode.omega) <= 1e-12 * mode.omega) {
            poles.back().weight += mode.nu * mode.nu;
            decoupled.push_back(mode.omega);
        } else {
            poles.push_back({mode.omega, mode.nu * mode.nu});
        }
    }
}

// Finds the unique root of a function increasing on (lo, hi).  Endpoints
// flagged as poles are approached geometrically until the sign change holds.
template <typename F>
double bracketed_root(F f, double lo, double hi, bool lo_is_pole, bool hi_is_pole, const char* what) {
    const double width = hi - lo;
    double da = 1e-6, db = 1e-6;
    double a = lo_is_pole ? lo + da * width : lo;
    double b = hi_is_pole ? hi - db * width : hi;
    double fa = f(a), fb = f(b);
    while (lo_is_pole && !(fa < 0.0) && a > lo) {
        da *= 0.01;
        a = lo + da * width;
        fa = f(a);
    }
    while (hi_is_pole && !(fb > 0.0) && b < hi) {
        db *= 0.01;
        b = hi - db * width;
        fb = f(b);
    }
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (!(fa < 0.0 && fb > 0.0)) {
        std::ostringstream os;
        os << what << ": no sign change on [" << io::format_number(a) << ", " << io::format_number(b)
           << "] (f = " << io::format_number(fa) << ", " << io::format_number(fb) << ")";
        throw BracketError(os.str());
    }
    boost::uintmax_t max_iter = 300;
    const auto [r0, r1] = boost::math::tools::toms748_solve(
        f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52), max_iter);
    return 0.5 * (r0 + r1);
}

}  // namespace

double PolaritonBranch::symplectic_norm() const {
    return X.squaredNorm() - X_tilde.squaredNorm() + std::norm(Y) - std::norm(Y_tilde);
}

std::complex<double> PolaritonBranch::symplectic_product(const PolaritonBranch& other) const {
    // [p, q^dag] = sum X_p X_q^* - X~_p X~_q^* + Y_p Y_q^* - Y~_p Y~_q^*
    return other.X.dot(X) - other.X_tilde.dot(X_tilde) + Y * std::conj(other.Y) -
           Y_tilde * std::conj(other.Y_tilde);
}

PolaritonBranch PolaritonBranch::rephased(std::complex<double> phase) const {
    PolaritonBranch out = *this;
    out.X *= phase;
    out.X_tilde *= phase;
    out.Y *= phase;
    out.Y_tilde *= phase;
    return out;
}

std::vector<double> PolaritonBasis::frequencies() const {
    std::vector<double> out;
    out.reserve(branches.size());
    for (const auto& b : branches) out.push_back(b.omega);
    return out;
}

double PolaritonBasis::orthonormality_defect() const {
    double worst = 0.0;
    for (std::size_t a = 0; a < branches.size(); ++a) {
        for (std::size_t b = 0; b < branches.size(); ++b) {
            const cd expected = a == b ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(branches[a].symplectic_product(branches[b]) - expected));
        }
    }
    return worst;
}

double BranchWeights::total() const {
    return std::accumulate(phonon.begin(), phonon.end(), cavity);
}

std::vector<std::string> branch_labels(std::size_t branch_count) {
    if (branch_count == 2) return {"LP", "UP"};
    if (branch_count == 3) return {"LP", "MP", "UP"};
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < branch_count; ++i) labels.push_back("P" + std::to_string(i + 1));
    return labels;
}

std::size_t branch_index(const std::string& label, std::size_t branch_count) {
    const auto labels = branch_labels(branch_count);
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) {
        throw StructureError("unknown branch label '" + label + "' for " + std::to_string(branch_count) + " branches");
    }
    return static_cast<std::size_t>(it - labels.begin());
}

PolaritonBasis diagonalize(const QuadraticForm& form) {
    const Eigen::Index n = form.mode_count();
    const Eigen::Index dim = 2 * n;
    if (form.matrix.rows() != dim || form.matrix.cols() != dim || n < 1) {
        throw StructureError("quadratic form must be a square matrix of even dimension");
    }

    Eigen::MatrixXcd dyn = form.matrix;
    dyn.bottomRows(n) *= -1.0;  // eta * M

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(dyn, true);
    if (solver.info() != Eigen::Success) {
        throw InstabilityError("eigendecomposition of the dynamical matrix failed");
    }
    const Eigen::VectorXcd& evals = solver.eigenvalues();
    const Eigen::MatrixXcd& evecs = solver.eigenvectors();

    const double scale = evals.cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < dim; ++k) {
        if (std::abs(evals(k).imag()) > kStabilityTolerance * scale) {
            throw InstabilityError("dynamically unstable: complex eigenvalue " + describe(evals(k)));
        }
    }

    struct Candidate {
        double omega;
        Eigen::VectorXcd vec;
    };
    std::vector<Candidate> positive;
    for (Eigen::Index k = 0; k < dim; ++k) {
        const double omega = evals(k).real();
        if (std::abs(omega) < kMinimumFrequency) {
            throw DegeneracyError("polariton frequency collapsed to " + io::format_number(omega) + " THz");
        }
        const Eigen::VectorXcd v = evecs.col(k);
        const double norm = symplectic_dot(v, v, n).real();
        if (norm > 0.0) positive.push_back({omega, v});
    }
    if (static_cast<Eigen::Index>(positive.size()) != n) {
        throw InstabilityError("expected " + std::to_string(n) + " positive-norm modes, found " +
                               std::to_string(positive.size()));
    }
    std::sort(positive.begin(), positive.end(),
              [](const Candidate& a, const Candidate& b) { return a.omega < b.omega; });
    for (const auto& c : positive) {
        if (c.omega <= 0.0) {
            throw InstabilityError("thermodynamically unstable: positive-norm mode with frequency " +
                                   io::format_number(c.omega));
        }
    }

    // Symplectic Gram-Schmidt; eigenvectors of distinct frequencies are
    // already orthogonal, so only near-degenerate clusters are touched.
    const double cluster_tol = 1e-8 * scale;
    for (std::size_t i = 0; i < positive.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (std::abs(positive[i].omega - positive[j].omega) > cluster_tol) continue;
            const cd overlap = symplectic_dot(positive[j].vec, positive[i].vec, n);
            positive[i].vec -= overlap * positive[j].vec;
        }
        const double norm = symplectic_dot(positive[i].vec, positive[i].vec, n).real();
        if (!(norm > 0.0)) throw InstabilityError("lost positive symplectic norm during orthogonalization");
        positive[i].vec /= std::sqrt(norm);
    }

    const auto labels = branch_labels(static_cast<std::size_t>(n));
    PolaritonBasis basis;
    basis.source = form.representation;
    for (Eigen::Index a = 0; a < n; ++a) {
        // For eta*M x = omega x the mode p = w.v with [p, H] = omega p has
        // w = x^dagger eta, i.e. (U, V) = (x_top^*, -x_bottom^*).
        Eigen::VectorXcd coeffs = positive[static_cast<std::size_t>(a)].vec.conjugate();
        coeffs.tail(n) *= -1.0;

        Eigen::Index pivot = 0;
        const double max_abs = coeffs.cwiseAbs().maxCoeff();
        for (Eigen::Index k = 0; k < dim; ++k) {
            if (std::abs(coeffs(k)) >= max_abs * (1.0 - 1e-12)) {
                pivot = k;
                break;
            }
        }
        coeffs *= std::conj(coeffs(pivot)) / std::abs(coeffs(pivot));

        PolaritonBranch br;
        br.label = labels[static_cast<std::size_t>(a)];
        br.omega = positive[static_cast<std::size_t>(a)].omega;
        br.X = coeffs.head(n - 1);
        br.Y = coeffs(n - 1);
        br.X_tilde = coeffs.segment(n, n - 1);
        br.Y_tilde = coeffs(dim - 1);
        basis.branches.push_back(std::move(br));
    }
    return basis;
}

PolaritonBasis diagonalize(const HybridSystem& system) {
    return diagonalize(build_minimal_coupling(system));
}

std::vector<double> secular_frequencies(const HybridSystem& system) {
    std::vector<Pole> poles;
    std::vector<double> roots;
    split_poles(system, poles, roots);

    const double wc2 = system.omega_c() * system.omega_c();
    // In x = omega^2: f(x) = x (1 + sum s_k/(p_k^2 - x)) - omega_c^2, increasing between poles.
    auto f = [&](double x) {
        double s = 1.0;
        for (const auto& p : poles) s += p.weight / (p.omega * p.omega - x);
        return x * s - wc2;
    };

    if (poles.empty()) {
        roots.push_back(system.omega_c());
    } else {
        double lo = 0.0;
        bool lo_pole = false;
        for (const auto& p : poles) {
            const double hi = p.omega * p.omega;
            roots.push_back(std::sqrt(bracketed_root(f, lo, hi, lo_pole, true, "secular root")));
            lo = hi;
            lo_pole = true;
        }
        double total_weight = 0.0;
        for (const auto& p : poles) total_weight += p.weight;
        double hi = 2.0 * (poles.back().omega * poles.back().omega + wc2 + total_weight);
        for (int i = 0; i < 64 && !(f(hi) > 0.0); ++i) hi *= 2.0;
        roots.push_back(std::sqrt(bracketed_root(f, lo, hi, true, false, "secular root (upper band)")));
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

std::vector<double> zero_cavity_limits(const HybridSystem& system) {
    std::vector<Pole> poles;
    std::vector<double> limits;
    split_poles(system, poles, limits);

    auto h = [&](double x) {
        double s = 1.0;
        for (const auto& p : poles) s += p.weight / (p.omega * p.omega - x);
        return s;
    };
    for (std::size_t k = 0; k < poles.size(); ++k) {
        const double lo = poles[k].omega * poles[k].omega;
        double hi;
        bool hi_pole;
        if (k + 1 < poles.size()) {
            hi = poles[k + 1].omega * poles[k + 1].omega;
            hi_pole = true;
        } else {
            // h < 1 for x > p^2 and h -> 1 at infinity; the zero lies below p^2 + sum weights.
            double total_weight = 0.0;
            for (const auto& p : poles) total_weight += p.weight;
            hi = 2.0 * (lo + total_weight);
            hi_pole = false;
        }
        limits.push_back(std::sqrt(
            bracketed_root(h, lo, hi, true, hi_pole, "zero-cavity limit")));
    }
    std::sort(limits.begin(), limits.end());
    return limits;
}

PolaritonWeights weights(const PolaritonBasis& basis) {
    PolaritonWeights out;
    out.reserve(basis.branches.size());
    for (const auto& br : basis.branches) {
        BranchWeights w;
        for (Eigen::Index l = 0; l < br.X.size(); ++l) {
            w.phonon.push_back(std::norm(br.X(l)) - std::norm(br.X_tilde(l)));
        }
        w.cavity = std::norm(br.Y) - std::norm(br.Y_tilde);
        out.push_back(std::move(w));
    }
    return out;
}

AsymptoticCoefficients asymptotic_coefficients(const HybridSystem& system) {
    const auto n_ph = static_cast<Eigen::Index>(system.phonon_count());
    const double wc = system.omega_c();
    const auto labels = branch_labels(system.mode_count());
    const cd I{0.0, 1.0};

    auto mixing = [&](const PhononMode& m) { return -I * m.nu / (2.0 * std::sqrt(wc * m.omega)); };

    AsymptoticCoefficients out;
    out.basis.source = Representation::MinimalCoupling;

    PolaritonBranch lp;
    lp.label = labels.front();
    lp.omega = wc;
    lp.X = Eigen::VectorXcd::Zero(n_ph);
    lp.X_tilde = Eigen::VectorXcd::Zero(n_ph);
    for (Eigen::Index l = 0; l < n_ph; ++l) {
        lp.X(l) = lp.X_tilde(l) = mixing(system.phonon(static_cast<std::size_t>(l)));
    }
    lp.Y = 1.0;
    lp.Y_tilde = 0.0;
    out.basis.branches.push_back(lp);

    for (Eigen::Index l = 0; l < n_ph; ++l) {
        const auto& mode = system.phonon(static_cast<std::size_t>(l));
        PolaritonBranch br;
        br.label = labels[static_cast<std::size_t>(l + 1)];
        br.omega = mode.omega;
        br.X = Eigen::VectorXcd::Zero(n_ph);
        br.X_tilde = Eigen::VectorXcd::Zero(n_ph);
        br.X(l) = 1.0;
        br.Y = br.Y_tilde = mixing(mode);
        out.basis.branches.push_back(std::move(br));
    }
    out.frequency_ratio = wc / system.phonon(0).omega;
    out.valid = out.frequency_ratio <= kAsymptoticMaxRatio;
    return out;
}

std::vector<SweepPoint> dispersion_sweep(const HybridSystem& templ, std::span<const double> omega_c_grid) {
    if (omega_c_grid.empty()) throw StructureError("cavity-frequency grid is empty");
    for (std::size_t i = 0; i < omega_c_grid.size(); ++i) {
        if (!(omega_c_grid[i] > 0.0)) throw DomainError("cavity-frequency grid must be positive");
        if (i > 0 && !(omega_c_grid[i] > omega_c_grid[i - 1])) {
            throw StructureError("cavity-frequency grid must be strictly ascending");
        }
    }
    std::vector<SweepPoint> out;
    out.reserve(omega_c_grid.size());
    for (const double wc : omega_c_grid) {
        SweepPoint pt;
        pt.omega_c = wc;
        pt.basis = diagonalize(templ.with_cavity_frequency(wc));
        pt.weights = weights(pt.basis);
        out.push_back(std::move(pt));
    }
    return out;
}

void write_dispersion_csv(std::ostream& os, const std::vector<SweepPoint>& sweep) {
    if (sweep.empty()) return;
    const auto n_ph = sweep.front().basis.phonon_count();
    std::vector<std::string> header{"omega_c_thz", "branch", "omega_thz"};
    for (std::size_t l = 1; l <= n_ph; ++l) {
        const auto s = std::to_string(l);
        for (const auto* name : {"X", "Xt"}) {
            header.push_back(name + s + "_re");
            header.push_back(name + s + "_im");
        }
    }
    for (const auto* name : {"Y_re", "Y_im", "Yt_re", "Yt_im"}) header.emplace_back(name);
    for (std::size_t l = 1; l <= n_ph; ++l) header.push_back("W_" + std::to_string(l));
    header.emplace_back("W_c");
    io::write_csv_row(os, header);

    using io::format_number;
    for (const auto& pt : sweep) {
        for (std::size_t a = 0; a < pt.basis.branches.size(); ++a) {
            const auto& br = pt.basis.branches[a];
            const auto& w = pt.weights[a];
            std::vector<std::string> row{format_number(pt.omega_c), br.label, format_number(br.omega)};
            for (Eigen::Index l = 0; l < static_cast<Eigen::Index>(n_ph); ++l) {
                row.push_back(format_number(br.X(l).real()));
                row.push_back(format_number(br.X(l).imag()));
                row.push_back(format_number(br.X_tilde(l).real()));
                row.push_back(format_number(br.X_tilde(l).imag()));
            }
            row.push_back(format_number(br.Y.real()));
            row.push_back(format_number(br.Y.imag()));
            row.push_back(format_number(br.Y_tilde.real()));
            row.push_back(format_number(br.Y_tilde.imag()));
            for (const double v : w.phonon) row.push_back(format_number(v));
            row.push_back(format_number(w.cavity));
            io::write_csv_row(os, row);
        }
    }
}

void write_weights_csv(std::ostream& os, const std::vector<SweepPoint>& sweep) {
    if (sweep.empty()) return;
    const auto n_ph = sweep.front().basis.phonon_count();
    std::vector<std::string> header{"omega_c_thz", "branch", "omega_thz"};
    for (std::size_t l = 1; l <= n_ph; ++l) header.push_back("W_" + std::to_string(l));
    header.emplace_back("W_c");
    header.emplace_back("W_sum");
    io::write_csv_row(os, header);
    using io::format_number;
    for (const auto& pt : sweep) {
        for (std::size_t a = 0; a < pt.basis.branches.size(); ++a) {
            const auto& w = pt.weights[a];
            std::vector<std::string> row{format_number(pt.omega_c), pt.basis.branches[a].label,
                                         format_number(pt.basis.branches[a].omega)};
            for (const double v : w.phonon) row.push_back(format_number(v));
            row.push_back(format_number(w.cavity));
            row.push_back(format_number(w.total()));
            io::write_csv_row(os, row);
        }
    }
}

}  // namespace polariton
