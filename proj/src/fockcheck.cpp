#include "polariton/fockcheck.hpp"

#include "polariton/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace polariton {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

std::vector<int> resolve_cutoffs(const HybridSystem& system, const FockConfig& config) {
    std::vector<int> cutoffs = config.mode_cutoffs;
    if (cutoffs.empty()) cutoffs.assign(system.mode_count(), config.cutoff);
    if (cutoffs.size() != system.mode_count()) {
        throw StructureError("expected " + std::to_string(system.mode_count()) + " per-mode cutoffs");
    }
    for (const int c : cutoffs) {
        if (c < 2) throw DomainError("Fock cutoff must be at least 2");
    }
    return cutoffs;
}

void guard_size(const std::vector<int>& cutoffs, int margin) {
    double size = 1.0;
    for (const int c : cutoffs) size *= static_cast<double>(c + margin);
    if (size <= static_cast<double>(FockConfig::kMaxBasis)) return;
    const double modes = static_cast<double>(cutoffs.size());
    const int suggested = static_cast<int>(std::floor(std::pow(static_cast<double>(FockConfig::kMaxBasis), 1.0 / modes) + 1e-9)) - margin;
    throw BasisSizeError("truncated Fock basis of " + std::to_string(static_cast<long long>(size)) +
                             " states exceeds the limit of " + std::to_string(FockConfig::kMaxBasis) +
                             "; try cutoff " + std::to_string(std::max(suggested, 2)),
                         std::max(suggested, 2));
}

// Minimal-coupling Hamiltonian written with b_l = i d_l, which makes every
// matrix element real:
//   wc a^dag a + sum w d^dag d - sum g (d + d^dag)(a + a^dag) + D (a + a^dag)^2
// Then <b^dag b'> = <d^dag d'> and <b b'> = -<d d'>.
SpMat hamiltonian(const HybridSystem& system, const FockSpace& space) {
    const std::size_t n_ph = system.phonon_count();
    const double wc = system.omega_c();
    const SpMat a = space.annihilation(n_ph);
    const SpMat at = a.transpose();
    const SpMat field = a + at;

    SpMat h = wc * (at * a);
    double diamagnetic = 0.0;
    for (std::size_t l = 0; l < n_ph; ++l) {
        const auto& mode = system.phonon(l);
        const double g = coupling_strength(mode, wc);
        const SpMat d = space.annihilation(l);
        const SpMat dt = d.transpose();
        h += mode.omega * (dt * d);
        h -= g * (SpMat(d + dt) * field);
        diamagnetic += g * g / mode.omega;
    }
    h += diamagnetic * (field * field);
    h.prune(0.0);
    return h;
}

EigenPairs lowest(const SpMat& h, int count) {
    if (h.rows() <= FockConfig::kDenseLimit) {
        // small enough to keep every level
        const Eigen::MatrixXd dense = h;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
        if (solver.info() != Eigen::Success) throw InstabilityError("dense Fock eigensolve failed");
        return {solver.eigenvalues(), solver.eigenvectors()};
    }
    return lanczos_lowest(h, count);
}

struct Solved {
    FockSpace space;
    EigenPairs pairs;
};

Solved solve(const HybridSystem& system, const std::vector<int>& cutoffs, int levels) {
    FockSpace space(cutoffs);
    const SpMat h = hamiltonian(system, space);
    const int wanted = std::max<int>(levels, static_cast<int>(2 * system.mode_count() + 2));
    return {space, lowest(h, wanted)};
}

std::vector<double> single_excitations(const HybridSystem& system, const Solved& s) {
    const Eigen::VectorXd ground = s.pairs.vectors.col(0);
    const Eigen::Index levels = s.pairs.values.size();
    // c^dag |0> lies entirely in the one-polariton sector.
    Eigen::VectorXd weight = Eigen::VectorXd::Zero(levels);
    for (std::size_t m = 0; m < system.mode_count(); ++m) {
        const Eigen::VectorXd raised = SpMat(s.space.annihilation(m).transpose()) * ground;
        weight += (s.pairs.vectors.transpose() * raised).cwiseAbs2();
    }
    weight(0) = -1.0;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(levels));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return weight(x) > weight(y); });

    const std::size_t branches = system.mode_count();
    if (order.size() < branches + 1) throw InstabilityError("too few Fock levels to identify polariton states");
    std::vector<double> out;
    for (std::size_t i = 0; i < branches; ++i) {
        out.push_back(s.pairs.values(order[i]) - s.pairs.values(0));
    }
    std::sort(out.begin(), out.end());
    return out;
}

void ground_correlators(const HybridSystem& system, const Solved& s, Eigen::MatrixXcd& normal,
                        Eigen::MatrixXcd& anomalous) {
    const auto n = static_cast<Eigen::Index>(system.phonon_count());
    const Eigen::VectorXd ground = s.pairs.vectors.col(0);
    std::vector<Eigen::VectorXd> lowered;
    for (Eigen::Index l = 0; l < n; ++l) lowered.push_back(s.space.annihilation(static_cast<std::size_t>(l)) * ground);
    normal.resize(n, n);
    anomalous.resize(n, n);
    for (Eigen::Index l = 0; l < n; ++l) {
        for (Eigen::Index k = 0; k < n; ++k) {
            normal(l, k) = lowered[static_cast<std::size_t>(l)].dot(lowered[static_cast<std::size_t>(k)]);
            const Eigen::VectorXd dd = s.space.annihilation(static_cast<std::size_t>(l)) * lowered[static_cast<std::size_t>(k)];
            anomalous(l, k) = -ground.dot(dd);
        }
    }
}

std::vector<int> raised(std::vector<int> cutoffs) {
    for (auto& c : cutoffs) c += 2;
    return cutoffs;
}

}  // namespace

FockSpace::FockSpace(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw StructureError("Fock space needs at least one mode");
    for (const int d : dims_) {
        if (d < 1) throw DomainError("mode dimension must be positive");
        dim_ *= d;
    }
}

Eigen::SparseMatrix<double> FockSpace::identity() const {
    SpMat id(dim_, dim_);
    id.setIdentity();
    return id;
}

Eigen::SparseMatrix<double> FockSpace::annihilation(std::size_t mode) const {
    if (mode >= dims_.size()) throw StructureError("mode index out of range");
    Eigen::Index inner = 1;  // stride of `mode`
    for (std::size_t m = mode + 1; m < dims_.size(); ++m) inner *= dims_[m];
    const Eigen::Index local = dims_[mode];

    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(dim_));
    for (Eigen::Index col = 0; col < dim_; ++col) {
        const Eigen::Index occ = (col / inner) % local;
        if (occ == 0) continue;
        entries.emplace_back(col - inner, col, std::sqrt(static_cast<double>(occ)));
    }
    SpMat op(dim_, dim_);
    op.setFromTriplets(entries.begin(), entries.end());
    return op;
}

Eigen::Index FockSpace::index_of(const std::vector<int>& occupation) const {
    if (occupation.size() != dims_.size()) throw StructureError("occupation has wrong length");
    Eigen::Index idx = 0;
    for (std::size_t m = 0; m < dims_.size(); ++m) {
        if (occupation[m] < 0 || occupation[m] >= dims_[m]) throw DomainError("occupation outside truncation");
        idx = idx * dims_[m] + occupation[m];
    }
    return idx;
}

EigenPairs lanczos_lowest(const Eigen::SparseMatrix<double>& h, int count) {
    const Eigen::Index dim = h.rows();
    if (count < 1) throw DomainError("need at least one eigenpair");
    const Eigen::Index k = std::min<Eigen::Index>(count, dim);
    Eigen::Index steps = std::min<Eigen::Index>(dim, std::max<Eigen::Index>(4 * k + 40, 120));
    constexpr Eigen::Index kMaxSteps = 800;

    // Deterministic start vector with support on every basis state.
    Eigen::VectorXd start(dim);
    for (Eigen::Index i = 0; i < dim; ++i) start(i) = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i) + 0.3);
    start.normalize();

    for (;;) {
        Eigen::MatrixXd basis(dim, steps);
        Eigen::VectorXd alpha(steps), beta(steps);
        basis.col(0) = start;
        Eigen::Index m = steps;
        for (Eigen::Index j = 0; j < steps; ++j) {
            Eigen::VectorXd w = h * basis.col(j);
            alpha(j) = basis.col(j).dot(w);
            // full reorthogonalization, twice for stability
            for (int pass = 0; pass < 2; ++pass) {
                w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
            }
            beta(j) = w.norm();
            if (j + 1 == steps) break;
            if (beta(j) < 1e-12) {
                m = j + 1;  // invariant subspace
                break;
            }
            basis.col(j + 1) = w / beta(j);
        }

        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
        for (Eigen::Index j = 0; j < m; ++j) {
            tri(j, j) = alpha(j);
            if (j + 1 < m) tri(j, j + 1) = tri(j + 1, j) = beta(j);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(tri);
        const Eigen::Index got = std::min(k, m);
        double worst = 0.0;
        for (Eigen::Index i = 0; i < got; ++i) {
            const double residual = std::abs(beta(m - 1) * small.eigenvectors()(m - 1, i));
            worst = std::max(worst, residual / std::max(1.0, std::abs(small.eigenvalues()(i))));
        }
        const bool exhausted = m < steps || steps == dim;
        if (worst < 1e-10 || exhausted || steps >= kMaxSteps) {
            if (worst >= 1e-8 && !exhausted) {
                throw InstabilityError("Lanczos did not converge within " + std::to_string(steps) + " steps");
            }
            return {small.eigenvalues().head(got), basis.leftCols(m) * small.eigenvectors().leftCols(got)};
        }
        steps = std::min<Eigen::Index>({dim, kMaxSteps, steps * 3 / 2});
    }
}

FockSolution exact_solution(const HybridSystem& system, const FockConfig& config) {
    const auto cutoffs = resolve_cutoffs(system, config);
    guard_size(cutoffs, config.check_convergence ? 2 : 0);

    FockSolution out;
    auto& spec = out.spectrum;
    auto& corr = out.correlators;
    const Solved s = solve(system, cutoffs, config.levels);
    spec.cutoffs = corr.cutoffs = cutoffs;
    spec.basis_size = corr.basis_size = s.space.dim();
    spec.ground_energy = s.pairs.values(0);
    for (Eigen::Index i = 1; i < s.pairs.values.size(); ++i) spec.excitations.push_back(s.pairs.values(i) - spec.ground_energy);
    spec.single_excitations = single_excitations(system, s);
    ground_correlators(system, s, corr.normal, corr.anomalous);

    if (config.check_convergence) {
        const Solved bigger = solve(system, raised(cutoffs), config.levels);
        const auto refined = single_excitations(system, bigger);
        for (std::size_t i = 0; i < refined.size(); ++i) {
            spec.convergence = std::max(spec.convergence, std::abs(refined[i] - spec.single_excitations[i]));
        }
        Eigen::MatrixXcd normal, anomalous;
        ground_correlators(system, bigger, normal, anomalous);
        corr.convergence = std::max((normal - corr.normal).cwiseAbs().maxCoeff(),
                                    (anomalous - corr.anomalous).cwiseAbs().maxCoeff());
    }
    return out;
}

FockSpectrum exact_spectrum(const HybridSystem& system, const FockConfig& config) {
    return exact_solution(system, config).spectrum;
}

FockCorrelators exact_ground_correlators(const HybridSystem& system, const FockConfig& config) {
    return exact_solution(system, config).correlators;
}

}  // namespace polariton
