#pragma once

#include "crn/endo.hpp"
#include "crn/error.hpp"
#include "crn/graph.hpp"
#include "crn/network.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

namespace crn {

/// Linear ODE data  xdot = x A + b  of a first-order mass-action system.
/// The exact matrices are kept alongside their double images.
struct FluxSystem {
    RationalMatrix A_exact;
    RationalVector b_exact;
    Eigen::MatrixXd A;
    Eigen::RowVectorXd b;
    ReactionNetwork net;

    std::size_t dim() const { return net.dim(); }
};

inline FluxSystem flux_system(const ReactionNetwork& net) {
    require_first_order(net, "flux_system");
    const std::size_t d = net.dim();
    FluxSystem sys;
    sys.net = net;
    sys.A_exact.assign(d, RationalVector(d, Rational(0)));
    sys.b_exact.assign(d, Rational(0));
    for (const auto& r : net.reactions()) {
        const Rational& k = r.rate.exact;
        if (r.source.is_zero()) {
            for (std::size_t i = 0; i < d; ++i)
                if (r.target.coords[i] != 0) sys.b_exact[i] += k * r.target.coords[i];
            continue;
        }
        const std::size_t i = r.source.single_species();
        for (std::size_t j = 0; j < d; ++j) {
            const Rational delta = r.target.coords[j] - r.source.coords[j];
            if (delta != 0) sys.A_exact[i][j] += k * delta;
        }
    }
    sys.A.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    sys.b.resize(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
        sys.b(static_cast<Eigen::Index>(i)) = to_double(sys.b_exact[i]);
        for (std::size_t j = 0; j < d; ++j) {
            if (i != j && sys.A_exact[i][j] < 0) throw InternalError("flux matrix is not Metzler");
            sys.A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = to_double(sys.A_exact[i][j]);
        }
    }
    return sys;
}

/// Weakly chained diagonally dominant: every row is diagonally dominant and
/// each row that is not strictly so reaches a strict row through nonzero
/// off-diagonal entries.
inline bool is_wcdd(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols()) throw PreconditionError("is_wcdd: matrix must be square");
    const Eigen::Index n = A.rows();
    std::vector<bool> strict(static_cast<std::size_t>(n), false);
    for (Eigen::Index i = 0; i < n; ++i) {
        double off = 0.0;
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != i) off += std::abs(A(i, j));
        const double diag = std::abs(A(i, i));
        if (diag < off) return false;
        strict[static_cast<std::size_t>(i)] = diag > off;
    }
    for (Eigen::Index start = 0; start < n; ++start) {
        if (strict[static_cast<std::size_t>(start)]) continue;
        std::vector<bool> seen(static_cast<std::size_t>(n), false);
        std::queue<Eigen::Index> q;
        q.push(start);
        seen[static_cast<std::size_t>(start)] = true;
        bool reached = false;
        while (!q.empty() && !reached) {
            const auto i = q.front();
            q.pop();
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i || A(i, j) == 0.0 || seen[static_cast<std::size_t>(j)]) continue;
                if (strict[static_cast<std::size_t>(j)]) {
                    reached = true;
                    break;
                }
                seen[static_cast<std::size_t>(j)] = true;
                q.push(j);
            }
        }
        if (!reached) return false;
    }
    return true;
}

constexpr double zero_eigen_threshold = 1e-9;

struct SpectralReport {
    std::vector<std::complex<double>> eigenvalues;  // sorted by real, then imaginary part
    double spectral_abscissa = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> rho;
    std::size_t n = 0;
    std::size_t zero_multiplicity = 0;
};

/// Largest number of sources in one weak component.
inline std::size_t max_sources_per_component(const ReactionNetwork& net) {
    std::vector<bool> is_source(net.vertices().size(), false);
    for (auto s : net.source_vertices()) is_source[s] = true;
    std::size_t best = 0;
    for (const auto& b : weakly_connected_components(net).blocks) {
        std::size_t count = 0;
        for (auto v : b) count += is_source[v] ? 1 : 0;
        best = std::max(best, count);
    }
    return best;
}

/// Number of zero eigenvalues a certified network must have: one per strong
/// component of Gbullet plus one per species absent from every complex.
inline std::size_t expected_zero_multiplicity(const ReactionNetwork& net) {
    const auto split = zero_component_split(net);
    std::size_t k = strongly_connected_components(split.second).size();
    return k + (net.dim() - species_support(net).size());
}

/// Eigenvalues of A, r(A), rho and n. When `certified` is true the count of
/// numerically zero eigenvalues is checked against the structure and a
/// mismatch raises NumericalError.
inline SpectralReport spectral_report(const FluxSystem& sys, bool certified = false) {
    SpectralReport rep;
    rep.n = max_sources_per_component(sys.net);
    if (sys.A.rows() == 0) return rep;
    Eigen::EigenSolver<Eigen::MatrixXd> es(sys.A, false);
    if (es.info() != Eigen::Success) throw NumericalError("eigenvalue solver did not converge");
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) rep.eigenvalues.push_back(es.eigenvalues()(i));
    std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    rep.spectral_abscissa = -std::numeric_limits<double>::infinity();
    for (const auto& z : rep.eigenvalues) {
        rep.spectral_abscissa = std::max(rep.spectral_abscissa, z.real());
        const bool zero = std::abs(z.real()) < zero_eigen_threshold && std::abs(z.imag()) < zero_eigen_threshold;
        if (zero) {
            ++rep.zero_multiplicity;
        } else if (!rep.rho || -z.real() < *rep.rho) {
            rep.rho = -z.real();
        }
    }
    if (certified) {
        const std::size_t expect = expected_zero_multiplicity(sys.net);
        if (expect != rep.zero_multiplicity)
            throw NumericalError("found " + std::to_string(rep.zero_multiplicity) +
                                 " numerically zero eigenvalues, structure requires " + std::to_string(expect));
    }
    return rep;
}

namespace detail {

inline void require_monomolecular(const ReactionNetwork& net, const std::vector<std::size_t>& component) {
    for (auto v : component) {
        const Complex& c = net.vertices()[v];
        if (!c.is_zero() && c.single_species() == Complex::npos)
            throw PreconditionError("laplacian: component holds a complex that is not a single species or 0");
    }
}

}  // namespace detail

/// Weighted Laplacian of the edges running inside `component` (vertex
/// indices into net.vertices()): L_ij = -k_ij off the diagonal, the
/// outgoing rate sum on it. Rows and columns follow `component`'s order.
inline Eigen::MatrixXd laplacian(const ReactionNetwork& net, const std::vector<std::size_t>& component) {
    detail::require_monomolecular(net, component);
    const auto n = static_cast<Eigen::Index>(component.size());
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    std::vector<Eigen::Index> pos(net.vertices().size(), -1);
    for (Eigen::Index i = 0; i < n; ++i) pos[component[static_cast<std::size_t>(i)]] = i;
    for (std::size_t e = 0; e < net.reactions().size(); ++e) {
        const auto i = pos[net.source_index(e)];
        const auto j = pos[net.target_index(e)];
        if (i < 0 || j < 0) continue;
        const double k = net.reactions()[e].rate.value;
        L(i, j) -= k;
        L(i, i) += k;
    }
    return L;
}

struct TreeConstants {
    std::vector<std::size_t> component;
    std::vector<double> c;

    std::vector<double> normalized() const {
        double total = 0.0;
        for (double x : c) total += x;
        std::vector<double> out(c);
        for (double& x : out) x /= total;
        return out;
    }
};

/// Diagonal cofactors of a Laplacian, by partial-pivot LU of each minor.
inline std::vector<double> laplacian_cofactors(const Eigen::MatrixXd& L) {
    const Eigen::Index n = L.rows();
    std::vector<double> c(static_cast<std::size_t>(n), 1.0);
    if (n <= 1) return c;
    for (Eigen::Index l = 0; l < n; ++l) {
        Eigen::MatrixXd minor(n - 1, n - 1);
        for (Eigen::Index i = 0, mi = 0; i < n; ++i) {
            if (i == l) continue;
            for (Eigen::Index j = 0, mj = 0; j < n; ++j) {
                if (j == l) continue;
                minor(mi, mj++) = L(i, j);
            }
            ++mi;
        }
        c[static_cast<std::size_t>(l)] = Eigen::PartialPivLU<Eigen::MatrixXd>(minor).determinant();
    }
    return c;
}

namespace detail {

inline bool strongly_connected_within(const ReactionNetwork& net, const std::vector<std::size_t>& component) {
    if (component.size() <= 1) return true;
    std::vector<bool> in(net.vertices().size(), false);
    for (auto v : component) in[v] = true;
    auto sweep = [&](bool forward) {
        std::vector<bool> seen(net.vertices().size(), false);
        std::vector<std::size_t> stack{component.front()};
        seen[component.front()] = true;
        std::size_t count = 1;
        while (!stack.empty()) {
            const auto v = stack.back();
            stack.pop_back();
            for (std::size_t e = 0; e < net.reactions().size(); ++e) {
                const auto a = forward ? net.source_index(e) : net.target_index(e);
                const auto b = forward ? net.target_index(e) : net.source_index(e);
                if (a != v || !in[b] || seen[b]) continue;
                seen[b] = true;
                ++count;
                stack.push_back(b);
            }
        }
        return count == component.size();
    };
    return sweep(true) && sweep(false);
}

}  // namespace detail

/// Matrix-Tree constants: c_l is the total weight of spanning in-trees
/// rooted at l, read off as the (l,l) cofactor of the component Laplacian.
inline TreeConstants tree_constants(const ReactionNetwork& net, const std::vector<std::size_t>& component) {
    if (component.empty()) throw PreconditionError("tree_constants: empty component");
    if (!detail::strongly_connected_within(net, component))
        throw PreconditionError("tree_constants: component is not strongly connected");
    TreeConstants t;
    t.component = component;
    t.c = laplacian_cofactors(laplacian(net, component));
    for (double x : t.c)
        if (!(x > 0.0)) throw NumericalError("tree_constants: non-positive cofactor");
    return t;
}

/// Keeps every first-order reaction and replaces the zeroth-order ones by a
/// fan 0 -> S_k weighted with the k-th coordinate of their total flux, so
/// the net outflux of every source is unchanged. Only species that actually
/// receive flux get a fan edge.
inline ReactionNetwork spade_realization(const ReactionNetwork& net) {
    require_first_order(net, "spade_realization");
    if (net.empty()) throw PreconditionError("spade_realization: network is empty");
    const std::size_t d = net.dim();
    RationalVector fan(d, Rational(0));
    std::vector<Reaction> rs;
    for (const auto& r : net.reactions()) {
        if (r.source.is_zero()) {
            for (std::size_t k = 0; k < d; ++k) fan[k] += r.target.coords[k] * r.rate.exact;
        } else {
            rs.push_back(r);
        }
    }
    for (std::size_t k = 0; k < d; ++k)
        if (fan[k] > 0) rs.push_back({Complex::zero(d), Complex::species(d, k), Rate(fan[k])});
    return ReactionNetwork(net.species(), std::move(rs));
}

struct SourceFlux {
    Complex source;
    RationalVector original;
    RationalVector realized;
    bool equal = false;
};

/// Net reaction flux sum_{y->y'} k (y' - y) at every source of `original`,
/// compared exactly with the same sum in `realized`.
inline std::vector<SourceFlux> flux_match(const ReactionNetwork& original, const ReactionNetwork& realized) {
    auto outflux = [](const ReactionNetwork& net, const Complex& y) {
        RationalVector sum(net.dim(), Rational(0));
        for (const auto& r : net.reactions()) {
            if (!(r.source == y)) continue;
            const RationalVector v = r.vector();
            for (std::size_t i = 0; i < sum.size(); ++i)
                if (v[i] != 0) sum[i] += r.rate.exact * v[i];
        }
        return sum;
    };
    std::vector<SourceFlux> out;
    std::vector<Complex> sources;
    for (auto s : original.source_vertices()) sources.push_back(original.vertices()[s]);
    for (auto s : realized.source_vertices()) {
        const Complex& y = realized.vertices()[s];
        if (std::find(sources.begin(), sources.end(), y) == sources.end()) sources.push_back(y);
    }
    for (const auto& y : sources) {
        SourceFlux f{y, outflux(original, y), outflux(realized, y), false};
        f.equal = f.original == f.realized;
        out.push_back(std::move(f));
    }
    return out;
}

struct CompatibilityClass {
    std::vector<std::vector<std::size_t>> components;  // species of each strong component of Gbullet
    std::vector<double> masses;
    bool full_orthant = false;                         // Gbullet empty: no conserved masses

    bool positive() const {
        return std::all_of(masses.begin(), masses.end(), [](double m) { return m > 0.0; });
    }
};

struct EquilibriumResult {
    Eigen::RowVectorXd x_star;
    CompatibilityClass cls;
    bool positive = false;
    double residual = 0.0;
    bool certified = false;
    bool forced = false;  // computed without a certificate; uniqueness and positivity not guaranteed
};

struct EquilibriumOptions {
    bool force = false;
};

namespace detail {

inline Eigen::RowVectorXd solve_left(const Eigen::MatrixXd& negA, const Eigen::RowVectorXd& b, const char* what) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(negA.transpose());
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) throw NumericalError(std::string(what) + ": matrix is singular");
    return lu.solve(b.transpose()).transpose();
}

inline std::vector<std::size_t> species_of_block(const ReactionNetwork& net, const std::vector<std::size_t>& block) {
    std::vector<std::size_t> out;
    for (auto v : block) {
        const auto k = net.vertices()[v].single_species();
        if (k == Complex::npos) throw InternalError("strong component of Gbullet holds a non-monomolecular complex");
        out.push_back(k);
    }
    return out;
}

}  // namespace detail

/// b (-A0)^-1 on the species of G0; all others zero.
inline Eigen::RowVectorXd zero_block_equilibrium(const FluxSystem& sys) {
    const auto g0 = zero_component_split(sys.net).first;
    const auto idx = species_support(g0);
    Eigen::RowVectorXd x = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(sys.dim()));
    if (idx.empty()) return x;
    const auto m = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd negA0(m, m);
    Eigen::RowVectorXd b0(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        b0(i) = sys.b(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]));
        for (Eigen::Index j = 0; j < m; ++j)
            negA0(i, j) = -sys.A(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]),
                                 static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)]));
    }
    Eigen::RowVectorXd x0;
    try {
        x0 = detail::solve_left(negA0, b0, "G0 block");
    } catch (const NumericalError&) {
        throw InternalError("certified network has a singular G0 flux block");
    }
    for (Eigen::Index i = 0; i < m; ++i) x(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)])) = x0(i);
    return x;
}

/// Same G0 equilibrium through the Matrix-Tree theorem on the zero
/// component of the realization: x_l = c_{e_l} / c_0.
inline Eigen::RowVectorXd zero_block_equilibrium_by_trees(const ReactionNetwork& net) {
    Eigen::RowVectorXd x = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(net.dim()));
    const auto g0 = zero_component_split(net).first;
    if (g0.empty()) return x;
    const auto spade = spade_realization(g0);
    const auto zero = spade.vertex_index(Complex::zero(net.dim()));
    for (const auto& b : weakly_connected_components(spade).blocks) {
        if (std::find(b.begin(), b.end(), zero) == b.end()) continue;
        const auto t = tree_constants(spade, b);
        double c0 = 0.0;
        for (std::size_t i = 0; i < b.size(); ++i)
            if (b[i] == zero) c0 = t.c[i];
        for (std::size_t i = 0; i < b.size(); ++i) {
            if (b[i] == zero) continue;
            x(static_cast<Eigen::Index>(spade.vertices()[b[i]].single_species())) = t.c[i] / c0;
        }
    }
    return x;
}

/// The equilibrium in the compatibility class of x0. Requires the network to
/// pass first_order_endotactic unless opt.force is set; a forced run on an
/// uncertified network uses b(-A)^-1 and needs A nonsingular.
inline EquilibriumResult equilibrium(const FluxSystem& sys, const std::vector<double>& x0,
                                     const EquilibriumOptions& opt = {}) {
    const std::size_t d = sys.dim();
    if (x0.size() != d)
        throw PreconditionError("equilibrium: initial state has " + std::to_string(x0.size()) + " entries, expected " +
                                std::to_string(d));
    for (double v : x0)
        if (!(v >= 0.0)) throw PreconditionError("equilibrium: initial state must be nonnegative");

    EquilibriumResult res;
    res.certified = d == 0 || (d <= max_test_set_dim && first_order_endotactic(sys.net).endotactic());
    if (!res.certified && !opt.force)
        throw PreconditionError("equilibrium: network is not certified endotactic (use --force to override)");

    if (res.certified) {
        res.x_star = zero_block_equilibrium(sys);
        const auto split = zero_component_split(sys.net);
        const auto& gb = split.second;
        res.cls.full_orthant = gb.empty();
        for (const auto& block : strongly_connected_components(gb).blocks) {
            const auto species = detail::species_of_block(gb, block);
            const auto t = tree_constants(gb, block);
            double mass = 0.0;
            for (auto k : species) mass += x0[k];
            double total = 0.0;
            for (double c : t.c) total += c;
            for (std::size_t i = 0; i < species.size(); ++i)
                res.x_star(static_cast<Eigen::Index>(species[i])) = mass * t.c[i] / total;
            res.cls.components.push_back(species);
            res.cls.masses.push_back(mass);
        }
        const auto used = species_support(sys.net);
        for (std::size_t k = 0; k < d; ++k)
            if (!std::binary_search(used.begin(), used.end(), k)) res.x_star(static_cast<Eigen::Index>(k)) = x0[k];
    } else {
        res.forced = true;
        res.x_star = detail::solve_left(-sys.A, sys.b, "equilibrium (forced)");
    }

    res.residual = (res.x_star * sys.A + sys.b).cwiseAbs().sum();
    const double tol = 1e-10 * (1.0 + sys.b.cwiseAbs().sum());
    if (res.certified && res.residual > tol)
        throw NumericalError("equilibrium residual " + std::to_string(res.residual) + " exceeds tolerance");
    double scale = 0.0;
    for (Eigen::Index i = 0; i < res.x_star.size(); ++i) scale = std::max(scale, std::abs(res.x_star(i)));
    const double floor = 1e-12 * (1.0 + scale);
    res.positive = true;
    for (Eigen::Index i = 0; i < res.x_star.size(); ++i)
        if (!(res.x_star(i) > floor)) res.positive = false;
    return res;
}

}  // namespace crn
