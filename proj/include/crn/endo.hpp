#pragma once

#include "crn/error.hpp"
#include "crn/graph.hpp"
#include "crn/linalg.hpp"
#include "crn/network.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cstddef>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace crn {

enum class EndoStatus { endotactic, violated, unknown };

inline const char* to_string(EndoStatus s) {
    switch (s) {
        case EndoStatus::endotactic: return "endotactic";
        case EndoStatus::violated: return "violated";
        case EndoStatus::unknown: return "unknown";
    }
    return "unknown";
}

/// A direction u and, for an ordinary violation, the reaction from a
/// u-maximal source that points along u. Failures of the strong condition
/// carry no reaction.
struct Witness {
    RationalVector direction;
    std::optional<Reaction> reaction;
};

/// What a certified first-order network must also satisfy.
struct FirstOrderStructure {
    bool g0_empty = true;
    bool gbullet_wrdz = false;
    bool supports_disjoint = false;
    bool g0_strongly_endotactic = false;
};

struct RouteOutcome {
    std::string route;
    EndoStatus status = EndoStatus::unknown;  // endotactic = route certifies
    std::string detail;
};

struct EndoVerdict {
    EndoStatus status = EndoStatus::unknown;
    std::optional<Witness> witness;
    std::string method;
    std::vector<Witness> all_witnesses;        // filled on request by the test-set scan
    std::optional<FirstOrderStructure> structure;
    std::vector<RouteOutcome> routes;          // sufficient-condition mode only

    bool endotactic() const { return status == EndoStatus::endotactic; }
    bool violated() const { return status == EndoStatus::violated; }
};

namespace detail {

inline void check_direction(const ReactionNetwork& net, const RationalVector& u) {
    if (u.size() != net.dim()) throw PreconditionError("direction length does not match species count");
    if (is_zero(u)) throw PreconditionError("direction must be nonzero");
}

/// max of y.u over sources of reactions not orthogonal to u (nullopt when
/// every reaction is orthogonal to u).
inline std::optional<Rational> effective_max(const ReactionNetwork& net, const RationalVector& u) {
    std::optional<Rational> best;
    for (const auto& r : net.reactions()) {
        if (dot(r.vector(), u) == 0) continue;
        const Rational h = dot(r.source.coords, u);
        if (!best || h > *best) best = h;
    }
    return best;
}

}  // namespace detail

/// Single-direction test. The empty network and directions orthogonal to
/// every reaction pass vacuously.
inline EndoVerdict u_endotactic(const ReactionNetwork& net, const RationalVector& u) {
    detail::check_direction(net, u);
    EndoVerdict v;
    v.method = "u-endotactic";
    v.status = EndoStatus::endotactic;
    const auto top = detail::effective_max(net, u);
    if (!top) return v;
    for (const auto& r : net.reactions()) {
        if (dot(r.source.coords, u) != *top) continue;
        if (dot(r.vector(), u) > 0) {
            v.status = EndoStatus::violated;
            v.witness = Witness{u, r};
            return v;
        }
    }
    return v;
}

/// u-endotactic plus: some u-maximal effective source is u-maximal among
/// all sources. With no effective source the condition cannot hold, so the
/// empty network and directions in the orthogonal complement fail.
inline EndoVerdict u_strongly_endotactic(const ReactionNetwork& net, const RationalVector& u) {
    EndoVerdict v = u_endotactic(net, u);
    v.method = "u-strongly-endotactic";
    if (v.violated()) return v;
    const auto top = detail::effective_max(net, u);
    bool ok = false;
    if (top) {
        ok = true;
        for (const auto& r : net.reactions())
            if (dot(r.source.coords, u) > *top) ok = false;
    }
    if (!ok) {
        v.status = EndoStatus::violated;
        v.witness = Witness{u, std::nullopt};
    }
    return v;
}

constexpr std::size_t max_test_set_dim = 16;

/// The signed indicator vectors: every nonempty subset by binary counter
/// (bit i selects species i) with the + copies before the - copies.
inline std::vector<RationalVector> test_set_A(std::size_t d) {
    if (d == 0) throw PreconditionError("test_set_A: dimension must be positive");
    if (d > max_test_set_dim)
        throw PreconditionError("test_set_A: dimension " + std::to_string(d) + " exceeds the cap of " +
                                std::to_string(max_test_set_dim) + "; check directions individually");
    const std::size_t count = (std::size_t{1} << d) - 1;
    std::vector<RationalVector> out;
    out.reserve(2 * count);
    for (int sign : {1, -1}) {
        for (std::size_t mask = 1; mask <= count; ++mask) {
            RationalVector u(d, Rational(0));
            for (std::size_t i = 0; i < d; ++i)
                if (mask >> i & 1U) u[i] = sign;
            out.push_back(std::move(u));
        }
    }
    return out;
}

inline bool in_orthogonal_complement(const ReactionNetwork& net, const RationalVector& u) {
    for (const auto& r : net.reactions())
        if (dot(r.vector(), u) != 0) return false;
    return true;
}

/// Strongly endotactic over the test-set directions that are not
/// orthogonal to every reaction.
inline EndoVerdict strongly_endotactic_on_test_set(const ReactionNetwork& net) {
    EndoVerdict v;
    v.method = "test-set-A-strong";
    v.status = EndoStatus::endotactic;
    if (net.empty()) {
        v.status = EndoStatus::violated;
        return v;
    }
    for (const auto& u : test_set_A(net.dim())) {
        if (in_orthogonal_complement(net, u)) continue;
        auto r = u_strongly_endotactic(net, u);
        if (r.violated()) {
            v.status = EndoStatus::violated;
            v.witness = r.witness;
            return v;
        }
    }
    return v;
}

struct ScanOptions {
    bool all_witnesses = false;
    unsigned jobs = 1;
};

namespace detail {

/// Index of the first violating direction (or npos) plus, if asked, every
/// violation in test-set order.
inline std::pair<std::size_t, std::vector<Witness>> scan_directions(const ReactionNetwork& net,
                                                                    const std::vector<RationalVector>& dirs,
                                                                    const ScanOptions& opt) {
    constexpr std::size_t none = static_cast<std::size_t>(-1);
    std::vector<std::optional<Witness>> found(dirs.size());
    std::atomic<std::size_t> first{none};
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        while (true) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= dirs.size()) return;
            if (!opt.all_witnesses && i > first.load()) continue;
            auto r = u_endotactic(net, dirs[i]);
            if (!r.violated()) continue;
            found[i] = r.witness;
            std::size_t cur = first.load();
            while (i < cur && !first.compare_exchange_weak(cur, i)) {
            }
        }
    };
    const unsigned jobs = std::max(1U, std::min<unsigned>(opt.jobs, static_cast<unsigned>(dirs.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    std::vector<Witness> all;
    if (opt.all_witnesses)
        for (auto& w : found)
            if (w) all.push_back(*w);
    return {first.load(), std::move(all)};
}

}  // namespace detail

/// Complete decision for first-order networks with integer complexes: scans
/// the test set and stops at the first violation. On a pass it checks that
/// Gbullet is weakly reversible with deficiency zero, that G0 and Gbullet use
/// disjoint species and that G0 (if any) is strongly endotactic; a failure of
/// those consequences throws InternalError.
inline EndoVerdict first_order_endotactic(const ReactionNetwork& net, const ScanOptions& opt = {}) {
    require_first_order(net, "first_order_endotactic");
    EndoVerdict v;
    v.method = "test-set-A";
    v.status = EndoStatus::endotactic;
    if (net.empty()) return v;

    const auto dirs = test_set_A(net.dim());
    auto [first, all] = detail::scan_directions(net, dirs, opt);
    v.all_witnesses = std::move(all);
    if (first != static_cast<std::size_t>(-1)) {
        v.status = EndoStatus::violated;
        v.witness = u_endotactic(net, dirs[first]).witness;
        return v;
    }

    const auto [g0, gb] = zero_component_split(net);
    FirstOrderStructure s;
    s.g0_empty = g0.empty();
    s.gbullet_wrdz = is_weakly_reversible(gb) && deficiency(gb) == 0;
    const auto sup0 = species_support(g0);
    const auto supb = species_support(gb);
    std::vector<std::size_t> common;
    std::set_intersection(sup0.begin(), sup0.end(), supb.begin(), supb.end(), std::back_inserter(common));
    s.supports_disjoint = common.empty();
    s.g0_strongly_endotactic = g0.empty() || strongly_endotactic_on_test_set(g0).endotactic();
    v.structure = s;
    if (!s.gbullet_wrdz || !s.supports_disjoint || !s.g0_strongly_endotactic)
        throw InternalError("test-set scan passed but the structural consequences failed");
    return v;
}

/// Whole-network strong endotacticity for first-order networks. The
/// test-set directions do not suffice here (the introductory network fails
/// only at u=(0,1,2,2,2)), so the decision is structural: an endotactic
/// first-order network is strongly endotactic iff Gbullet is empty, or G0 is
/// empty and Gbullet is a single linkage class. Otherwise the direction
/// lifting one Gbullet linkage class above a reaction elsewhere is a witness.
inline EndoVerdict first_order_strongly_endotactic(const ReactionNetwork& net, const ScanOptions& opt = {}) {
    EndoVerdict v = first_order_endotactic(net, opt);
    v.method = "first-order-strong";
    if (!v.endotactic()) return v;
    if (net.empty()) {
        v.status = EndoStatus::violated;
        return v;
    }
    const auto [g0, gb] = zero_component_split(net);
    const auto classes = weakly_connected_components(gb);
    if (gb.empty() || (g0.empty() && classes.size() == 1)) {
        if (!strongly_endotactic_on_test_set(net).endotactic())
            throw InternalError("first_order_strongly_endotactic: structure and test-set check disagree");
        return v;
    }

    std::vector<bool> top(net.dim(), false);
    for (auto vi : classes.blocks.front()) top[gb.vertices()[vi].single_species()] = true;
    std::optional<Reaction> other;
    for (const auto& r : net.reactions()) {
        const auto k = r.source.is_zero() ? r.target.single_species() : r.source.single_species();
        if (k == Complex::npos || !top[k]) {
            other = r;
            break;
        }
    }
    if (!other) throw InternalError("first_order_strongly_endotactic: no reaction outside the lifted class");
    RationalVector u = other->vector();
    Rational lift = 1;
    for (const auto& x : u) lift = std::max(lift, Rational(1 + abs(x)));
    for (std::size_t i = 0; i < u.size(); ++i)
        if (top[i]) u[i] = lift;
    auto replay = u_strongly_endotactic(net, u);
    if (!replay.violated()) throw InternalError("first_order_strongly_endotactic: witness did not replay");
    v.status = EndoStatus::violated;
    v.witness = replay.witness;
    return v;
}

/// Decision for networks whose reaction vectors are all parallel. Checks
/// +-v first, then for each source with a reaction along +-v decides exactly
/// whether some u with u.v of that sign makes the source u-maximal among all
/// sources (Fourier-Motzkin). A source on a different line than the extreme
/// ones can be u-maximal for a tilted u, so +-v alone is not enough.
inline EndoVerdict one_dim_endotactic(const ReactionNetwork& net, bool strong = false) {
    if (net.empty()) throw PreconditionError("one_dim_endotactic: network is empty");
    const auto basis = stoichiometric_subspace(net);
    if (basis.dim() != 1)
        throw PreconditionError("one_dim_endotactic: stoichiometric subspace has dimension " +
                                std::to_string(basis.dim()) + ", expected 1");
    const RationalVector& vdir = basis.vectors.front();
    RationalVector neg(vdir.size());
    for (std::size_t i = 0; i < vdir.size(); ++i) neg[i] = -vdir[i];

    EndoVerdict v;
    v.method = strong ? "one-dimensional-strong" : "one-dimensional";
    v.status = EndoStatus::endotactic;
    for (const RationalVector* u : std::array<const RationalVector*, 2>{&vdir, &neg}) {
        auto r = strong ? u_strongly_endotactic(net, *u) : u_endotactic(net, *u);
        if (r.violated()) {
            v.status = EndoStatus::violated;
            v.witness = r.witness;
            return v;
        }
    }

    std::vector<Complex> sources;
    for (auto s : net.source_vertices()) sources.push_back(net.vertices()[s]);
    for (const auto& r : net.reactions()) {
        const Rational along = dot(r.vector(), vdir);
        std::vector<Inequality> sys;
        for (const auto& z : sources) {
            if (z == r.source) continue;
            sys.push_back({r.source - z, Rational(0)});
        }
        RationalVector lead = vdir;
        if (along < 0)
            for (auto& x : lead) x = -x;
        sys.push_back({lead, Rational(1)});
        auto u = fourier_motzkin(std::move(sys), net.dim());
        if (!u) continue;
        auto replay = u_endotactic(net, *u);
        if (!replay.violated()) throw InternalError("one_dim_endotactic: tilted direction did not replay");
        v.status = EndoStatus::violated;
        v.witness = replay.witness;
        return v;
    }
    return v;
}

/// One-sided check from the sufficient conditions; answers endotactic or
/// unknown, never violated. Every route is evaluated and reported.
inline EndoVerdict sufficient_endotactic(const ReactionNetwork& net) {
    EndoVerdict v;
    v.status = EndoStatus::unknown;
    v.method = "sufficient:none";

    RouteOutcome a{"weakly-reversible", EndoStatus::unknown, ""};
    if (is_weakly_reversible(net)) {
        a.status = EndoStatus::endotactic;
    } else {
        a.detail = "not weakly reversible";
    }

    const ReactionNetwork lir = lir_subgraph(net);
    RouteOutcome b{"parallel-continuation", EndoStatus::endotactic, ""};
    for (const auto& r : lir.reactions()) {
        const RationalVector step = r.vector();
        bool continued = false;
        for (const auto& s : net.reactions()) {
            if (!(s.source == r.target)) continue;
            const RationalVector next = s.vector();
            // parallel iff rank of {step, next} is one
            if (rank({step, next}, net.dim()) == 1) {
                continued = true;
                break;
            }
        }
        if (!continued) {
            b.status = EndoStatus::unknown;
            b.detail = "a lir reaction has no parallel continuation";
            break;
        }
    }

    RouteOutcome c{"lir-subgraph", EndoStatus::unknown, ""};
    if (lir.empty()) {
        c.detail = "lir subgraph is empty";
    } else if (stoichiometric_dim(lir) == 1) {
        auto r = one_dim_endotactic(lir);
        c.status = r.endotactic() ? EndoStatus::endotactic : EndoStatus::unknown;
        c.detail = r.endotactic() ? "one-dimensional lir subgraph is endotactic"
                                  : "one-dimensional lir subgraph is not endotactic";
    } else if (lir.is_first_order() && lir.is_integral()) {
        auto r = first_order_endotactic(lir);
        c.status = r.endotactic() ? EndoStatus::endotactic : EndoStatus::unknown;
        c.detail = r.endotactic() ? "first-order lir subgraph is endotactic"
                                  : "first-order lir subgraph is not endotactic";
    } else {
        c.detail = "lir subgraph is neither one-dimensional nor first-order";
    }

    v.routes = {a, b, c};
    for (const auto& r : v.routes) {
        if (r.status == EndoStatus::endotactic) {
            v.status = EndoStatus::endotactic;
            v.method = "sufficient:" + r.route;
            break;
        }
    }
    return v;
}

}  // namespace crn
