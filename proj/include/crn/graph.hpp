#pragma once

#include "crn/error.hpp"
#include "crn/linalg.hpp"
#include "crn/network.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

namespace crn {

/// Disjoint blocks of vertex indices. Each block is sorted and blocks are
/// ordered by their smallest vertex.
struct Partition {
    std::vector<std::vector<std::size_t>> blocks;

    std::size_t size() const { return blocks.size(); }
    bool empty() const { return blocks.empty(); }

    /// block_of[v] for every vertex v < nvertices.
    std::vector<std::size_t> labels(std::size_t nvertices) const {
        std::vector<std::size_t> out(nvertices, 0);
        for (std::size_t b = 0; b < blocks.size(); ++b)
            for (auto v : blocks[b]) out[v] = b;
        return out;
    }
};

namespace detail {

inline Partition canonical_partition(std::vector<std::vector<std::size_t>> blocks) {
    for (auto& b : blocks) std::sort(b.begin(), b.end());
    std::sort(blocks.begin(), blocks.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return Partition{std::move(blocks)};
}

inline std::vector<std::vector<std::size_t>> successors(const ReactionNetwork& net) {
    std::vector<std::vector<std::size_t>> adj(net.vertices().size());
    for (std::size_t e = 0; e < net.reactions().size(); ++e) adj[net.source_index(e)].push_back(net.target_index(e));
    return adj;
}

/// Vertices reachable from `start` along at least one edge.
inline std::vector<bool> reachable_from(const std::vector<std::vector<std::size_t>>& adj, std::size_t start) {
    std::vector<bool> seen(adj.size(), false);
    std::queue<std::size_t> q;
    for (auto w : adj[start]) {
        if (!seen[w]) {
            seen[w] = true;
            q.push(w);
        }
    }
    while (!q.empty()) {
        const auto v = q.front();
        q.pop();
        for (auto w : adj[v]) {
            if (!seen[w]) {
                seen[w] = true;
                q.push(w);
            }
        }
    }
    return seen;
}

}  // namespace detail

/// Tarjan's algorithm, iterative so deep chains do not blow the stack.
inline Partition strongly_connected_components(const ReactionNetwork& net) {
    const auto adj = detail::successors(net);
    const std::size_t n = adj.size();
    constexpr std::size_t unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, unset), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> blocks;
    std::size_t counter = 0;

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unset) continue;
        std::vector<std::pair<std::size_t, std::size_t>> call{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            auto& [v, next] = call.back();
            if (next < adj[v].size()) {
                const std::size_t w = adj[v][next++];
                if (index[w] == unset) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                std::vector<std::size_t> block;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    block.push_back(w);
                } while (w != v);
                blocks.push_back(std::move(block));
            }
            const std::size_t finished = v;
            call.pop_back();
            if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[finished]);
        }
    }
    return detail::canonical_partition(std::move(blocks));
}

inline Partition weakly_connected_components(const ReactionNetwork& net) {
    const std::size_t n = net.vertices().size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (std::size_t e = 0; e < net.reactions().size(); ++e) {
        const auto a = find(net.source_index(e));
        const auto b = find(net.target_index(e));
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t v = 0; v < n; ++v) groups[find(v)].push_back(v);
    std::vector<std::vector<std::size_t>> blocks;
    for (auto& [root, b] : groups) blocks.push_back(std::move(b));
    return detail::canonical_partition(std::move(blocks));
}

inline bool is_weakly_reversible(const ReactionNetwork& net) {
    return strongly_connected_components(net).size() == weakly_connected_components(net).size();
}

enum class SubspaceRole { stoichiometric, conservation };

struct SubspaceBasis {
    RationalMatrix vectors;
    SubspaceRole role = SubspaceRole::stoichiometric;

    std::size_t dim() const { return vectors.size(); }
};

inline RationalMatrix reaction_vectors(const ReactionNetwork& net) {
    RationalMatrix m;
    for (const auto& r : net.reactions()) m.push_back(r.vector());
    return m;
}

/// Row-reduced basis of span{y' - y}.
inline SubspaceBasis stoichiometric_subspace(const ReactionNetwork& net) {
    return {rref(reaction_vectors(net), net.dim()).rows, SubspaceRole::stoichiometric};
}

inline std::size_t stoichiometric_dim(const ReactionNetwork& net) { return rank(reaction_vectors(net), net.dim()); }

struct ConservationReport {
    SubspaceBasis basis;
    /// A vector of the orthogonal complement with every entry >= 1, if any.
    std::optional<RationalVector> positive;
};

inline ConservationReport conservation_laws(const ReactionNetwork& net) {
    ConservationReport rep;
    rep.basis = {nullspace(reaction_vectors(net), net.dim()), SubspaceRole::conservation};
    const auto& b = rep.basis.vectors;
    if (b.empty() || net.dim() == 0) return rep;
    std::vector<Inequality> sys;
    for (std::size_t i = 0; i < net.dim(); ++i) {
        Inequality q;
        for (const auto& v : b) q.coeffs.push_back(v[i]);
        q.rhs = 1;
        sys.push_back(std::move(q));
    }
    if (auto lambda = fourier_motzkin(std::move(sys), b.size())) {
        RationalVector w(net.dim(), Rational(0));
        for (std::size_t j = 0; j < b.size(); ++j)
            for (std::size_t i = 0; i < net.dim(); ++i) w[i] += (*lambda)[j] * b[j][i];
        rep.positive = std::move(w);
    }
    return rep;
}

/// Both deficiency numbers. `by_sccs` subtracts the count of strong components
/// with at least two vertices; `standard` subtracts the linkage classes.
struct DeficiencyReport {
    long by_sccs = 0;
    long standard = 0;
    std::size_t vertices = 0;
    std::size_t stoichiometric_dim = 0;
    std::size_t nontrivial_sccs = 0;
    std::size_t linkage_classes = 0;
};

inline DeficiencyReport deficiency_report(const ReactionNetwork& net) {
    DeficiencyReport r;
    r.vertices = net.vertices().size();
    r.stoichiometric_dim = stoichiometric_dim(net);
    for (const auto& b : strongly_connected_components(net).blocks)
        if (b.size() >= 2) ++r.nontrivial_sccs;
    r.linkage_classes = weakly_connected_components(net).size();
    const long base = static_cast<long>(r.vertices) - static_cast<long>(r.stoichiometric_dim);
    r.by_sccs = base - static_cast<long>(r.nontrivial_sccs);
    r.standard = base - static_cast<long>(r.linkage_classes);
    return r;
}

/// Deficiency counted with nontrivial strong components. It can be negative
/// when one linkage class holds several of them (S1<->S2->S3<->S4 gives -1);
/// callers surface that rather than clamp it.
inline long deficiency(const ReactionNetwork& net) { return deficiency_report(net).by_sccs; }

inline std::vector<std::size_t> edges_within(const ReactionNetwork& net, const std::vector<bool>& vertex_in) {
    std::vector<std::size_t> picked;
    for (std::size_t e = 0; e < net.reactions().size(); ++e)
        if (vertex_in[net.source_index(e)]) picked.push_back(e);
    return picked;
}

/// (G0, Gbullet): the weak component holding the zero complex and the rest.
inline std::pair<ReactionNetwork, ReactionNetwork> zero_component_split(const ReactionNetwork& net) {
    const auto zero = net.vertex_index(Complex::zero(net.dim()));
    std::vector<bool> in_zero(net.vertices().size(), false);
    if (zero != Complex::npos) {
        for (const auto& b : weakly_connected_components(net).blocks) {
            if (std::find(b.begin(), b.end(), zero) == b.end()) continue;
            for (auto v : b) in_zero[v] = true;
        }
    }
    std::vector<std::size_t> g0, rest;
    for (std::size_t e = 0; e < net.reactions().size(); ++e)
        (in_zero[net.source_index(e)] ? g0 : rest).push_back(e);
    return {net.with_reactions(g0), net.with_reactions(rest)};
}

/// Reactions whose endpoints sit in different strong components.
inline ReactionNetwork lir_subgraph(const ReactionNetwork& net) {
    const auto label = strongly_connected_components(net).labels(net.vertices().size());
    std::vector<std::size_t> picked;
    for (std::size_t e = 0; e < net.reactions().size(); ++e)
        if (label[net.source_index(e)] != label[net.target_index(e)]) picked.push_back(e);
    return net.with_reactions(picked);
}

/// Reactions whose source has the largest l1-norm among all sources.
inline ReactionNetwork highest_order_subgraph(const ReactionNetwork& net) {
    if (net.empty()) throw PreconditionError("highest_order_subgraph: network is empty");
    const Rational top = net.order();
    std::vector<std::size_t> picked;
    for (std::size_t e = 0; e < net.reactions().size(); ++e)
        if (net.reactions()[e].source.norm1() == top) picked.push_back(e);
    return net.with_reactions(picked);
}

inline bool is_homogeneous(const ReactionNetwork& net) {
    return net.empty() || highest_order_subgraph(net).reactions().size() == net.reactions().size();
}

/// Species with a nonzero coefficient in some complex.
inline std::vector<std::size_t> species_support(const ReactionNetwork& net) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < net.dim(); ++k) {
        for (const auto& v : net.vertices()) {
            if (v.coords[k] != 0) {
                out.push_back(k);
                break;
            }
        }
    }
    return out;
}

struct JKLSets {
    std::vector<std::size_t> J, K, L;  // 0-based species indices, ascending
};

/// J: species whose monomolecular complex has a path to 0. K: support of
/// everything reachable from 0. L: members of J \ K reachable from every
/// e_k with k in K.
inline JKLSets jkl_sets(const ReactionNetwork& net) {
    if (!net.is_first_order()) throw PreconditionError("jkl_sets: network has a source of order > 1");
    const std::size_t d = net.dim();
    const auto zero = net.vertex_index(Complex::zero(d));
    if (zero == Complex::npos) throw PreconditionError("jkl_sets: the zero complex is not a vertex");
    if (species_support(net).size() != d)
        throw PreconditionError("jkl_sets: some species occurs in no complex; prune it first");

    const auto adj = detail::successors(net);
    std::vector<std::size_t> unit(d, Complex::npos);
    for (std::size_t k = 0; k < d; ++k) unit[k] = net.vertex_index(Complex::species(d, k));

    JKLSets s;
    for (std::size_t j = 0; j < d; ++j) {
        if (unit[j] != Complex::npos && detail::reachable_from(adj, unit[j])[zero]) s.J.push_back(j);
    }
    const auto from_zero = detail::reachable_from(adj, zero);
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t v = 0; v < from_zero.size(); ++v) {
            if (from_zero[v] && net.vertices()[v].coords[k] != 0) {
                s.K.push_back(k);
                break;
            }
        }
    }
    std::vector<std::vector<bool>> reach_k;
    for (auto k : s.K) {
        reach_k.push_back(unit[k] == Complex::npos ? std::vector<bool>(adj.size(), false)
                                                   : detail::reachable_from(adj, unit[k]));
    }
    for (auto l : s.J) {
        if (std::binary_search(s.K.begin(), s.K.end(), l)) continue;
        bool all = true;
        for (const auto& r : reach_k) all = all && r[unit[l]];
        if (all) s.L.push_back(l);
    }
    return s;
}

struct JointResult {
    ReactionNetwork network;
    bool edges_disjoint = true;     // no reaction occurs in both inputs
    bool vertices_disjoint = true;  // no complex occurs in both inputs
};

/// Union of vertex and edge sets; rates of a shared edge are added.
inline JointResult joint(const ReactionNetwork& a, const ReactionNetwork& b) {
    if (a.dim() != b.dim()) throw PreconditionError("joint: networks have different species counts");
    if (a.species() != b.species()) throw PreconditionError("joint: networks have different species lists");
    JointResult out;
    std::vector<Reaction> rs = a.reactions();
    for (const auto& r : b.reactions()) {
        auto it = std::find_if(rs.begin(), rs.end(),
                               [&](const Reaction& x) { return x.source == r.source && x.target == r.target; });
        if (it == rs.end()) {
            rs.push_back(r);
        } else {
            it->rate = it->rate + r.rate;
            out.edges_disjoint = false;
        }
    }
    for (const auto& v : b.vertices())
        if (a.contains(v)) out.vertices_disjoint = false;
    out.network = ReactionNetwork(a.species(), std::move(rs));
    return out;
}

}  // namespace crn
