#pragma once

#include "crn/error.hpp"
#include "crn/rational.hpp"

#include <algorithm>
#include <compare>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace crn {

/// A vertex of a reaction graph: a point of species space with exact
/// rational coordinates (molecule counts per species).
struct Complex {
    RationalVector coords;

    Complex() = default;
    explicit Complex(RationalVector c) : coords(std::move(c)) {}

    static Complex zero(std::size_t d) { return Complex(RationalVector(d, Rational(0))); }
    static Complex species(std::size_t d, std::size_t i) {
        Complex c = zero(d);
        c.coords[i] = 1;
        return c;
    }

    std::size_t dim() const { return coords.size(); }
    bool is_zero() const { return crn::is_zero(coords); }
    Rational norm1() const { return l1_norm(coords); }

    bool is_nonnegative_integer() const {
        return std::all_of(coords.begin(), coords.end(),
                           [](const Rational& x) { return x >= 0 && is_integer(x); });
    }

    /// Index of the single species when the complex is e_i, else npos.
    std::size_t single_species() const {
        std::size_t found = npos;
        for (std::size_t i = 0; i < coords.size(); ++i) {
            if (coords[i] == 0) continue;
            if (coords[i] != 1 || found != npos) return npos;
            found = i;
        }
        return found;
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    friend bool operator==(const Complex&, const Complex&) = default;
    friend bool operator<(const Complex& a, const Complex& b) {
        return std::lexicographical_compare(a.coords.begin(), a.coords.end(), b.coords.begin(),
                                            b.coords.end());
    }
};

inline RationalVector operator-(const Complex& a, const Complex& b) { return a.coords - b.coords; }

/// A rate constant. The exact value is what the text said; `value` is
/// its deterministic double image used by the numerics.
struct Rate {
    Rational exact{1};
    double value{1.0};

    Rate() = default;
    explicit Rate(Rational q) : exact(std::move(q)), value(to_double(exact)) {}
    static Rate from_double(double x) { return Rate(rational_from_double(x)); }

    friend bool operator==(const Rate& a, const Rate& b) { return a.exact == b.exact; }
    friend Rate operator+(const Rate& a, const Rate& b) { return Rate(a.exact + b.exact); }
};

struct Reaction {
    Complex source;
    Complex target;
    Rate rate;

    RationalVector vector() const { return target - source; }

    friend bool operator==(const Reaction&, const Reaction&) = default;
};

/// Species list, complex set and weighted reaction set. Vertices are kept
/// sorted lexicographically and reactions sorted by (source, target), so two
/// networks with the same content compare equal and print identically.
class ReactionNetwork {
public:
    ReactionNetwork() = default;

    /// Validates and canonicalizes. Throws PreconditionError on a dimension
    /// mismatch, a self-loop, a non-positive rate or a duplicate edge.
    ReactionNetwork(std::vector<std::string> species, std::vector<Reaction> reactions)
        : species_(std::move(species)), reactions_(std::move(reactions)) {
        const std::size_t d = species_.size();
        for (const auto& r : reactions_) {
            if (r.source.dim() != d || r.target.dim() != d)
                throw PreconditionError("reaction complex dimension does not match species count");
            if (r.source == r.target) throw PreconditionError("reaction source equals its target");
            if (r.rate.exact <= 0) throw PreconditionError("rate constant must be positive");
        }
        std::sort(reactions_.begin(), reactions_.end(), [](const Reaction& a, const Reaction& b) {
            if (a.source == b.source) return a.target < b.target;
            return a.source < b.source;
        });
        for (std::size_t i = 1; i < reactions_.size(); ++i) {
            if (reactions_[i].source == reactions_[i - 1].source &&
                reactions_[i].target == reactions_[i - 1].target)
                throw PreconditionError("duplicate reaction");
        }
        for (const auto& r : reactions_) {
            vertices_.push_back(r.source);
            vertices_.push_back(r.target);
        }
        std::sort(vertices_.begin(), vertices_.end());
        vertices_.erase(std::unique(vertices_.begin(), vertices_.end()), vertices_.end());
        for (const auto& r : reactions_) {
            sources_.push_back(vertex_index(r.source));
            targets_.push_back(vertex_index(r.target));
        }
    }

    /// Empty network over `species`.
    explicit ReactionNetwork(std::vector<std::string> species) : species_(std::move(species)) {}

    std::size_t dim() const { return species_.size(); }
    bool empty() const { return reactions_.empty(); }

    const std::vector<std::string>& species() const { return species_; }
    const std::vector<Complex>& vertices() const { return vertices_; }
    const std::vector<Reaction>& reactions() const { return reactions_; }

    std::size_t source_index(std::size_t reaction) const { return sources_[reaction]; }
    std::size_t target_index(std::size_t reaction) const { return targets_[reaction]; }

    /// Position of `c` in vertices(), or Complex::npos.
    std::size_t vertex_index(const Complex& c) const {
        auto it = std::lower_bound(vertices_.begin(), vertices_.end(), c);
        if (it == vertices_.end() || !(*it == c)) return Complex::npos;
        return static_cast<std::size_t>(it - vertices_.begin());
    }
    bool contains(const Complex& c) const { return vertex_index(c) != Complex::npos; }

    /// Sorted indices of vertices with positive out-degree.
    std::vector<std::size_t> source_vertices() const {
        std::vector<std::size_t> out(sources_);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    /// Subnetwork on the chosen reactions, same species.
    ReactionNetwork with_reactions(const std::vector<std::size_t>& picked) const {
        std::vector<Reaction> rs;
        rs.reserve(picked.size());
        for (auto i : picked) rs.push_back(reactions_[i]);
        return ReactionNetwork(species_, std::move(rs));
    }

    /// Largest source l1-norm ("order"); 0 for the empty network.
    Rational order() const {
        Rational best = 0;
        for (auto v : source_vertices()) best = std::max(best, vertices_[v].norm1());
        return best;
    }

    /// Largest l1-norm over all complexes ("net order").
    Rational net_order() const {
        Rational best = 0;
        for (const auto& v : vertices_) best = std::max(best, v.norm1());
        return best;
    }

    bool is_first_order() const { return order() <= 1; }

    bool is_integral() const {
        return std::all_of(vertices_.begin(), vertices_.end(),
                           [](const Complex& c) { return c.is_nonnegative_integer(); });
    }

    friend bool operator==(const ReactionNetwork& a, const ReactionNetwork& b) {
        return a.species_ == b.species_ && a.reactions_ == b.reactions_;
    }

private:
    std::vector<std::string> species_;
    std::vector<Complex> vertices_;
    std::vector<Reaction> reactions_;
    std::vector<std::size_t> sources_;
    std::vector<std::size_t> targets_;
};

/// Throws PreconditionError unless every source has l1-norm <= 1 and every
/// complex lies in the nonnegative integer lattice.
inline void require_first_order(const ReactionNetwork& net, const char* what) {
    if (!net.is_first_order())
        throw PreconditionError(std::string(what) + ": network has a source of order > 1");
    if (!net.is_integral())
        throw PreconditionError(std::string(what) + ": complexes must be nonnegative integer vectors");
}

}  // namespace crn
