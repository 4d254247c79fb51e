#pragma once

#include "crn/error.hpp"
#include "crn/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace crn {

using RationalMatrix = std::vector<RationalVector>;

struct RowEchelon {
    RationalMatrix rows;               // nonzero rows of the reduced echelon form
    std::vector<std::size_t> pivots;   // pivot column of each row
    std::size_t cols = 0;
};

/// Exact reduced row echelon form of `m` (rows of length `cols`).
inline RowEchelon rref(RationalMatrix m, std::size_t cols) {
    RowEchelon out;
    out.cols = cols;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
        std::size_t p = r;
        while (p < m.size() && m[p][c] == 0) ++p;
        if (p == m.size()) continue;
        std::swap(m[p], m[r]);
        const Rational lead = m[r][c];
        for (auto& x : m[r]) x /= lead;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (i == r || m[i][c] == 0) continue;
            const Rational f = m[i][c];
            for (std::size_t j = c; j < cols; ++j) {
                if (m[r][j] != 0) m[i][j] -= f * m[r][j];
            }
        }
        out.pivots.push_back(c);
        ++r;
    }
    m.resize(r);
    out.rows = std::move(m);
    return out;
}

inline std::size_t rank(const RationalMatrix& m, std::size_t cols) { return rref(m, cols).pivots.size(); }

/// Basis of {w : m w = 0}, one vector per free column, read off the RREF.
inline RationalMatrix nullspace(const RationalMatrix& m, std::size_t cols) {
    const RowEchelon e = rref(m, cols);
    std::vector<bool> is_pivot(cols, false);
    for (auto p : e.pivots) is_pivot[p] = true;
    RationalMatrix basis;
    for (std::size_t f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        RationalVector w(cols, Rational(0));
        w[f] = 1;
        for (std::size_t r = 0; r < e.rows.size(); ++r) w[e.pivots[r]] = -e.rows[r][f];
        basis.push_back(std::move(w));
    }
    return basis;
}

/// One linear inequality  coeffs · x >= rhs.
struct Inequality {
    RationalVector coeffs;
    Rational rhs;
};

namespace detail {

/// Scales so the first nonzero coefficient has magnitude one; makes
/// duplicate detection after elimination cheap.
inline void normalize(Inequality& q) {
    for (const auto& a : q.coeffs) {
        if (a == 0) continue;
        const Rational s = abs(a);
        for (auto& x : q.coeffs) x /= s;
        q.rhs /= s;
        return;
    }
}

inline bool same_row(const Inequality& a, const Inequality& b) { return a.coeffs == b.coeffs && a.rhs == b.rhs; }

inline void dedupe(std::vector<Inequality>& sys) {
    std::vector<Inequality> kept;
    kept.reserve(sys.size());
    for (auto& q : sys) {
        normalize(q);
        bool dup = false;
        for (const auto& k : kept) {
            if (same_row(k, q)) {
                dup = true;
                break;
            }
        }
        if (!dup) kept.push_back(std::move(q));
    }
    sys = std::move(kept);
}

}  // namespace detail

/// Decides feasibility of {x : coeffs·x >= rhs for every row} exactly by
/// Fourier–Motzkin elimination and returns a feasible point on success.
/// Throws NumericalError if the intermediate systems exceed `row_cap`.
inline std::optional<RationalVector> fourier_motzkin(std::vector<Inequality> system, std::size_t nvars,
                                                     std::size_t row_cap = 200000) {
    std::vector<std::vector<Inequality>> stages;
    detail::dedupe(system);
    stages.push_back(system);
    for (std::size_t v = 0; v < nvars; ++v) {
        const auto& cur = stages.back();
        std::vector<Inequality> pos, neg, next;
        for (const auto& q : cur) {
            if (q.coeffs[v] > 0) pos.push_back(q);
            else if (q.coeffs[v] < 0) neg.push_back(q);
            else next.push_back(q);
        }
        if (pos.size() * neg.size() + next.size() > row_cap)
            throw NumericalError("Fourier-Motzkin elimination exceeded its row budget");
        for (const auto& p : pos) {
            for (const auto& n : neg) {
                const Rational a = p.coeffs[v];
                const Rational b = -n.coeffs[v];
                Inequality q;
                q.coeffs.resize(nvars);
                for (std::size_t j = 0; j < nvars; ++j) q.coeffs[j] = b * p.coeffs[j] + a * n.coeffs[j];
                q.coeffs[v] = 0;
                q.rhs = b * p.rhs + a * n.rhs;
                next.push_back(std::move(q));
            }
        }
        detail::dedupe(next);
        stages.push_back(std::move(next));
    }
    for (const auto& q : stages.back()) {
        if (q.rhs > 0) return std::nullopt;
    }

    RationalVector x(nvars, Rational(0));
    for (std::size_t v = nvars; v-- > 0;) {
        std::optional<Rational> lo, hi;
        for (const auto& q : stages[v]) {
            const Rational a = q.coeffs[v];
            if (a == 0) continue;
            Rational rest = q.rhs;
            for (std::size_t j = v + 1; j < nvars; ++j) {
                if (q.coeffs[j] != 0) rest -= q.coeffs[j] * x[j];
            }
            const Rational bound = rest / a;
            if (a > 0) {
                if (!lo || bound > *lo) lo = bound;
            } else {
                if (!hi || bound < *hi) hi = bound;
            }
        }
        if (lo && hi && *lo > *hi) throw InternalError("Fourier-Motzkin back-substitution found an empty interval");
        if (lo) x[v] = *lo;
        else if (hi) x[v] = *hi;
        else x[v] = 0;
    }
    return x;
}

}  // namespace crn
