#pragma once

#include "crn/error.hpp"
#include "crn/graph.hpp"
#include "crn/kinetics.hpp"
#include "crn/network.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace crn {

/// Precomputed mass-action vector field sum_{y->y'} k x^y (y' - y).
class MassActionModel {
public:
    explicit MassActionModel(const ReactionNetwork& net) : d_(net.dim()) {
        for (const auto& r : net.reactions()) {
            for (const auto& q : r.source.coords)
                if (q < 0) throw PreconditionError("mass action needs nonnegative source coefficients");
            Term t;
            t.rate = r.rate.value;
            for (std::size_t i = 0; i < d_; ++i) {
                if (r.source.coords[i] != 0) t.powers.push_back({i, to_double(r.source.coords[i])});
                const Rational delta = r.target.coords[i] - r.source.coords[i];
                if (delta != 0) t.change.push_back({i, to_double(delta)});
            }
            terms_.push_back(std::move(t));
        }
    }

    std::size_t dim() const { return d_; }

    /// No sign check; the integrator feeds clamped states.
    Eigen::RowVectorXd operator()(const Eigen::RowVectorXd& x) const {
        Eigen::RowVectorXd out = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(d_));
        for (const auto& t : terms_) {
            double flux = t.rate;
            for (const auto& [i, p] : t.powers) {
                const double xi = x(static_cast<Eigen::Index>(i));
                flux *= p == 1.0 ? xi : std::pow(xi, p);
            }
            if (flux == 0.0) continue;
            for (const auto& [i, c] : t.change) out(static_cast<Eigen::Index>(i)) += flux * c;
        }
        return out;
    }

private:
    struct Term {
        double rate = 0.0;
        std::vector<std::pair<std::size_t, double>> powers;
        std::vector<std::pair<std::size_t, double>> change;
    };
    std::size_t d_;
    std::vector<Term> terms_;
};

inline Eigen::RowVectorXd mass_action_rhs(const ReactionNetwork& net, const Eigen::RowVectorXd& x) {
    if (static_cast<std::size_t>(x.size()) != net.dim())
        throw PreconditionError("mass_action_rhs: state length does not match species count");
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (!(x(i) >= 0.0)) throw PreconditionError("mass_action_rhs: concentrations must be nonnegative");
    return MassActionModel(net)(x);
}

/// exp(M) by the degree-6 diagonal Pade approximant after scaling M by 2^-s
/// so that its infinity norm is at most 1/2, then squaring s times.
inline Eigen::MatrixXd expm(const Eigen::MatrixXd& M) {
    const Eigen::Index n = M.rows();
    if (n == 0) return M;
    const double norm = M.cwiseAbs().rowwise().sum().maxCoeff();
    int s = 0;
    if (norm > 0.5) s = std::max(0, static_cast<int>(std::ceil(std::log2(norm / 0.5))));
    const Eigen::MatrixXd X = M / std::ldexp(1.0, s);
    static constexpr double c[7] = {1.0,
                                    1.0 / 2.0,
                                    5.0 / 44.0,
                                    1.0 / 66.0,
                                    1.0 / 792.0,
                                    1.0 / 15840.0,
                                    1.0 / 665280.0};
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd power = I;
    Eigen::MatrixXd N = c[0] * I;
    Eigen::MatrixXd D = c[0] * I;
    for (int k = 1; k <= 6; ++k) {
        power = power * X;
        N += c[k] * power;
        D += (k % 2 ? -c[k] : c[k]) * power;
    }
    Eigen::MatrixXd R = D.partialPivLu().solve(N);
    for (int k = 0; k < s; ++k) R = R * R;
    return R;
}

struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::RowVectorXd> states;
    std::string integrator;
    double dt = 0.0;
    std::size_t clamped = 0;  // negative round-off entries reset to zero
};

struct SimulateOptions {
    bool closed_form = false;
};

namespace detail {

inline std::vector<double> time_grid(double t_end, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionError("simulate: dt must be positive");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw PreconditionError("simulate: t_end must be positive");
    const double ratio = t_end / dt;
    auto steps = static_cast<std::size_t>(std::llround(ratio));
    if (std::abs(static_cast<double>(steps) - ratio) > 1e-9 * std::max(1.0, ratio))
        steps = static_cast<std::size_t>(std::ceil(ratio));
    std::vector<double> t(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) t[i] = std::min(static_cast<double>(i) * dt, t_end);
    t.back() = t_end;
    return t;
}

inline std::size_t clamp_negative(Eigen::RowVectorXd& x) {
    std::size_t n = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x(i) < 0.0) {
            x(i) = 0.0;
            ++n;
        }
    }
    return n;
}

inline bool finite(const Eigen::RowVectorXd& x) { return x.allFinite(); }

}  // namespace detail

/// Fixed-step classic Runge-Kutta on the mass-action field, every step
/// recorded. With opt.closed_form (first-order networks only) the states
/// come from the matrix exponential instead: x* + (x0 - x*) exp(At) when an
/// equilibrium x* is available, otherwise [x 1] exp([[A 0],[b 0]] t).
inline Trajectory simulate(const ReactionNetwork& net, const std::vector<double>& x0, double t_end, double dt,
                           const SimulateOptions& opt = {}) {
    const std::size_t d = net.dim();
    if (x0.size() != d)
        throw PreconditionError("simulate: initial state has " + std::to_string(x0.size()) + " entries, expected " +
                                std::to_string(d));
    for (double v : x0)
        if (!(v >= 0.0)) throw PreconditionError("simulate: initial state must be nonnegative");
    Trajectory tr;
    tr.times = detail::time_grid(t_end, dt);
    tr.dt = dt;
    Eigen::RowVectorXd x(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) x(static_cast<Eigen::Index>(i)) = x0[i];

    if (opt.closed_form) {
        const FluxSystem sys = flux_system(net);
        std::optional<Eigen::RowVectorXd> xs;
        const bool certified = d > 0 && d <= max_test_set_dim && first_order_endotactic(net).endotactic();
        if (certified) {
            xs = equilibrium(sys, x0).x_star;
        } else {
            Eigen::FullPivLU<Eigen::MatrixXd> lu((-sys.A).transpose());
            lu.setThreshold(1e-12);
            if (lu.isInvertible()) xs = lu.solve(sys.b.transpose()).transpose();
        }
        tr.integrator = xs ? "closed-form" : "closed-form-augmented";
        const auto D = static_cast<Eigen::Index>(d);
        Eigen::MatrixXd aug;
        Eigen::RowVectorXd start;
        if (!xs) {
            aug = Eigen::MatrixXd::Zero(D + 1, D + 1);
            aug.topLeftCorner(D, D) = sys.A;
            aug.block(D, 0, 1, D) = sys.b;
            start.resize(D + 1);
            start.head(D) = x;
            start(D) = 1.0;
        }
        for (double t : tr.times) {
            Eigen::RowVectorXd y;
            if (xs) {
                y = *xs + (x - *xs) * expm(sys.A * t);
            } else {
                y = (start * expm(aug * t)).head(D);
            }
            if (!detail::finite(y))
                throw NumericalError("simulate: non-finite state at t=" + std::to_string(t));
            tr.clamped += detail::clamp_negative(y);
            tr.states.push_back(std::move(y));
        }
        return tr;
    }

    tr.integrator = "rk4";
    const MassActionModel f(net);
    tr.states.reserve(tr.times.size());
    tr.states.push_back(x);
    for (std::size_t i = 1; i < tr.times.size(); ++i) {
        const double h = tr.times[i] - tr.times[i - 1];
        const Eigen::RowVectorXd k1 = f(x);
        Eigen::RowVectorXd probe = x + 0.5 * h * k1;
        detail::clamp_negative(probe);
        const Eigen::RowVectorXd k2 = f(probe);
        probe = x + 0.5 * h * k2;
        detail::clamp_negative(probe);
        const Eigen::RowVectorXd k3 = f(probe);
        probe = x + h * k3;
        detail::clamp_negative(probe);
        const Eigen::RowVectorXd k4 = f(probe);
        Eigen::RowVectorXd next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!detail::finite(next))
            throw NumericalError("simulate: state blew up after t=" + std::to_string(tr.times[i - 1]));
        tr.clamped += detail::clamp_negative(next);
        x = next;
        tr.states.push_back(x);
    }
    return tr;
}

/// CSV with header "t,<species>" and 17 significant digits.
inline void write_csv(std::ostream& out, const Trajectory& tr, const std::vector<std::string>& species) {
    out << "t";
    for (const auto& s : species) out << "," << s;
    out << "\n";
    char buf[40];
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", tr.times[i]);
        out << buf;
        for (Eigen::Index j = 0; j < tr.states[i].size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", tr.states[i](j));
            out << "," << buf;
        }
        out << "\n";
    }
}

struct BoundReport {
    double rho_used = 0.0;
    int poly_degree = 0;
    std::vector<double> fitted_coeffs;  // g(t) = sum_k coeffs[k] t^k
    double max_ratio = 0.0;             // inflation applied to the least-squares fit
    double slope = 0.0;                 // log-log slope of e(t) e^{rho t} over t >= 1
    int max_degree = 0;                 // n - 2, floored at zero
    bool trivial = false;               // trajectory sits at x* within the noise floor
    bool pass = false;
};

namespace detail {

/// Nonnegative least squares by trying every support set; the number of
/// coefficients is tiny (degree + 1).
inline std::vector<double> nnls(const Eigen::MatrixXd& V, const Eigen::VectorXd& y) {
    const auto m = V.cols();
    std::vector<double> best(static_cast<std::size_t>(m), 0.0);
    double best_err = y.squaredNorm();
    for (unsigned mask = 1; mask < (1U << m); ++mask) {
        std::vector<Eigen::Index> cols;
        for (Eigen::Index j = 0; j < m; ++j)
            if (mask >> j & 1U) cols.push_back(j);
        Eigen::MatrixXd sub(V.rows(), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t j = 0; j < cols.size(); ++j) sub.col(static_cast<Eigen::Index>(j)) = V.col(cols[j]);
        const Eigen::VectorXd c = sub.colPivHouseholderQr().solve(y);
        if ((c.array() < 0.0).any()) continue;
        const double err = (sub * c - y).squaredNorm();
        if (err < best_err) {
            best_err = err;
            std::fill(best.begin(), best.end(), 0.0);
            for (std::size_t j = 0; j < cols.size(); ++j) best[static_cast<std::size_t>(cols[j])] = c(static_cast<Eigen::Index>(j));
        }
    }
    return best;
}

inline double polyval(const std::vector<double>& c, double t) {
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) v = v * t + c[k];
    return v;
}

/// Least-squares slope of log y against log t.
inline double loglog_slope(const std::vector<double>& t, const std::vector<double>& y) {
    const auto n = static_cast<double>(t.size());
    if (t.size() < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double lx = std::log(t[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = n * sxx - sx * sx;
    return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

}  // namespace detail

/// Log-log slope of e(t) e^{rho t} on the samples with t >= t_min whose
/// error is above `floor`.
inline double growth_slope(const Trajectory& traj, const Eigen::RowVectorXd& x_star, double rho, double t_min,
                           double t_max, double floor = 0.0) {
    std::vector<double> ts, rs;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        if (t < t_min || t > t_max) continue;
        const double e = (traj.states[i] - x_star).cwiseAbs().sum();
        if (!(e > floor)) continue;
        ts.push_back(t);
        rs.push_back(e * std::exp(rho * t));
    }
    return detail::loglog_slope(ts, rs);
}

/// Empirical check of ||x(t) - x*||_1 <= g(t) e^{-rho t} with g a
/// nonnegative polynomial of degree at most n - 2. The running maximum of
/// r_i = e_i e^{rho t_i} is fitted by nonnegative least squares for degrees
/// 0, 1, ..., the fit is inflated to cover every sample, and the smallest
/// degree k whose growth test passes (log-log slope of r over t >= 1 at most
/// k + 0.1) is reported. `conservation` (rows w) pins x* to the class of
/// the trajectory.
inline BoundReport verify_bound(const Trajectory& traj, const Eigen::RowVectorXd& x_star, const SpectralReport& report,
                                const RationalMatrix& conservation = {}) {
    if (!report.rho) throw PreconditionError("verify_bound: spectral report has no rate rho");
    if (traj.states.empty()) throw PreconditionError("verify_bound: empty trajectory");
    const auto& x0 = traj.states.front();
    if (x0.size() != x_star.size()) throw PreconditionError("verify_bound: x* has the wrong length");
    for (const auto& w : conservation) {
        double a = 0.0, b = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double wi = to_double(w[i]);
            a += wi * x0(static_cast<Eigen::Index>(i));
            b += wi * x_star(static_cast<Eigen::Index>(i));
        }
        if (std::abs(a - b) > 1e-8 * (1.0 + std::abs(a)))
            throw PreconditionError("verify_bound: x* lies outside the trajectory's compatibility class");
    }

    BoundReport rep;
    rep.rho_used = *report.rho;
    rep.max_degree = std::max(0, static_cast<int>(report.n) - 2);
    const double floor = 1e-10 * (1.0 + x_star.cwiseAbs().sum());

    std::vector<double> e(traj.times.size());
    bool all_small = true;
    for (std::size_t i = 0; i < e.size(); ++i) {
        e[i] = (traj.states[i] - x_star).cwiseAbs().sum();
        if (e[i] >= floor) all_small = false;
    }
    if (all_small) {
        rep.trivial = true;
        rep.pass = true;
        rep.fitted_coeffs = {0.0};
        return rep;
    }

    // Samples lost in integration noise would fake growth once multiplied by e^{rho t}.
    const double usable = 100.0 * floor;
    std::vector<double> ts, running;
    double peak = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] <= usable && traj.times[i] > 0.0) continue;
        peak = std::max(peak, e[i] * std::exp(rep.rho_used * traj.times[i]));
        ts.push_back(traj.times[i]);
        running.push_back(peak);
    }
    const double t_max = ts.back() > 0.0 ? ts.back() : 1.0;
    const double slope_from = t_max > 2.0 ? 1.0 : 0.0;
    rep.slope = growth_slope(traj, x_star, rep.rho_used, slope_from > 0 ? slope_from : 1e-300, t_max, usable);

    Eigen::VectorXd y(static_cast<Eigen::Index>(ts.size()));
    for (std::size_t i = 0; i < ts.size(); ++i) y(static_cast<Eigen::Index>(i)) = running[i];
    for (int k = 0; k <= rep.max_degree; ++k) {
        // Fit in the scaled variable t / t_max for conditioning.
        Eigen::MatrixXd V(static_cast<Eigen::Index>(ts.size()), k + 1);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            double p = 1.0;
            for (int j = 0; j <= k; ++j) {
                V(static_cast<Eigen::Index>(i), j) = p;
                p *= ts[i] / t_max;
            }
        }
        std::vector<double> c = detail::nnls(V, y);
        double ratio = 0.0;
        bool covered = true;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double g = detail::polyval(c, ts[i] / t_max);
            if (g <= 0.0) {
                if (running[i] > 0.0) covered = false;
                continue;
            }
            ratio = std::max(ratio, running[i] / g);
        }
        if (!covered) continue;
        double scale = 1.0;
        for (auto& ck : c) {
            ck *= ratio / scale;
            scale *= t_max;
        }
        rep.poly_degree = k;
        rep.fitted_coeffs = c;
        rep.max_ratio = ratio;
        if (rep.slope <= k + 0.1) {
            rep.pass = true;
            return rep;
        }
    }
    return rep;
}

}  // namespace crn
