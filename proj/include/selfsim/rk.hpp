#pragma once

// Adaptive Dormand-Prince 5(4) integrator for scalar second-order ODEs
//   y'' = F(s, y, y'),
// specialised for the shooting problems in this library: dense output good
// enough to locate sign changes to machine precision, and a per-step residual
// gate that keeps the dense interpolant consistent with the ODE itself.
//
// Dense output is the two-point quintic Hermite built from (y, y', y'') at
// the step ends; y'' is exact there (it is F evaluated at the nodes), so the
// interpolant is C2 at step joints and its residual in the ODE vanishes at
// the nodes by construction.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "selfsim/errors.hpp"

namespace selfsim {

/// Right-hand side of y'' = F(s, y, y').
using Rhs2 = std::function<double(double s, double y, double yp)>;

/// Optional magnitude of the individual ODE terms at (s, y, yp); used to
/// scale the dense-output residual test. When absent the integrator falls
/// back to |F| + |y''| of the interpolant.
using TermScale = std::function<double(double s, double y, double yp)>;

struct OdeOptions {
    double rtol = 1e-12;
    double atol = 1e-14;
    double max_step = 0.05;
    double initial_step = 0.0;       ///< 0 = pick from the start point
    double event_tol = 1e-13;        ///< |y| target at located zeros
    double derivative_floor = 1e-9;  ///< tangency guard at zeros
    double overflow_guard = 1e12;    ///< |y| beyond this stops the piece
    double residual_factor = 10.0;   ///< dense residual <= factor * tol
    bool residual_gate = true;
    long max_steps = 2000000;
};

/// One accepted step with the Hermite data needed for dense evaluation.
struct StepRecord {
    double s0, s1;
    double y0, yp0, ypp0;
    double y1, yp1, ypp1;

    struct Eval {
        double y, yp, ypp;
    };

    Eval at(double s) const {
        const double h = s1 - s0;
        const double t = (s - s0) / h;
        const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
        // Quintic Hermite basis on [0,1].
        const double H0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
        const double H1 = t - 6 * t3 + 8 * t4 - 3 * t5;
        const double H2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
        const double H3 = 10 * t3 - 15 * t4 + 6 * t5;
        const double H4 = -4 * t3 + 7 * t4 - 3 * t5;
        const double H5 = 0.5 * t3 - t4 + 0.5 * t5;
        const double d0 = -30 * t2 + 60 * t3 - 30 * t4;
        const double d1 = 1 - 18 * t2 + 32 * t3 - 15 * t4;
        const double d2 = t - 4.5 * t2 + 6 * t3 - 2.5 * t4;
        const double d3 = 30 * t2 - 60 * t3 + 30 * t4;
        const double d4 = -12 * t2 + 28 * t3 - 15 * t4;
        const double d5 = 1.5 * t2 - 4 * t3 + 2.5 * t4;
        const double c0 = -60 * t + 180 * t2 - 120 * t3;
        const double c1 = -36 * t + 96 * t2 - 60 * t3;
        const double c2 = 1 - 9 * t + 18 * t2 - 10 * t3;
        const double c3 = 60 * t - 180 * t2 + 120 * t3;
        const double c4 = -24 * t + 84 * t2 - 60 * t3;
        const double c5 = 3 * t - 12 * t2 + 10 * t3;
        Eval e;
        e.y = H0 * y0 + H3 * y1 + h * (H1 * yp0 + H4 * yp1) +
              h * h * (H2 * ypp0 + H5 * ypp1);
        e.yp = (d0 * y0 + d3 * y1) / h + (d1 * yp0 + d4 * yp1) +
               h * (d2 * ypp0 + d5 * ypp1);
        e.ypp = (c0 * y0 + c3 * y1) / (h * h) + (c1 * yp0 + c4 * yp1) / h +
                (c2 * ypp0 + c5 * ypp1);
        return e;
    }

    /// Extended-precision evaluation for the residual gate. Forming the
    /// interpolant's second derivative in double costs ~eps*|y|/h^2 to
    /// cancellation, which near a steep sign change dwarfs the residual being
    /// measured; 80-bit arithmetic pushes that floor three orders of
    /// magnitude below the gate's tolerance.
    Eval at_precise(double s) const {
        const long double h = (long double)s1 - s0;
        const long double t = ((long double)s - s0) / h;
        const long double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
        const long double H0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
        const long double H1 = t - 6 * t3 + 8 * t4 - 3 * t5;
        const long double H2 = 0.5L * t2 - 1.5L * t3 + 1.5L * t4 - 0.5L * t5;
        const long double H3 = 10 * t3 - 15 * t4 + 6 * t5;
        const long double H4 = -4 * t3 + 7 * t4 - 3 * t5;
        const long double H5 = 0.5L * t3 - t4 + 0.5L * t5;
        const long double d0 = -30 * t2 + 60 * t3 - 30 * t4;
        const long double d1 = 1 - 18 * t2 + 32 * t3 - 15 * t4;
        const long double d2 = t - 4.5L * t2 + 6 * t3 - 2.5L * t4;
        const long double d3 = 30 * t2 - 60 * t3 + 30 * t4;
        const long double d4 = -12 * t2 + 28 * t3 - 15 * t4;
        const long double d5 = 1.5L * t2 - 4 * t3 + 2.5L * t4;
        const long double c0 = -60 * t + 180 * t2 - 120 * t3;
        const long double c1 = -36 * t + 96 * t2 - 60 * t3;
        const long double c2 = 1 - 9 * t + 18 * t2 - 10 * t3;
        const long double c3 = 60 * t - 180 * t2 + 120 * t3;
        const long double c4 = -24 * t + 84 * t2 - 60 * t3;
        const long double c5 = 3 * t - 12 * t2 + 10 * t3;
        Eval e;
        e.y = (double)(H0 * y0 + H3 * y1 + h * (H1 * yp0 + H4 * yp1) +
                       h * h * (H2 * ypp0 + H5 * ypp1));
        e.yp = (double)((d0 * y0 + d3 * y1) / h + (d1 * yp0 + d4 * yp1) +
                        h * (d2 * ypp0 + d5 * ypp1));
        e.ypp = (double)((c0 * y0 + c3 * y1) / (h * h) +
                         (c1 * yp0 + c4 * yp1) / h +
                         (c2 * ypp0 + c5 * ypp1));
        return e;
    }
};

/// Dense solution over one branch piece: contiguous accepted steps.
class DensePiece {
  public:
    void push(const StepRecord& r) { steps_.push_back(r); }
    bool empty() const { return steps_.empty(); }
    double s_begin() const { return steps_.front().s0; }
    double s_end() const { return steps_.back().s1; }
    const std::vector<StepRecord>& steps() const { return steps_; }

    StepRecord::Eval at(double s) const {
        if (steps_.empty())
            throw std::logic_error("DensePiece::at: empty piece");
        // Binary search for the covering step; clamp to the span.
        std::size_t lo = 0, hi = steps_.size() - 1;
        if (s <= steps_.front().s1) {
            lo = 0;
        } else if (s >= steps_.back().s0) {
            lo = steps_.size() - 1;
        } else {
            while (lo < hi) {
                const std::size_t mid = (lo + hi) / 2;
                if (steps_[mid].s1 < s)
                    lo = mid + 1;
                else
                    hi = mid;
            }
        }
        return steps_[lo].at(s);
    }

  private:
    std::vector<StepRecord> steps_;
};

enum class StopReason { Event, Horizon, Overflow };

struct PieceRun {
    DensePiece dense;
    StopReason stop = StopReason::Horizon;
    double s_stop = 0.0;
    double y_stop = 0.0;
    double yp_stop = 0.0;
    long accepted_steps = 0;
    long rejected_steps = 0;
};

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double A21 = 1.0 / 5;
inline constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
inline constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
inline constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187,
                        A53 = 64448.0 / 6561, A54 = -212.0 / 729;
inline constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33,
                        A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                        A65 = -5103.0 / 18656;
inline constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                        B5 = -2187.0 / 6784, B6 = 11.0 / 84;
inline constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695,
                        E4 = 71.0 / 1920, E5 = -17253.0 / 339200,
                        E6 = 22.0 / 525, E7 = -1.0 / 40;
inline constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5,
                        C5 = 8.0 / 9;

inline int sign3(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

} // namespace detail

/// Integrates y'' = F(s, y, y') from (s0, y0, yp0) forward in s until the
/// solution changes sign, the horizon is reached, or |y| exceeds the
/// overflow guard. `initial_sign` tells the event detector which sign the
/// solution currently has (pass sign(y0), or sign(yp0) when starting exactly
/// at a zero).
inline PieceRun integrate_until_sign_change(const Rhs2& F, double s0, double y0,
                                            double yp0, double horizon,
                                            const OdeOptions& opt,
                                            int initial_sign,
                                            const TermScale& term_scale = {}) {
    if (!(horizon > s0))
        throw std::invalid_argument("integrate_until_sign_change: horizon <= start");
    if (initial_sign == 0)
        throw std::invalid_argument("integrate_until_sign_change: need a nonzero starting sign");

    PieceRun run;
    double s = s0, y = y0, yp = yp0;
    double ypp = F(s, y, yp);
    double h = opt.initial_step > 0.0 ? opt.initial_step
                                      : std::min(opt.max_step, 0.25 * std::max(std::fabs(s0), 1e-8));
    h = std::min(h, horizon - s);

    const double theta[5] = {1.0 / 6, 2.0 / 6, 3.0 / 6, 4.0 / 6, 5.0 / 6};

    for (long step = 0; step < opt.max_steps; ++step) {
        if (s >= horizon - 1e-14 * std::max(1.0, std::fabs(horizon))) {
            run.stop = StopReason::Horizon;
            run.s_stop = s;
            run.y_stop = y;
            run.yp_stop = yp;
            return run;
        }
        h = std::min(h, horizon - s);
        if (h < 1e-14 * std::max(1.0, std::fabs(s)))
            throw SolverError("integrator step size underflow");

        // Stage evaluations for the (y, y') system sharing one scalar F.
        const double k1y = yp, k1v = ypp;
        const double y2 = y + h * detail::A21 * k1y, v2 = yp + h * detail::A21 * k1v;
        const double k2y = v2, k2v = F(s + detail::C2 * h, y2, v2);
        const double y3 = y + h * (detail::A31 * k1y + detail::A32 * k2y);
        const double v3 = yp + h * (detail::A31 * k1v + detail::A32 * k2v);
        const double k3y = v3, k3v = F(s + detail::C3 * h, y3, v3);
        const double y4 = y + h * (detail::A41 * k1y + detail::A42 * k2y + detail::A43 * k3y);
        const double v4 = yp + h * (detail::A41 * k1v + detail::A42 * k2v + detail::A43 * k3v);
        const double k4y = v4, k4v = F(s + detail::C4 * h, y4, v4);
        const double y5 = y + h * (detail::A51 * k1y + detail::A52 * k2y + detail::A53 * k3y +
                                   detail::A54 * k4y);
        const double v5 = yp + h * (detail::A51 * k1v + detail::A52 * k2v + detail::A53 * k3v +
                                    detail::A54 * k4v);
        const double k5y = v5, k5v = F(s + detail::C5 * h, y5, v5);
        const double y6 = y + h * (detail::A61 * k1y + detail::A62 * k2y + detail::A63 * k3y +
                                   detail::A64 * k4y + detail::A65 * k5y);
        const double v6 = yp + h * (detail::A61 * k1v + detail::A62 * k2v + detail::A63 * k3v +
                                    detail::A64 * k4v + detail::A65 * k5v);
        const double k6y = v6, k6v = F(s + h, y6, v6);
        const double ynew = y + h * (detail::B1 * k1y + detail::B3 * k3y + detail::B4 * k4y +
                                     detail::B5 * k5y + detail::B6 * k6y);
        const double vnew = yp + h * (detail::B1 * k1v + detail::B3 * k3v + detail::B4 * k4v +
                                      detail::B5 * k5v + detail::B6 * k6v);
        const double k7y = vnew, k7v = F(s + h, ynew, vnew);

        const double erry = h * (detail::E1 * k1y + detail::E3 * k3y + detail::E4 * k4y +
                                 detail::E5 * k5y + detail::E6 * k6y + detail::E7 * k7y);
        const double errv = h * (detail::E1 * k1v + detail::E3 * k3v + detail::E4 * k4v +
                                 detail::E5 * k5v + detail::E6 * k6v + detail::E7 * k7v);
        const double scy = opt.atol + opt.rtol * std::max(std::fabs(y), std::fabs(ynew));
        const double scv = opt.atol + opt.rtol * std::max(std::fabs(yp), std::fabs(vnew));
        const double err = std::sqrt(0.5 * ((erry / scy) * (erry / scy) +
                                            (errv / scv) * (errv / scv)));

        if (!std::isfinite(err) || !std::isfinite(ynew) || !std::isfinite(vnew))
            throw SolverError("integrator produced a non-finite value");

        if (err > 1.0) {
            ++run.rejected_steps;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            continue;
        }

        StepRecord rec{s, s + h, y, yp, ypp, ynew, vnew, k7v};

        if (opt.residual_gate) {
            // Residual of the dense interpolant in the ODE at interior
            // points, evaluated in extended precision (see at_precise). The
            // remaining rounding floor enters the bound, and a rejection is
            // only acted on while the tolerance dominates that floor: below
            // it the residual is not measurable, and shrinking h would only
            // raise the floor further (which would otherwise starve progress
            // at a step straddling a steep sign change).
            const double eps_l =
                (double)std::numeric_limits<long double>::epsilon();
            const double noise =
                eps_l * (64.0 * (std::fabs(y) + std::fabs(ynew)) / (h * h) +
                         40.0 * (std::fabs(yp) + std::fabs(vnew)) / h +
                         12.0 * (std::fabs(ypp) + std::fabs(k7v)));
            double worst = 0.0;
            double tol_part = 0.0;
            for (double t : theta) {
                const double sm = s + t * h;
                const auto e = rec.at_precise(sm);
                const double f = F(sm, e.y, e.yp);
                const double scale =
                    term_scale ? term_scale(sm, e.y, e.yp)
                               : std::fabs(f) + std::fabs(e.ypp);
                const double tol =
                    opt.residual_factor * (opt.atol + opt.rtol * scale);
                const double r = std::fabs(e.ypp - f);
                worst = std::max(worst, r / (tol + 8.0 * noise));
                tol_part = std::max(tol_part, tol);
            }
            if (worst > 1.0 && tol_part > 8.0 * noise) {
                ++run.rejected_steps;
                h *= std::max(0.2, 0.85 * std::pow(worst, -0.25));
                continue;
            }
        }

        // Accepted.
        ++run.accepted_steps;
        run.dense.push(rec);

        // Event detection: endpoint signs plus dense samples (guards against
        // a double crossing inside one step).
        int prev_sign = (run.dense.steps().size() == 1) ? initial_sign
                                                        : detail::sign3(y);
        if (prev_sign == 0) prev_sign = initial_sign;
        double sa = s;
        bool crossed = false;
        double sc_lo = s, sc_hi = s + h;
        for (int i = 0; i <= 5; ++i) {
            const double sm = (i < 5) ? s + theta[i] * h : s + h;
            const double yv = (i < 5) ? rec.at(sm).y : ynew;
            const int sg = detail::sign3(yv);
            if (sg != 0 && sg != prev_sign) {
                crossed = true;
                sc_lo = sa;
                sc_hi = sm;
                break;
            }
            if (sg != 0) sa = sm;
        }

        if (crossed) {
            // Bisect the dense interpolant down to machine width.
            double lo = sc_lo, hi = sc_hi;
            double flo = rec.at(lo).y;
            if (lo == s) flo = (prev_sign > 0) ? std::fabs(flo) : -std::fabs(flo);
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid == lo || mid == hi) break;
                const double fm = rec.at(mid).y;
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((fm > 0.0) == (flo > 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            const double star = 0.5 * (lo + hi);
            const auto e = rec.at(star);
            if (std::fabs(e.yp) < opt.derivative_floor)
                throw TangencyError("sign change with |y'| below the derivative floor");
            run.stop = StopReason::Event;
            run.s_stop = star;
            run.y_stop = e.y;
            run.yp_stop = e.yp;
            return run;
        }

        s += h;
        y = ynew;
        yp = vnew;
        ypp = k7v;

        if (std::fabs(y) > opt.overflow_guard) {
            run.stop = StopReason::Overflow;
            run.s_stop = s;
            run.y_stop = y;
            run.yp_stop = yp;
            return run;
        }

        h = std::min(opt.max_step, h * std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2))));
    }
    throw SolverError("integrator exceeded the step budget");
}

} // namespace selfsim
