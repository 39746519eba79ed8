#pragma once

// Negative-homogeneity duals. A profile f of homogeneity alpha (living at
// t < 0) maps to g = psi f of homogeneity beta = -(N + alpha) (living at
// t > 0), where
//
//   psi(r) = exp( -int_0^r lambda(f(s)) s/2 ds )
//
// is the sign-adapted heat-kernel profile. lambda is piecewise constant
// (1 where f > 0, 2 where f < 0), so psi is an explicit chain of Gaussians
// C_i exp(-lambda_i r^2/4) glued continuously at the zeros of f and the
// transform needs no quadrature. psi' jumps at each gluing radius, but the
// product g stays C^1 because f vanishes exactly where psi' does not exist.
//
// g then solves, piecewise in its own sign,
//
//   g'' + ((N-1)/r + lambda r/2) g' + lambda (N+alpha)/2 g = 0,
//
// i.e. the same switching structure with the drift sign flipped and the
// zeroth-order coefficient (N+alpha)/2 resp. (N+alpha). The checks in this
// header deliberately avoid re-deriving that equation from the forward one:
// the residual is measured with finite differences on sampled g values, and
// the no-sign-change criterion integrates the dual equation directly.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "selfsim/branch.hpp"
#include "selfsim/errors.hpp"
#include "selfsim/exponents.hpp"
#include "selfsim/quadrature.hpp"
#include "selfsim/rk.hpp"
#include "selfsim/shooting.hpp"

namespace selfsim {

/// Piecewise-Gaussian kernel profile: C_i exp(-lambda_i r^2/4) on the i-th
/// sign segment of the source profile, C_0 = 1, each later constant fixed by
/// continuity at the switch radius.
struct PsiKernel {
    std::vector<double> zeros;     ///< switch radii, strictly ascending
    std::vector<double> lambdas;   ///< per segment; zeros.size() + 1 entries
    std::vector<double> constants; ///< C_i; constants[0] = 1

    std::size_t segment(double r) const {
        std::size_t i = 0;
        while (i < zeros.size() && r > zeros[i]) ++i;
        return i;
    }

    double value(double r) const {
        const std::size_t i = segment(r);
        return constants[i] * std::exp(-0.25 * lambdas[i] * r * r);
    }

    /// One-sided derivative (the segment owning r decides at a switch radius).
    double derivative(double r) const {
        return -0.5 * lambdas[segment(r)] * r * value(r);
    }

    /// psi'(s_i+) - psi'(s_i-) at the i-th switch radius.
    double derivative_jump(std::size_t i) const {
        if (i >= zeros.size())
            throw std::out_of_range("PsiKernel::derivative_jump: no such zero");
        const double z = zeros[i];
        return -0.5 * (lambdas[i + 1] - lambdas[i]) * z * value(z);
    }
};

/// Builds the kernel for a profile of the given starting sign and zero set.
inline PsiKernel build_psi(Sign sign0, const std::vector<double>& zeros) {
    PsiKernel psi;
    psi.zeros = zeros;
    psi.lambdas.reserve(zeros.size() + 1);
    psi.constants.reserve(zeros.size() + 1);
    double lam = lambda_of(branch_of_sign(sign0));
    double c = 1.0;
    psi.lambdas.push_back(lam);
    psi.constants.push_back(c);
    double prev = 0.0;
    for (double z : zeros) {
        if (!(z > prev))
            throw std::invalid_argument("build_psi: zeros must be ascending and positive");
        prev = z;
        const double next = 3.0 - lam; // the branches alternate between 1 and 2
        c *= std::exp(0.25 * (next - lam) * z * z);
        lam = next;
        psi.lambdas.push_back(lam);
        psi.constants.push_back(c);
    }
    return psi;
}

/// A profile together with its negative-homogeneity dual g = psi f.
struct AppellPair {
    ProblemParams params;        ///< alpha and dimension of the source
    Sign sign0 = Sign::Plus;
    std::vector<double> zeros;   ///< shared by f and g (psi > 0)
    PsiKernel psi;
    double beta = 0.0;           ///< dual homogeneity -(N + alpha)
    double ell = 0.0;            ///< tail lambda: lim of lambda(g(r))
    std::function<StepRecord::Eval(double)> source; ///< f and f'
    double s_max = 0.0;          ///< largest radius the source covers

    StepRecord::Eval f_at(double r) const { return source(r); }

    /// g and g' (product rule; the second-derivative slot is left zero so
    /// residual checks cannot accidentally read an ODE-derived value).
    StepRecord::Eval g_at(double r) const {
        const auto f = source(r);
        const double p = psi.value(r);
        const double dp = psi.derivative(r);
        return {p * f.y, dp * f.y + p * f.yp, 0.0};
    }
};

/// Assembles a pair from explicit data; the transform overloads below feed
/// it computed profiles, tests feed it synthetic tails.
inline AppellPair make_appell_pair(const ProblemParams& params, Sign sign0,
                                   std::vector<double> zeros,
                                   std::function<StepRecord::Eval(double)> source,
                                   double s_max) {
    AppellPair pair;
    pair.params = params;
    pair.sign0 = sign0;
    pair.zeros = std::move(zeros);
    pair.psi = build_psi(sign0, pair.zeros);
    pair.beta = -(params.dimension + params.alpha);
    pair.ell = pair.psi.lambdas.back();
    pair.source = std::move(source);
    pair.s_max = s_max;
    return pair;
}

/// Transform of a raw origin shot (any finite-zero profile; evaluable up to
/// the integrated span).
inline AppellPair appell_transform(const SelfSimilarProfile& prof) {
    std::vector<double> zeros;
    zeros.reserve(prof.zeros.size());
    for (const auto& z : prof.zeros) zeros.push_back(z.s);
    return make_appell_pair(
        prof.params, prof.origin_sign, std::move(zeros),
        [prof](double r) { return prof.at(r); }, prof.s_end);
}

/// Transform of a matched eigen-profile; the tail piece is represented
/// through the second shooting direction, so the dual is evaluable at every
/// radius.
inline AppellPair appell_transform(const MatchedProfile& m) {
    std::vector<double> zeros;
    zeros.reserve(m.origin.zeros.size());
    for (const auto& z : m.origin.zeros) zeros.push_back(z.s);
    return make_appell_pair(
        m.params, m.sign0, std::move(zeros),
        [m](double r) { return m.at(r); },
        std::numeric_limits<double>::infinity());
}

/// The recovered t < 0 profile of an inverse transform.
struct RecoveredProfile {
    ProblemParams params;      ///< alpha = -(N + beta)
    Sign sign0 = Sign::Plus;
    std::vector<double> zeros; ///< same zero set (sign(g) = sign(f))
    std::function<StepRecord::Eval(double)> f;
};

/// Inverse transform f = g / psi_v. The kernel is rebuilt from the dual data
/// (starting sign and zero set of g), not taken from the pair, so composing
/// with the forward transform checks the kernel bookkeeping both ways.
inline RecoveredProfile inverse_appell(const AppellPair& pair) {
    RecoveredProfile out;
    out.params =
        ProblemParams{pair.params.dimension,
                      -(static_cast<double>(pair.params.dimension) + pair.beta)};
    out.sign0 = pair.sign0;
    out.zeros = pair.zeros;
    const PsiKernel psi_v = build_psi(pair.sign0, pair.zeros);
    out.f = [pair, psi_v](double r) {
        const auto g = pair.g_at(r);
        const double p = psi_v.value(r);
        const double dp = psi_v.derivative(r);
        return StepRecord::Eval{g.y / p, (g.yp * p - g.y * dp) / (p * p), 0.0};
    };
    return out;
}

namespace detail {

/// Dual-equation residual from one centred 5-point stencil of width h.
inline double dual_residual_stencil(const AppellPair& pair, double r,
                                    double h) {
    double g[5];
    for (int j = -2; j <= 2; ++j) g[j + 2] = pair.g_at(r + j * h).y;
    const double gp = (g[0] - 8.0 * g[1] + 8.0 * g[3] - g[4]) / (12.0 * h);
    const double gpp =
        (-g[0] + 16.0 * g[1] - 30.0 * g[2] + 16.0 * g[3] - g[4]) /
        (12.0 * h * h);
    const double lam = lambda_of(branch_of(g[2]));
    const double N = pair.params.dimension;
    return gpp + ((N - 1.0) / r + 0.5 * lam * r) * gp +
           0.5 * lam * (N + pair.params.alpha) * g[2];
}

} // namespace detail

/// Residual of the dual equation at r, measured on sampled g values alone:
/// both derivatives come from centred 5-point differences, independent of
/// the product-rule derivatives used elsewhere. The FD errors enter the
/// residual linearly, so extrapolating the stencils at h and h/2 removes
/// their shared O(h^4) truncation term; what is left measures the transform,
/// not the stencil. The h-stencil must not straddle a zero of g (g is only
/// C^1 there) nor leave (0, s_max].
inline double dual_ode_residual(const AppellPair& pair, double r,
                                double h = 0.02) {
    if (!(h > 0.0) || !(r - 2.0 * h > 0.0) || !(r + 2.0 * h <= pair.s_max))
        throw std::invalid_argument("dual_ode_residual: stencil outside (0, s_max]");
    for (double z : pair.zeros)
        if (std::fabs(r - z) <= 2.0 * h)
            throw std::invalid_argument("dual_ode_residual: stencil straddles a zero");
    const double full = detail::dual_residual_stencil(pair, r, h);
    const double half = detail::dual_residual_stencil(pair, r, 0.5 * h);
    return (16.0 * half - full) / 15.0;
}

struct DualResidualReport {
    double max_residual = 0.0;
    double at_r = 0.0; ///< where the maximum was attained
    int points = 0;    ///< stencils actually evaluated
};

/// Sweeps the residual over a uniform grid, skipping stencils that would
/// straddle a zero or leave the evaluable span.
inline DualResidualReport max_dual_residual(const AppellPair& pair, double lo,
                                            double hi, int n = 200,
                                            double h = 0.02) {
    if (!(hi > lo) || n < 2)
        throw std::invalid_argument("max_dual_residual: bad grid");
    DualResidualReport rep;
    for (int i = 0; i < n; ++i) {
        const double r = lo + (hi - lo) * i / (n - 1);
        if (!(r - 2.0 * h > 0.0) || !(r + 2.0 * h <= pair.s_max)) continue;
        bool near_zero = false;
        for (double z : pair.zeros)
            if (std::fabs(r - z) <= 3.0 * h) near_zero = true;
        if (near_zero) continue;
        const double res = std::fabs(dual_ode_residual(pair, r, h));
        ++rep.points;
        if (res > rep.max_residual) {
            rep.max_residual = res;
            rep.at_r = r;
        }
    }
    if (rep.points == 0)
        throw SolverError("max_dual_residual: no admissible stencil in range");
    return rep;
}

/// Tail-decay verdict for the dual profile: on the dyadic radii r0, 2 r0,
/// 4 r0 the quantity q(r) = e^{ell r^2/4} r^{-alpha} g(r) tends to a finite
/// nonzero limit exactly when the source tail is algebraic, with increments
/// falling like r^{-2}; Richardson extrapolation in r^{-2} estimates the
/// limit. A growing-tail source makes the increments explode instead.
struct DecayReport {
    double ell = 0.0;
    double r0 = 0.0;
    std::array<double, 3> q{};      ///< q at r0, 2 r0, 4 r0
    double limit = 0.0;             ///< two-level Richardson extrapolation
    double increment_ratio = 0.0;   ///< |q2-q1| / |q1-q0|; 1/4 for an r^{-2} tail
    bool finite = false;
    double vanishing_proxy = 0.0;   ///< r^{N+alpha} |g| at 4 r0 (to 0 with r)
};

inline DecayReport decay_check(const AppellPair& pair, double r0 = 6.0,
                               double ratio_tol = 0.15) {
    const double r_top = 4.0 * r0;
    if (!(r0 > 0.0) || !(r_top <= pair.s_max))
        throw std::invalid_argument("decay_check: dyadic grid leaves the evaluable span");
    if (0.25 * pair.ell * r_top * r_top > 690.0)
        throw std::invalid_argument("decay_check: grid too far out for the Gaussian factor");

    DecayReport rep;
    rep.ell = pair.ell;
    rep.r0 = r0;
    for (int m = 0; m < 3; ++m) {
        const double r = r0 * (1 << m);
        rep.q[m] = std::exp(0.25 * pair.ell * r * r) *
                   std::pow(r, -pair.params.alpha) * pair.g_at(r).y;
    }
    const double inc1 = std::fabs(rep.q[1] - rep.q[0]);
    const double inc2 = std::fabs(rep.q[2] - rep.q[1]);
    const double q01 = rep.q[1] + (rep.q[1] - rep.q[0]) / 3.0;
    const double q12 = rep.q[2] + (rep.q[2] - rep.q[1]) / 3.0;
    rep.limit = q12 + (q12 - q01) / 15.0;
    const double scale = std::max(std::fabs(rep.q[2]), 1e-300);
    if (inc1 <= 1e-13 * scale) {
        // Already flat to rounding; the tail coefficient is the value itself.
        rep.increment_ratio = 0.0;
        rep.finite = std::isfinite(rep.limit) && rep.limit != 0.0;
    } else {
        rep.increment_ratio = inc2 / inc1;
        rep.finite = std::isfinite(rep.limit) && rep.limit != 0.0 &&
                     rep.increment_ratio <= 0.25 + ratio_tol;
    }
    const double N = pair.params.dimension;
    rep.vanishing_proxy =
        std::pow(r_top, N + pair.params.alpha) * std::fabs(pair.g_at(r_top).y);
    return rep;
}

/// No-sign-change criterion for dual homogeneities beta in [-N, 0): the
/// normalized solution of
///   g'' + ((N-1)/r + r/2) g' - (beta/2) g = 0,  g(0) = 1, g'(0) = 0,
/// stays positive and dominates the heat-kernel profile e^{-r^2/4}, with
/// equality exactly at beta = -N.
struct NonsignReport {
    double beta = 0.0;
    int dimension = 1;
    double horizon = 0.0;
    bool sign_constant = false;
    double min_gap = 0.0;          ///< min of g - e^{-r^2/4} over the samples
    double max_gaussian_dev = 0.0; ///< sup |g - e^{-r^2/4}| over the samples
    double offending_r = 0.0;      ///< first sign change if any
    bool pass = false;
};

inline NonsignReport nonsign_check(double beta, int dimension,
                                   double horizon = 10.0) {
    const double N = dimension;
    if (dimension < 1)
        throw std::invalid_argument("nonsign_check: dimension must be >= 1");
    if (!(beta >= -N) || !(beta < 0.0))
        throw std::invalid_argument("nonsign_check: beta outside [-N, 0)");

    NonsignReport rep;
    rep.beta = beta;
    rep.dimension = dimension;
    rep.horizon = horizon;

    // Series start g = 1 + a r^2 + b r^4 (regular singular point at r = 0).
    const double a = beta / (4.0 * N);
    const double b = a * (beta - 2.0) / (8.0 * N + 16.0);
    const double r0 = 1e-3;
    const double y0 = 1.0 + a * r0 * r0 + b * r0 * r0 * r0 * r0;
    const double yp0 = 2.0 * a * r0 + 4.0 * b * r0 * r0 * r0;

    Rhs2 F = [N, beta](double r, double g, double gp) {
        return -((N - 1.0) / r + 0.5 * r) * gp + 0.5 * beta * g;
    };
    TermScale scale = [N, beta](double r, double g, double gp) {
        return std::fabs((N - 1.0) / r * gp) + std::fabs(0.5 * r * gp) +
               std::fabs(0.5 * beta * g);
    };
    const auto run =
        integrate_until_sign_change(F, r0, y0, yp0, horizon, OdeOptions{}, +1, scale);

    if (run.stop == StopReason::Event) {
        rep.sign_constant = false;
        rep.offending_r = run.s_stop;
        rep.pass = false;
        return rep;
    }
    rep.sign_constant = true;
    rep.offending_r = horizon;

    double min_gap = std::numeric_limits<double>::infinity();
    double max_dev = 0.0;
    const int samples = 2000;
    for (int i = 1; i <= samples; ++i) {
        const double r = r0 + (run.s_stop - r0) * i / samples;
        const double g = run.dense.at(r).y;
        const double gauss = std::exp(-0.25 * r * r);
        min_gap = std::min(min_gap, g - gauss);
        max_dev = std::max(max_dev, std::fabs(g - gauss));
    }
    rep.min_gap = min_gap;
    rep.max_gaussian_dev = max_dev;
    if (std::fabs(beta + N) <= 1e-12)
        rep.pass = max_dev <= 1e-10; // the Gaussian itself is the solution
    else
        rep.pass = min_gap > 0.0;
    return rep;
}

/// Energy/mass quotients for the growing weight s^{N-1} e^{+s^2/4} over
/// random polynomial test functions vanishing at the right endpoint. The
/// quotient is a ratio of nonnegative integrals, so the -N/2 lower bound the
/// comparison argument needs holds with margin at least N/2; the sweep
/// guards the direction convention.
inline std::vector<double> dual_weight_quotients(int dimension, double r_end,
                                                 int count, unsigned seed) {
    if (dimension < 1 || !(r_end > 0.0) || count < 1)
        throw std::invalid_argument("dual_weight_quotients: bad arguments");
    const double N = dimension;
    auto weight = [N](double s) {
        return std::pow(s, N - 1.0) * std::exp(0.25 * s * s);
    };
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::vector<double> out;
    out.reserve(count);
    const int panels = quad::panels_for(0.0, r_end, 64, 64);
    for (int i = 0; i < count; ++i) {
        const double c0 = coef(rng), c1 = coef(rng), c2 = coef(rng),
                     c3 = coef(rng);
        // p = (r_end - s) * cubic, so p(r_end) = 0 by construction.
        auto p = [&](double s) {
            return (r_end - s) * (c0 + s * (c1 + s * (c2 + s * c3)));
        };
        auto pp = [&](double s) {
            return -(c0 + s * (c1 + s * (c2 + s * c3))) +
                   (r_end - s) * (c1 + s * (2.0 * c2 + 3.0 * s * c3));
        };
        const double energy = quad::integrate(
            [&](double s) { const double d = pp(s); return weight(s) * d * d; },
            0.0, r_end, panels);
        const double mass = quad::integrate(
            [&](double s) { const double v = p(s); return weight(s) * v * v; },
            0.0, r_end, panels);
        if (!(mass > 0.0))
            throw SolverError("dual_weight_quotients: degenerate test function");
        out.push_back(energy / mass);
    }
    return out;
}

} // namespace selfsim
