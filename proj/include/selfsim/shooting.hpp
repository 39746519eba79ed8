#pragma once

// Shooting from the origin and from infinity.
//
// Origin shot: integrate the switching profile equation from the series
// start at s = epsilon with f(0) = +-1, f'(0) = 0.
//
// Infinity shot: substitute h(t) = t^alpha f(1/t). h satisfies
//
//   t^2 h'' - (2 alpha + N - 3) t h' + lambda(h) h'/(2t)
//     + alpha (alpha + N - 2) h = 0,
//
// with h(0) = +-1, h'(0) = 0, and branch switching driven by the sign of h
// (which equals the sign of f). The first zero of h in t is the outermost
// sign change of the algebraically growing tail solution; mapping t -> 1/t
// walks the tail's zeros from infinity inward. The construction needs
// 2 alpha + N - 3 > 0, i.e. alpha above (3-N)/2; below that threshold the
// shot is refused as Unsupported.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "selfsim/branch.hpp"
#include "selfsim/errors.hpp"
#include "selfsim/profile_ode.hpp"
#include "selfsim/rootfind.hpp"

namespace selfsim {

inline double default_horizon(int dimension) {
    return 12.0 * std::max(1.0, std::sqrt(static_cast<double>(dimension)));
}

/// alpha must exceed this for the infinity shot to be well posed.
inline double infinity_alpha_threshold(int dimension) {
    return std::max(0.0, 0.5 * (3.0 - dimension));
}

struct ShotOptions {
    double horizon = 0.0; ///< 0 = default_horizon(dimension)
    int max_zeros = 8;
    bool fixed_branch = false;
    bool classify = true; ///< classify the tail when the horizon is reached
    double classify_tol = 1e-6;
    OdeOptions ode;

    double horizon_for(int dimension) const {
        return horizon > 0.0 ? horizon : default_horizon(dimension);
    }
};

// ---------------------------------------------------------------------------
// Infinity shot
// ---------------------------------------------------------------------------

/// h'' from the transformed equation on a fixed branch. The lambda h'/(2t)
/// term is the only place the branches differ.
inline double rhs_infinity(double t, double h, double hp, Branch branch,
                           const ProblemParams& p) {
    const double lam = lambda_of(branch);
    const double N = p.dimension;
    const double A = p.alpha * (p.alpha + N - 2.0);
    return ((2.0 * p.alpha + N - 3.0) * t * hp - 0.5 * lam * hp / t - A * h) /
           (t * t);
}

inline double infinity_term_scale(double t, double h, double hp, Branch branch,
                                  const ProblemParams& p) {
    const double lam = lambda_of(branch);
    const double N = p.dimension;
    const double A = p.alpha * (p.alpha + N - 2.0);
    return (std::fabs((2.0 * p.alpha + N - 3.0) * t * hp) +
            std::fabs(0.5 * lam * hp / t) + std::fabs(A * h)) /
           (t * t);
}

/// Series start at t = epsilon: h = h0 (1 + c t^2 + d t^4 + O(t^6)) with
///   c = -A/lambda,  d = -c (A - 4 alpha - 2N + 8)/(2 lambda),
/// A = alpha (alpha + N - 2). In particular h''(0) = 2c h0, which is
/// -2 alpha (alpha+N-2) h0 on the positive branch and half that factor on
/// the negative one.
///
/// The default epsilon = 1e-3 is deliberately larger than the origin-side
/// epsilon: the h'/(2t) and A h terms cancel to O(t^2) near zero, and their
/// floating-point noise grows like 1e-16/t^2, so starting closer to t = 0
/// would *lose* accuracy. At 1e-3 the quartic truncation (~1e-15) and the
/// accumulated cancellation noise (~1e-13) are both far below the 1e-8
/// accuracy the zero maps need.
inline SeriesState series_start_infinity(const ProblemParams& p,
                                         Sign infinity_sign,
                                         double epsilon = 1e-3) {
    p.validate();
    const double lam = lambda_of(branch_of_sign(infinity_sign));
    const double N = p.dimension;
    const double A = p.alpha * (p.alpha + N - 2.0);
    const double c = -A / lam;
    const double d = -c * (A - 4.0 * p.alpha - 2.0 * N + 8.0) / (2.0 * lam);
    const double h0 = signed_unit(infinity_sign);
    const double e2 = epsilon * epsilon;
    return {epsilon, h0 * (1.0 + c * e2 + d * e2 * e2),
            h0 * (2.0 * c * epsilon + 4.0 * d * e2 * epsilon)};
}

/// Infinity shot record. Pieces and zeros live in the t variable; the
/// mapped zeros s = 1/t are kept sorted ascending in s.
struct InfinityShot {
    ProblemParams params;
    Sign infinity_sign = Sign::Plus;
    double start_epsilon = 1e-3;
    std::vector<ProfilePiece> pieces; ///< in t, ascending
    std::vector<ZeroCrossing> t_zeros; ///< ascending in t (outward-in along s)
    std::vector<double> mapped_zeros;  ///< 1/t, ascending in s
    TailClass stop_class = TailClass::Truncated;
    StopReason final_stop = StopReason::Horizon;
    double t_end = 0.0;

    /// h and h' at t (series below the start epsilon).
    StepRecord::Eval h_at(double t) const {
        if (t <= start_epsilon) {
            const double lam =
                lambda_of(branch_of_sign(infinity_sign));
            const double N = params.dimension;
            const double A = params.alpha * (params.alpha + N - 2.0);
            const double c = -A / lam;
            const double d = -c * (A - 4.0 * params.alpha - 2.0 * N + 8.0) / (2.0 * lam);
            const double h0 = signed_unit(infinity_sign);
            const double t2 = t * t;
            return {h0 * (1.0 + c * t2 + d * t2 * t2),
                    h0 * (2.0 * c * t + 4.0 * d * t2 * t),
                    h0 * (2.0 * c + 12.0 * d * t2)};
        }
        for (const auto& piece : pieces)
            if (t <= piece.s_end || &piece == &pieces.back())
                return piece.dense.at(std::min(t, piece.s_end));
        throw std::out_of_range("InfinityShot::h_at: beyond integrated span");
    }

    /// The represented tail solution in profile variables:
    /// f(s) = s^alpha h(1/s), f'(s) = alpha s^{alpha-1} h - s^{alpha-2} h'.
    StepRecord::Eval f_at(double s) const {
        const double t = 1.0 / s;
        const auto e = h_at(t);
        const double sa = std::pow(s, params.alpha);
        StepRecord::Eval out;
        out.y = sa * e.y;
        out.yp = params.alpha * sa / s * e.y - sa / (s * s) * e.yp;
        out.ypp = std::numeric_limits<double>::quiet_NaN(); // not needed
        return out;
    }
};

inline InfinityShot shoot_infinity(const ProblemParams& p, Sign infinity_sign,
                                   const ShotOptions& opts = {}) {
    p.validate();
    const double threshold = infinity_alpha_threshold(p.dimension);
    if (!(p.alpha > threshold))
        throw UnsupportedError("shoot_infinity: alpha <= (3-N)/2 threshold");

    InfinityShot shot;
    shot.params = p;
    shot.infinity_sign = infinity_sign;
    const SeriesState st = series_start_infinity(p, infinity_sign, shot.start_epsilon);

    const Branch b0 = branch_of_sign(infinity_sign);
    auto rhs_of = [&p](Branch b) -> Rhs2 {
        return [&p, b](double t, double h, double hp) {
            return rhs_infinity(t, h, hp, b, p);
        };
    };
    auto scale_of = [&p](Branch b) -> TermScale {
        return [&p, b](double t, double h, double hp) {
            return infinity_term_scale(t, h, hp, b, p);
        };
    };

    SwitchingRun run = run_switching_shot(rhs_of, scale_of, st.s, st.f, st.fp,
                                          b0, opts.horizon_for(p.dimension),
                                          opts.max_zeros, opts.ode,
                                          opts.fixed_branch);
    shot.pieces = std::move(run.pieces);
    shot.t_zeros = std::move(run.zeros);
    shot.final_stop = run.final_stop;
    shot.t_end = run.s_end;
    shot.stop_class = run.zero_budget_exhausted ? TailClass::Truncated
                      : run.final_stop == StopReason::Overflow
                          ? TailClass::Exponential
                          : TailClass::Truncated;
    shot.mapped_zeros.reserve(shot.t_zeros.size());
    for (auto it = shot.t_zeros.rbegin(); it != shot.t_zeros.rend(); ++it)
        shot.mapped_zeros.push_back(1.0 / it->s);
    return shot;
}

// ---------------------------------------------------------------------------
// Zero maps
// ---------------------------------------------------------------------------

enum class ShotSide { FromOrigin, FromInfinity };

struct ZeroMapSample {
    double alpha;
    Sign sign;
    int k;
    ShotSide side;
    std::optional<double> value; ///< nullopt = Absent (fewer than k zeros)
};

namespace detail {

inline ShotOptions zero_map_options(int k, const ShotOptions& base) {
    ShotOptions o = base;
    o.max_zeros = k; // run only to the k-th zero
    o.classify = false;
    return o;
}

} // namespace detail

/// k-th zero of the requested shot, or Absent. FromOrigin counts zeros
/// ascending from s = 0; FromInfinity counts them outward-in (k = 1 is the
/// outermost mapped zero, the first zero of h in t).
inline std::optional<double> zero_map(double alpha, Sign sign, int k,
                                      ShotSide side, int dimension,
                                      const ShotOptions& base = {}) {
    if (k < 1) throw std::invalid_argument("zero_map: k must be >= 1");
    ProblemParams p{dimension, alpha};
    const ShotOptions opts = detail::zero_map_options(k, base);
    if (side == ShotSide::FromOrigin) {
        const SeriesState st = series_start_origin(p, sign);
        auto rhs_of = [&p](Branch b) -> Rhs2 {
            return [&p, b](double s, double f, double fp) {
                return profile_rhs(s, f, fp, b, p);
            };
        };
        auto scale_of = [&p](Branch b) -> TermScale {
            return [&p, b](double s, double f, double fp) {
                return profile_term_scale(s, f, fp, b, p);
            };
        };
        SwitchingRun run = run_switching_shot(
            rhs_of, scale_of, st.s, st.f, st.fp, branch_of_sign(sign),
            opts.horizon_for(dimension), k, opts.ode, opts.fixed_branch);
        if (static_cast<int>(run.zeros.size()) < k) return std::nullopt;
        return run.zeros[k - 1].s;
    }
    const InfinityShot shot = shoot_infinity(p, sign, opts);
    if (static_cast<int>(shot.t_zeros.size()) < k) return std::nullopt;
    return 1.0 / shot.t_zeros[k - 1].s;
}

// ---------------------------------------------------------------------------
// Inverse maps in alpha
// ---------------------------------------------------------------------------

/// Solves s^{sigma,1}_alpha = z for alpha (first origin zero; the map is
/// strictly decreasing in alpha and onto (0, infinity)).
inline double alpha_for_first_zero(double z, Sign sign, int dimension,
                                   double alpha_tol = 1e-10,
                                   const ShotOptions& base = {}) {
    if (!(z > 0.0))
        throw std::invalid_argument("alpha_for_first_zero: z must be positive");
    // Large horizon so that slow small-alpha zeros stay visible.
    ShotOptions opts = base;
    opts.horizon = std::max(opts.horizon_for(dimension), 3.0 * z);
    auto residual = [&](double a) -> std::optional<double> {
        const auto v = zero_map(a, sign, 1, ShotSide::FromOrigin, dimension, opts);
        if (!v) return std::nullopt;
        return *v - z; // decreasing in alpha
    };
    const double seed = 2.0;
    const auto r0 = residual(seed);
    const double f0 = r0 ? *r0 : 1.0; // Absent: zero beyond horizon, treat as large
    ExpandedBracket br{};
    if (f0 > 0.0)
        br = expand_bracket_up([&](double a) { return residual(a); }, seed, f0,
                               1.0, 1.5, 1e7, 1.0, "alpha_for_first_zero");
    else
        br = expand_bracket_down([&](double a) { return residual(a); }, seed,
                                 f0, 1.6, 1e-12, 1.0, "alpha_for_first_zero");
    auto plain = [&](double a) {
        const auto r = residual(a);
        return r ? *r : 1.0;
    };
    return solve_bracketed(plain, br.lo, br.hi, br.flo, br.fhi, alpha_tol).root;
}

/// Solves stilde^{sigma,1}_alpha = z for alpha (outermost mapped zero of the
/// infinity shot; strictly increasing in alpha, defined above the threshold).
inline double alpha_tilde_for_zero(double z, Sign sign, int dimension,
                                   double alpha_tol = 1e-10,
                                   const ShotOptions& base = {}) {
    if (!(z > 0.0))
        throw std::invalid_argument("alpha_tilde_for_zero: z must be positive");
    const double floor = infinity_alpha_threshold(dimension) + 1e-9;
    ShotOptions opts = base;
    opts.horizon = std::max(opts.horizon_for(dimension), 3.0 / std::min(z, 1.0));
    auto residual = [&](double a) -> std::optional<double> {
        if (a <= floor) return std::nullopt;
        const auto v = zero_map(a, sign, 1, ShotSide::FromInfinity, dimension, opts);
        if (!v) return std::nullopt;
        return *v - z; // increasing in alpha
    };
    const double seed = std::max(2.0, floor * 2.0 + 0.1);
    const auto r0 = residual(seed);
    const double f0 = r0 ? *r0 : -1.0; // Absent near threshold: map below any z
    ExpandedBracket br{};
    if (f0 < 0.0)
        br = expand_bracket_up([&](double a) { return residual(a); }, seed, f0,
                               1.0, 1.5, 1e7, -1.0, "alpha_tilde_for_zero");
    else
        br = expand_bracket_down([&](double a) { return residual(a); }, seed,
                                 f0, 1.5, floor, -1.0, "alpha_tilde_for_zero");
    auto plain = [&](double a) {
        const auto r = residual(a);
        return r ? *r : -1.0;
    };
    return solve_bracketed(plain, br.lo, br.hi, br.flo, br.fhi, alpha_tol).root;
}

// ---------------------------------------------------------------------------
// Tail classification
// ---------------------------------------------------------------------------

/// Classifies the piece emanating outward from the zero z with sign sigma for
/// a profile of homogeneity alpha, by comparing alpha with the tilde-map
/// value at z: equal (within tol) -> Algebraic (s^{-alpha} f bounded);
/// alpha below -> Exponential growth; alpha above -> a further sign change
/// exists beyond, so the piece is not a genuine tail (reported Truncated).
inline TailClass classify_tail(double z, Sign outward_sign,
                               const ProblemParams& p, double tol = 1e-6,
                               const ShotOptions& base = {}) {
    p.validate();
    if (!(p.alpha > infinity_alpha_threshold(p.dimension)))
        throw UnsupportedError("classify_tail: alpha at or below the infinity-shot threshold");
    const double at = alpha_tilde_for_zero(z, outward_sign, p.dimension, 1e-10, base);
    if (std::fabs(p.alpha - at) <= tol) return TailClass::Algebraic;
    return p.alpha < at ? TailClass::Exponential : TailClass::Truncated;
}

// ---------------------------------------------------------------------------
// Origin shot
// ---------------------------------------------------------------------------

inline SelfSimilarProfile shoot_origin(const ProblemParams& p, Sign origin_sign,
                                       const ShotOptions& opts = {}) {
    p.validate();
    SelfSimilarProfile prof;
    prof.params = p;
    prof.origin_sign = origin_sign;
    const SeriesState st = series_start_origin(p, origin_sign, prof.origin_epsilon);

    auto rhs_of = [&p](Branch b) -> Rhs2 {
        return [&p, b](double s, double f, double fp) {
            return profile_rhs(s, f, fp, b, p);
        };
    };
    auto scale_of = [&p](Branch b) -> TermScale {
        return [&p, b](double s, double f, double fp) {
            return profile_term_scale(s, f, fp, b, p);
        };
    };

    SwitchingRun run = run_switching_shot(
        rhs_of, scale_of, st.s, st.f, st.fp, branch_of_sign(origin_sign),
        opts.horizon_for(p.dimension), opts.max_zeros, opts.ode,
        opts.fixed_branch);
    prof.pieces = std::move(run.pieces);
    prof.zeros = std::move(run.zeros);
    prof.final_stop = run.final_stop;
    prof.s_end = run.s_end;

    if (run.zero_budget_exhausted) {
        prof.tail = TailClass::Truncated;
    } else if (run.final_stop == StopReason::Overflow) {
        prof.tail = TailClass::Exponential;
    } else if (opts.classify && !prof.zeros.empty() &&
               p.alpha > infinity_alpha_threshold(p.dimension)) {
        const Sign outward = (prof.zeros.size() % 2 == 0)
                                 ? origin_sign
                                 : flip(origin_sign);
        prof.tail = classify_tail(prof.zeros.back().s, outward, p,
                                  opts.classify_tol, opts);
    } else {
        prof.tail = TailClass::Truncated;
    }
    return prof;
}

/// Sign of the profile just outside its last zero.
inline Sign outward_sign(const SelfSimilarProfile& prof) {
    return (prof.zeros.size() % 2 == 0) ? prof.origin_sign
                                        : flip(prof.origin_sign);
}

// ---------------------------------------------------------------------------
// Variable-change helpers (t = 1/s), used by tests and tail evaluation
// ---------------------------------------------------------------------------

/// (t, h, h') corresponding to profile data (s, f, f').
inline SeriesState to_infinity_state(double alpha, double s, double f, double fp) {
    const double t = 1.0 / s;
    const double sa = std::pow(s, alpha);
    return {t, f / sa, alpha * std::pow(s, 1.0 - alpha) * f -
                           std::pow(s, 2.0 - alpha) * fp};
}

/// (s, f, f') corresponding to infinity-side data (t, h, h').
inline SeriesState to_profile_state(double alpha, double t, double h, double hp) {
    const double s = 1.0 / t;
    const double sa = std::pow(s, alpha);
    return {s, sa * h, alpha * sa / s * h - sa / (s * s) * hp};
}

} // namespace selfsim
