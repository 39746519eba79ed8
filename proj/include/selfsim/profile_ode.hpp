#pragma once

// The radial self-similar profile equation. With w(x,t) = (-t)^{alpha/2}
// f(|x|/sqrt(-t)) the switching diffusion beta(w)_t = Lap w, beta(r) = 2r - r+,
// reduces to the piecewise-linear ODE
//
//   f'' + ((N-1)/s - lambda*s/2) f' + (lambda*alpha/2) f = 0,
//
// with lambda = 1 where f > 0 and lambda = 2 where f < 0. Valid profiles have
// f(0) != 0, f'(0) = 0 and are glued C^{1,1} at their zeros by restarting the
// integration on the opposite branch.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "selfsim/branch.hpp"
#include "selfsim/errors.hpp"
#include "selfsim/rk.hpp"

namespace selfsim {

/// f'' from the profile equation on a fixed branch.
inline double profile_rhs(double s, double f, double fp, Branch branch,
                          const ProblemParams& p) {
    const double lam = lambda_of(branch);
    const double drift = (p.dimension - 1) / s - 0.5 * lam * s;
    return -drift * fp - 0.5 * lam * p.alpha * f;
}

/// Magnitude of the individual ODE terms; scales the integrator's dense
/// residual gate.
inline double profile_term_scale(double s, double f, double fp, Branch branch,
                                 const ProblemParams& p) {
    const double lam = lambda_of(branch);
    const double drift = std::fabs((p.dimension - 1) / s) + 0.5 * lam * std::fabs(s);
    return drift * std::fabs(fp) + 0.5 * lam * p.alpha * std::fabs(f);
}

/// Start state for the origin shot at s = epsilon, from the even series
/// f = f0 (1 + a s^2 + b s^4 + O(s^6)) with
///   a = -lambda*alpha/(4N),  b = lambda*a*(2-alpha)/(8N+16).
/// With the default epsilon = 1e-6 the truncated O(s^6) term is below 1e-20.
struct SeriesState {
    double s, f, fp;
};

inline SeriesState series_start_origin(const ProblemParams& p, Sign origin_sign,
                                       double epsilon = 1e-6) {
    p.validate();
    if (!(epsilon > 0.0) || epsilon > 1e-2)
        throw std::invalid_argument("series_start_origin: epsilon out of range");
    const double lam = lambda_of(branch_of_sign(origin_sign));
    const double N = p.dimension;
    const double a = -lam * p.alpha / (4.0 * N);
    const double b = lam * a * (2.0 - p.alpha) / (8.0 * N + 16.0);
    const double f0 = signed_unit(origin_sign);
    const double e2 = epsilon * epsilon;
    return {epsilon, f0 * (1.0 + a * e2 + b * e2 * e2),
            f0 * (2.0 * a * epsilon + 4.0 * b * e2 * epsilon)};
}

/// A zero of the profile together with the (nonzero) slope there.
struct ZeroCrossing {
    double s;
    double fp;
};

/// Maximal interval of one sign, integrated on a single branch.
struct ProfilePiece {
    Branch branch;
    double s_begin, s_end;
    DensePiece dense;
};

enum class TailClass { Algebraic, Exponential, Truncated };

constexpr const char* to_string(TailClass t) noexcept {
    switch (t) {
        case TailClass::Algebraic: return "Algebraic";
        case TailClass::Exponential: return "Exponential";
        default: return "Truncated";
    }
}

/// Outcome of a switching shot (shared by the origin and infinity shooters):
/// pieces of alternating sign, the zeros between them, and how the run ended.
struct SwitchingRun {
    std::vector<ProfilePiece> pieces;
    std::vector<ZeroCrossing> zeros;
    StopReason final_stop = StopReason::Horizon;
    double s_end = 0.0;
    double y_end = 0.0, yp_end = 0.0;
    bool zero_budget_exhausted = false;
};

/// Integrates the switching system from (s0, y0, yp0), restarting on the
/// opposite branch at every zero (or on the same branch in fixed-branch
/// mode), until the horizon, an overflow, or the zero budget stops it.
/// `rhs_of` and `scale_of` supply the per-branch ODE; `start_branch` must
/// match sign(y0) (or sign(yp0) when y0 == 0).
inline SwitchingRun run_switching_shot(
    const std::function<Rhs2(Branch)>& rhs_of,
    const std::function<TermScale(Branch)>& scale_of, double s0, double y0,
    double yp0, Branch start_branch, double horizon, int max_zeros,
    const OdeOptions& opt, bool fixed_branch = false) {
    SwitchingRun run;
    double s = s0, y = y0, yp = yp0;
    Branch branch = start_branch;
    int sign = (y != 0.0) ? (y > 0.0 ? 1 : -1) : (yp > 0.0 ? 1 : -1);

    while (true) {
        OdeOptions piece_opt = opt;
        piece_opt.initial_step = std::min(opt.max_step, 0.25 * std::max(std::fabs(s), 1e-8));
        PieceRun pr = integrate_until_sign_change(rhs_of(branch), s, y, yp,
                                                  horizon, piece_opt, sign,
                                                  scale_of(branch));
        run.pieces.push_back({branch, s, pr.s_stop, std::move(pr.dense)});
        run.final_stop = pr.stop;
        run.s_end = pr.s_stop;
        run.y_end = pr.y_stop;
        run.yp_end = pr.yp_stop;
        if (pr.stop != StopReason::Event) return run;

        run.zeros.push_back({pr.s_stop, pr.yp_stop});
        if (static_cast<int>(run.zeros.size()) >= max_zeros) {
            run.zero_budget_exhausted = true;
            return run;
        }
        s = pr.s_stop;
        y = 0.0;
        yp = pr.yp_stop;
        sign = -sign;
        if (!fixed_branch) branch = opposite(branch);
    }
}

/// Self-similar profile from the origin shot: normalized f(0) = +-1,
/// f'(0) = 0, pieces glued C^{1,1} at the recorded zeros.
struct SelfSimilarProfile {
    ProblemParams params;
    Sign origin_sign = Sign::Plus;
    double origin_epsilon = 1e-6;
    std::vector<ProfilePiece> pieces;
    std::vector<ZeroCrossing> zeros;
    TailClass tail = TailClass::Truncated;
    StopReason final_stop = StopReason::Horizon;
    double s_end = 0.0;

    double s_max() const { return s_end; }

    /// (f, f') at s; below the series start the closed-form series is used.
    StepRecord::Eval at(double s) const {
        if (s < 0.0)
            throw std::out_of_range("SelfSimilarProfile::at: s < 0");
        if (s <= origin_epsilon) {
            const double lam = lambda_of(branch_of_sign(origin_sign));
            const double N = params.dimension;
            const double a = -lam * params.alpha / (4.0 * N);
            const double b = lam * a * (2.0 - params.alpha) / (8.0 * N + 16.0);
            const double f0 = signed_unit(origin_sign);
            const double s2 = s * s;
            return {f0 * (1.0 + a * s2 + b * s2 * s2),
                    f0 * (2.0 * a * s + 4.0 * b * s2 * s),
                    f0 * (2.0 * a + 12.0 * b * s2)};
        }
        if (s > s_end * (1.0 + 1e-12))
            throw std::out_of_range("SelfSimilarProfile::at: beyond integrated span");
        for (const auto& piece : pieces)
            if (s <= piece.s_end || &piece == &pieces.back())
                return piece.dense.at(std::min(s, piece.s_end));
        throw std::logic_error("SelfSimilarProfile::at: no covering piece");
    }

    double value(double s) const { return at(s).y; }

    /// Branch in effect at s (by piece, not by sign, so it is well defined
    /// at the switching points' closure).
    Branch branch_at(double s) const {
        for (const auto& piece : pieces)
            if (s <= piece.s_end || &piece == &pieces.back()) return piece.branch;
        return pieces.back().branch;
    }
};

/// Residual of the profile equation at s using only dense-output data.
inline double profile_residual(const SelfSimilarProfile& prof, double s) {
    const auto e = prof.at(s);
    const Branch b = prof.branch_at(s);
    return e.ypp - profile_rhs(s, e.y, e.yp, b, prof.params);
}

} // namespace selfsim
