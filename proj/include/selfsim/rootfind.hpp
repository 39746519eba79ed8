#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "selfsim/errors.hpp"

namespace selfsim {

struct RootResult {
    double root = 0.0;
    double f_at_root = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    int evaluations = 0;
};

/// Safeguarded bisection/secant solve on a bracket with opposite signs.
/// Stops when the bracket is narrower than xtol (absolute). The function is
/// assumed continuous on [lo, hi].
inline RootResult solve_bracketed(const std::function<double(double)>& f,
                                  double lo, double hi, double flo, double fhi,
                                  double xtol, int max_iter = 200) {
    if (!(lo < hi))
        throw std::invalid_argument("solve_bracketed: empty bracket");
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::invalid_argument("solve_bracketed: no sign change on bracket");
    int evals = 0;
    for (int it = 0; it < max_iter && (hi - lo) > xtol; ++it) {
        // Secant proposal, clipped away from the bracket ends; fall back to
        // the midpoint whenever the proposal is degenerate.
        double mid = 0.5 * (lo + hi);
        double x = mid;
        const double denom = fhi - flo;
        if (denom != 0.0) {
            const double sec = hi - fhi * (hi - lo) / denom;
            const double guard = 0.1 * (hi - lo);
            if (sec > lo + guard && sec < hi - guard) x = sec;
        }
        const double fx = f(x);
        ++evals;
        if (fx == 0.0) return {x, 0.0, x, x, evals};
        if ((fx > 0.0) == (flo > 0.0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
    }
    const double root = 0.5 * (lo + hi);
    return {root, std::fabs(flo) < std::fabs(fhi) ? flo : fhi, lo, hi, evals};
}

inline RootResult solve_bracketed(const std::function<double(double)>& f,
                                  double lo, double hi, double xtol,
                                  int max_iter = 200) {
    return solve_bracketed(f, lo, hi, f(lo), f(hi), xtol, max_iter);
}

/// Expands a bracket geometrically from a seed point until the predicate
/// value changes sign or the cap is passed. `f` may return nullopt where it
/// is undefined; undefined samples are mapped to `undefined_sign` (the sign
/// limit the caller knows holds there). Returns the bracket with f-values.
struct ExpandedBracket {
    double lo, hi, flo, fhi;
};

inline ExpandedBracket
expand_bracket_up(const std::function<std::optional<double>(double)>& f,
                  double seed, double seed_value, double step, double factor,
                  double cap, double undefined_sign,
                  const std::string& what) {
    double lo = seed, flo = seed_value;
    double h = step;
    while (lo + h <= cap + 1e-12) {
        const double hi = lo + h;
        const auto v = f(hi);
        const double fhi = v ? *v : undefined_sign;
        if ((fhi > 0.0) != (flo > 0.0)) return {lo, hi, flo, fhi};
        lo = hi;
        flo = fhi;
        h *= factor;
    }
    throw BracketExhausted("expand_bracket_up: no sign change before cap (" + what + ")");
}

inline ExpandedBracket
expand_bracket_down(const std::function<std::optional<double>(double)>& f,
                    double seed, double seed_value, double factor,
                    double floor_value, double undefined_sign,
                    const std::string& what) {
    double hi = seed, fhi = seed_value;
    double lo = seed / factor;
    while (lo > floor_value) {
        const auto v = f(lo);
        const double flo = v ? *v : undefined_sign;
        if ((flo > 0.0) != (fhi > 0.0)) return {lo, hi, flo, fhi};
        hi = lo;
        fhi = flo;
        lo /= factor;
    }
    throw BracketExhausted("expand_bracket_down: no sign change above floor (" + what + ")");
}

} // namespace selfsim
