#pragma once

// Independent PDE-level oracle: march w_t = gamma(w) Delta w radially with
// explicit finite differences and check that self-similar initial data stays
// self-similar, i.e. w(0,t) = f(0) (-t)^{alpha/2}.
//
// The multiplier follows the sign of w itself: the equation in divergence-in-
// time form is beta(w)_t = Delta w with beta(y) = 2y - y^+, so beta'(w) is 1
// where w > 0 and 2 where w < 0, and w_t = Delta w / beta'(w) = gamma(w)
// Delta w with gamma in {1, 1/2} switching on sign(w). (Switching on the sign
// of the discrete Laplacian instead would march a different equation, whose
// self-similar solutions are not these profiles.)
//
// Everything here is deliberately low-tech - uniform grid, ghost-node origin
// stencil, explicit Euler under a CFL bound - so that agreement with the
// shooting/eigenvalue routes is evidence about the profiles, not about shared
// machinery.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "selfsim/branch.hpp"
#include "selfsim/errors.hpp"
#include "selfsim/exponents.hpp"

namespace selfsim {

struct RadialGrid {
    double h = 1.0 / 400;
    double radius = 2.0;
    int dimension = 1;

    int nodes() const { return static_cast<int>(std::lround(radius / h)) + 1; }
    double r(int j) const { return j * h; }

    void validate() const {
        if (!(h > 0.0) || !(radius >= 3.0 * h) || dimension < 1)
            throw std::invalid_argument("RadialGrid: need h > 0, radius >= 3h, N >= 1");
        const double cells = radius / h;
        if (std::fabs(cells - std::lround(cells)) > 1e-9)
            throw std::invalid_argument("RadialGrid: radius must be a multiple of h");
    }
};

/// Second-order discrete radial Laplacian w'' + (N-1)/r w'. The origin row
/// uses the symmetric ghost node, Delta w(0) ~ 2N (w1 - w0)/h^2; the rim row
/// is returned as 0 (its value is prescribed, never advanced). Exact on
/// quadratics in r at every node including the origin.
inline std::vector<double> radial_laplacian(const std::vector<double>& w,
                                            const RadialGrid& grid) {
    grid.validate();
    const std::size_t n = w.size();
    if (n != static_cast<std::size_t>(grid.nodes()))
        throw std::invalid_argument("radial_laplacian: value count does not match the grid");
    std::vector<double> lap(n, 0.0);
    const double h2 = grid.h * grid.h;
    const double N = grid.dimension;
    lap[0] = 2.0 * N * (w[1] - w[0]) / h2;
    for (std::size_t j = 1; j + 1 < n; ++j) {
        const double rj = grid.r(static_cast<int>(j));
        lap[j] = (w[j + 1] - 2.0 * w[j] + w[j - 1]) / h2 +
                 (N - 1.0) / rj * (w[j + 1] - w[j - 1]) / (2.0 * grid.h);
    }
    return lap;
}

struct EvolveOptions {
    double t0 = -1.0;
    double t_end = -0.05;
    double cfl = 0.9;           ///< Delta t = cfl h^2 / (2N); 1 is the stability edge
    long trace_stride = 0;      ///< record every k-th step; 0 = aim for ~512 samples
    double blowup_factor = 10.0;///< instability guard on the max norm
};

struct CenterSample {
    double t;
    double w0;
    double ratio; ///< w0 / center law; 0 when no law was supplied
};

struct EvolveResult {
    RadialGrid grid;
    std::vector<CenterSample> trace; ///< includes the first and last step
    std::vector<double> w_final;
    double t_final = 0.0;
    long steps = 0;
    bool stable = true;
    int sign_changes_min = 0;  ///< over the sampled times
    int sign_changes_max = 0;
    double max_ratio_dev = 0.0; ///< max |ratio - 1| over the samples
};

namespace detail {

inline int count_sign_changes(const std::vector<double>& w) {
    int changes = 0;
    int prev = 0;
    for (double v : w) {
        const int s = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++changes;
        prev = s;
    }
    return changes;
}

} // namespace detail

/// Explicit march of w_t = gamma(w) Delta w from nodal data `w0` with the
/// Dirichlet value `boundary(t)` at the rim. `center_law(t)`, when given,
/// fills the ratio column of the trace (the self-similarity diagnostic).
inline EvolveResult evolve_radial(std::vector<double> w0, const RadialGrid& grid,
                                  const std::function<double(double)>& boundary,
                                  const EvolveOptions& opt = {},
                                  const std::function<double(double)>& center_law = {}) {
    grid.validate();
    if (!(opt.t_end > opt.t0) || !(opt.t_end < 0.0))
        throw std::invalid_argument("evolve_radial: need t0 < t_end < 0");
    if (!(opt.cfl > 0.0) || opt.cfl > 1.0)
        throw std::invalid_argument("evolve_radial: cfl must lie in (0, 1]");
    const std::size_t n = w0.size();
    if (n != static_cast<std::size_t>(grid.nodes()))
        throw std::invalid_argument("evolve_radial: value count does not match the grid");

    const double N = grid.dimension;
    const double h2 = grid.h * grid.h;
    const double dt_max = opt.cfl * h2 / (2.0 * N);
    const long steps = static_cast<long>(std::ceil((opt.t_end - opt.t0) / dt_max));
    const double dt = (opt.t_end - opt.t0) / steps;
    const long stride =
        opt.trace_stride > 0 ? opt.trace_stride : std::max<long>(1, steps / 512);

    EvolveResult res;
    res.grid = grid;
    res.steps = steps;

    double w_scale = 0.0;
    for (double v : w0) w_scale = std::max(w_scale, std::fabs(v));

    std::vector<double> w = std::move(w0);
    std::vector<double> lap(n, 0.0);
    bool first_sample = true;

    auto record = [&](double t) {
        CenterSample smp{t, w[0], 0.0};
        if (center_law) {
            const double ref = center_law(t);
            smp.ratio = ref != 0.0 ? w[0] / ref : 0.0;
            res.max_ratio_dev =
                std::max(res.max_ratio_dev, std::fabs(smp.ratio - 1.0));
        }
        res.trace.push_back(smp);
        const int changes = detail::count_sign_changes(w);
        if (first_sample) {
            res.sign_changes_min = res.sign_changes_max = changes;
            first_sample = false;
        } else {
            res.sign_changes_min = std::min(res.sign_changes_min, changes);
            res.sign_changes_max = std::max(res.sign_changes_max, changes);
        }
    };

    record(opt.t0);
    double t = opt.t0;
    for (long step = 1; step <= steps; ++step) {
        lap[0] = 2.0 * N * (w[1] - w[0]) / h2;
        for (std::size_t j = 1; j + 1 < n; ++j) {
            const double rj = grid.r(static_cast<int>(j));
            lap[j] = (w[j + 1] - 2.0 * w[j] + w[j - 1]) / h2 +
                     (N - 1.0) / rj * (w[j + 1] - w[j - 1]) / (2.0 * grid.h);
        }
        for (std::size_t j = 0; j + 1 < n; ++j)
            w[j] += dt * gamma_of(branch_of(w[j])) * lap[j];
        t = opt.t0 + step * dt;
        w[n - 1] = boundary(t);

        double wmax = 0.0;
        for (double v : w) wmax = std::max(wmax, std::fabs(v));
        if (!std::isfinite(wmax) || wmax > opt.blowup_factor * w_scale) {
            res.stable = false;
            record(t);
            break;
        }
        if (step % stride == 0 || step == steps) record(t);
    }
    res.t_final = t;
    res.w_final = std::move(w);
    return res;
}

/// Self-similar run from a matched eigen-profile: initial data f(r) at
/// t0 = -1, rim data from the self-similar extension (the tail evaluator
/// covers every radius), center law f(0) (-t)^{alpha/2}. `claimed_alpha`
/// defaults to the profile's own homogeneity; passing a wrong value turns
/// the ratio column into a negative control that must drift.
inline EvolveResult evolve_profile(const MatchedProfile& prof,
                                   const RadialGrid& grid,
                                   const EvolveOptions& opt = {},
                                   double claimed_alpha = 0.0) {
    grid.validate();
    if (grid.dimension != prof.params.dimension)
        throw std::invalid_argument("evolve_profile: grid/profile dimension mismatch");
    if (!(grid.radius >= 3.0 * prof.glue_zero))
        throw std::invalid_argument("evolve_profile: rim closer than 3x the largest zero");
    if (!(opt.t0 == -1.0))
        throw std::invalid_argument("evolve_profile: initial data is normalized at t0 = -1");
    const double alpha_claim =
        claimed_alpha != 0.0 ? claimed_alpha : prof.alpha;

    std::vector<double> w0(grid.nodes());
    for (int j = 0; j < grid.nodes(); ++j) w0[j] = prof.at(grid.r(j)).y;

    const double R = grid.radius;
    auto boundary = [prof, R](double t) {
        const double mt = -t;
        return std::pow(mt, 0.5 * prof.alpha) * prof.at(R / std::sqrt(mt)).y;
    };
    const double f0 = signed_unit(prof.sign0);
    auto law = [f0, alpha_claim](double t) {
        return f0 * std::pow(-t, 0.5 * alpha_claim);
    };
    return evolve_radial(std::move(w0), grid, boundary, opt, law);
}

/// Difference quotients |w(0,-tau) - w(0,0^-)| / tau at tau = 2^{-m}; the
/// self-similar center value vanishes at t = 0^-, so the quotients behave
/// like tau^{alpha/2 - 1}: unbounded exactly when alpha < 2.
struct QuotientRow {
    double tau;
    double quotient;
};

struct LipschitzReport {
    std::vector<QuotientRow> rows; ///< m = 1..m_max, tau descending
    double slope = 0.0;            ///< least-squares slope of log2 q vs log2 tau
    double max_quotient = 0.0;
    bool quotients_grow = false;   ///< strictly increasing as tau halves
};

inline LipschitzReport lipschitz_demo(const EvolveResult& run, int m_max = 10) {
    if (m_max < 2) throw std::invalid_argument("lipschitz_demo: need m_max >= 2");
    if (run.trace.size() < 2)
        throw std::invalid_argument("lipschitz_demo: empty trace");
    LipschitzReport rep;
    rep.rows.reserve(m_max);

    // Center value at t by linear interpolation on the recorded trace.
    auto center_at = [&run](double t) {
        const auto& tr = run.trace;
        if (t < tr.front().t || t > tr.back().t)
            throw std::invalid_argument("lipschitz_demo: tau outside the computed span");
        std::size_t lo = 0, hi = tr.size() - 1;
        while (lo + 1 < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (tr[mid].t <= t)
                lo = mid;
            else
                hi = mid;
        }
        const double span = tr[hi].t - tr[lo].t;
        if (!(span > 0.0)) return tr[lo].w0;
        const double u = (t - tr[lo].t) / span;
        return (1.0 - u) * tr[lo].w0 + u * tr[hi].w0;
    };

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    bool grow = true;
    double prev_q = -1.0;
    for (int m = 1; m <= m_max; ++m) {
        const double tau = std::ldexp(1.0, -m);
        const double q = std::fabs(center_at(-tau)) / tau;
        rep.rows.push_back({tau, q});
        rep.max_quotient = std::max(rep.max_quotient, q);
        if (prev_q >= 0.0 && q <= prev_q) grow = false;
        prev_q = q;
        const double x = -static_cast<double>(m); // log2 tau
        const double y = std::log2(q);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = m_max;
    rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    rep.quotients_grow = grow;
    return rep;
}

} // namespace selfsim
