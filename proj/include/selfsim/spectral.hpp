#pragma once

// The spectral side of the profile equation. On a fixed branch the equation
// in divergence form reads
//
//   -(w f')' = (lambda alpha / 2) w f,   w(s) = s^{N-1} e^{-lambda s^2/4},
//
// so a branch-consistent profile piece vanishing at its endpoints (or
// starting at s = 0, where the flux w f' vanishes) is a ground state of the
// weighted Sturm-Liouville problem on that piece: its Rayleigh quotient
// against mu+ (lambda = 1) is alpha/2, against mu- (lambda = 2) it is alpha.
// This header provides the two measures, composite Gauss-Legendre Rayleigh
// quotients, and an independent finite-volume oracle for the minimal
// eigenvalue -- a route that re-derives alpha from a profile's zeros without
// ever shooting the ODE.

#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "selfsim/branch.hpp"
#include "selfsim/check.hpp"
#include "selfsim/errors.hpp"
#include "selfsim/profile_ode.hpp"

namespace selfsim {

enum class MeasureKind { MuPlus, MuMinus };

constexpr const char* to_string(MeasureKind k) noexcept {
    return k == MeasureKind::MuPlus ? "mu+" : "mu-";
}

/// Gaussian rate of the measure; mu+ pairs with the positive branch.
constexpr double measure_lambda(MeasureKind k) noexcept {
    return k == MeasureKind::MuPlus ? 1.0 : 2.0;
}

constexpr MeasureKind measure_of(Branch b) noexcept {
    return b == Branch::PositiveRegion ? MeasureKind::MuPlus
                                       : MeasureKind::MuMinus;
}

/// Weight density s^{N-1} e^{-lambda s^2/4}.
inline double measure_weight(MeasureKind k, double s, int dimension) {
    return std::pow(s, dimension - 1) *
           std::exp(-0.25 * measure_lambda(k) * s * s);
}

namespace detail {

// 8-point Gauss-Legendre rule on [-1, 1] (positive half; the rule is even).
inline constexpr double kGlNode[4] = {0.18343464249564980, 0.52553240991632899,
                                      0.79666647741362674, 0.96028985649753623};
inline constexpr double kGlWeight[4] = {0.36268378337836198,
                                        0.31370664587788729,
                                        0.22238103445337447,
                                        0.10122853629037626};

} // namespace detail

/// Composite 8-point Gauss-Legendre integral of f over (a, b).
template <class F>
double integrate_gl8(F&& f, double a, double b, int panels) {
    if (!(b > a)) throw std::invalid_argument("integrate_gl8: empty interval");
    if (panels < 1) throw std::invalid_argument("integrate_gl8: panels < 1");
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        double acc = 0.0;
        for (int j = 0; j < 4; ++j) {
            const double dx = 0.5 * h * detail::kGlNode[j];
            acc += detail::kGlWeight[j] * (f(mid + dx) + f(mid - dx));
        }
        total += 0.5 * h * acc;
    }
    return total;
}

/// Mass of the measure on (a, b).
inline double measure_mass(MeasureKind kind, int dimension, double a, double b,
                           int panels = 200) {
    return integrate_gl8(
        [&](double s) { return measure_weight(kind, s, dimension); }, a, b,
        panels);
}

/// Rayleigh quotient int (f')^2 dmu / int f^2 dmu over (a, b). The sampler
/// must yield f and f' (dense profile output or a closed form); both
/// integrals share one sweep so each point is sampled once.
template <class F>
double rayleigh(F&& f, double a, double b, MeasureKind kind, int dimension,
                int panels = 64) {
    if (!(b > a)) throw std::invalid_argument("rayleigh: empty interval");
    const double h = (b - a) / panels;
    double num = 0.0, den = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        for (int j = 0; j < 4; ++j) {
            const double dx = 0.5 * h * detail::kGlNode[j];
            for (const double s : {mid + dx, mid - dx}) {
                const auto e = f(s);
                const double wq =
                    0.5 * h * detail::kGlWeight[j] * measure_weight(kind, s, dimension);
                num += wq * e.yp * e.yp;
                den += wq * e.y * e.y;
            }
        }
    }
    if (!(den > 0.0) || !std::isfinite(den) || !std::isfinite(num))
        throw SolverError("rayleigh: vanishing or invalid denominator");
    return num / den;
}

/// Minimal generalized eigenvalue of the finite-volume discretization of
/// -(w f')' = Lambda w f with its ground state.
struct EigenResult {
    double a = 0.0, b = 0.0;
    MeasureKind kind = MeasureKind::MuPlus;
    int dimension = 1;
    int grid_points = 0; ///< mesh cells on [a, b]
    double lambda_min = 0.0;
    double recovered_alpha = 0.0; ///< 2*Lambda for mu+, Lambda for mu-
    std::vector<double> s;           ///< unknown-node coordinates
    std::vector<double> eigenvector; ///< ground state, max-abs normalized
    bool interior_sign_change = false;
    double truncation_tail = 0.0; ///< weight mass beyond b when b caps +inf
};

namespace detail {

/// Pencil eigenvalues strictly below x: the count of negative LDL^T pivots
/// of the tridiagonal A - x B (Sylvester inertia). Run in 80-bit: the pivots
/// subtract x*mass (~x h) from stiffness entries (~1/h), and that head-on
/// cancellation in double floors the smallest eigenvalue at eps/h^2 -- at
/// 1e4 cells on a unit interval that floor (~1e-8) would swamp the O(h^2)
/// discretization error the refinement checks measure.
inline int pencil_count_below(const std::vector<double>& diag,
                              const std::vector<double>& off,
                              const std::vector<double>& mass, double x) {
    int count = 0;
    long double q = (long double)diag[0] - (long double)x * mass[0];
    if (q < 0.0L) ++count;
    for (std::size_t i = 1; i < diag.size(); ++i) {
        long double denom = q;
        if (fabsl(denom) < 1e-290L) denom = denom < 0.0L ? -1e-290L : 1e-290L;
        q = (long double)diag[i] - (long double)x * mass[i] -
            (long double)off[i - 1] * off[i - 1] / denom;
        if (q < 0.0L) ++count;
    }
    return count;
}

/// One inverse-iteration solve (T - sigma I) x = rhs, Thomas elimination
/// with tiny pivots clamped (T is numerically singular at sigma by design).
inline void shifted_solve(const std::vector<double>& d,
                          const std::vector<double>& e, double sigma,
                          double pivot_floor, std::vector<double>& x) {
    const std::size_t n = d.size();
    std::vector<double> diag(n), rhs = x;
    for (std::size_t i = 0; i < n; ++i) diag[i] = d[i] - sigma;
    for (std::size_t i = 1; i < n; ++i) {
        double piv = diag[i - 1];
        if (std::fabs(piv) < pivot_floor)
            piv = piv < 0.0 ? -pivot_floor : pivot_floor;
        const double m = e[i - 1] / piv;
        diag[i] -= m * e[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    double piv = diag[n - 1];
    if (std::fabs(piv) < pivot_floor)
        piv = piv < 0.0 ? -pivot_floor : pivot_floor;
    x[n - 1] = rhs[n - 1] / piv;
    for (std::size_t i = n - 1; i-- > 0;) {
        piv = diag[i];
        if (std::fabs(piv) < pivot_floor)
            piv = piv < 0.0 ? -pivot_floor : pivot_floor;
        x[i] = (rhs[i] - e[i] * x[i + 1]) / piv;
    }
}

} // namespace detail

/// Assembles the self-adjoint finite-volume discretization of
/// -(w f')' = Lambda w f on (a, b) and returns the smallest eigenvalue of
/// the generalized tridiagonal pencil (Sturm bisection) with its ground
/// state (inverse iteration). Dirichlet condition at b and at a > 0; at
/// a = 0 the natural condition f'(0) = 0 (zero flux, the series constraint)
/// is built into the first control volume. Cell masses use one Gauss panel
/// each so the s^{N-1} factor is integrated, not sampled -- the midpoint
/// rule would zero out the first cell for N >= 2.
inline EigenResult discrete_min_eigenvalue(double a, double b, MeasureKind kind,
                                           int dimension, int grid_points) {
    if (!(a >= 0.0) || !(b > a) || !std::isfinite(b))
        throw std::invalid_argument("discrete_min_eigenvalue: bad interval");
    if (grid_points < 100)
        throw std::invalid_argument(
            "discrete_min_eigenvalue: need at least 100 grid points");

    EigenResult res;
    res.a = a;
    res.b = b;
    res.kind = kind;
    res.dimension = dimension;
    res.grid_points = grid_points;

    const int M = grid_points;
    const double h = (b - a) / M;
    const bool natural0 = (a == 0.0);
    const int n = natural0 ? M : M - 1; // unknowns; Dirichlet nodes excluded
    const int first = natural0 ? 0 : 1;
    auto node = [&](int i) { return a + i * h; };
    auto w = [&](double s) { return measure_weight(kind, s, dimension); };

    // Symmetric pencil A x = Lambda B x: A from half-node fluxes, B from
    // per-cell masses.
    std::vector<double> diag(n), off(n - 1), mass(n);
    for (int j = 0; j < n; ++j) {
        const int i = first + j;
        const double s = node(i);
        const double wl = w(s - 0.5 * h); // dropped at the no-flux origin
        const double wr = w(s + 0.5 * h);
        diag[j] = ((natural0 && i == 0) ? wr : wl + wr) / h;
        if (j + 1 < n) off[j] = -wr / h;
        const double cl = std::max(a, s - 0.5 * h);
        const double cr = std::min(b, s + 0.5 * h);
        mass[j] = integrate_gl8(w, cl, cr, 1);
    }

    // Equivalent standard form C = B^{-1/2} A B^{-1/2}: Gershgorin bounds
    // for the bisection and the matrix the eigenvector solve runs on.
    std::vector<double> d(n), e(n - 1);
    for (int j = 0; j < n; ++j) d[j] = diag[j] / mass[j];
    for (int j = 0; j + 1 < n; ++j)
        e[j] = off[j] / std::sqrt(mass[j] * mass[j + 1]);

    // Smallest eigenvalue by bisection on the pencil's Sturm counts.
    double lo = d[0], hi = d[0];
    for (int j = 0; j < n; ++j) {
        const double r = (j > 0 ? std::fabs(e[j - 1]) : 0.0) +
                         (j + 1 < n ? std::fabs(e[j]) : 0.0);
        lo = std::min(lo, d[j] - r);
        hi = std::max(hi, d[j] + r);
    }
    lo = std::min(lo, 0.0);
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::fabs(hi));
         ++it) {
        const double mid = 0.5 * (lo + hi);
        if (detail::pencil_count_below(diag, off, mass, mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }
    const double lambda = 0.5 * (lo + hi);

    // Ground state by inverse iteration at the converged shift.
    double dmax = 0.0;
    for (int j = 0; j < n; ++j) dmax = std::max(dmax, std::fabs(d[j]));
    const double pivot_floor = 1e-14 * dmax;
    std::vector<double> v(n, 1.0);
    for (int it = 0; it < 3; ++it) {
        detail::shifted_solve(d, e, lambda, pivot_floor, v);
        double vmax = 0.0;
        for (double x : v) vmax = std::max(vmax, std::fabs(x));
        if (!(vmax > 0.0) || !std::isfinite(vmax))
            throw SolverError("discrete_min_eigenvalue: inverse iteration failed");
        for (double& x : v) x /= vmax;
    }
    // Consistency: the iterate's Rayleigh quotient must sit on the bisected
    // eigenvalue, else the iteration latched onto a different vector. The
    // double-precision C carries its entries' rounding (~eps/h^2 absolute),
    // so this is a gross-mismatch guard, not a precision statement.
    double vtv = 0.0, vtc = 0.0;
    for (int j = 0; j < n; ++j) {
        double cv = d[j] * v[j];
        if (j > 0) cv += e[j - 1] * v[j - 1];
        if (j + 1 < n) cv += e[j] * v[j + 1];
        vtv += v[j] * v[j];
        vtc += v[j] * cv;
    }
    if (std::fabs(vtc / vtv - lambda) > 1e-6 * std::max(1.0, std::fabs(lambda)))
        throw SolverError("discrete_min_eigenvalue: eigenvector did not converge");

    // Back to the mass-weighted variable, normalized with the peak positive.
    res.s.resize(n);
    res.eigenvector.resize(n);
    double xmax = 0.0;
    int argmax = 0;
    for (int j = 0; j < n; ++j) {
        res.s[j] = node(first + j);
        res.eigenvector[j] = v[j] / std::sqrt(mass[j]);
        if (std::fabs(res.eigenvector[j]) > xmax) {
            xmax = std::fabs(res.eigenvector[j]);
            argmax = j;
        }
    }
    const double scale = (res.eigenvector[argmax] > 0.0 ? 1.0 : -1.0) / xmax;
    for (double& x : res.eigenvector) x *= scale;
    for (int j = 0; j < n; ++j)
        if (res.eigenvector[j] < -1e-7) res.interior_sign_change = true;

    res.lambda_min = lambda;
    res.recovered_alpha =
        kind == MeasureKind::MuPlus ? 2.0 * lambda : lambda;
    return res;
}

/// Eigen-oracle on (a, +inf): truncated at s_max with a Dirichlet cap. The
/// reported tail is the weight mass beyond the cap, which bounds the
/// truncation's effect on the quotient relative to the trapped mass.
inline EigenResult discrete_min_eigenvalue_truncated(double a, MeasureKind kind,
                                                     int dimension,
                                                     int grid_points,
                                                     double s_max) {
    if (!(s_max > a))
        throw std::invalid_argument(
            "discrete_min_eigenvalue_truncated: cap below interval start");
    EigenResult res = discrete_min_eigenvalue(a, s_max, kind, dimension, grid_points);
    res.truncation_tail = measure_mass(kind, dimension, s_max, s_max + 20.0);
    return res;
}

struct SpectralVerifyOptions {
    int grid_points = 10000;
    double rayleigh_tol = 1e-5; ///< per-piece quotient identity
    double alpha_tol = 1e-3;    ///< discrete-oracle recovery of alpha
    int rayleigh_panels = 64;
};

/// Spectral cross-examination of a shot profile against its claimed alpha:
/// per-piece Rayleigh identities (alpha/2 on mu+, alpha on mu-), the
/// discrete minimal eigenvalue on (0, first zero) with positivity and
/// simplicity of the ground state, and the nested-interval comparison --
/// shrinking the domain strictly raises the minimal eigenvalue, i.e. the
/// two intervals sample two homogeneities in the right order.
inline std::vector<CheckResult> verify_minimal_eigenvalue(
    const SelfSimilarProfile& prof, const SpectralVerifyOptions& opt = {}) {
    if (prof.zeros.empty())
        throw std::invalid_argument("verify_minimal_eigenvalue: profile has no zero");
    std::vector<CheckResult> out;
    const double alpha = prof.params.alpha;
    const int N = prof.params.dimension;

    // Every piece that ends at a zero satisfies the quotient identity; the
    // unbounded tail piece (if any) does not vanish at its far end and is
    // not a claim here.
    for (std::size_t i = 0; i < prof.pieces.size() && i < prof.zeros.size();
         ++i) {
        const auto& piece = prof.pieces[i];
        const MeasureKind kind = measure_of(piece.branch);
        const double expected = 0.5 * measure_lambda(kind) * alpha;
        const double lo = i == 0 ? 0.0 : piece.s_begin;
        const double q = rayleigh([&](double s) { return prof.at(s); }, lo,
                                  piece.s_end, kind, N, opt.rayleigh_panels);
        CheckResult c;
        c.name = "rayleigh piece " + std::to_string(i) + " (" +
                 to_string(kind) + ")";
        c.observed = std::fabs(q - expected);
        c.bound = opt.rayleigh_tol;
        c.pass = c.observed <= c.bound;
        std::ostringstream os;
        os << "R = " << q << ", expected " << expected;
        c.detail = os.str();
        out.push_back(std::move(c));
    }

    const double z1 = prof.zeros.front().s;
    const MeasureKind kind0 = measure_of(prof.pieces.front().branch);
    const EigenResult eig =
        discrete_min_eigenvalue(0.0, z1, kind0, N, opt.grid_points);
    {
        CheckResult c;
        c.name = "discrete eigenvalue recovers alpha";
        c.observed = std::fabs(eig.recovered_alpha - alpha);
        c.bound = opt.alpha_tol;
        c.pass = c.observed <= c.bound;
        std::ostringstream os;
        os << "recovered " << eig.recovered_alpha << " vs " << alpha << " on (0, "
           << z1 << "), " << opt.grid_points << " cells";
        c.detail = os.str();
        out.push_back(std::move(c));
    }
    {
        CheckResult c;
        c.name = "ground state positive and simple";
        c.observed = eig.lambda_min;
        c.bound = 0.0;
        c.pass = eig.lambda_min > 0.0 && !eig.interior_sign_change;
        c.detail = eig.interior_sign_change ? "interior sign change"
                                            : "no interior sign change";
        out.push_back(std::move(c));
    }
    {
        const EigenResult inner =
            discrete_min_eigenvalue(0.0, 0.9 * z1, kind0, N, opt.grid_points);
        CheckResult c;
        c.name = "nested intervals order the eigenvalues";
        c.observed = inner.lambda_min - eig.lambda_min;
        c.bound = 0.0;
        c.pass = c.observed > 0.0;
        std::ostringstream os;
        os << "Lambda(0, " << 0.9 * z1 << ") = " << inner.lambda_min
           << " > Lambda(0, " << z1 << ") = " << eig.lambda_min;
        c.detail = os.str();
        out.push_back(std::move(c));
    }
    return out;
}

} // namespace selfsim
