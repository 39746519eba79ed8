#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "selfsim/appell.hpp"
#include "selfsim/config.hpp"
#include "selfsim/csv.hpp"
#include "selfsim/exponents.hpp"
#include "selfsim/parallel.hpp"
#include "selfsim/pde.hpp"
#include "selfsim/shooting.hpp"
#include "selfsim/verify.hpp"

/// The work behind each subcommand of the `selfsim` tool, written against
/// ostreams so the whole layer is exercisable from tests without spawning a
/// process. The binary in tools/ only parses flags, opens files, and maps
/// exceptions to exit codes.
namespace selfsim::cli {

inline Sign parse_sign(std::string_view text) {
    if (text == "plus") return Sign::Plus;
    if (text == "minus") return Sign::Minus;
    throw ConfigError("sign must be 'plus' or 'minus', got '" +
                      std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// alpha: matched exponent rows
// ---------------------------------------------------------------------------

/// Exactly one of `k` (with `sign`) or `max_k` must be positive.
struct AlphaRequest {
    int k = 0;               ///< single (k, sign) row
    Sign sign = Sign::Minus;
    int max_k = 0;           ///< both signs, k = 1..max_k
};

/// Rows for the alpha subcommand. A single request still chain-solves
/// k = 1, ..., k-1 internally (each exponent seeds the bracket of the next);
/// a max_k request returns both sign chains sorted by alpha, which lays the
/// interlacing alpha_k^- < alpha_{k+1}^+ < alpha_{k+2}^- out in reading order.
inline std::vector<ExponentRecord> alpha_rows(const AlphaRequest& req,
                                              int dimension,
                                              const ExponentOptions& opt = {}) {
    if ((req.k > 0) == (req.max_k > 0))
        throw ConfigError("alpha: give exactly one of --k (with --sign) or --max-k");
    std::vector<ExponentRecord> rows;
    if (req.k > 0) {
        ExponentRecord rec;
        std::optional<double> prev;
        for (int j = 1; j <= req.k; ++j) {
            rec = solve_alpha(j, req.sign, dimension, opt, prev);
            prev = rec.alpha;
        }
        rows.push_back(rec);
    } else {
        const ExponentTable table =
            exponent_table(req.max_k, req.max_k, dimension, opt);
        rows.insert(rows.end(), table.plus.begin(), table.plus.end());
        rows.insert(rows.end(), table.minus.begin(), table.minus.end());
        std::sort(rows.begin(), rows.end(),
                  [](const ExponentRecord& a, const ExponentRecord& b) {
                      return a.alpha < b.alpha;
                  });
    }
    return rows;
}

inline void write_alpha_csv(std::ostream& os,
                            const std::vector<ExponentRecord>& rows) {
    csv::row(os, "k", "sign", "alpha", "beta", "residual", "ident_check",
             "bracket_lo", "bracket_hi");
    for (const auto& r : rows)
        csv::row(os, r.k, to_string(r.sign), r.alpha, r.beta, r.residual,
                 r.ident_check, r.bracket_lo, r.bracket_hi);
}

inline void print_alpha_table(std::ostream& os,
                              const std::vector<ExponentRecord>& rows) {
    os << "  k  sign       alpha            beta    residual  ident_check\n";
    for (const auto& r : rows) {
        std::ostringstream line;
        line << std::setw(3) << r.k << "  " << std::setw(5) << to_string(r.sign)
             << "  " << std::setw(14) << std::setprecision(12) << r.alpha
             << "  " << std::setw(14) << std::setprecision(12) << r.beta
             << "  " << std::setw(10) << std::setprecision(3) << r.residual
             << "  " << std::setw(11) << std::setprecision(3) << r.ident_check;
        os << line.str() << '\n';
    }
}

// ---------------------------------------------------------------------------
// profile: one origin shot as CSV
// ---------------------------------------------------------------------------

namespace detail {

inline std::size_t piece_index_at(const SelfSimilarProfile& prof, double s) {
    for (std::size_t i = 0; i + 1 < prof.pieces.size(); ++i)
        if (s <= prof.pieces[i].s_end) return i;
    return prof.pieces.size() - 1;
}

} // namespace detail

/// Uniform samples over the integrated span plus one exact row per switch
/// radius (f = 0 there by construction, the slope from the event locator).
inline void write_profile_csv(std::ostream& os, const SelfSimilarProfile& prof,
                              int samples = 2000) {
    if (samples < 2)
        throw ConfigError("profile: need at least two sample points");
    struct GridPoint {
        double s;
        int zero_index; ///< -1 = plain sample
    };
    std::vector<GridPoint> grid;
    grid.reserve(static_cast<std::size_t>(samples) + prof.zeros.size());
    for (int j = 0; j < samples; ++j)
        grid.push_back({prof.s_end * j / (samples - 1), -1});
    for (std::size_t i = 0; i < prof.zeros.size(); ++i)
        grid.push_back({prof.zeros[i].s, static_cast<int>(i)});
    std::sort(grid.begin(), grid.end(),
              [](const GridPoint& a, const GridPoint& b) {
                  return a.s < b.s || (a.s == b.s && a.zero_index < b.zero_index);
              });

    csv::row(os, "s", "f", "f_prime", "branch", "piece_index", "tail");
    const char* tail = to_string(prof.tail);
    for (const auto& point : grid) {
        const std::size_t pi = detail::piece_index_at(prof, point.s);
        const char* branch = to_string(prof.pieces[pi].branch);
        if (point.zero_index >= 0) {
            csv::row(os, point.s, 0.0, prof.zeros[point.zero_index].fp, branch,
                     pi, tail);
        } else {
            const auto e = prof.at(point.s);
            csv::row(os, point.s, e.y, e.yp, branch, pi, tail);
        }
    }
}

// ---------------------------------------------------------------------------
// sweep: the zero-map curves in the (s, alpha) plane
// ---------------------------------------------------------------------------

struct SweepRange {
    double lo = 0.0;
    double hi = 0.0;
    int n = 0;
};

inline SweepRange parse_range(const std::string& text) {
    const auto c1 = text.find(':');
    const auto c2 = c1 == std::string::npos ? c1 : text.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw ConfigError("--s-range wants lo:hi:n, got '" + text + "'");
    SweepRange r;
    r.lo = selfsim::detail::config_double("--s-range lo", text.substr(0, c1));
    r.hi = selfsim::detail::config_double("--s-range hi",
                                          text.substr(c1 + 1, c2 - c1 - 1));
    r.n = selfsim::detail::config_int("--s-range n", text.substr(c2 + 1));
    if (!(r.lo > 0.0) || !(r.hi > r.lo) || r.n < 2)
        throw ConfigError("--s-range needs 0 < lo < hi and n >= 2, got '" +
                          text + "'");
    return r;
}

/// The six curves of the sweep, each the inverse of one zero map.
enum class Curve {
    OriginPlus,   ///< alpha with first origin zero (plus sign) at s
    OriginMinus,
    TildePlus,    ///< alpha with outermost infinity zero (plus tail) at s
    TildeMinus,
    SecondPlus,   ///< alpha with second origin zero (plus sign) at s
    SecondMinus,
};

/// Shared state for evaluating sweep curves: the second-zero maps only exist
/// above the first matched exponent of their sign, so those edges are solved
/// once up front.
struct SweepEngine {
    int dimension = 1;
    double alpha_tol = 1e-10;
    ShotOptions shot;
    double edge_plus = 0.0;  ///< alpha^{+,1}
    double edge_minus = 0.0; ///< alpha^{-,1}

    /// Inverse of the second origin-zero map by monotone bisection. The map
    /// decreases from infinity at the domain edge (at the matched exponent
    /// the continuation follows the algebraically decaying tail and never
    /// re-crosses) to zero, and an absent second zero always means "still
    /// beyond z", i.e. alpha below the solution.
    std::optional<double> alpha_for_second_zero(double z, Sign sign,
                                                double edge) const {
        ShotOptions opts = shot;
        opts.horizon = std::max(opts.horizon_for(dimension), 3.0 * z);
        auto residual = [&](double a) -> std::optional<double> {
            const auto v =
                zero_map(a, sign, 2, ShotSide::FromOrigin, dimension, opts);
            if (!v) return std::nullopt;
            return *v - z;
        };
        double lo = edge;
        double hi = edge + 1.0;
        bool bracketed = false;
        for (int i = 0; i < 40; ++i) {
            const auto r = residual(hi);
            if (r && *r < 0.0) {
                bracketed = true;
                break;
            }
            lo = hi;
            hi = edge + 2.0 * (hi - edge);
        }
        if (!bracketed) return std::nullopt;
        while (hi - lo > alpha_tol) {
            const double mid = 0.5 * (lo + hi);
            const auto r = residual(mid);
            if (r && *r < 0.0)
                hi = mid;
            else
                lo = mid;
        }
        return 0.5 * (lo + hi);
    }

    /// nullopt where the map is undefined or its inversion fails; those
    /// cells become NaN rows rather than aborting the sweep.
    std::optional<double> eval(Curve c, double z) const {
        try {
            switch (c) {
                case Curve::OriginPlus:
                    return alpha_for_first_zero(z, Sign::Plus, dimension,
                                                alpha_tol, shot);
                case Curve::OriginMinus:
                    return alpha_for_first_zero(z, Sign::Minus, dimension,
                                                alpha_tol, shot);
                case Curve::TildePlus:
                    return alpha_tilde_for_zero(z, Sign::Plus, dimension,
                                                alpha_tol, shot);
                case Curve::TildeMinus:
                    return alpha_tilde_for_zero(z, Sign::Minus, dimension,
                                                alpha_tol, shot);
                case Curve::SecondPlus:
                    return alpha_for_second_zero(z, Sign::Plus, edge_plus);
                default:
                    return alpha_for_second_zero(z, Sign::Minus, edge_minus);
            }
        } catch (const SolverError&) {
            return std::nullopt; // bracket exhaustion, tangent zeros, ...
        }
    }
};

struct SweepRow {
    double s;
    double origin_plus, origin_minus;
    double tilde_plus, tilde_minus;
    double second_plus, second_minus;
};

/// A labeled point on (or between) the computed curves: heat-polynomial
/// dots for the overlay, and refined curve intersections, which land on the
/// matched exponents (the k-th origin zero meets the outermost infinity zero
/// of the tail sign exactly at alpha_k).
struct SweepAnchor {
    std::string label;
    double alpha;
    double s;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<SweepAnchor> anchors;
};

namespace detail {

inline double row_value(const SweepRow& row, Curve c) {
    switch (c) {
        case Curve::OriginPlus: return row.origin_plus;
        case Curve::OriginMinus: return row.origin_minus;
        case Curve::TildePlus: return row.tilde_plus;
        case Curve::TildeMinus: return row.tilde_minus;
        case Curve::SecondPlus: return row.second_plus;
        default: return row.second_minus;
    }
}

} // namespace detail

inline SweepResult compute_sweep(const SweepRange& range, const RunConfig& cfg) {
    cfg.validate();
    if (!(range.lo > 0.0) || !(range.hi > range.lo) || range.n < 2)
        throw ConfigError("sweep: need 0 < lo < hi and n >= 2");

    SweepEngine eng;
    eng.dimension = cfg.dimension;
    eng.alpha_tol = cfg.alpha_tol;
    eng.shot = cfg.shot();
    const ExponentOptions exp_opt = cfg.exponents();
    eng.edge_plus = solve_alpha(1, Sign::Plus, cfg.dimension, exp_opt).alpha;
    eng.edge_minus = solve_alpha(1, Sign::Minus, cfg.dimension, exp_opt).alpha;

    SweepResult out;
    const int workers = effective_workers(cfg.workers);
    out.rows = parallel_map<SweepRow>(range.n, workers, [&](int j) {
        const double s = range.lo + (range.hi - range.lo) * j / (range.n - 1);
        auto cell = [&](Curve c) {
            const auto v = eng.eval(c, s);
            return v ? *v : std::numeric_limits<double>::quiet_NaN();
        };
        return SweepRow{s,
                        cell(Curve::OriginPlus),  cell(Curve::OriginMinus),
                        cell(Curve::TildePlus),   cell(Curve::TildeMinus),
                        cell(Curve::SecondPlus),  cell(Curve::SecondMinus)};
    });

    // Heat-polynomial dots: the origin shot at alpha = 2m runs along the
    // degree-2m caloric polynomial until its first root, so (root, 2m) lies
    // on the plus curve; the minus first zero is that root over sqrt(2).
    for (int degree : {2, 4, 6}) {
        const double zp = verify::heat_polynomial_first_zero(degree, cfg.dimension);
        const std::string suffix = "_deg" + std::to_string(degree);
        out.anchors.push_back({"heat_plus" + suffix, double(degree), zp});
        out.anchors.push_back(
            {"heat_minus" + suffix, double(degree), zp / std::sqrt(2.0)});
    }

    // Curve intersections. Each pair below crosses exactly once, where the
    // two zero maps hit the same radius, i.e. at a matched exponent. Once
    // the sampled rows bracket a crossing, the refinement runs in the alpha
    // variable: the difference of the forward maps is strictly decreasing
    // there (origin maps fall, tilde maps rise), and one bisection step
    // costs two shots instead of the two map inversions a bisection in s
    // would need.
    struct CurvePair {
        Curve a; ///< an origin-zero curve (first or second zero)
        Sign a_sign;
        int a_k;
        Curve b; ///< a tilde curve
        Sign b_sign;
        const char* label;
    };
    const CurvePair pairs[] = {
        {Curve::OriginMinus, Sign::Minus, 1, Curve::TildePlus, Sign::Plus,
         "match_minus_k1"},
        {Curve::OriginPlus, Sign::Plus, 1, Curve::TildeMinus, Sign::Minus,
         "match_plus_k1"},
        {Curve::SecondMinus, Sign::Minus, 2, Curve::TildeMinus, Sign::Minus,
         "match_minus_k2"},
        {Curve::SecondPlus, Sign::Plus, 2, Curve::TildePlus, Sign::Plus,
         "match_plus_k2"},
    };
    for (const auto& pr : pairs) {
        for (std::size_t j = 1; j < out.rows.size(); ++j) {
            const double a0 = detail::row_value(out.rows[j - 1], pr.a);
            const double b0 = detail::row_value(out.rows[j - 1], pr.b);
            const double a1 = detail::row_value(out.rows[j], pr.a);
            const double b1 = detail::row_value(out.rows[j], pr.b);
            if (!std::isfinite(a0) || !std::isfinite(b0) ||
                !std::isfinite(a1) || !std::isfinite(b1))
                continue;
            if ((a0 > b0) == (a1 > b1)) continue;

            // Both curves are monotone in s, so their values at the two
            // bracketing rows bracket the crossing height.
            double lo = std::min(std::min(a0, b0), std::min(a1, b1));
            double hi = std::max(std::max(a0, b0), std::max(a1, b1));
            ShotOptions opts = eng.shot;
            opts.horizon = std::max(opts.horizon_for(eng.dimension),
                                    3.0 * out.rows[j].s);
            auto diff = [&](double alpha) -> std::optional<double> {
                const auto sa = zero_map(alpha, pr.a_sign, pr.a_k,
                                         ShotSide::FromOrigin, eng.dimension,
                                         opts);
                const auto sb = zero_map(alpha, pr.b_sign, 1,
                                         ShotSide::FromInfinity, eng.dimension,
                                         opts);
                if (!sa || !sb) return std::nullopt;
                return *sa - *sb;
            };
            while (hi - lo > eng.alpha_tol) {
                const double mid = 0.5 * (lo + hi);
                const auto d = diff(mid);
                // An absent zero means alpha is still too small: the origin
                // zero beyond the horizon, or the tilde map below threshold.
                if (!d || *d > 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            const double alpha_star = 0.5 * (lo + hi);
            const auto s_star = zero_map(alpha_star, pr.a_sign, pr.a_k,
                                         ShotSide::FromOrigin, eng.dimension,
                                         opts);
            if (s_star) out.anchors.push_back({pr.label, alpha_star, *s_star});
            break; // the map difference is strictly monotone: one crossing
        }
    }
    return out;
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& res) {
    csv::row(os, "s", "alpha_plus", "alpha_minus", "alpha_tilde_plus",
             "alpha_tilde_minus", "alpha_plus_2", "alpha_minus_2");
    for (const auto& r : res.rows)
        csv::row(os, r.s, r.origin_plus, r.origin_minus, r.tilde_plus,
                 r.tilde_minus, r.second_plus, r.second_minus);
}

inline void write_anchor_csv(std::ostream& os, const SweepResult& res) {
    csv::row(os, "label", "alpha", "s");
    for (const auto& a : res.anchors) csv::row(os, a.label, a.alpha, a.s);
}

// ---------------------------------------------------------------------------
// appell: a profile next to its negative-homogeneity dual
// ---------------------------------------------------------------------------

inline void write_appell_csv(std::ostream& os, const AppellPair& pair,
                             int samples = 2000) {
    if (samples < 2)
        throw ConfigError("appell: need at least two sample points");
    const double span = std::isfinite(pair.s_max)
                            ? pair.s_max
                            : default_horizon(pair.params.dimension);
    csv::row(os, "r", "f", "psi", "g");
    for (int j = 0; j < samples; ++j) {
        const double r = span * j / (samples - 1);
        csv::row(os, r, pair.f_at(r).y, pair.psi.value(r), pair.g_at(r).y);
    }
}

// ---------------------------------------------------------------------------
// evolve: march an eigen-profile and watch the center
// ---------------------------------------------------------------------------

struct EvolveRequest {
    int k = 1;
    Sign sign = Sign::Minus;
    double claimed_alpha = 0.0; ///< 0 = the profile's own exponent
    double t_end = -0.05;
    double radius = 0.0;        ///< 0 = 3.05x the glue zero, rounded up to the step
    bool lipschitz = false;     ///< short-time run plus difference quotients
};

struct EvolveOutcome {
    ExponentRecord record;
    double glue_zero = 0.0;
    EvolveResult run;
    std::optional<LipschitzReport> lipschitz;
};

inline EvolveOutcome run_evolve(const EvolveRequest& req, const RunConfig& cfg) {
    cfg.validate();
    if (req.k < 1) throw ConfigError("evolve: k must be >= 1");
    const ExponentOptions opt = cfg.exponents();
    ExponentRecord rec;
    std::optional<double> prev;
    for (int j = 1; j <= req.k; ++j) {
        rec = solve_alpha(j, req.sign, cfg.dimension, opt, prev);
        prev = rec.alpha;
    }
    const MatchedProfile prof = matched_profile(rec, cfg.dimension, cfg.shot());

    const double h = cfg.pde_step;
    const double radius = req.radius > 0.0
                              ? req.radius
                              : std::ceil(3.05 * prof.glue_zero / h) * h;
    const RadialGrid grid{h, radius, cfg.dimension};

    EvolveOptions eopt;
    // tau = 2^-10 must stay inside the trace for the m = 1..10 quotients.
    eopt.t_end = req.lipschitz ? -std::ldexp(1.0, -11) : req.t_end;
    eopt.trace_stride = req.lipschitz ? 1 : 0;

    EvolveOutcome out{rec, prof.glue_zero,
                      evolve_profile(prof, grid, eopt, req.claimed_alpha), {}};
    if (req.lipschitz) out.lipschitz = lipschitz_demo(out.run, 10);
    return out;
}

inline void write_evolve_csv(std::ostream& os, const EvolveResult& run) {
    csv::row(os, "t", "w0", "ratio");
    for (const auto& sample : run.trace)
        csv::row(os, sample.t, sample.w0, sample.ratio);
}

inline void print_evolve_summary(std::ostream& os, const EvolveOutcome& out) {
    const auto& run = out.run;
    os << "profile: k=" << out.record.k << " sign=" << to_string(out.record.sign)
       << " alpha=" << csv::format(out.record.alpha)
       << " glue_zero=" << csv::format(out.glue_zero) << '\n';
    os << "march: steps=" << run.steps << " t_final=" << csv::format(run.t_final)
       << " stable=" << (run.stable ? "yes" : "no") << " sign_changes=["
       << run.sign_changes_min << ", " << run.sign_changes_max << "]\n";
    os << "ratio: final=" << csv::format(run.trace.back().ratio)
       << " max_deviation=" << csv::format(run.max_ratio_dev) << '\n';
    if (out.lipschitz) {
        os << "difference quotients |w(0,-tau)| / tau:\n";
        for (const auto& row : out.lipschitz->rows)
            os << "  tau=" << csv::format(row.tau)
               << "  q=" << csv::format(row.quotient) << '\n';
        os << "slope: " << csv::format(out.lipschitz->slope)
           << "  (alpha/2 - 1 = "
           << csv::format(0.5 * out.record.alpha - 1.0)
           << "; growing quotients rule out a time-Lipschitz bound at the "
              "center)\n";
    }
}

// ---------------------------------------------------------------------------
// verify: the check suites, with a machine-readable summary
// ---------------------------------------------------------------------------

/// Prints one CHECK line per result plus a SUMMARY line; returns the process
/// exit code (0 all pass, 1 any failure).
inline int run_verify(std::ostream& os, const RunConfig& cfg,
                      std::string_view suite) {
    verify::VerifyContext ctx(cfg);
    const auto checks = verify::run_suite(ctx, suite);
    std::size_t failed = 0;
    for (const auto& c : checks) {
        if (!c.pass) ++failed;
        os << "CHECK " << (c.pass ? "pass" : "FAIL") << ' ' << c.name
           << " observed=" << csv::format(c.observed)
           << " bound=" << csv::format(c.bound);
        if (!c.detail.empty()) os << "  # " << c.detail;
        os << '\n';
    }
    os << "SUMMARY suite=" << suite << " dim=" << cfg.dimension
       << " checks=" << checks.size() << " passed=" << checks.size() - failed
       << " failed=" << failed << '\n';
    return failed == 0 ? 0 : 1;
}

} // namespace selfsim::cli
