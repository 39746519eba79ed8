#pragma once

#include <cmath>
#include <future>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "selfsim/rootfind.hpp"
#include "selfsim/shooting.hpp"

namespace selfsim {

/// Sign of the profile on its unbounded tail piece: the origin sign flipped
/// once per sign change.
inline Sign tail_sign(Sign sign0, int k) {
    return (k % 2 == 0) ? sign0 : flip(sign0);
}

struct ExponentOptions {
    double alpha_tol = 1e-10;    ///< bracket width target on alpha
    double residual_tol = 1e-9;  ///< |s - s~| accepted at the root
    double bracket_span = 50.0;  ///< search ceiling above a seed
    double ident_tol = 1e-6;     ///< zero-pair agreement at a matched alpha
    ShotOptions shot;            ///< forwarded to both shooters
};

/// Signed matching condition: (k-th zero from the origin) minus (outermost
/// zero from infinity with the tail sign). Strictly decreasing in alpha;
/// vanishes exactly at the matched exponent. nullopt where either shot has
/// too few zeros (small alpha), which callers treat as a positive value.
inline std::optional<double> matching_residual(double alpha, Sign sign0, int k,
                                               int dimension,
                                               const ShotOptions& shot = {}) {
    const auto sk = zero_map(alpha, sign0, k, ShotSide::FromOrigin, dimension, shot);
    if (!sk) return std::nullopt;
    const auto s1 = zero_map(alpha, tail_sign(sign0, k), 1,
                             ShotSide::FromInfinity, dimension, shot);
    if (!s1) return std::nullopt;
    return *sk - *s1;
}

struct ExponentRecord {
    int k = 0;
    Sign sign = Sign::Plus;
    double alpha = 0.0;
    double beta = 0.0;        ///< -(N + alpha), homogeneity of the dual
    double residual = 0.0;    ///< |matching_residual| at alpha
    double ident_check = 0.0; ///< max zero-pair disagreement, j = 1..k
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
};

namespace detail {

inline double residual_or_positive(double alpha, Sign sign0, int k,
                                   int dimension, const ShotOptions& shot) {
    const auto r = matching_residual(alpha, sign0, k, dimension, shot);
    return r ? *r : 1.0;
}

} // namespace detail

/// All k zeros of the two matched semi-profiles, ascending. At the matched
/// exponent the infinity shot retraces the whole profile, so the lists agree
/// elementwise; their largest disagreement is the reported ident check.
inline double ident_disagreement(double alpha, Sign sign0, int k,
                                 int dimension, const ShotOptions& base = {}) {
    ProblemParams p{dimension, alpha};
    ShotOptions opts = base;
    opts.max_zeros = k;
    opts.classify = false;
    const auto prof = shoot_origin(p, sign0, opts);
    const auto shot = shoot_infinity(p, tail_sign(sign0, k), opts);
    if (static_cast<int>(prof.zeros.size()) < k ||
        static_cast<int>(shot.mapped_zeros.size()) < k)
        return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (int j = 0; j < k; ++j)
        worst = std::max(worst,
                         std::fabs(prof.zeros[j].s - shot.mapped_zeros[j]));
    return worst;
}

/// Solves the matching condition for the k-th exponent of the given origin
/// sign. k = 1 starts from the explicit parabola anchors at alpha = 2 (the
/// plus residual there is positive, the minus negative); k >= 2 expands
/// upward from the previous exponent, below which the k-th origin zero does
/// not exist.
inline ExponentRecord solve_alpha(int k, Sign sign0, int dimension,
                                  const ExponentOptions& opt = {},
                                  std::optional<double> previous = {}) {
    if (k < 1) throw std::invalid_argument("solve_alpha: k must be >= 1");
    const auto eval = [&](double a) {
        return detail::residual_or_positive(a, sign0, k, dimension, opt.shot);
    };
    const auto eval_opt = [&](double a) -> std::optional<double> {
        return matching_residual(a, sign0, k, dimension, opt.shot);
    };

    double lo, hi, flo, fhi;
    if (k == 1 && sign0 == Sign::Plus) {
        lo = 2.0;
        flo = eval(lo); // sqrt(2N) - sqrt(N) > 0
        const auto b = expand_bracket_up(eval_opt, lo, flo, 1.0, 1.5,
                                         lo + opt.bracket_span, 1.0,
                                         "matching, plus k=1");
        lo = b.lo; hi = b.hi; flo = b.flo; fhi = b.fhi;
    } else if (k == 1) {
        hi = 2.0;
        fhi = eval(hi); // sqrt(N) - sqrt(2N) < 0
        // The infinity shot needs alpha above (3-N)/2; just above it the
        // origin zero is far out while the infinity zero is small or absent,
        // so the residual is positive and one probe brackets the root.
        lo = std::max(infinity_alpha_threshold(dimension) + 1e-3, 0.05);
        flo = eval(lo);
        if (!(flo > 0.0)) {
            const auto b = expand_bracket_down(eval_opt, hi, fhi, 1.17, lo,
                                               1.0, "matching, minus k=1");
            lo = b.lo; hi = b.hi; flo = b.flo; fhi = b.fhi;
        }
    } else {
        if (!previous)
            throw std::invalid_argument("solve_alpha: k >= 2 needs the previous exponent");
        lo = *previous + 1e-6;
        flo = 1.0; // at the previous exponent the k-th zero is absent
        const auto b = expand_bracket_up(eval_opt, lo, flo, 1.0, 1.5,
                                         lo + opt.bracket_span, 1.0,
                                         "matching, k >= 2");
        lo = b.lo; hi = b.hi; flo = b.flo; fhi = b.fhi;
    }

    const RootResult root =
        solve_bracketed(eval, lo, hi, flo, fhi, opt.alpha_tol);

    ExponentRecord rec;
    rec.k = k;
    rec.sign = sign0;
    rec.alpha = root.root;
    rec.beta = -(dimension + root.root);
    rec.residual = std::fabs(detail::residual_or_positive(
        root.root, sign0, k, dimension, opt.shot));
    rec.ident_check = ident_disagreement(root.root, sign0, k, dimension, opt.shot);
    rec.bracket_lo = root.bracket_lo;
    rec.bracket_hi = root.bracket_hi;
    if (!(rec.residual <= opt.residual_tol)) {
        std::ostringstream os;
        os << "solve_alpha: residual " << rec.residual << " above tolerance at alpha="
           << rec.alpha << " (k=" << k << ", sign=" << to_string(sign0) << ")";
        throw SolverError(os.str());
    }
    return rec;
}

/// The exponent sequences for both origin signs up to k = K, with the
/// structural checks: strict growth in k, the k = 1 straddle of 2, the
/// cross-sign interlacing, and the dual exponents below -N.
struct ExponentTable {
    int dimension = 1;
    std::vector<ExponentRecord> plus;  ///< plus[j] is k = j+1
    std::vector<ExponentRecord> minus; ///< minus[j] is k = j+1
    double interlace_margin = 0.0;     ///< min over checked interlace gaps

    const ExponentRecord& at(Sign s, int k) const {
        const auto& v = (s == Sign::Plus) ? plus : minus;
        return v.at(static_cast<std::size_t>(k) - 1);
    }
};

namespace detail {

inline std::vector<ExponentRecord> solve_chain(int K, Sign sign0, int dimension,
                                               const ExponentOptions& opt) {
    std::vector<ExponentRecord> out;
    out.reserve(static_cast<std::size_t>(K));
    std::optional<double> prev;
    for (int k = 1; k <= K; ++k) {
        out.push_back(solve_alpha(k, sign0, dimension, opt, prev));
        prev = out.back().alpha;
    }
    return out;
}

[[noreturn]] inline void table_violation(const char* what, int dimension) {
    std::ostringstream os;
    os << "exponent_table: " << what << " violated (N=" << dimension << ")";
    throw SolverError(os.str());
}

} // namespace detail

/// Computes both sign chains (in parallel; they are independent) and asserts
/// the ordering structure. K_plus and K_minus may differ; interlacing is
/// checked on every triple the table contains.
inline ExponentTable exponent_table(int K_plus, int K_minus, int dimension,
                                    const ExponentOptions& opt = {}) {
    ExponentTable t;
    t.dimension = dimension;
    auto minus_chain = std::async(std::launch::async, [&] {
        return detail::solve_chain(K_minus, Sign::Minus, dimension, opt);
    });
    t.plus = detail::solve_chain(K_plus, Sign::Plus, dimension, opt);
    t.minus = minus_chain.get();

    for (const auto* chain : {&t.plus, &t.minus}) {
        for (std::size_t j = 1; j < chain->size(); ++j)
            if (!((*chain)[j].alpha > (*chain)[j - 1].alpha))
                detail::table_violation("strict growth in k", dimension);
        for (const auto& r : *chain)
            if (!(r.beta < -static_cast<double>(dimension)))
                detail::table_violation("beta < -N", dimension);
    }
    if (!t.minus.empty() && !(0.0 < t.minus[0].alpha && t.minus[0].alpha < 2.0))
        detail::table_violation("0 < alpha_1^- < 2", dimension);
    if (!t.plus.empty() && !(t.plus[0].alpha > 2.0))
        detail::table_violation("2 < alpha_1^+", dimension);

    // alpha_k^- < alpha_{k+1}^+ < alpha_{k+2}^- on every complete triple.
    t.interlace_margin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < t.minus.size(); ++j) {
        const int k = static_cast<int>(j) + 1;
        if (static_cast<int>(t.plus.size()) >= k + 1) {
            const double gap = t.plus[j + 1].alpha - t.minus[j].alpha;
            if (!(gap > 0.0))
                detail::table_violation("alpha_k^- < alpha_{k+1}^+", dimension);
            t.interlace_margin = std::min(t.interlace_margin, gap);
            if (static_cast<int>(t.minus.size()) >= k + 2) {
                const double gap2 = t.minus[j + 2].alpha - t.plus[j + 1].alpha;
                if (!(gap2 > 0.0))
                    detail::table_violation("alpha_{k+1}^+ < alpha_{k+2}^-", dimension);
                t.interlace_margin = std::min(t.interlace_margin, gap2);
            }
        }
    }
    return t;
}

inline ExponentTable exponent_table(int K, int dimension,
                                    const ExponentOptions& opt = {}) {
    return exponent_table(K, K, dimension, opt);
}

/// A matched profile: the origin semi-profile up to its k-th zero, continued
/// by the infinity semi-profile rescaled to share the derivative there. The
/// infinity shot is normalized to |h(0)| = 1, so the continuation carries the
/// positive factor kappa = f'_origin(z) / f'_tail(z).
struct MatchedProfile {
    ProblemParams params;
    Sign sign0 = Sign::Plus;
    int k = 0;
    double alpha = 0.0;
    double kappa = 0.0;
    double glue_zero = 0.0;
    SelfSimilarProfile origin;
    InfinityShot tail;

    StepRecord::Eval at(double s) const {
        if (s <= glue_zero) return origin.at(s);
        auto e = tail.f_at(s);
        e.y *= kappa;
        e.yp *= kappa;
        return e;
    }
};

/// Builds and validates the matched profile at a solved exponent: the origin
/// run must reach exactly k zeros, the outward piece there must classify
/// algebraic (the tilde map at the glue zero returns this alpha), and the
/// scaling factor must come out positive (same-sign derivatives at the glue).
inline MatchedProfile matched_profile(const ExponentRecord& rec, int dimension,
                                      const ShotOptions& base = {}) {
    MatchedProfile m;
    m.params = ProblemParams{dimension, rec.alpha};
    m.sign0 = rec.sign;
    m.k = rec.k;
    m.alpha = rec.alpha;

    ShotOptions opts = base;
    opts.max_zeros = rec.k;
    opts.classify = false;
    m.origin = shoot_origin(m.params, rec.sign, opts);
    if (static_cast<int>(m.origin.zeros.size()) != rec.k)
        throw SolverError("matched_profile: origin run lost a zero");
    m.glue_zero = m.origin.zeros.back().s;
    // The run stops at the glue zero, so classify the outward piece by the
    // inverse tilde map there instead of integrating onward (past the glue
    // the growing mode swamps the algebraic one long before the horizon).
    m.origin.tail = classify_tail(m.glue_zero, tail_sign(rec.sign, rec.k),
                                  m.params, opts.classify_tol, base);
    if (m.origin.tail != TailClass::Algebraic)
        throw SolverError("matched_profile: outward piece is not algebraic");

    ShotOptions tail_opts = base;
    tail_opts.max_zeros = 1;
    tail_opts.classify = false;
    m.tail = shoot_infinity(m.params, tail_sign(rec.sign, rec.k), tail_opts);
    if (m.tail.t_zeros.empty())
        throw SolverError("matched_profile: infinity run found no zero");

    const double t1 = m.tail.t_zeros.front().s;
    const double hp1 = m.tail.t_zeros.front().fp;
    const double z = 1.0 / t1;
    // f(s) = s^alpha h(1/s); at a zero of h the tail slope is -z^{alpha-2} h'.
    const double tail_slope = -std::pow(z, rec.alpha - 2.0) * hp1;
    const double origin_slope = m.origin.zeros.back().fp;
    m.kappa = origin_slope / tail_slope;
    if (!(m.kappa > 0.0))
        throw SolverError("matched_profile: glue slopes have opposite signs");
    return m;
}

} // namespace selfsim
