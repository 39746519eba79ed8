#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "selfsim/shooting.hpp"

using namespace selfsim;

namespace {

ShotOptions quiet() {
    ShotOptions o;
    o.classify = false;
    return o;
}

} // namespace

TEST_CASE("alpha=2 anchors: first zeros from both sides") {
    for (int N : {1, 2, 3}) {
        const auto sp = zero_map(2.0, Sign::Plus, 1, ShotSide::FromOrigin, N);
        const auto sm = zero_map(2.0, Sign::Minus, 1, ShotSide::FromOrigin, N);
        REQUIRE(sp.has_value());
        REQUIRE(sm.has_value());
        REQUIRE(*sp == Catch::Approx(std::sqrt(2.0 * N)).margin(1e-8));
        REQUIRE(*sm == Catch::Approx(std::sqrt(double(N))).margin(1e-8));
        const auto tp = zero_map(2.0, Sign::Plus, 1, ShotSide::FromInfinity, N);
        const auto tm = zero_map(2.0, Sign::Minus, 1, ShotSide::FromInfinity, N);
        REQUIRE(tp.has_value());
        REQUIRE(tm.has_value());
        REQUIRE(*tp == Catch::Approx(std::sqrt(2.0 * N)).margin(1e-8));
        REQUIRE(*tm == Catch::Approx(std::sqrt(double(N))).margin(1e-8));
    }
}

TEST_CASE("transformed equation: series start and closed forms at alpha=2") {
    // N=1, alpha=2: A = 2, so the plus shot is exactly h = 1 - 2t^2 and the
    // minus shot exactly h = t^2 - 1 (the quartic coefficient vanishes).
    const ProblemParams p{1, 2.0};
    const auto plus = series_start_infinity(p, Sign::Plus);
    REQUIRE(plus.f == Catch::Approx(1.0 - 2.0 * plus.s * plus.s).epsilon(1e-15));
    REQUIRE(plus.fp == Catch::Approx(-4.0 * plus.s).epsilon(1e-13));
    const auto minus = series_start_infinity(p, Sign::Minus);
    REQUIRE(minus.f == Catch::Approx(minus.s * minus.s - 1.0).epsilon(1e-15));
    REQUIRE(minus.fp == Catch::Approx(2.0 * minus.s).epsilon(1e-13));

    // Dominant balance at t -> 0: h''(0) = -2A h(0) on the plus branch and
    // -A h(0) on the minus branch; the RHS applied to the series start must
    // reproduce it.
    REQUIRE(rhs_infinity(plus.s, plus.f, plus.fp, Branch::PositiveRegion, p) ==
            Catch::Approx(-4.0).margin(1e-9));
    REQUIRE(rhs_infinity(minus.s, minus.f, minus.fp, Branch::NegativeRegion, p) ==
            Catch::Approx(2.0).margin(1e-9));
    REQUIRE(rhs_infinity(0.5, 0.0, 0.0, Branch::PositiveRegion, p) == 0.0);

    const auto shot = shoot_infinity(p, Sign::Plus, quiet());
    REQUIRE(shot.t_zeros.size() == 1);
    REQUIRE(shot.t_zeros[0].s == Catch::Approx(1.0 / std::sqrt(2.0)).margin(1e-10));
    REQUIRE(shot.t_zeros[0].fp == Catch::Approx(-4.0 / std::sqrt(2.0)).margin(1e-9));
    REQUIRE(shot.mapped_zeros.size() == 1);
    REQUIRE(shot.mapped_zeros[0] == Catch::Approx(std::sqrt(2.0)).margin(1e-10));
    REQUIRE(shot.h_at(0.5).y == Catch::Approx(0.5).margin(1e-11));
    // f(s) = s^2 h(1/s) = s^2 - 2 on the tail piece.
    REQUIRE(shot.f_at(4.0).y == Catch::Approx(14.0).margin(1e-8));
    REQUIRE(shot.f_at(4.0).yp == Catch::Approx(8.0).margin(1e-8));
}

TEST_CASE("fixed-branch infinity shot finds the outermost polynomial root") {
    ShotOptions o = quiet();
    o.fixed_branch = true;
    for (int N : {1, 2, 3}) {
        const auto s4 = shoot_infinity({N, 4.0}, Sign::Plus, o);
        REQUIRE(!s4.mapped_zeros.empty());
        REQUIRE(s4.mapped_zeros.back() ==
                Catch::Approx(oracles::heat_polynomial_zeros(2, N).back())
                    .margin(1e-8));
    }
    const auto s6 = shoot_infinity({1, 6.0}, Sign::Plus, o);
    REQUIRE(!s6.mapped_zeros.empty());
    REQUIRE(s6.mapped_zeros.back() ==
            Catch::Approx(oracles::kFrozen[0].deg6_last).margin(1e-8));
}

TEST_CASE("zero_map reports Absent and validates k") {
    REQUIRE(!zero_map(2.0, Sign::Plus, 2, ShotSide::FromOrigin, 1).has_value());
    REQUIRE(!zero_map(2.0, Sign::Plus, 2, ShotSide::FromInfinity, 1).has_value());
    REQUIRE(zero_map(2.0, Sign::Minus, 2, ShotSide::FromOrigin, 1).has_value());
    REQUIRE_THROWS_AS(zero_map(2.0, Sign::Plus, 0, ShotSide::FromOrigin, 1),
                      std::invalid_argument);
}

TEST_CASE("zero maps are strictly monotone in alpha") {
    // Origin side: strictly decreasing; infinity side: strictly increasing.
    std::vector<double> grid;
    for (int i = 0; i < 8; ++i) grid.push_back(0.8 + 0.4 * i);
    for (Sign sg : {Sign::Plus, Sign::Minus}) {
        double prev = 1e300;
        for (double a : grid) {
            const auto z = zero_map(a, sg, 1, ShotSide::FromOrigin, 1);
            REQUIRE(z.has_value());
            REQUIRE(*z < prev);
            prev = *z;
        }
    }
    grid.clear();
    for (int i = 0; i < 8; ++i) grid.push_back(1.3 + 0.5 * i);
    for (Sign sg : {Sign::Plus, Sign::Minus}) {
        double prev = 0.0;
        for (double a : grid) {
            const auto z = zero_map(a, sg, 1, ShotSide::FromInfinity, 1);
            REQUIRE(z.has_value());
            REQUIRE(*z > prev);
            prev = *z;
        }
    }
}

TEST_CASE("first-zero sqrt(2) duality for both zero maps") {
    const double r2 = std::sqrt(2.0);
    for (int i = 0; i < 8; ++i) {
        const double a = 1.2 + 0.5 * i;
        const auto zp = zero_map(a, Sign::Plus, 1, ShotSide::FromOrigin, 1);
        const auto zm = zero_map(a, Sign::Minus, 1, ShotSide::FromOrigin, 1);
        REQUIRE(zp.has_value());
        REQUIRE(zm.has_value());
        REQUIRE(*zm == Catch::Approx(*zp / r2).margin(1e-8));
        const auto tp = zero_map(a, Sign::Plus, 1, ShotSide::FromInfinity, 1);
        const auto tm = zero_map(a, Sign::Minus, 1, ShotSide::FromInfinity, 1);
        REQUIRE(tp.has_value());
        REQUIRE(tm.has_value());
        REQUIRE(*tm == Catch::Approx(*tp / r2).margin(1e-8));
    }
}

TEST_CASE("variable change s = 1/t round-trips") {
    const double alpha = 2.7, s = 3.1, f = 0.4, fp = -1.1;
    const auto inf = to_infinity_state(alpha, s, f, fp);
    REQUIRE(inf.s == Catch::Approx(1.0 / s).epsilon(1e-15));
    const auto back = to_profile_state(alpha, inf.s, inf.f, inf.fp);
    REQUIRE(back.s == Catch::Approx(s).epsilon(1e-14));
    REQUIRE(back.f == Catch::Approx(f).epsilon(1e-13));
    REQUIRE(back.fp == Catch::Approx(fp).epsilon(1e-13));
    // And against the closed form at alpha=2: f = s^2 - 2 <-> h = 1 - 2t^2.
    const auto h = to_infinity_state(2.0, 4.0, 14.0, 8.0);
    REQUIRE(h.f == Catch::Approx(1.0 - 2.0 * 0.0625).epsilon(1e-13));
    REQUIRE(h.fp == Catch::Approx(-4.0 * 0.25).epsilon(1e-12));
}

TEST_CASE("infinity shot refuses alpha at or below the threshold") {
    REQUIRE(infinity_alpha_threshold(1) == 1.0);
    REQUIRE(infinity_alpha_threshold(2) == 0.5);
    REQUIRE(infinity_alpha_threshold(3) == 0.0);
    REQUIRE(infinity_alpha_threshold(5) == 0.0);
    REQUIRE_THROWS_AS(shoot_infinity({1, 0.9}, Sign::Plus), UnsupportedError);
    REQUIRE_THROWS_AS(shoot_infinity({1, 1.0}, Sign::Plus), UnsupportedError);
    REQUIRE_THROWS_AS(shoot_infinity({2, 0.4}, Sign::Minus), UnsupportedError);
    REQUIRE_NOTHROW(shoot_infinity({2, 0.6}, Sign::Minus, quiet()));
    REQUIRE_THROWS_AS(classify_tail(1.0, Sign::Plus, {1, 0.8}), UnsupportedError);
}

TEST_CASE("tail classification against the alpha=2 anchors") {
    // alpha-tilde^-(1) = 2 and alpha-tilde^+(sqrt2) = 2 exactly.
    REQUIRE(classify_tail(1.0, Sign::Minus, {1, 2.0}) == TailClass::Algebraic);
    REQUIRE(classify_tail(std::sqrt(2.0), Sign::Plus, {1, 2.0}) ==
            TailClass::Algebraic);
    // The plus origin shot at alpha=2 ends at z=sqrt2 going negative;
    // alpha-tilde^-(sqrt2) > 2, so that tail grows exponentially: the two
    // alpha=2 semi-profiles cannot be glued.
    REQUIRE(classify_tail(std::sqrt(2.0), Sign::Minus, {1, 2.0}) ==
            TailClass::Exponential);
    // The minus origin shot at alpha=2 ends at z=1 going positive;
    // alpha-tilde^+(1) < 2, so a further sign change follows.
    REQUIRE(classify_tail(1.0, Sign::Plus, {1, 2.0}) == TailClass::Truncated);
    REQUIRE(classify_tail(0.5, Sign::Minus, {1, 2.0}) == TailClass::Truncated);
}

TEST_CASE("origin shot tail classes at sample homogeneities") {
    // alpha=2, Plus: single zero, then exponential blow-up (overflow).
    ShotOptions o; // classification enabled
    const auto p2 = shoot_origin({1, 2.0}, Sign::Plus, o);
    REQUIRE(p2.zeros.size() == 1);
    REQUIRE(p2.tail == TailClass::Exponential);
    REQUIRE(outward_sign(p2) == Sign::Minus);
    // alpha=4, Plus, switching: three zeros then overflow.
    const auto p4 = shoot_origin({1, 4.0}, Sign::Plus, o);
    REQUIRE(p4.zeros.size() == 3);
    REQUIRE(p4.zeros[0].s ==
            Catch::Approx(oracles::kFrozen[0].deg4_first).margin(1e-9));
    REQUIRE(p4.tail == TailClass::Exponential);
    REQUIRE(outward_sign(p4) == Sign::Minus);
}

TEST_CASE("inverse maps recover the anchors and round-trip") {
    REQUIRE(alpha_for_first_zero(std::sqrt(2.0), Sign::Plus, 1) ==
            Catch::Approx(2.0).margin(1e-8));
    REQUIRE(alpha_for_first_zero(1.0, Sign::Minus, 1) ==
            Catch::Approx(2.0).margin(1e-8));
    REQUIRE(alpha_tilde_for_zero(std::sqrt(2.0), Sign::Plus, 1) ==
            Catch::Approx(2.0).margin(1e-8));
    REQUIRE(alpha_tilde_for_zero(1.0, Sign::Minus, 1) ==
            Catch::Approx(2.0).margin(1e-8));
    REQUIRE(alpha_for_first_zero(std::sqrt(6.0), Sign::Plus, 3) ==
            Catch::Approx(2.0).margin(1e-8));

    const double a0 = 3.4;
    const auto z = zero_map(a0, Sign::Plus, 1, ShotSide::FromOrigin, 1);
    REQUIRE(z.has_value());
    REQUIRE(alpha_for_first_zero(*z, Sign::Plus, 1) ==
            Catch::Approx(a0).margin(1e-7));
    const double a1 = 1.6;
    const auto zt = zero_map(a1, Sign::Plus, 1, ShotSide::FromInfinity, 1);
    REQUIRE(zt.has_value());
    REQUIRE(alpha_tilde_for_zero(*zt, Sign::Plus, 1) ==
            Catch::Approx(a1).margin(1e-7));

    REQUIRE_THROWS_AS(alpha_for_first_zero(-1.0, Sign::Plus, 1),
                      std::invalid_argument);
}
