#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "selfsim/appell.hpp"

using namespace selfsim;

namespace {

// Solving alpha^-_1 and gluing its profile costs a few seconds; share it.
const AppellPair& minus1_pair() {
    static const AppellPair pair = [] {
        const auto rec = solve_alpha(1, Sign::Minus, 1);
        return appell_transform(matched_profile(rec, 1));
    }();
    return pair;
}

} // namespace

TEST_CASE("psi is an explicit Gaussian chain glued continuously") {
    const double z = std::sqrt(2.0);
    const auto psi = build_psi(Sign::Plus, {z});
    REQUIRE(psi.lambdas == std::vector<double>{1.0, 2.0});
    REQUIRE(psi.constants[0] == 1.0);
    REQUIRE(psi.constants[1] == Catch::Approx(std::exp(0.5)).epsilon(1e-14));
    REQUIRE(psi.value(0.0) == 1.0);
    REQUIRE(psi.value(1.0) == Catch::Approx(std::exp(-0.25)).epsilon(1e-14));
    // Continuity across the switch radius.
    REQUIRE(psi.value(z + 1e-12) == Catch::Approx(psi.value(z)).epsilon(1e-9));
    // Strict decrease on every segment.
    for (double r : {0.3, 1.0, 1.41, 1.42, 2.5, 4.0})
        REQUIRE(psi.derivative(r) < 0.0);
    // The derivative jump matches its one-sided differences.
    const double jump = psi.derivative_jump(0);
    REQUIRE(jump == Catch::Approx(-0.5 * (2.0 - 1.0) * z * psi.value(z)).epsilon(1e-14));
    REQUIRE(psi.derivative(z + 1e-9) - psi.derivative(z - 1e-9) ==
            Catch::Approx(jump).margin(1e-7));
    REQUIRE_THROWS_AS(build_psi(Sign::Plus, {1.0, 0.5}), std::invalid_argument);
}

TEST_CASE("transform of the alpha=2 parabola matches the closed form") {
    const auto prof = shoot_origin({1, 2.0}, Sign::Plus);
    const auto pair = appell_transform(prof);
    REQUIRE(pair.beta == -3.0);
    REQUIRE(pair.ell == 2.0);
    REQUIRE(pair.zeros.size() == 1);
    REQUIRE(pair.g_at(0.0).y == 1.0);  // g(0) = f(0)
    REQUIRE(pair.g_at(0.0).yp == 0.0); // g'(0) = 0
    double worst = 0.0;
    for (int i = 1; i < 400; ++i) {
        const double r = pair.zeros[0] * i / 400.0;
        const double want = (1.0 - 0.5 * r * r) * std::exp(-0.25 * r * r);
        worst = std::max(worst, std::fabs(pair.g_at(r).y - want));
    }
    REQUIRE(worst <= 1e-12);
}

TEST_CASE("dual equation residual measured by finite differences") {
    const auto pair = appell_transform(shoot_origin({1, 2.0}, Sign::Plus));
    const auto rep = max_dual_residual(pair, 0.3, 4.0, 200);
    REQUIRE(rep.points >= 150);
    REQUIRE(rep.max_residual <= 1e-10); // official bound 1e-8

    // N = 2 anchor: p+ = 1 - r^2/4 with its continuation.
    const auto pair2 = appell_transform(shoot_origin({2, 2.0}, Sign::Plus));
    REQUIRE(pair2.zeros[0] == Catch::Approx(2.0).epsilon(1e-10));
    REQUIRE(max_dual_residual(pair2, 0.3, 3.5, 200).max_residual <= 1e-10);

    REQUIRE_THROWS_AS(dual_ode_residual(pair, 0.01), std::invalid_argument);
    REQUIRE_THROWS_AS(dual_ode_residual(pair, pair.zeros[0] + 0.01),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(dual_ode_residual(pair, pair.s_max + 1.0),
                      std::invalid_argument);
}

TEST_CASE("round trip through the inverse transform is the identity") {
    const auto prof = shoot_origin({1, 2.0}, Sign::Plus);
    const auto pair = appell_transform(prof);
    const auto inv = inverse_appell(pair);
    REQUIRE(inv.params.alpha == 2.0);
    REQUIRE(inv.sign0 == pair.sign0);
    REQUIRE(inv.zeros == pair.zeros);
    double dev = 0.0, devp = 0.0;
    for (int i = 0; i <= 300; ++i) {
        const double r = 4.0 * i / 300.0;
        const auto a = inv.f(r);
        const auto b = prof.at(r);
        dev = std::max(dev, std::fabs(a.y - b.y));
        devp = std::max(devp, std::fabs(a.yp - b.yp));
    }
    REQUIRE(dev <= 1e-12); // official bound 1e-10
    REQUIRE(devp <= 1e-12);
}

TEST_CASE("matched eigen-profile: residual, round trip, tail decay") {
    const auto& pair = minus1_pair();
    REQUIRE(pair.ell == 1.0); // one zero, positive tail
    REQUIRE(pair.beta == Catch::Approx(-1.0 - oracles::kMatchedMinusN1[0]).margin(5e-9));

    REQUIRE(max_dual_residual(pair, 0.1, 6.0, 300).max_residual <= 1e-10);

    const auto inv = inverse_appell(pair);
    double dev = 0.0;
    for (int i = 0; i <= 500; ++i) {
        const double r = 10.0 * i / 500.0;
        dev = std::max(dev, std::fabs(inv.f(r).y - pair.f_at(r).y));
    }
    REQUIRE(dev <= 1e-12);

    const auto dk = decay_check(pair, 6.0);
    REQUIRE(dk.finite);
    REQUIRE(dk.increment_ratio == Catch::Approx(0.25).margin(0.05));
    REQUIRE(dk.limit == Catch::Approx(0.732938758).margin(1e-5));
    REQUIRE(dk.vanishing_proxy < 1e-40);
    // The extrapolated limit is grid-stable.
    REQUIRE(decay_check(pair, 8.0).limit == Catch::Approx(dk.limit).margin(1e-5));
}

TEST_CASE("decay check flags a non-eigen tail as divergent") {
    const auto pair = appell_transform(shoot_origin({1, 2.2}, Sign::Plus));
    const auto dk = decay_check(pair, 0.24 * pair.s_max);
    REQUIRE(!dk.finite);
    REQUIRE(dk.increment_ratio > 10.0);
    REQUIRE_THROWS_AS(decay_check(pair, pair.s_max), std::invalid_argument);
}

TEST_CASE("synthetic algebraic tail recovers its coefficient exactly") {
    const auto pair = make_appell_pair(
        ProblemParams{1, 1.5}, Sign::Plus, {},
        [](double r) {
            const double K = 0.7, c = 3.0;
            return StepRecord::Eval{K * std::pow(r, 1.5) * (1.0 + c / (r * r)),
                                    0.0, 0.0};
        },
        1e9);
    REQUIRE(pair.ell == 1.0); // all-positive: the plain heat-kernel Gaussian
    const auto dk = decay_check(pair, 6.0);
    REQUIRE(dk.finite);
    // Richardson in r^{-2} is exact on a pure r^{-2} correction.
    REQUIRE(dk.limit == Catch::Approx(0.7).margin(1e-12));
}

TEST_CASE("dual homogeneities follow the source exponents") {
    const int N = 1;
    std::vector<double> beta_plus, beta_minus;
    for (double a : oracles::kMatchedPlusN1) beta_plus.push_back(-N - a);
    for (double a : oracles::kMatchedMinusN1) beta_minus.push_back(-N - a);
    // beta^+_1 < -N-2 < beta^-_1 < -N.
    REQUIRE(beta_plus[0] < -3.0);
    REQUIRE(beta_minus[0] > -3.0);
    REQUIRE(beta_minus[0] < -1.0);
    // Strictly decreasing in k, and the interlacing transfers.
    for (std::size_t k = 1; k < beta_plus.size(); ++k)
        REQUIRE(beta_plus[k] < beta_plus[k - 1]);
    for (std::size_t k = 1; k < beta_minus.size(); ++k)
        REQUIRE(beta_minus[k] < beta_minus[k - 1]);
    REQUIRE(beta_minus[2] < beta_plus[1]);
    REQUIRE(beta_plus[1] < beta_minus[0]);
}

TEST_CASE("dual profiles with beta in [-N, 0) never change sign") {
    const auto exact = nonsign_check(-1.0, 1);
    REQUIRE(exact.sign_constant);
    REQUIRE(exact.max_gaussian_dev <= 1e-10); // the Gaussian itself
    REQUIRE(exact.pass);

    const auto half = nonsign_check(-0.5, 1);
    REQUIRE(half.sign_constant);
    REQUIRE(half.min_gap > 0.0);
    REQUIRE(half.pass);

    for (int j = 0; j < 10; ++j)
        REQUIRE(nonsign_check(-1.0 + 0.1 * j, 1).pass);

    REQUIRE(nonsign_check(-2.0, 2).max_gaussian_dev <= 1e-10);
    REQUIRE(nonsign_check(-1.2, 3).pass);

    REQUIRE_THROWS_AS(nonsign_check(-1.5, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(nonsign_check(0.0, 1), std::invalid_argument);
}

TEST_CASE("growing-weight quotients stay above the dual bound") {
    for (int N : {1, 2}) {
        const auto qs = dual_weight_quotients(N, 4.0, 10, 20260825u);
        REQUIRE(qs.size() == 10);
        for (double q : qs) {
            REQUIRE(q >= 0.0); // ratio of nonnegative integrals
            REQUIRE(q >= -0.5 * N);
        }
    }
    REQUIRE_THROWS_AS(dual_weight_quotients(1, -1.0, 10, 1u), std::invalid_argument);
}
