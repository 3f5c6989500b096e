#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "vigil/errors.hpp"
#include "vigil/risk.hpp"
#include "vigil/rng.hpp"

using namespace vigil;

namespace {

VulnerabilityState state_with(double k, double theta,
                              std::array<double, kHurtLevels> alpha) {
    VulnerabilityState vs;
    vs.alpha = alpha;
    vs.beta_ab = {BetaAB{}};
    vs.rate_product = GammaKT{k, theta};
    return vs;
}

}  // namespace

TEST_CASE("expected hurt counts scale the Dirichlet mean by the rate") {
    const auto uniform = expected_hurt_counts(state_with(1.0, 1.0, {1, 1, 1, 1, 1, 1}));
    for (double v : uniform) CHECK(v == doctest::Approx(1.0 / 6).epsilon(1e-12));

    const auto skewed =
        expected_hurt_counts(state_with(2.0, 0.5, {5, 3, 1, 0.5, 0.3, 0.2}));
    const std::array<double, kHurtLevels> expected{0.5, 0.3, 0.1, 0.05, 0.03, 0.02};
    for (int j = 0; j < kHurtLevels; ++j) {
        CHECK(skewed[j] == doctest::Approx(expected[j]).epsilon(1e-12));
    }

    // Rescaling alpha leaves the output unchanged.
    const auto scaled =
        expected_hurt_counts(state_with(2.0, 0.5, {50, 30, 10, 5, 3, 2}));
    for (int j = 0; j < kHurtLevels; ++j) {
        CHECK(scaled[j] == doctest::Approx(skewed[j]).epsilon(1e-12));
    }
}

TEST_CASE("expected loss matches the direct formula") {
    const VulnerabilityState vs = state_with(2.0, 0.5, {5, 3, 1, 0.5, 0.3, 0.2});
    LossVector c;
    CHECK(expected_loss(vs, c) == doctest::Approx(236.3).epsilon(1e-12));

    const VulnerabilityState safe = state_with(2.0, 0.5, {10, 1e-9, 1e-9, 1e-9, 1e-9, 1e-9});
    CHECK(expected_loss(safe, c) < 1e-5);  // all mass at the zero-loss level

    // Identity against expected_hurt_counts.
    const auto counts = expected_hurt_counts(vs);
    CHECK(expected_loss(vs, c) == doctest::Approx(c.dot(counts)).epsilon(1e-12));
}

TEST_CASE("expected loss requires a fitted rate product") {
    VulnerabilityState vs;
    vs.beta_ab = {BetaAB{}};
    CHECK_THROWS_AS(expected_loss(vs, LossVector{}), MissingFitError);
    CHECK_THROWS_AS(expected_hurt_counts(vs), MissingFitError);
    CHECK_THROWS_AS(tail_probability(vs), MissingFitError);
}

TEST_CASE("tail probability closed form") {
    // No severe mass.
    CHECK(tail_probability(state_with(1.0, 1.0, {1, 1, 1, 1e-16, 1e-16, 1e-16})) == 0.0);

    // q = 1, Gamma(1,1) rate: geometric zero class, P = 1 - 1/2.
    const VulnerabilityState all_severe =
        state_with(1.0, 1.0, {1e-12, 1e-12, 1e-12, 1e-12, 0.5, 0.5});
    CHECK(tail_probability(all_severe) == doctest::Approx(0.5).epsilon(1e-9));

    // Monte Carlo oracle: thinned Poisson with Gamma-mixed rate.
    const VulnerabilityState vs = state_with(1.7, 2.1, {4, 2, 1, 0.8, 0.4, 0.1});
    double q = (0.4 + 0.1) / (4 + 2 + 1 + 0.8 + 0.4 + 0.1);
    Rng rng(99);
    const int n = 1000000;
    long hits = 0;
    for (int i = 0; i < n; ++i) {
        const double rate = rng.gamma(1.7, 2.1);
        if (rng.poisson(rate * q) > 0) ++hits;
    }
    const double mc = static_cast<double>(hits) / n;
    const double se = std::sqrt(mc * (1.0 - mc) / n);
    CHECK(std::abs(tail_probability(vs) - mc) < 3 * se);
}

TEST_CASE("tail probability is monotone in its drivers") {
    const auto base = state_with(1.5, 0.8, {3, 2, 1, 0.5, 0.4, 0.1});
    const double t0 = tail_probability(base);
    CHECK(tail_probability(state_with(1.5, 1.2, {3, 2, 1, 0.5, 0.4, 0.1})) > t0);
    CHECK(tail_probability(state_with(2.5, 0.8, {3, 2, 1, 0.5, 0.4, 0.1})) > t0);
    CHECK(tail_probability(state_with(1.5, 0.8, {3, 2, 1, 0.5, 0.9, 0.1})) > t0);
}

TEST_CASE("expected loss is homogeneous in the loss vector") {
    const VulnerabilityState vs = state_with(1.3, 0.9, {2, 2, 1, 1, 0.5, 0.5});
    LossVector c;
    LossVector scaled;
    for (int j = 0; j < kHurtLevels; ++j) scaled.c[j] = 3.5 * c.c[j];
    CHECK(expected_loss(vs, scaled) ==
          doctest::Approx(3.5 * expected_loss(vs, c)).epsilon(1e-12));
}

TEST_CASE("ranking by expected loss survives uniform alpha rescaling") {
    LossVector c;
    const VulnerabilityState a = state_with(2.0, 0.7, {5, 1, 1, 0.5, 0.2, 0.1});
    const VulnerabilityState b = state_with(1.0, 0.9, {2, 1, 1, 1, 0.5, 0.4});
    const bool a_riskier = expected_loss(a, c) > expected_loss(b, c);

    auto scale = [](VulnerabilityState vs, double s) {
        for (double& x : vs.alpha) x *= s;
        return vs;
    };
    const bool scaled_riskier =
        expected_loss(scale(a, 7.3), c) > expected_loss(scale(b, 7.3), c);
    CHECK(a_riskier == scaled_riskier);
}

TEST_CASE("VaR and CVaR on a degenerate loss distribution") {
    const VulnerabilityState safe =
        state_with(1.0, 1.0, {10, 1e-12, 1e-12, 1e-12, 1e-12, 1e-12});
    const VarCvar v = var_cvar(safe, LossVector{}, 0.9, 20000, 5);
    CHECK(v.var == 0.0);
    CHECK(v.cvar == 0.0);
}

TEST_CASE("CVaR dominates VaR") {
    Rng rng(6);
    for (int trial = 0; trial < 5; ++trial) {
        std::array<double, kHurtLevels> alpha{};
        for (double& v : alpha) v = 0.2 + 3.0 * rng.uniform();
        const VulnerabilityState vs =
            state_with(0.5 + 2.0 * rng.uniform(), 0.2 + rng.uniform(), alpha);
        const VarCvar v = var_cvar(vs, LossVector{}, 0.9, 20000, 1234 + trial);
        CHECK(v.cvar >= v.var);
    }
}

TEST_CASE("VaR matches the geometric count enumeration") {
    // Gamma(1, 1) mixed Poisson counts are geometric with success 1/2, and
    // with all severity mass at level 5 each incident costs 10000. The 0.9
    // quantile of the count is the smallest n with 1 - 2^-(n+1) >= 0.9.
    const VulnerabilityState vs =
        state_with(1.0, 1.0, {1e-9, 1e-9, 1e-9, 1e-9, 1e-9, 1.0});
    const VarCvar v = var_cvar(vs, LossVector{}, 0.9, 100000, 77);
    CHECK(v.var == doctest::Approx(30000.0));
}

TEST_CASE("VaR guards its draw budget") {
    const VulnerabilityState vs = state_with(1.0, 1.0, {1, 1, 1, 1, 1, 1});
    CHECK_THROWS_AS(var_cvar(vs, LossVector{}, 0.999, 100000, 1), InsufficientDrawsError);
    CHECK_THROWS_AS(var_cvar(vs, LossVector{}, 0.4, 100000, 1), DataError);
}
