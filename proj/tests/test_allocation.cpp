#include <doctest.h>

#include <cmath>

#include "vigil/allocation.hpp"
#include "vigil/risk.hpp"
#include "vigil/errors.hpp"
#include "vigil/rng.hpp"

using namespace vigil;

namespace {

VulnerabilityState unit_loss_state(double unit_loss) {
    // alpha concentrated at level 1 with c[1] = 1 makes expected_loss = k.
    VulnerabilityState vs;
    vs.alpha = {1e-9, 1.0, 1e-9, 1e-9, 1e-9, 1e-9};
    vs.beta_ab = {BetaAB{}};
    vs.rate_product = GammaKT{unit_loss, 1.0};
    return vs;
}

// Exhaustive simplex search at the given resolution.
std::vector<double> grid_search_2(double l1, double l2, double step,
                                  const InterventionCurve& curve = {}) {
    double best = 1e300;
    std::vector<double> best_r{0.5, 0.5};
    for (double r1 = 0.0; r1 <= 1.0 + 1e-12; r1 += step) {
        const std::vector<double> r{r1, 1.0 - r1};
        const std::vector<double> losses{l1, l2};
        const double f = allocation_objective(losses, r, curve);
        if (f < best) {
            best = f;
            best_r = r;
        }
    }
    return best_r;
}

std::vector<double> grid_search_3(double l1, double l2, double l3, double step,
                                  const InterventionCurve& curve = {}) {
    double best = 1e300;
    std::vector<double> best_r{1.0 / 3, 1.0 / 3, 1.0 / 3};
    const std::vector<double> losses{l1, l2, l3};
    for (double r1 = 0.0; r1 <= 1.0 + 1e-12; r1 += step) {
        for (double r2 = 0.0; r2 + r1 <= 1.0 + 1e-12; r2 += step) {
            const std::vector<double> r{r1, r2, 1.0 - r1 - r2};
            const double f = allocation_objective(losses, r, curve);
            if (f < best) {
                best = f;
                best_r = r;
            }
        }
    }
    return best_r;
}

}  // namespace

TEST_CASE("intervention response hits its design points") {
    CHECK(std::abs(intervention_response(0.34) - 0.5) < 1e-12);
    CHECK(intervention_response(0.5) == doctest::Approx(1.0 / (1.0 + std::exp(-2.4))));
    CHECK(intervention_response(0.5) > 0.90);
    CHECK(intervention_response(0.5) < 0.93);
    CHECK(intervention_response(0.0) == doctest::Approx(1.0 / (1.0 + std::exp(5.1))));
    CHECK(intervention_response(0.0) < 0.01);

    // Strictly increasing.
    double prev = intervention_response(0.0);
    for (int i = 1; i <= 100; ++i) {
        const double h = intervention_response(i / 100.0);
        CHECK(h > prev);
        prev = h;
    }
}

TEST_CASE("conditional expected loss scales the unconditional one") {
    const VulnerabilityState vs = unit_loss_state(8.0);
    LossVector c;
    const double base = expected_loss(vs, c);
    CHECK(conditional_expected_loss(vs, c, 0.34) == doctest::Approx(0.5 * base).epsilon(1e-9));
    CHECK(conditional_expected_loss(vs, c, 0.0) ==
          doctest::Approx((1.0 - 1.0 / (1.0 + std::exp(5.1))) * base).epsilon(1e-9));

    double prev = conditional_expected_loss(vs, c, 0.0);
    for (int i = 1; i <= 100; ++i) {
        const double v = conditional_expected_loss(vs, c, i / 100.0);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("allocation gradient matches central finite differences") {
    Rng rng(21);
    for (int point = 0; point < 20; ++point) {
        const std::size_t n = 2 + rng.uniform_int(4);
        std::vector<double> losses(n), r(n);
        for (double& l : losses) l = 0.5 + 20.0 * rng.uniform();
        for (double& v : r) v = 0.05 + 0.9 * rng.uniform();
        const std::vector<double> grad = allocation_objective_gradient(losses, r);
        for (std::size_t i = 0; i < n; ++i) {
            const double h = 1e-6;
            std::vector<double> hi = r, lo = r;
            hi[i] += h;
            lo[i] -= h;
            const double numeric =
                (allocation_objective(losses, hi) - allocation_objective(losses, lo)) /
                (2.0 * h);
            const double scale = std::max({1.0, std::abs(numeric), std::abs(grad[i])});
            CHECK(std::abs(grad[i] - numeric) / scale < 1e-6);
        }
    }
}

TEST_CASE("identical vulnerabilities get the uniform allocation") {
    for (std::size_t n : {2, 3, 5, 7}) {
        std::vector<VulnerabilityState> states(n, unit_loss_state(4.0));
        const AllocationResult res = optimize_allocation(states, LossVector{});
        CHECK(res.converged);
        for (double r : res.proportions) {
            CHECK(std::abs(r - 1.0 / static_cast<double>(n)) < 1e-6);
        }
    }
}

TEST_CASE("a dominant vulnerability takes nearly everything") {
    std::vector<VulnerabilityState> states{unit_loss_state(100.0), unit_loss_state(1e-9)};
    OptConfig cfg;
    const AllocationResult res = optimize_allocation(states, LossVector{}, cfg);
    const std::vector<double> grid = grid_search_2(100.0, 1e-9, 1e-4);
    CHECK(std::abs(res.proportions[0] - grid[0]) < 0.01);
    CHECK(res.proportions[0] > 0.98);
    CHECK(res.proportions[1] >= cfg.min_proportion);
}

TEST_CASE("three-way allocation matches the grid oracle") {
    std::vector<VulnerabilityState> states{unit_loss_state(10.0), unit_loss_state(10.0),
                                           unit_loss_state(1.0)};
    const AllocationResult res = optimize_allocation(states, LossVector{});
    const std::vector<double> grid = grid_search_3(10.0, 10.0, 1.0, 1e-3);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(res.proportions[i] - grid[i]) < 0.01);
    }
}

TEST_CASE("allocation output is feasible and never worse than uniform") {
    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 2 + rng.uniform_int(6);
        std::vector<double> losses(n);
        for (double& l : losses) l = 30.0 * rng.uniform();
        const AllocationResult res = optimize_allocation_units(losses);

        double total = 0.0;
        for (double r : res.proportions) {
            CHECK(r >= 1e-6);
            total += r;
        }
        CHECK(std::abs(total - 1.0) < 1e-9);

        const std::vector<double> uniform(n, 1.0 / static_cast<double>(n));
        CHECK(res.objective_value <=
              allocation_objective(losses, uniform) + 1e-12);
        CHECK(res.objective_value ==
              doctest::Approx(allocation_objective(losses, res.proportions))
                  .epsilon(1e-9));
    }
}

TEST_CASE("permuting the states permutes the allocation") {
    std::vector<double> losses{3.0, 11.0, 6.5, 0.4};
    const AllocationResult base = optimize_allocation_units(losses);
    std::vector<double> permuted{11.0, 0.4, 3.0, 6.5};
    const AllocationResult perm = optimize_allocation_units(permuted);
    CHECK(perm.proportions[0] == doctest::Approx(base.proportions[1]).epsilon(1e-9));
    CHECK(perm.proportions[1] == doctest::Approx(base.proportions[3]).epsilon(1e-9));
    CHECK(perm.proportions[2] == doctest::Approx(base.proportions[0]).epsilon(1e-9));
    CHECK(perm.proportions[3] == doctest::Approx(base.proportions[2]).epsilon(1e-9));
}

TEST_CASE("higher unit loss never receives a smaller share") {
    Rng rng(33);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> losses(4);
        for (double& l : losses) l = 0.5 + 15.0 * rng.uniform();
        const AllocationResult res = optimize_allocation_units(losses);
        for (std::size_t i = 0; i < losses.size(); ++i) {
            for (std::size_t j = 0; j < losses.size(); ++j) {
                if (losses[i] > losses[j]) {
                    CHECK(res.proportions[i] >= res.proportions[j] - 1e-9);
                }
            }
        }
    }
}

TEST_CASE("optimizer validates its inputs") {
    std::vector<double> one{1.0};
    CHECK_THROWS_AS(optimize_allocation_units(one), DataError);

    OptConfig bad;
    bad.min_proportion = 0.5;  // 0.5 * 3 >= 1
    std::vector<double> three{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(optimize_allocation_units(three, bad), DataError);
}
