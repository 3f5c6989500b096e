#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "vigil/errors.hpp"
#include "vigil/fit.hpp"
#include "vigil/rng.hpp"
#include "vigil/target.hpp"
#include "vigil/update.hpp"

using namespace vigil;
using vigil::testing::mc_standard_error;
using vigil::testing::mean_of;

namespace {

std::array<double, kHurtLevels> ones() { return {1, 1, 1, 1, 1, 1}; }

double total_of(const std::array<double, kHurtLevels>& a) {
    double t = 0.0;
    for (double v : a) t += v;
    return t;
}

std::vector<HurtLevel> levels(std::initializer_list<int> ls) {
    std::vector<HurtLevel> out;
    for (int l : ls) out.push_back(HurtLevel{l});
    return out;
}

}  // namespace

TEST_CASE("AHL counting update adds pseudo-counts per level") {
    const auto updated = update_hurt_dirichlet(ones(), levels({0, 0, 1}));
    CHECK(updated == std::array<double, kHurtLevels>{3, 2, 1, 1, 1, 1});

    CHECK(update_hurt_dirichlet(ones(), {}) == ones());

    std::array<double, kHurtLevels> half{0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
    const auto top = update_hurt_dirichlet(half, levels({5}));
    CHECK(top == std::array<double, kHurtLevels>{0.5, 0.5, 0.5, 0.5, 0.5, 1.5});
}

TEST_CASE("PHL tail update matches the worked examples") {
    const auto a24 = update_hurt_phl(ones(), HurtLevel{2}, HurtLevel{4});
    const std::array<double, kHurtLevels> expected24{1, 1, 0.8, 0.8, 1.6, 0.8};
    for (int j = 0; j < kHurtLevels; ++j) {
        CHECK(a24[j] == doctest::Approx(expected24[j]).epsilon(1e-12));
    }
    double tail = 0.0;
    for (int j = 2; j < kHurtLevels; ++j) tail += a24[j];
    CHECK(tail == doctest::Approx(4.0).epsilon(1e-12));

    const auto a33 = update_hurt_phl(ones(), HurtLevel{3}, HurtLevel{3});
    const std::array<double, kHurtLevels> expected33{1, 1, 1, 1.5, 0.75, 0.75};
    for (int j = 0; j < kHurtLevels; ++j) {
        CHECK(a33[j] == doctest::Approx(expected33[j]).epsilon(1e-12));
    }
}

TEST_CASE("PHL tail update conserves mass and freezes the front") {
    Rng rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        std::array<double, kHurtLevels> alpha{};
        for (double& v : alpha) v = 0.1 + 5.0 * rng.uniform();
        const int a = static_cast<int>(rng.uniform_int(kHurtLevels));
        const int p = a + static_cast<int>(rng.uniform_int(kHurtLevels - a));
        const auto updated = update_hurt_phl(alpha, HurtLevel{a}, HurtLevel{p});

        CHECK(total_of(updated) == doctest::Approx(total_of(alpha)).epsilon(1e-12));
        for (int j = 0; j < a; ++j) {
            CHECK(updated[j] == alpha[j]);  // bit-identical below the AHL
        }
    }
    CHECK_THROWS_AS(update_hurt_phl(ones(), HurtLevel{3}, HurtLevel{1}), DataError);
}

TEST_CASE("two PHL updates conserve the total in either order") {
    std::array<double, kHurtLevels> alpha{2.0, 0.7, 1.3, 0.4, 3.1, 0.9};
    const auto ab = update_hurt_phl(update_hurt_phl(alpha, HurtLevel{1}, HurtLevel{4}),
                                    HurtLevel{2}, HurtLevel{2});
    const auto ba = update_hurt_phl(update_hurt_phl(alpha, HurtLevel{2}, HurtLevel{2}),
                                    HurtLevel{1}, HurtLevel{4});
    CHECK(total_of(ab) == doctest::Approx(total_of(alpha)).epsilon(1e-12));
    CHECK(total_of(ba) == doctest::Approx(total_of(ab)).epsilon(1e-12));
}

TEST_CASE("gamma fit recovers a known generator") {
    Rng rng(101);
    std::vector<double> draws(10000);
    for (double& d : draws) d = rng.gamma(2.0, 3.0);
    const GammaKT fit = fit_gamma(draws);
    CHECK(std::abs(fit.k - 2.0) < 0.1);
    CHECK(std::abs(fit.theta - 3.0) < 0.15);
}

TEST_CASE("beta fit recovers a known generator") {
    Rng rng(102);
    std::vector<double> draws(10000);
    for (double& d : draws) d = rng.beta(5.0, 2.0);
    const BetaAB fit = fit_beta(draws);
    CHECK(std::abs(fit.a - 5.0) < 0.25);
    CHECK(std::abs(fit.b - 2.0) < 0.25);
}

TEST_CASE("dirichlet fit recovers a known generator") {
    Rng rng(103);
    const std::vector<double> conc{2.0, 2.0, 2.0};
    std::vector<std::vector<double>> draws(10000);
    for (auto& d : draws) d = rng.dirichlet(conc);
    const std::vector<double> fit = fit_dirichlet(draws);
    REQUIRE(fit.size() == 3);
    for (double x : fit) CHECK(std::abs(x - 2.0) < 0.3);
}

TEST_CASE("refitting the fitted family is a contraction") {
    Rng rng(104);
    std::vector<double> draws(10000);
    for (double& d : draws) d = rng.gamma(4.0, 0.5);
    const GammaKT first = fit_gamma(draws);
    for (double& d : draws) d = rng.gamma(first.k, first.theta);
    const GammaKT second = fit_gamma(draws);
    CHECK(std::abs(second.k - first.k) < 0.15);
    CHECK(std::abs(second.theta - first.theta) < 0.05);
}

TEST_CASE("degenerate samples are rejected") {
    std::vector<double> flat(500, 0.25);
    GlobalState global = GlobalState::make_default({"X"}, {"v1"});
    SampleSet samples;
    samples.obs_types = {"X"};
    samples.vuln_ids = {"v1"};
    for (int i = 0; i < 500; ++i) {
        LatentDraw d;
        d.w = {1.0};
        d.beta = {0.5};
        d.kappa = {{0.25}};
        samples.draws.push_back(d);
    }
    CHECK_THROWS_AS(refit_hyperparameters(samples, global), DegenerateSampleError);
}

TEST_CASE("sampler gradient matches central finite differences") {
    GlobalState global = GlobalState::make_default({"X1", "X2"}, {"v1", "v2"});
    global.xi = {1.5, 2.5};
    global.vulns.at("v1").beta_prior = GammaKT{2.0, 0.5};
    global.vulns.at("v1").beta_ab = {BetaAB{2.0, 3.0}, BetaAB{1.5, 1.5}};
    global.vulns.at("v2").beta_prior = GammaKT{1.0, 2.0};
    global.vulns.at("v2").beta_ab = {BetaAB{0.8, 0.9}, BetaAB{3.0, 1.0}};

    DailyRecord rec;
    rec.vuln_id = "v1";
    rec.day = 1;
    rec.obs["X1"] = ObsCounts{12, 4};
    rec.obs["X2"] = ObsCounts{6, 2};
    rec.incidents.emplace();
    for (int e = 0; e < 3; ++e) {
        rec.incidents->push_back(Incident{HurtLevel{0}, HurtLevel{1}});
    }

    const CountsPosterior target(global, {rec});
    Rng rng(42);
    std::vector<double> x(target.dim()), grad(target.dim());
    for (int point = 0; point < 20; ++point) {
        for (double& v : x) v = 2.0 * rng.uniform() - 1.0;
        target.log_density_gradient(x, grad);
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double h = 1e-5 * std::max(1.0, std::abs(x[i]));
            std::vector<double> hi = x, lo = x;
            hi[i] += h;
            lo[i] -= h;
            const double numeric =
                (target.log_density(hi) - target.log_density(lo)) / (2.0 * h);
            const double scale = std::max({1.0, std::abs(numeric), std::abs(grad[i])});
            CHECK(std::abs(grad[i] - numeric) / scale < 1e-5);
        }
    }
}

TEST_CASE("empty records leave the posterior at the prior") {
    GlobalState global = GlobalState::make_default({"X1", "X2"}, {"v1"});
    global.xi = {2.0, 1.0};
    global.vulns.at("v1").beta_prior = GammaKT{2.0, 0.5};
    global.vulns.at("v1").beta_ab = {BetaAB{2.0, 5.0}, BetaAB{4.0, 4.0}};

    McmcConfig cfg;
    cfg.n_warmup = 300;
    cfg.n_kept = 3000;
    cfg.seed = 90210;
    const SampleSet samples = sample_posterior(global, {}, cfg);
    CHECK(samples.draws.size() == 3000);

    std::vector<double> kappa0, kappa1, beta, w0;
    for (const LatentDraw& d : samples.draws) {
        kappa0.push_back(d.kappa[0][0]);
        kappa1.push_back(d.kappa[0][1]);
        beta.push_back(d.beta[0]);
        w0.push_back(d.w[0]);
    }
    // Prior means: Beta(2,5) -> 2/7, Beta(4,4) -> 1/2, Gamma(2,.5) -> 1,
    // Dirichlet(2,1) -> 2/3.
    CHECK(std::abs(mean_of(kappa0) - 2.0 / 7) < 3 * mc_standard_error(kappa0));
    CHECK(std::abs(mean_of(kappa1) - 0.5) < 3 * mc_standard_error(kappa1));
    CHECK(std::abs(mean_of(beta) - 1.0) < 3 * mc_standard_error(beta));
    CHECK(std::abs(mean_of(w0) - 2.0 / 3) < 3 * mc_standard_error(w0));
}

TEST_CASE("kappa posterior matches the Beta-Binomial closed form") {
    GlobalState global = GlobalState::make_default({"X"}, {"v1"});
    global.vulns.at("v1").beta_ab = {BetaAB{2.0, 3.0}};

    DailyRecord rec;
    rec.vuln_id = "v1";
    rec.day = 1;
    rec.obs["X"] = ObsCounts{10, 3};
    // incident channel not recorded: the Poisson term drops out

    McmcConfig cfg;
    cfg.n_warmup = 300;
    cfg.n_kept = 3000;
    cfg.seed = 7;
    const SampleSet samples = sample_posterior(global, {rec}, cfg);

    std::vector<double> kappa;
    for (const LatentDraw& d : samples.draws) kappa.push_back(d.kappa[0][0]);
    const double posterior_mean = (2.0 + 3.0) / (2.0 + 3.0 + 10.0);
    CHECK(std::abs(mean_of(kappa) - posterior_mean) < 3 * mc_standard_error(kappa));
}

TEST_CASE("beta posterior matches the Gamma-Poisson closed form") {
    GlobalState global = GlobalState::make_default({"X"}, {"v1"});
    global.vulns.at("v1").beta_prior = GammaKT{2.0, 1.5};
    global.vulns.at("v1").beta_ab = {BetaAB{1e6, 1.0}};  // pins kappa at ~1

    DailyRecord rec;
    rec.vuln_id = "v1";
    rec.day = 1;
    rec.incidents.emplace();
    for (int e = 0; e < 4; ++e) {
        rec.incidents->push_back(Incident{HurtLevel{0}, HurtLevel{0}});
    }

    McmcConfig cfg;
    cfg.n_warmup = 300;
    cfg.n_kept = 3000;
    cfg.seed = 8;
    const SampleSet samples = sample_posterior(global, {rec}, cfg);

    std::vector<double> beta;
    for (const LatentDraw& d : samples.draws) beta.push_back(d.beta[0]);
    const double posterior_mean = (2.0 + 4.0) * (1.5 / (1.0 + 1.5));
    CHECK(std::abs(mean_of(beta) - posterior_mean) < 3 * mc_standard_error(beta));
}

TEST_CASE("sampler rejects malformed inputs") {
    GlobalState global = GlobalState::make_default({"X"}, {"v1"});
    McmcConfig cfg;
    cfg.seed = 1;

    DailyRecord unknown;
    unknown.vuln_id = "nope";
    unknown.day = 1;
    CHECK_THROWS_AS(sample_posterior(global, {unknown}, cfg), DimensionError);

    DailyRecord bad_type;
    bad_type.vuln_id = "v1";
    bad_type.day = 1;
    bad_type.obs["Y"] = ObsCounts{1, 0};
    CHECK_THROWS_AS(sample_posterior(global, {bad_type}, cfg), DimensionError);

    McmcConfig small = cfg;
    small.n_kept = 50;
    CHECK_THROWS_AS(sample_posterior(global, {}, small), DataError);
}

TEST_CASE("daily update with no records keeps alpha bit-identical") {
    GlobalState global = GlobalState::make_default({"X1", "X2"}, {"v1", "v2"});
    global.vulns.at("v1").alpha = {1.5, 1.25, 1, 1, 1, 0.25};
    McmcConfig cfg;
    cfg.seed = 3;

    const GlobalState next = daily_update(global, {}, cfg);
    CHECK(next.day == 1);
    CHECK(next.vulns.at("v1").alpha == global.vulns.at("v1").alpha);
    CHECK(next.vulns.at("v2").alpha == global.vulns.at("v2").alpha);
    CHECK(next.vulns.at("v1").rate_product.has_value());
}

TEST_CASE("daily update folds severities through both stages") {
    GlobalState global = GlobalState::make_default({"X"}, {"v1"});
    McmcConfig cfg;
    cfg.seed = 4;

    DailyRecord rec;
    rec.vuln_id = "v1";
    rec.day = 1;
    rec.incidents.emplace();
    rec.incidents->push_back(Incident{HurtLevel{1}, HurtLevel{3}});
    rec.incidents->push_back(Incident{HurtLevel{0}, HurtLevel{0}});

    const GlobalState next = daily_update(global, {rec}, cfg);

    // Manual two-stage update: counts first, then per-incident tail updates.
    auto alpha = update_hurt_dirichlet(ones(), levels({1, 0}));
    alpha = update_hurt_phl(alpha, HurtLevel{1}, HurtLevel{3});
    alpha = update_hurt_phl(alpha, HurtLevel{0}, HurtLevel{0});
    for (int j = 0; j < kHurtLevels; ++j) {
        CHECK(next.vulns.at("v1").alpha[j] == doctest::Approx(alpha[j]).epsilon(1e-12));
    }

    // Ablation switch skips the tail stage.
    const GlobalState without = daily_update(global, {rec}, cfg, false);
    const auto counted = update_hurt_dirichlet(ones(), levels({1, 0}));
    for (int j = 0; j < kHurtLevels; ++j) {
        CHECK(without.vulns.at("v1").alpha[j] == doctest::Approx(counted[j]).epsilon(1e-12));
    }
}

TEST_CASE("daily update is deterministic and rejects misdated records") {
    GlobalState global = GlobalState::make_default({"X"}, {"v1"});
    McmcConfig cfg;
    cfg.seed = 5;

    DailyRecord rec;
    rec.vuln_id = "v1";
    rec.day = 1;
    rec.obs["X"] = ObsCounts{4, 1};
    rec.incidents.emplace();

    const GlobalState a = daily_update(global, {rec}, cfg);
    const GlobalState b = daily_update(global, {rec}, cfg);
    CHECK(a.xi == b.xi);
    CHECK(a.vulns.at("v1").beta_prior.k == b.vulns.at("v1").beta_prior.k);
    CHECK(a.vulns.at("v1").rate_product->theta == b.vulns.at("v1").rate_product->theta);

    DailyRecord wrong_day = rec;
    wrong_day.day = 5;
    CHECK_THROWS_AS(daily_update(global, {wrong_day}, cfg), DataError);
}
