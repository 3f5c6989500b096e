#include "vigil/risk.hpp"

#include <algorithm>
#include <cmath>

#include "vigil/errors.hpp"
#include "vigil/rng.hpp"

namespace vigil {

namespace {

const GammaKT& rate_fit(const VulnerabilityState& state) {
    if (!state.rate_product) {
        throw MissingFitError("rate-product fit absent; run a daily update first");
    }
    return *state.rate_product;
}

double alpha_total(const VulnerabilityState& state) {
    double total = 0.0;
    for (double a : state.alpha) total += a;
    return total;
}

}  // namespace

std::array<double, kHurtLevels> expected_hurt_counts(const VulnerabilityState& state) {
    const GammaKT& g = rate_fit(state);
    const double total = alpha_total(state);
    std::array<double, kHurtLevels> out{};
    for (int j = 0; j < kHurtLevels; ++j) {
        out[j] = g.mean() * state.alpha[j] / total;
    }
    return out;
}

double expected_loss(const VulnerabilityState& state, const LossVector& c) {
    const GammaKT& g = rate_fit(state);
    double weighted = 0.0;
    for (int j = 0; j < kHurtLevels; ++j) weighted += c.c[j] * state.alpha[j];
    return g.mean() * weighted / alpha_total(state);
}

double tail_probability(const VulnerabilityState& state, HurtLevel min_level) {
    const GammaKT& g = rate_fit(state);
    double severe = 0.0;
    for (int j = min_level.level; j < kHurtLevels; ++j) severe += state.alpha[j];
    const double q = severe / alpha_total(state);
    if (q < 1e-15) return 0.0;
    return 1.0 - std::pow(1.0 + g.theta * q, -g.k);
}

VarCvar var_cvar(const VulnerabilityState& state, const LossVector& c, double confidence,
                 long n_draws, std::uint64_t seed) {
    if (!(confidence > 0.5) || !(confidence < 1.0)) {
        throw DataError("confidence must lie in (0.5, 1)");
    }
    const double tail_draws = static_cast<double>(n_draws) * (1.0 - confidence);
    if (tail_draws < 1000.0) {
        throw InsufficientDrawsError(
            "need at least 1000 draws above the quantile; got " +
            std::to_string(static_cast<long>(tail_draws)));
    }
    const GammaKT& g = rate_fit(state);

    Rng rng(mix_seed(seed, 0x76617263ULL));
    std::vector<double> losses(static_cast<std::size_t>(n_draws));
    for (double& loss : losses) {
        const double rate = rng.gamma(g.k, g.theta);
        const std::vector<double> p = rng.dirichlet(state.alpha);
        const long n_e = rng.poisson(rate);
        double total = 0.0;
        for (long e = 0; e < n_e; ++e) {
            total += c.c[rng.categorical(p)];
        }
        loss = total;
    }

    std::sort(losses.begin(), losses.end());
    const std::size_t idx = static_cast<std::size_t>(
        std::ceil(confidence * static_cast<double>(n_draws))) - 1;
    const double var = losses[idx];

    double cvar_sum = 0.0;
    long cvar_count = 0;
    for (double loss : losses) {
        if (loss >= var) {
            cvar_sum += loss;
            ++cvar_count;
        }
    }
    return VarCvar{var, cvar_sum / static_cast<double>(cvar_count), confidence};
}

RiskReport make_risk_report(const std::string& vuln_id, long day,
                            const VulnerabilityState& state, const LossVector& c) {
    RiskReport r;
    r.vuln_id = vuln_id;
    r.day = day;
    r.expected_hurt_counts = expected_hurt_counts(state);
    r.expected_loss = expected_loss(state, c);
    r.tail_probability = tail_probability(state);
    return r;
}

}  // namespace vigil
