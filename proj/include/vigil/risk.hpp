#pragma once

#include <cstdint>
#include <optional>

#include "vigil/types.hpp"

// Per-vulnerability risk metrics from a calibrated state. The incident rate
// kappa * beta is carried as a Gamma fit (k, theta); the Hurt-level
// distribution as a Dirichlet. The expected daily severity counts are then
// k * theta * alpha / sum(alpha), and the expected loss is their dot product
// with the loss vector.

namespace vigil {

struct VarCvar {
    double var = 0.0;
    double cvar = 0.0;
    double confidence = 0.0;
};

struct RiskReport {
    std::string vuln_id;
    long day = 0;
    double expected_loss = 0.0;
    double tail_probability = 0.0;
    std::array<double, kHurtLevels> expected_hurt_counts{};
    std::optional<VarCvar> var_cvar;
};

// k * theta * alpha / sum(alpha). Throws MissingFitError before the first
// rate-product fit.
std::array<double, kHurtLevels> expected_hurt_counts(const VulnerabilityState& state);

// c . expected_hurt_counts.
double expected_loss(const VulnerabilityState& state, const LossVector& c);

// Probability that at least one incident of severity >= min_level occurs in
// a day: 1 - (1 + theta * q)^(-k) with q the posterior-mean severe mass.
// The Gamma rate is marginalized exactly; q plugs in the Dirichlet mean.
double tail_probability(const VulnerabilityState& state, HurtLevel min_level = HurtLevel{4});

// Monte Carlo value-at-risk and conditional value-at-risk of the daily loss
// under the posterior predictive. Deterministic given seed. Requires
// 0.5 < confidence < 1 and at least 1000 draws above the quantile, else
// InsufficientDrawsError.
VarCvar var_cvar(const VulnerabilityState& state, const LossVector& c, double confidence,
                 long n_draws, std::uint64_t seed);

RiskReport make_risk_report(const std::string& vuln_id, long day,
                            const VulnerabilityState& state, const LossVector& c);

}  // namespace vigil
