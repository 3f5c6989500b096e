#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vigil/policies.hpp"
#include "vigil/rng.hpp"
#include "vigil/types.hpp"

// Stochastic safety-environment testbed. Each vulnerability carries an
// unsafe-task propensity theta in [0, 1] that drifts towards
// min(1, alpha_drift / (1 - k)) each day and is knocked down multiplicatively
// by every negative observation. Observation types see theta through an
// odds-ratio bias, incidents arrive as a Poisson stream with rate
// lambda_star * xi_base * theta, and severities follow the vulnerability's
// fixed Hurt-level distribution with PHLs drawn from the AHL-conditional
// tail.

namespace vigil {

struct VulnEnvParams {
    double lambda_star = 10.0;  // mean daily task count
    double xi_base = 0.1;       // per-unsafe-task incident probability
    double theta0 = 0.5;        // initial unsafe propensity
    double k = 0.98;            // persistence factor
    double alpha_drift = 0.01;  // deterioration increment
    std::array<double, kHurtLevels> p{};  // Hurt-level distribution

    void validate() const;
    // Fixed point of the drift-only recursion: min(1, alpha_drift / (1 - k)).
    double drift_limit() const;
};

struct ObsTypeParams {
    long m = 1;              // daily budget
    double delta_neg = 0.03;  // relative rate reduction per negative observation
    double eta_neg = 100.0;   // bias pseudo-weight towards negative outcomes
    double eta_pos = 100.0;   // bias pseudo-weight towards positive outcomes

    void validate() const;
};

struct Scenario {
    std::map<std::string, VulnEnvParams> vulns;
    std::map<std::string, ObsTypeParams> obs_types;

    void validate() const;
    std::vector<std::string> vuln_ids() const;
    std::vector<std::string> obs_type_names() const;
    ObservationBudget budget() const;
    Scenario with_zero_budget() const;

    // The 7-vulnerability, 3-observation-type validation testbed.
    static Scenario testbed();
};

struct EnvState {
    std::map<std::string, double> theta;
    long day = 0;
    Rng rng{0};
};

EnvState init_environment(const Scenario& scenario, std::uint64_t seed);

// Probability that one observation of the given type is negative when the
// unsafe propensity is theta: eta_pos * theta / (eta_pos * theta +
// eta_neg * (1 - theta)). Equal pseudo-weights give an unbiased probe.
double negative_observation_probability(const ObsTypeParams& type, double theta);

// Advances the environment one day under `plan`: draws observations and
// incidents from the current theta, applies the negative-observation
// feedback, then the deterministic drift. Throws DataError when the plan's
// per-type totals do not match the scenario budget.
std::pair<EnvState, std::vector<DailyRecord>> step_environment(EnvState env,
                                                               const Scenario& scenario,
                                                               const AllocationPlan& plan);

struct TrueMetrics {
    double expected_loss = 0.0;
    double tail_probability = 0.0;
};

// Ground-truth daily metrics: expected loss lambda* xi theta (c . p) and the
// Poisson probability of at least one incident with severity >= 4.
std::map<std::string, TrueMetrics> true_metrics(const EnvState& env,
                                                const Scenario& scenario,
                                                const LossVector& c);

}  // namespace vigil
