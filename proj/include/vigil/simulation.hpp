#pragma once

#include <memory>
#include <optional>

#include "vigil/environment.hpp"
#include "vigil/mcmc.hpp"
#include "vigil/policies.hpp"
#include "vigil/update.hpp"

namespace vigil {

// Everything a policy may consult when planning the next day: the data
// recorded so far and, when calibration is running, the current posterior
// state. `history` never contains the day being planned.
struct PolicyContext {
    long day = 0;  // day being planned
    const std::vector<std::string>& vuln_ids;
    const ObservationBudget& budget;
    std::span<const DailyRecord> history;
    const GlobalState* calibrated = nullptr;
    std::uint64_t seed = 0;
};

class Policy {
  public:
    virtual ~Policy() = default;
    virtual std::string name() const = 0;
    // True when the policy consumes the calibrated posterior state.
    virtual bool needs_calibration() const { return false; }
    // True when the policy spends the observation budget at all. The
    // no-observation baseline returns false and the run proceeds with a
    // zeroed budget.
    virtual bool observes() const { return true; }
    virtual AllocationPlan plan(const PolicyContext& ctx) = 0;
};

struct PolicyOptions {
    HeuristicConfig heuristic{};
    OptConfig optimizer{};
    LossVector loss{};
};

// Factory for the four named policies: random, heuristic, risk, baseline.
std::unique_ptr<Policy> make_policy(const std::string& name, const PolicyOptions& options = {});

struct SimulationConfig {
    long days = 365;
    std::uint64_t seed = 0;
    bool use_phl = true;
    // Calibrate even when the policy does not need it (risk report series).
    bool force_calibration = false;
    McmcConfig mcmc{};
    LossVector loss{};
    GammaKT beta_prior_init{1.0, 0.1};
};

struct SimulationDay {
    long day = 0;
    AllocationPlan plan;
    std::vector<DailyRecord> records;
    std::map<std::string, TrueMetrics> truth;
    // Posterior mean observation weights xi / sum(xi); empty when no
    // calibration ran.
    std::vector<double> posterior_w_mean;
    double total_true_loss = 0.0;
    double any_severe_probability = 0.0;  // 1 - prod(1 - tail_i)
};

struct SimulationTrace {
    std::string policy;
    std::uint64_t seed = 0;
    std::vector<SimulationDay> days;
    std::optional<GlobalState> final_state;
};

// Runs `days` environment steps, consulting the policy each morning with all
// data up to the previous day. Deterministic given the seed. Policies that
// need calibration trigger one daily posterior update after the day's data
// arrives.
SimulationTrace run_simulation(const Scenario& scenario, Policy& policy,
                               const SimulationConfig& cfg);

}  // namespace vigil
