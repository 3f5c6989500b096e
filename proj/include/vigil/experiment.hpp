#pragma once

#include <optional>

#include "vigil/config.hpp"
#include "vigil/records_io.hpp"
#include "vigil/risk.hpp"
#include "vigil/simulation.hpp"

namespace vigil {

// Outcome of replaying a record stream through the daily recursion. Reports
// are causal: the rows for day t are computed from data up to day t only.
// On failure `error` names the day and reason, and `reports` holds every row
// flushed before it.
struct StreamResult {
    GlobalState state;
    std::vector<RiskReport> reports;
    std::optional<std::string> error;
    long last_completed_day = 0;
};

// Applies daily updates for every day from snapshot.day + 1 through the last
// batch day (missing days are processed as empty), emitting one RiskReport
// per vulnerability per day. The batches must start exactly at
// snapshot.day + 1. Per-day sampler seeds derive from `seed` and the day
// index only, so appended future records never alter earlier reports.
StreamResult calibrate_stream(const GlobalState& snapshot_in,
                              const std::vector<DayBatch>& batches,
                              const EngineConfig& cfg, std::uint64_t seed,
                              bool use_phl = true);

struct ExperimentOptions {
    long days = 365;
    int n_seeds = 100;
    std::uint64_t seed_base = 1;
    bool phl_ablation = false;  // adds a paired risk run without PHL updates
    int n_jobs = 0;             // 0 = hardware concurrency
    EngineConfig engine{};
};

// Per-policy aggregation across seeds. Day d is found at index d - 1.
struct PolicySummary {
    std::string policy;
    std::vector<int> seeds_ok;  // seed indices that completed
    int n_failed = 0;
    std::vector<std::string> failures;

    std::vector<double> loss_by_day_mean, loss_by_day_lo, loss_by_day_hi;
    std::vector<double> tail_by_day_mean, tail_by_day_lo, tail_by_day_hi;
    // [seed][day] matrices for significance tests downstream.
    std::vector<std::vector<double>> loss_by_seed;
    // Mean allocated proportion per day per vulnerability (vuln-id order).
    std::vector<std::vector<double>> allocation_mean;
    // Posterior weight trajectories, [seed][day][type]; calibrated runs only.
    std::vector<std::vector<std::vector<double>>> weights_by_seed;
};

struct ExperimentResult {
    std::vector<std::string> vuln_ids;
    std::vector<std::string> obs_types;
    std::vector<PolicySummary> policies;
    // Paired risk-policy runs with and without PHL updates.
    std::optional<PolicySummary> phl_with;
    std::optional<PolicySummary> phl_without;

    const PolicySummary& policy(const std::string& name) const;
};

// Runs every policy over n_seeds seeded replications of the scenario and
// aggregates the ground-truth metrics. Seeds run in parallel workers;
// aggregation order is fixed, so results are reproducible for a given
// seed_base. A policy fails the experiment when more than 5% of its seeds
// error. When `out_dir` is non-empty the summary tables are written there as
// CSV (see docs/formats.md for the column schemas).
ExperimentResult run_policy_experiment(const Scenario& scenario,
                                       const std::vector<std::string>& policy_names,
                                       const ExperimentOptions& options,
                                       const std::string& out_dir = "");

}  // namespace vigil
