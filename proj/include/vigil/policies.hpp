#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vigil/allocation.hpp"
#include "vigil/types.hpp"

namespace vigil {

// Daily observation budget per type.
struct ObservationBudget {
    std::map<std::string, long> per_type;

    long total() const;
    void validate() const;  // at least one positive entry, none negative
};

// Integer assignment of each type's daily budget across vulnerabilities.
struct AllocationPlan {
    std::map<std::string, std::map<std::string, long>> counts;  // [type][vuln]
    bool optimizer_converged = true;

    long count(const std::string& type, const std::string& vuln) const;
    long type_total(const std::string& type) const;
    // Fraction of the total budget assigned to each vulnerability.
    std::map<std::string, double> proportions() const;
};

struct HeuristicConfig {
    double w_obs = 0.25;
    double w_inc = 0.25;
    double w_ahl = 0.25;
    double w_phl = 0.25;
    long window = 30;  // days

    void validate() const;
};

// Largest-remainder integerization of `proportions` (aligned with `ids`) to
// `m` units. Exactly tied remainders are assigned cyclically from a
// seed-derived offset so that no identifier is systematically favored.
std::map<std::string, long> integerize_allocation(std::span<const double> proportions,
                                                  const std::vector<std::string>& ids,
                                                  long m, std::uint64_t seed);

// Assigns each observation of each type to a vulnerability uniformly and
// independently.
AllocationPlan random_policy(const std::vector<std::string>& vuln_ids,
                             const ObservationBudget& budget, std::uint64_t seed);

// Weighted sum of the four windowed indicators: pooled negative-observation
// ratio, capped incident count (0.2 per incident up to 5), and mean AHL and
// PHL severities scaled to [0, 1]. `t` is the last day included; the window
// covers [t - window + 1, t].
std::vector<double> heuristic_scores(std::span<const DailyRecord> history,
                                     const std::vector<std::string>& vuln_ids,
                                     const HeuristicConfig& cfg, long t);

// Proportional-to-score allocation (uniform when all scores are zero),
// integerized per type.
AllocationPlan heuristic_policy(std::span<const DailyRecord> history,
                                const std::vector<std::string>& vuln_ids,
                                const HeuristicConfig& cfg, const ObservationBudget& budget,
                                std::uint64_t seed, long t);

// Optimizes the net expected loss on the calibrated state and integerizes
// the optimal proportions per type. Optimizer non-convergence is surfaced
// through AllocationPlan::optimizer_converged.
AllocationPlan risk_based_policy(const GlobalState& global, const LossVector& c,
                                 const ObservationBudget& budget, const OptConfig& opt_cfg,
                                 std::uint64_t seed);

}  // namespace vigil
