#include "vigil/policies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vigil/errors.hpp"
#include "vigil/rng.hpp"

namespace vigil {

long ObservationBudget::total() const {
    long t = 0;
    for (const auto& [type, m] : per_type) {
        (void)type;
        t += m;
    }
    return t;
}

void ObservationBudget::validate() const {
    bool any_positive = false;
    for (const auto& [type, m] : per_type) {
        if (m < 0) throw DataError("negative budget for type " + type);
        any_positive = any_positive || m > 0;
    }
    if (!any_positive) throw DataError("budget needs at least one positive entry");
}

long AllocationPlan::count(const std::string& type, const std::string& vuln) const {
    auto ti = counts.find(type);
    if (ti == counts.end()) return 0;
    auto vi = ti->second.find(vuln);
    return vi == ti->second.end() ? 0 : vi->second;
}

long AllocationPlan::type_total(const std::string& type) const {
    auto ti = counts.find(type);
    if (ti == counts.end()) return 0;
    long t = 0;
    for (const auto& [vuln, n] : ti->second) {
        (void)vuln;
        t += n;
    }
    return t;
}

std::map<std::string, double> AllocationPlan::proportions() const {
    std::map<std::string, double> out;
    long total = 0;
    for (const auto& [type, row] : counts) {
        (void)type;
        for (const auto& [vuln, n] : row) {
            out[vuln] += static_cast<double>(n);
            total += n;
        }
    }
    if (total > 0) {
        for (auto& [vuln, v] : out) {
            (void)vuln;
            v /= static_cast<double>(total);
        }
    }
    return out;
}

void HeuristicConfig::validate() const {
    if (w_obs < 0 || w_inc < 0 || w_ahl < 0 || w_phl < 0) {
        throw DataError("heuristic weights must be non-negative");
    }
    if (w_obs + w_inc + w_ahl + w_phl <= 0.0) {
        throw DataError("heuristic weights must not all be zero");
    }
    if (window < 1) throw DataError("heuristic window must be at least one day");
}

std::map<std::string, long> integerize_allocation(std::span<const double> proportions,
                                                  const std::vector<std::string>& ids,
                                                  long m, std::uint64_t seed) {
    const std::size_t n = ids.size();
    if (proportions.size() != n) throw DimensionError("proportions/ids size mismatch");

    std::vector<long> base(n);
    std::vector<double> remainder(n);
    long assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double share = proportions[i] * static_cast<double>(m);
        base[i] = static_cast<long>(std::floor(share));
        remainder[i] = share - static_cast<double>(base[i]);
        assigned += base[i];
    }
    long leftover = m - assigned;

    // Identifier order is the stable base; exactly tied remainders are
    // served cyclically from a seeded offset.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return remainder[a] > remainder[b];
    });

    Rng rng(mix_seed(seed, 0x696e7467ULL));
    std::size_t pos = 0;
    while (leftover > 0 && pos < n) {
        // Extent of the remainder tie group starting at pos.
        std::size_t end = pos + 1;
        while (end < n && remainder[order[end]] == remainder[order[pos]]) {
            ++end;
        }
        const std::size_t group = end - pos;
        const std::size_t take = std::min<std::size_t>(group, static_cast<std::size_t>(leftover));
        const std::size_t offset = (take < group) ? rng.uniform_int(group) : 0;
        for (std::size_t k = 0; k < take; ++k) {
            base[order[pos + (offset + k) % group]] += 1;
        }
        leftover -= static_cast<long>(take);
        pos = end;
    }

    std::map<std::string, long> out;
    for (std::size_t i = 0; i < n; ++i) out[ids[i]] = base[i];
    return out;
}

AllocationPlan random_policy(const std::vector<std::string>& vuln_ids,
                             const ObservationBudget& budget, std::uint64_t seed) {
    if (vuln_ids.empty()) throw DataError("random policy needs at least one vulnerability");
    budget.validate();
    Rng rng(mix_seed(seed, 0x726e6470ULL));
    AllocationPlan plan;
    for (const auto& [type, m] : budget.per_type) {
        auto& row = plan.counts[type];
        for (const std::string& id : vuln_ids) row[id] = 0;
        for (long i = 0; i < m; ++i) {
            row[vuln_ids[rng.uniform_int(vuln_ids.size())]] += 1;
        }
    }
    return plan;
}

std::vector<double> heuristic_scores(std::span<const DailyRecord> history,
                                     const std::vector<std::string>& vuln_ids,
                                     const HeuristicConfig& cfg, long t) {
    cfg.validate();
    struct Tally {
        long n_total = 0, n_neg = 0, n_e = 0;
        double ahl_sum = 0.0, phl_sum = 0.0;
    };
    std::map<std::string, Tally> tallies;
    for (const std::string& id : vuln_ids) tallies[id];

    const long first_day = t - cfg.window + 1;
    for (const DailyRecord& rec : history) {
        if (rec.day < first_day || rec.day > t) continue;
        auto it = tallies.find(rec.vuln_id);
        if (it == tallies.end()) continue;
        Tally& tally = it->second;
        for (const auto& [type, counts] : rec.obs) {
            (void)type;
            tally.n_total += counts.n_total;
            tally.n_neg += counts.n_neg;
        }
        if (rec.incidents) {
            tally.n_e += rec.n_incidents();
            for (const Incident& e : *rec.incidents) {
                tally.ahl_sum += e.ahl.level;
                tally.phl_sum += e.phl.level;
            }
        }
    }

    std::vector<double> scores;
    scores.reserve(vuln_ids.size());
    for (const std::string& id : vuln_ids) {
        const Tally& tally = tallies.at(id);
        const double q_obs =
            tally.n_total > 0
                ? static_cast<double>(tally.n_neg) / static_cast<double>(tally.n_total)
                : 0.0;
        const double q_inc = tally.n_e < 5 ? 0.2 * static_cast<double>(tally.n_e) : 1.0;
        const double q_ahl =
            tally.n_e > 0 ? tally.ahl_sum / static_cast<double>(tally.n_e) / 5.0 : 0.0;
        const double q_phl =
            tally.n_e > 0 ? tally.phl_sum / static_cast<double>(tally.n_e) / 5.0 : 0.0;
        scores.push_back(cfg.w_obs * q_obs + cfg.w_inc * q_inc + cfg.w_ahl * q_ahl +
                         cfg.w_phl * q_phl);
    }
    return scores;
}

namespace {

AllocationPlan integerize_per_type(std::span<const double> proportions,
                                   const std::vector<std::string>& vuln_ids,
                                   const ObservationBudget& budget, std::uint64_t seed) {
    AllocationPlan plan;
    std::uint64_t tag = 0;
    for (const auto& [type, m] : budget.per_type) {
        plan.counts[type] = integerize_allocation(proportions, vuln_ids, m,
                                                  mix_seed(seed, 0x74797065ULL, tag++));
    }
    return plan;
}

}  // namespace

AllocationPlan heuristic_policy(std::span<const DailyRecord> history,
                                const std::vector<std::string>& vuln_ids,
                                const HeuristicConfig& cfg, const ObservationBudget& budget,
                                std::uint64_t seed, long t) {
    budget.validate();
    std::vector<double> scores = heuristic_scores(history, vuln_ids, cfg, t);
    double total = std::accumulate(scores.begin(), scores.end(), 0.0);
    if (total <= 0.0) {
        scores.assign(vuln_ids.size(), 1.0);
        total = static_cast<double>(vuln_ids.size());
    }
    for (double& s : scores) s /= total;
    return integerize_per_type(scores, vuln_ids, budget, seed);
}

AllocationPlan risk_based_policy(const GlobalState& global, const LossVector& c,
                                 const ObservationBudget& budget, const OptConfig& opt_cfg,
                                 std::uint64_t seed) {
    budget.validate();
    std::vector<std::string> vuln_ids;
    std::vector<VulnerabilityState> states;
    vuln_ids.reserve(global.vulns.size());
    for (const auto& [id, vs] : global.vulns) {
        vuln_ids.push_back(id);
        states.push_back(vs);
    }
    const AllocationResult result = optimize_allocation(states, c, opt_cfg);
    AllocationPlan plan = integerize_per_type(result.proportions, vuln_ids, budget, seed);
    plan.optimizer_converged = result.converged;
    return plan;
}

}  // namespace vigil
