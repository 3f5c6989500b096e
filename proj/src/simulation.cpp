#include "vigil/simulation.hpp"

#include <cmath>

#include "vigil/errors.hpp"

namespace vigil {

namespace {

class RandomPolicy final : public Policy {
  public:
    std::string name() const override { return "random"; }
    AllocationPlan plan(const PolicyContext& ctx) override {
        return random_policy(ctx.vuln_ids, ctx.budget, ctx.seed);
    }
};

class HeuristicPolicy final : public Policy {
  public:
    explicit HeuristicPolicy(HeuristicConfig cfg) : cfg_(cfg) {}
    std::string name() const override { return "heuristic"; }
    AllocationPlan plan(const PolicyContext& ctx) override {
        return heuristic_policy(ctx.history, ctx.vuln_ids, cfg_, ctx.budget, ctx.seed,
                                ctx.day - 1);
    }

  private:
    HeuristicConfig cfg_;
};

class RiskBasedPolicy final : public Policy {
  public:
    RiskBasedPolicy(OptConfig opt, LossVector loss) : opt_(opt), loss_(loss) {}
    std::string name() const override { return "risk"; }
    bool needs_calibration() const override { return true; }
    AllocationPlan plan(const PolicyContext& ctx) override {
        if (ctx.calibrated == nullptr) {
            throw DataError("risk policy requires a calibrated state");
        }
        return risk_based_policy(*ctx.calibrated, loss_, ctx.budget, opt_, ctx.seed);
    }

  private:
    OptConfig opt_;
    LossVector loss_;
};

class BaselinePolicy final : public Policy {
  public:
    std::string name() const override { return "baseline"; }
    bool observes() const override { return false; }
    AllocationPlan plan(const PolicyContext& ctx) override {
        AllocationPlan plan;
        for (const auto& [type, m] : ctx.budget.per_type) {
            (void)m;
            for (const std::string& id : ctx.vuln_ids) plan.counts[type][id] = 0;
        }
        return plan;
    }
};

}  // namespace

std::unique_ptr<Policy> make_policy(const std::string& name, const PolicyOptions& options) {
    if (name == "random") return std::make_unique<RandomPolicy>();
    if (name == "heuristic") return std::make_unique<HeuristicPolicy>(options.heuristic);
    if (name == "risk") {
        return std::make_unique<RiskBasedPolicy>(options.optimizer, options.loss);
    }
    if (name == "baseline") return std::make_unique<BaselinePolicy>();
    throw DataError("unknown policy: " + name);
}

SimulationTrace run_simulation(const Scenario& scenario_in, Policy& policy,
                               const SimulationConfig& cfg) {
    if (cfg.days < 1) throw DataError("simulation needs at least one day");
    const Scenario scenario =
        policy.observes() ? scenario_in : scenario_in.with_zero_budget();
    scenario.validate();

    const std::vector<std::string> vuln_ids = scenario.vuln_ids();
    const ObservationBudget budget = scenario.budget();
    const bool calibrate = policy.needs_calibration() || cfg.force_calibration;

    EnvState env = init_environment(scenario, cfg.seed);
    GlobalState global =
        GlobalState::make_default(scenario.obs_type_names(), vuln_ids);
    for (auto& [id, vs] : global.vulns) {
        (void)id;
        vs.beta_prior = cfg.beta_prior_init;
    }

    if (calibrate) {
        // Prior-only refit so that day 1 already has a rate-product fit.
        McmcConfig mcmc = cfg.mcmc;
        mcmc.seed = mix_seed(cfg.seed, 0x6d636d63ULL, 0);
        global = refit_hyperparameters(sample_posterior(global, {}, mcmc), global);
    }

    SimulationTrace trace;
    trace.policy = policy.name();
    trace.seed = cfg.seed;
    trace.days.reserve(cfg.days);

    std::vector<DailyRecord> history;
    history.reserve(cfg.days * vuln_ids.size());

    for (long day = 1; day <= cfg.days; ++day) {
        PolicyContext ctx{day,     vuln_ids,
                          budget,  std::span<const DailyRecord>(history),
                          calibrate ? &global : nullptr,
                          mix_seed(cfg.seed, 0x706f6c63ULL, static_cast<std::uint64_t>(day))};
        AllocationPlan plan = policy.plan(ctx);

        auto [env_next, records] = step_environment(std::move(env), scenario, plan);
        env = std::move(env_next);

        SimulationDay row;
        row.day = day;
        row.plan = std::move(plan);
        row.truth = true_metrics(env, scenario, cfg.loss);

        if (calibrate) {
            McmcConfig mcmc = cfg.mcmc;
            mcmc.seed = mix_seed(cfg.seed, 0x6d636d63ULL, static_cast<std::uint64_t>(day));
            global = daily_update(global, records, mcmc, cfg.use_phl);
            double xi_total = 0.0;
            for (double x : global.xi) xi_total += x;
            for (double x : global.xi) row.posterior_w_mean.push_back(x / xi_total);
        }

        double survive = 1.0;
        for (const auto& [id, m] : row.truth) {
            (void)id;
            row.total_true_loss += m.expected_loss;
            survive *= 1.0 - m.tail_probability;
        }
        row.any_severe_probability = 1.0 - survive;

        for (const DailyRecord& rec : records) history.push_back(rec);
        row.records = std::move(records);
        trace.days.push_back(std::move(row));
    }

    if (calibrate) trace.final_state = std::move(global);
    return trace;
}

}  // namespace vigil
