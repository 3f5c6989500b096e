// vigil: online safety-risk engine.
//
// Subcommands:
//   calibrate  replay a record file through the daily Bayesian recursion
//   risk       report risk metrics from a state snapshot
//   allocate   compute the next-day observation allocation from a snapshot
//   simulate   run one policy through the stochastic environment
//   compare    multi-policy, multi-seed experiment with CSV summaries
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "vigil/config.hpp"
#include "vigil/errors.hpp"
#include "vigil/experiment.hpp"
#include "vigil/records_io.hpp"
#include "vigil/snapshot.hpp"

namespace {

using namespace vigil;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

EngineConfig engine_from(const std::string& config_path, std::uint64_t seed) {
    EngineConfig cfg;
    if (!config_path.empty()) cfg = load_engine_config_file(config_path);
    cfg.mcmc.seed = seed;
    return cfg;
}

void write_reports_csv(const std::string& path, const std::vector<RiskReport>& reports) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "day,vuln,expected_loss,tail_probability";
    for (int j = 0; j < kHurtLevels; ++j) out << ",expected_count_l" << j;
    out << "\n";
    for (const RiskReport& r : reports) {
        out << r.day << ',' << r.vuln_id << ',' << fmt(r.expected_loss) << ','
            << fmt(r.tail_probability);
        for (double c : r.expected_hurt_counts) out << ',' << fmt(c);
        out << "\n";
    }
}

int cmd_calibrate(const std::string& records_path, const std::string& snapshot_in,
                  const std::string& config_path, const std::string& out_dir,
                  std::uint64_t seed, bool no_phl) {
    const EngineConfig cfg = engine_from(config_path, seed);
    const std::vector<DayBatch> batches = ingest_records(records_path);

    GlobalState state;
    if (!snapshot_in.empty()) {
        state = load_snapshot_file(snapshot_in);
    } else {
        std::vector<std::string> types = record_file_types(records_path);
        std::set<std::string> vulns;
        for (const DayBatch& b : batches) {
            for (const DailyRecord& r : b.records) vulns.insert(r.vuln_id);
        }
        state = GlobalState::make_default(
            types, std::vector<std::string>(vulns.begin(), vulns.end()));
        for (auto& [id, vs] : state.vulns) {
            (void)id;
            vs.beta_prior = cfg.beta_prior_init;
        }
    }

    const StreamResult result = calibrate_stream(state, batches, cfg, seed, !no_phl);

    std::filesystem::create_directories(out_dir);
    write_reports_csv(out_dir + "/reports.csv", result.reports);
    save_snapshot_file(out_dir + "/snapshot.json", result.state);

    if (result.error) {
        std::cerr << "calibration stopped: " << *result.error << "\n"
                  << "partial output written through day " << result.last_completed_day
                  << "\n";
        return 3;
    }
    std::cout << "calibrated through day " << result.last_completed_day << ", "
              << result.reports.size() << " report rows -> " << out_dir << "\n";
    return 0;
}

int cmd_risk(const std::string& snapshot_path, const std::string& config_path,
             const std::string& out_path, double var_confidence, long var_draws,
             std::uint64_t seed) {
    const EngineConfig cfg = engine_from(config_path, seed);
    const GlobalState state = load_snapshot_file(snapshot_path);

    std::vector<RiskReport> reports;
    for (const auto& [id, vs] : state.vulns) {
        RiskReport r = make_risk_report(id, state.day, vs, cfg.loss);
        if (var_draws > 0) {
            r.var_cvar = var_cvar(vs, cfg.loss, var_confidence, var_draws,
                                  mix_seed(seed, std::hash<std::string>{}(id)));
        }
        reports.push_back(std::move(r));
    }

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw DataError("cannot write " + out_path);
        out = &file;
    }
    *out << "vuln,day,expected_loss,tail_probability";
    if (var_draws > 0) *out << ",var,cvar";
    *out << "\n";
    for (const RiskReport& r : reports) {
        *out << r.vuln_id << ',' << r.day << ',' << fmt(r.expected_loss) << ','
             << fmt(r.tail_probability);
        if (r.var_cvar) *out << ',' << fmt(r.var_cvar->var) << ',' << fmt(r.var_cvar->cvar);
        *out << "\n";
    }
    return 0;
}

int cmd_allocate(const std::string& snapshot_path, const std::string& config_path,
                 const std::vector<std::string>& budget_args, const std::string& out_path,
                 std::uint64_t seed) {
    const EngineConfig cfg = engine_from(config_path, seed);
    const GlobalState state = load_snapshot_file(snapshot_path);

    ObservationBudget budget;
    for (const std::string& arg : budget_args) {
        const std::size_t eq = arg.find('=');
        if (eq == std::string::npos) {
            throw DataError("budget entries take the form TYPE=COUNT, got " + arg);
        }
        budget.per_type[arg.substr(0, eq)] = std::stol(arg.substr(eq + 1));
    }
    if (budget.per_type.empty()) {
        for (const std::string& t : state.obs_types) budget.per_type[t] = 1;
    }

    const AllocationPlan plan =
        risk_based_policy(state, cfg.loss, budget, cfg.optimizer, seed);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw DataError("cannot write " + out_path);
        out = &file;
    }
    *out << "type,vuln,count\n";
    for (const auto& [type, row] : plan.counts) {
        for (const auto& [vuln, n] : row) {
            *out << type << ',' << vuln << ',' << n << "\n";
        }
    }
    if (!plan.optimizer_converged) {
        std::cerr << "warning: allocation optimizer did not converge; best iterate used\n";
    }
    return 0;
}

int cmd_simulate(const std::string& scenario_path, const std::string& policy_name,
                 long days, std::uint64_t seed, const std::string& config_path,
                 const std::string& out_dir, bool no_phl) {
    const EngineConfig cfg = engine_from(config_path, seed);
    const Scenario scenario =
        scenario_path.empty() ? Scenario::testbed() : load_scenario_file(scenario_path);

    std::unique_ptr<Policy> policy = make_policy(policy_name, cfg.policy_options());
    SimulationConfig sim_cfg;
    sim_cfg.days = days;
    sim_cfg.seed = seed;
    sim_cfg.use_phl = !no_phl;
    sim_cfg.mcmc = cfg.mcmc;
    sim_cfg.loss = cfg.loss;
    sim_cfg.beta_prior_init = cfg.beta_prior_init;

    const SimulationTrace trace = run_simulation(scenario, *policy, sim_cfg);

    std::filesystem::create_directories(out_dir);
    const std::vector<std::string> vuln_ids = scenario.vuln_ids();
    const std::vector<std::string> type_names = scenario.obs_type_names();

    std::vector<DayBatch> batches;
    for (const SimulationDay& d : trace.days) {
        batches.push_back(DayBatch{d.day, d.records});
    }
    write_records_file(out_dir + "/records.csv", type_names, batches);

    {
        std::ofstream out(out_dir + "/metrics.csv");
        if (!out) throw DataError("cannot write metrics.csv");
        out << "day,total_expected_loss,any_severe_probability";
        for (const std::string& id : vuln_ids) out << ",loss_" << id << ",tail_" << id;
        out << "\n";
        for (const SimulationDay& d : trace.days) {
            out << d.day << ',' << fmt(d.total_true_loss) << ','
                << fmt(d.any_severe_probability);
            for (const std::string& id : vuln_ids) {
                const TrueMetrics& m = d.truth.at(id);
                out << ',' << fmt(m.expected_loss) << ',' << fmt(m.tail_probability);
            }
            out << "\n";
        }
    }
    {
        std::ofstream out(out_dir + "/allocations.csv");
        if (!out) throw DataError("cannot write allocations.csv");
        out << "day";
        for (const std::string& id : vuln_ids) out << ',' << id;
        out << "\n";
        for (const SimulationDay& d : trace.days) {
            const std::map<std::string, double> props = d.plan.proportions();
            out << d.day;
            for (const std::string& id : vuln_ids) {
                auto it = props.find(id);
                out << ',' << fmt(it == props.end() ? 0.0 : it->second);
            }
            out << "\n";
        }
    }
    if (!trace.days.empty() && !trace.days.front().posterior_w_mean.empty()) {
        std::ofstream out(out_dir + "/weights.csv");
        if (!out) throw DataError("cannot write weights.csv");
        out << "day";
        for (const std::string& t : type_names) out << ',' << t;
        out << "\n";
        for (const SimulationDay& d : trace.days) {
            out << d.day;
            for (double w : d.posterior_w_mean) out << ',' << fmt(w);
            out << "\n";
        }
    }
    if (trace.final_state) {
        save_snapshot_file(out_dir + "/snapshot.json", *trace.final_state);
    }
    std::cout << "simulated " << days << " days with policy " << policy_name << " -> "
              << out_dir << "\n";
    return 0;
}

int cmd_compare(const std::string& scenario_path, std::vector<std::string> policies,
                long days, int n_seeds, std::uint64_t seed, const std::string& config_path,
                const std::string& out_dir, bool phl_ablation, int jobs) {
    const Scenario scenario =
        scenario_path.empty() ? Scenario::testbed() : load_scenario_file(scenario_path);

    ExperimentOptions options;
    options.days = days;
    options.n_seeds = n_seeds;
    options.seed_base = seed;
    options.phl_ablation = phl_ablation;
    options.n_jobs = jobs;
    options.engine = engine_from(config_path, seed);

    const ExperimentResult result =
        run_policy_experiment(scenario, policies, options, out_dir);

    for (const PolicySummary& s : result.policies) {
        std::cout << s.policy << ": day-" << days
                  << " mean loss = " << fmt(s.loss_by_day_mean.back());
        if (s.n_failed > 0) std::cout << " (" << s.n_failed << " seeds failed)";
        std::cout << "\n";
    }
    if (result.phl_with && result.phl_without) {
        std::cout << "phl ablation: with = " << fmt(result.phl_with->loss_by_day_mean.back())
                  << ", without = " << fmt(result.phl_without->loss_by_day_mean.back())
                  << "\n";
    }
    std::cout << "tables -> " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vigil: online safety-risk engine"};
    app.require_subcommand(1);

    std::string records_path, snapshot_path, config_path, scenario_path, out_dir, out_path;
    std::string policy_name = "risk";
    std::vector<std::string> policies = {"risk", "heuristic", "random", "baseline"};
    std::vector<std::string> budget_args;
    long days = 365, var_draws = 0;
    int n_seeds = 100, jobs = 0;
    std::uint64_t seed = 1;
    double var_confidence = 0.95;
    bool no_phl = false, phl_ablation = false;

    CLI::App* calibrate = app.add_subcommand("calibrate", "replay a record file");
    calibrate->add_option("--records", records_path, "record CSV file")->required();
    calibrate->add_option("--snapshot", snapshot_path, "initial state snapshot");
    calibrate->add_option("--config", config_path, "engine config JSON");
    calibrate->add_option("--out", out_dir, "output directory")->required();
    calibrate->add_option("--seed", seed, "sampler seed base");
    calibrate->add_flag("--no-phl", no_phl, "skip PHL tail updates");

    CLI::App* risk = app.add_subcommand("risk", "report risk from a snapshot");
    risk->add_option("--snapshot", snapshot_path, "state snapshot")->required();
    risk->add_option("--config", config_path, "engine config JSON");
    risk->add_option("--out", out_path, "output CSV (default stdout)");
    risk->add_option("--var-confidence", var_confidence, "VaR confidence level");
    risk->add_option("--var-draws", var_draws, "Monte Carlo draws for VaR/CVaR");
    risk->add_option("--seed", seed, "Monte Carlo seed");

    CLI::App* allocate = app.add_subcommand("allocate", "next-day allocation plan");
    allocate->add_option("--snapshot", snapshot_path, "state snapshot")->required();
    allocate->add_option("--config", config_path, "engine config JSON");
    allocate->add_option("--budget", budget_args, "per-type budget TYPE=COUNT");
    allocate->add_option("--out", out_path, "output CSV (default stdout)");
    allocate->add_option("--seed", seed, "tie-break seed");

    CLI::App* simulate = app.add_subcommand("simulate", "run one policy in the testbed");
    simulate->add_option("--scenario", scenario_path, "scenario JSON (default testbed)");
    simulate->add_option("--policy", policy_name, "random|heuristic|risk|baseline");
    simulate->add_option("--days", days, "days to simulate");
    simulate->add_option("--seed", seed, "run seed");
    simulate->add_option("--config", config_path, "engine config JSON");
    simulate->add_option("--out", out_dir, "output directory")->required();
    simulate->add_flag("--no-phl", no_phl, "skip PHL tail updates");

    CLI::App* compare = app.add_subcommand("compare", "multi-policy experiment");
    compare->add_option("--scenario", scenario_path, "scenario JSON (default testbed)");
    compare->add_option("--policies", policies, "policies to compare")->delimiter(',');
    compare->add_option("--days", days, "days per run");
    compare->add_option("--seeds", n_seeds, "number of seeded replications");
    compare->add_option("--seed", seed, "seed base");
    compare->add_option("--config", config_path, "engine config JSON");
    compare->add_option("--out", out_dir, "output directory")->required();
    compare->add_flag("--phl-ablation", phl_ablation, "paired with/without PHL runs");
    compare->add_option("--jobs", jobs, "parallel workers (default: cores)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (calibrate->parsed()) {
            return cmd_calibrate(records_path, snapshot_path, config_path, out_dir, seed,
                                 no_phl);
        }
        if (risk->parsed()) {
            return cmd_risk(snapshot_path, config_path, out_path, var_confidence,
                            var_draws, seed);
        }
        if (allocate->parsed()) {
            return cmd_allocate(snapshot_path, config_path, budget_args, out_path, seed);
        }
        if (simulate->parsed()) {
            return cmd_simulate(scenario_path, policy_name, days, seed, config_path,
                                out_dir, no_phl);
        }
        if (compare->parsed()) {
            return cmd_compare(scenario_path, policies, days, n_seeds, seed, config_path,
                               out_dir, phl_ablation, jobs);
        }
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const vigil::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
