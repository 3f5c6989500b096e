#include "vigil/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include "vigil/errors.hpp"
#include "vigil/stats.hpp"

namespace vigil {

StreamResult calibrate_stream(const GlobalState& snapshot_in,
                              const std::vector<DayBatch>& batches,
                              const EngineConfig& cfg, std::uint64_t seed, bool use_phl) {
    snapshot_in.validate();
    StreamResult result;
    result.state = snapshot_in;
    result.last_completed_day = snapshot_in.day;

    if (!batches.empty() && batches.front().day != snapshot_in.day + 1) {
        throw DataError("records must start at day " + std::to_string(snapshot_in.day + 1) +
                        ", got day " + std::to_string(batches.front().day));
    }

    // Make sure rate-product fits exist even for a zero-day stream.
    const bool needs_prior_fit =
        std::any_of(result.state.vulns.begin(), result.state.vulns.end(),
                    [](const auto& kv) { return !kv.second.rate_product; });
    try {
        if (needs_prior_fit) {
            McmcConfig mcmc = cfg.mcmc;
            mcmc.seed = mix_seed(seed, 0x73747230ULL, 0);
            result.state =
                refit_hyperparameters(sample_posterior(result.state, {}, mcmc), result.state);
        }
    } catch (const Error& e) {
        result.error = std::string("prior refit: ") + e.what();
        return result;
    }

    if (batches.empty()) return result;

    const long last_day = batches.back().day;
    std::size_t next_batch = 0;
    for (long day = snapshot_in.day + 1; day <= last_day; ++day) {
        std::vector<DailyRecord> records;
        if (next_batch < batches.size() && batches[next_batch].day == day) {
            records = batches[next_batch].records;
            ++next_batch;
        }
        try {
            McmcConfig mcmc = cfg.mcmc;
            mcmc.seed = mix_seed(seed, 0x73747231ULL, static_cast<std::uint64_t>(day));
            result.state = daily_update(result.state, records, mcmc, use_phl);
            for (const auto& [id, vs] : result.state.vulns) {
                result.reports.push_back(make_risk_report(id, day, vs, cfg.loss));
            }
            result.last_completed_day = day;
        } catch (const Error& e) {
            result.error = "day " + std::to_string(day) + ": " + e.what();
            return result;
        }
    }
    return result;
}

namespace {

struct SeedOutcome {
    bool ok = false;
    std::string error;
    std::vector<double> loss_by_day;
    std::vector<double> tail_by_day;
    std::vector<std::vector<double>> alloc_by_day;    // [day][vuln]
    std::vector<std::vector<double>> weights_by_day;  // [day][type]
};

SeedOutcome run_one_seed(const Scenario& scenario, const std::string& policy_name,
                         const ExperimentOptions& options, std::uint64_t seed,
                         bool use_phl, const std::vector<std::string>& vuln_ids) {
    SeedOutcome out;
    try {
        std::unique_ptr<Policy> policy =
            make_policy(policy_name, options.engine.policy_options());
        SimulationConfig cfg;
        cfg.days = options.days;
        cfg.seed = seed;
        cfg.use_phl = use_phl;
        cfg.mcmc = options.engine.mcmc;
        cfg.loss = options.engine.loss;
        cfg.beta_prior_init = options.engine.beta_prior_init;

        const SimulationTrace trace = run_simulation(scenario, *policy, cfg);
        out.loss_by_day.reserve(trace.days.size());
        for (const SimulationDay& d : trace.days) {
            out.loss_by_day.push_back(d.total_true_loss);
            out.tail_by_day.push_back(d.any_severe_probability);
            const std::map<std::string, double> props = d.plan.proportions();
            std::vector<double> row;
            row.reserve(vuln_ids.size());
            for (const std::string& id : vuln_ids) {
                auto it = props.find(id);
                row.push_back(it == props.end() ? 0.0 : it->second);
            }
            out.alloc_by_day.push_back(std::move(row));
            if (!d.posterior_w_mean.empty()) {
                out.weights_by_day.push_back(d.posterior_w_mean);
            }
        }
        out.ok = true;
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

PolicySummary summarize(const std::string& label, const Scenario& scenario,
                        const std::string& policy_name, const ExperimentOptions& options,
                        bool use_phl, const std::vector<std::string>& vuln_ids) {
    const int n_seeds = options.n_seeds;
    std::vector<SeedOutcome> outcomes(n_seeds);

    int n_jobs = options.n_jobs > 0
                     ? options.n_jobs
                     : static_cast<int>(std::thread::hardware_concurrency());
    if (n_jobs < 1) n_jobs = 1;

    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n_seeds) return;
            const std::uint64_t seed =
                mix_seed(options.seed_base, 0x73656564ULL, static_cast<std::uint64_t>(i));
            outcomes[i] =
                run_one_seed(scenario, policy_name, options, seed, use_phl, vuln_ids);
        }
    };
    std::vector<std::thread> pool;
    for (int j = 0; j < n_jobs - 1; ++j) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();

    PolicySummary summary;
    summary.policy = label;
    const std::size_t n_days = static_cast<std::size_t>(options.days);

    for (int i = 0; i < n_seeds; ++i) {
        if (!outcomes[i].ok) {
            summary.n_failed += 1;
            summary.failures.push_back("seed " + std::to_string(i) + ": " +
                                       outcomes[i].error);
            continue;
        }
        summary.seeds_ok.push_back(i);
        summary.loss_by_seed.push_back(outcomes[i].loss_by_day);
        if (!outcomes[i].weights_by_day.empty()) {
            summary.weights_by_seed.push_back(outcomes[i].weights_by_day);
        }
    }
    if (summary.n_failed * 20 > n_seeds) {
        std::string detail = summary.failures.empty() ? "" : "; first: " + summary.failures[0];
        throw NumericalError("policy " + label + ": " +
                             std::to_string(summary.n_failed) + "/" +
                             std::to_string(n_seeds) + " seeds failed (> 5%)" + detail);
    }
    if (summary.seeds_ok.empty()) {
        throw NumericalError("policy " + label + ": no seed completed");
    }

    summary.allocation_mean.assign(n_days, std::vector<double>(vuln_ids.size(), 0.0));
    std::vector<double> losses(summary.seeds_ok.size()), tails(summary.seeds_ok.size());
    for (std::size_t d = 0; d < n_days; ++d) {
        for (std::size_t s = 0; s < summary.seeds_ok.size(); ++s) {
            const SeedOutcome& o = outcomes[summary.seeds_ok[s]];
            losses[s] = o.loss_by_day[d];
            tails[s] = o.tail_by_day[d];
            for (std::size_t v = 0; v < vuln_ids.size(); ++v) {
                summary.allocation_mean[d][v] +=
                    o.alloc_by_day[d][v] / static_cast<double>(summary.seeds_ok.size());
            }
        }
        const MeanBand lb = mean_band(losses);
        summary.loss_by_day_mean.push_back(lb.mean);
        summary.loss_by_day_lo.push_back(lb.lo);
        summary.loss_by_day_hi.push_back(lb.hi);
        const MeanBand tb = mean_band(tails);
        summary.tail_by_day_mean.push_back(tb.mean);
        summary.tail_by_day_lo.push_back(tb.lo);
        summary.tail_by_day_hi.push_back(tb.hi);
    }
    return summary;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

void write_comparison_csv(const std::string& path,
                          const std::vector<const PolicySummary*>& summaries) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "policy,day,expected_loss_mean,expected_loss_lo,expected_loss_hi,"
           "tail_probability_mean,tail_probability_lo,tail_probability_hi\n";
    for (const PolicySummary* s : summaries) {
        for (std::size_t d = 0; d < s->loss_by_day_mean.size(); ++d) {
            out << s->policy << ',' << (d + 1) << ',' << fmt(s->loss_by_day_mean[d]) << ','
                << fmt(s->loss_by_day_lo[d]) << ',' << fmt(s->loss_by_day_hi[d]) << ','
                << fmt(s->tail_by_day_mean[d]) << ',' << fmt(s->tail_by_day_lo[d]) << ','
                << fmt(s->tail_by_day_hi[d]) << "\n";
        }
    }
}

void write_allocation_csv(const std::string& path, const PolicySummary& s,
                          const std::vector<std::string>& vuln_ids) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "day";
    for (const std::string& id : vuln_ids) out << ',' << id;
    out << "\n";
    for (std::size_t d = 0; d < s.allocation_mean.size(); ++d) {
        out << (d + 1);
        for (double v : s.allocation_mean[d]) out << ',' << fmt(v);
        out << "\n";
    }
}

void write_weights_csv(const std::string& path, const PolicySummary& s,
                       const std::vector<std::string>& obs_types, long days) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "day";
    for (const std::string& t : obs_types) out << ',' << t << "_mean," << t << "_sd";
    out << "\n";
    std::vector<double> column(s.weights_by_seed.size());
    for (long d = 0; d < days; ++d) {
        out << (d + 1);
        for (std::size_t t = 0; t < obs_types.size(); ++t) {
            for (std::size_t i = 0; i < s.weights_by_seed.size(); ++i) {
                column[i] = s.weights_by_seed[i][d][t];
            }
            out << ',' << fmt(mean(column)) << ',' << fmt(sample_sd(column));
        }
        out << "\n";
    }
}

void write_final_losses_csv(const std::string& path,
                            const std::vector<const PolicySummary*>& summaries) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "policy,seed,final_expected_loss\n";
    for (const PolicySummary* s : summaries) {
        for (std::size_t i = 0; i < s->seeds_ok.size(); ++i) {
            out << s->policy << ',' << s->seeds_ok[i] << ','
                << fmt(s->loss_by_seed[i].back()) << "\n";
        }
    }
}

void write_ablation_csv(const std::string& path, const PolicySummary& with_phl,
                        const PolicySummary& without_phl) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "day,with_phl_mean,with_phl_lo,with_phl_hi,"
           "without_phl_mean,without_phl_lo,without_phl_hi\n";
    for (std::size_t d = 0; d < with_phl.loss_by_day_mean.size(); ++d) {
        out << (d + 1) << ',' << fmt(with_phl.loss_by_day_mean[d]) << ','
            << fmt(with_phl.loss_by_day_lo[d]) << ',' << fmt(with_phl.loss_by_day_hi[d])
            << ',' << fmt(without_phl.loss_by_day_mean[d]) << ','
            << fmt(without_phl.loss_by_day_lo[d]) << ','
            << fmt(without_phl.loss_by_day_hi[d]) << "\n";
    }
}

}  // namespace

const PolicySummary& ExperimentResult::policy(const std::string& name) const {
    for (const PolicySummary& s : policies) {
        if (s.policy == name) return s;
    }
    throw DataError("no summary for policy " + name);
}

ExperimentResult run_policy_experiment(const Scenario& scenario,
                                       const std::vector<std::string>& policy_names,
                                       const ExperimentOptions& options,
                                       const std::string& out_dir) {
    if (options.days < 1 || options.n_seeds < 1) {
        throw DataError("experiment needs at least one day and one seed");
    }
    scenario.validate();

    ExperimentResult result;
    result.vuln_ids = scenario.vuln_ids();
    result.obs_types = scenario.obs_type_names();

    for (const std::string& name : policy_names) {
        result.policies.push_back(
            summarize(name, scenario, name, options, true, result.vuln_ids));
    }
    if (options.phl_ablation) {
        result.phl_with = summarize("risk_with_phl", scenario, "risk", options, true,
                                    result.vuln_ids);
        result.phl_without = summarize("risk_without_phl", scenario, "risk", options,
                                       false, result.vuln_ids);
    }

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::vector<const PolicySummary*> summaries;
        for (const PolicySummary& s : result.policies) summaries.push_back(&s);
        write_comparison_csv(out_dir + "/comparison.csv", summaries);
        write_final_losses_csv(out_dir + "/final_losses.csv", summaries);
        for (const PolicySummary& s : result.policies) {
            write_allocation_csv(out_dir + "/allocation_" + s.policy + ".csv", s,
                                 result.vuln_ids);
            if (!s.weights_by_seed.empty()) {
                write_weights_csv(out_dir + "/weights_" + s.policy + ".csv", s,
                                  result.obs_types, options.days);
            }
        }
        if (result.phl_with && result.phl_without) {
            write_ablation_csv(out_dir + "/phl_ablation.csv", *result.phl_with,
                               *result.phl_without);
        }
    }
    return result;
}

}  // namespace vigil
