#include "vigil/environment.hpp"

#include <algorithm>
#include <cmath>

#include "vigil/errors.hpp"

namespace vigil {

void VulnEnvParams::validate() const {
    if (!(lambda_star > 0.0)) throw DataError("lambda_star must be positive");
    if (!(xi_base > 0.0) || !(xi_base < 1.0)) throw DataError("xi_base must lie in (0, 1)");
    if (!(theta0 > 0.0) || !(theta0 < 1.0)) throw DataError("theta0 must lie in (0, 1)");
    if (!(k > 0.0) || !(k <= 1.0)) throw DataError("k must lie in (0, 1]");
    if (!(alpha_drift > 0.0)) throw DataError("alpha_drift must be positive");
    double total = 0.0;
    for (double pj : p) {
        if (pj < 0.0) throw DataError("Hurt distribution entries must be non-negative");
        total += pj;
    }
    if (std::abs(total - 1.0) > 1e-9) throw DataError("Hurt distribution must sum to 1");
}

double VulnEnvParams::drift_limit() const {
    if (k >= 1.0) return 1.0;
    return std::min(1.0, alpha_drift / (1.0 - k));
}

void ObsTypeParams::validate() const {
    if (m < 0) throw DataError("observation budget must be non-negative");
    if (!(delta_neg > 0.0) || !(delta_neg < 1.0)) {
        throw DataError("delta_neg must lie in (0, 1)");
    }
    if (!(eta_neg > 0.0) || !(eta_pos > 0.0)) {
        throw DataError("bias pseudo-weights must be positive");
    }
}

void Scenario::validate() const {
    if (vulns.empty()) throw DataError("scenario needs at least one vulnerability");
    if (obs_types.empty()) throw DataError("scenario needs at least one observation type");
    for (const auto& [id, v] : vulns) {
        (void)id;
        v.validate();
    }
    for (const auto& [name, t] : obs_types) {
        (void)name;
        t.validate();
    }
}

std::vector<std::string> Scenario::vuln_ids() const {
    std::vector<std::string> ids;
    ids.reserve(vulns.size());
    for (const auto& [id, v] : vulns) {
        (void)v;
        ids.push_back(id);
    }
    return ids;
}

std::vector<std::string> Scenario::obs_type_names() const {
    std::vector<std::string> names;
    names.reserve(obs_types.size());
    for (const auto& [name, t] : obs_types) {
        (void)t;
        names.push_back(name);
    }
    return names;
}

ObservationBudget Scenario::budget() const {
    ObservationBudget b;
    for (const auto& [name, t] : obs_types) b.per_type[name] = t.m;
    return b;
}

Scenario Scenario::with_zero_budget() const {
    Scenario s = *this;
    for (auto& [name, t] : s.obs_types) {
        (void)name;
        t.m = 0;
    }
    return s;
}

Scenario Scenario::testbed() {
    Scenario s;
    auto vuln = [&](const std::string& id, double lambda, double xi, double theta0, double k,
                    double drift, std::array<double, kHurtLevels> p) {
        s.vulns[id] = VulnEnvParams{lambda, xi, theta0, k, drift, p};
    };
    vuln("A", 17, 0.55, 0.31, 0.97, 0.04, {0.5, 0.35, 0.13, 0.02, 0, 0});
    vuln("B", 13, 0.25, 0.88, 0.99, 0.005, {0.6, 0.11, 0.11, 0.16, 0.02, 0});
    vuln("C", 22, 0.4, 0.53, 0.95, 0.01, {0.3, 0.05, 0.35, 0.28, 0.02, 0});
    vuln("D", 12, 0.1, 0.45, 0.98, 0.005, {0.2, 0.3, 0.25, 0.18, 0.04, 0.03});
    vuln("E", 15, 0.05, 0.18, 0.99, 0.01, {0.2, 0.16, 0.16, 0.16, 0.16, 0.16});
    vuln("F", 5, 0.45, 0.78, 0.97, 0.02, {0.4, 0.03, 0.08, 0.18, 0.26, 0.05});
    vuln("G", 22, 0.3, 0.35, 0.99, 0.005, {0.65, 0.15, 0.08, 0.06, 0.04, 0.02});

    s.obs_types["WSO"] = ObsTypeParams{2, 0.03, 100, 150};
    s.obs_types["SAO"] = ObsTypeParams{2, 0.03, 100, 100};
    s.obs_types["BPO"] = ObsTypeParams{1, 0.03, 120, 100};
    return s;
}

EnvState init_environment(const Scenario& scenario, std::uint64_t seed) {
    scenario.validate();
    EnvState env;
    env.rng = Rng(mix_seed(seed, 0x656e7672ULL));
    for (const auto& [id, v] : scenario.vulns) env.theta[id] = v.theta0;
    return env;
}

double negative_observation_probability(const ObsTypeParams& type, double theta) {
    const double unsafe = type.eta_pos * theta;
    const double safe = type.eta_neg * (1.0 - theta);
    return unsafe / (unsafe + safe);
}

std::pair<EnvState, std::vector<DailyRecord>> step_environment(
    EnvState env, const Scenario& scenario, const AllocationPlan& plan) {
    for (const auto& [type, params] : scenario.obs_types) {
        if (plan.type_total(type) != params.m) {
            throw DataError("plan assigns " + std::to_string(plan.type_total(type)) +
                            " observations of type " + type + ", budget is " +
                            std::to_string(params.m));
        }
    }

    std::vector<DailyRecord> records;
    records.reserve(scenario.vulns.size());

    for (const auto& [id, params] : scenario.vulns) {
        double& theta = env.theta.at(id);
        DailyRecord rec;
        rec.vuln_id = id;
        rec.day = env.day + 1;
        rec.incidents.emplace();

        // Observations see today's theta through each type's bias.
        double log_keep = 0.0;  // accumulated log(1 - delta) feedback
        for (const auto& [type, tp] : scenario.obs_types) {
            const long assigned = plan.count(type, id);
            const double p_neg = negative_observation_probability(tp, theta);
            long n_neg = 0;
            for (long i = 0; i < assigned; ++i) {
                if (env.rng.bernoulli(p_neg)) ++n_neg;
            }
            rec.obs[type] = ObsCounts{assigned, n_neg};
            if (n_neg > 0) {
                log_keep += static_cast<double>(n_neg) * std::log1p(-tp.delta_neg);
            }
        }

        // Incidents also draw on today's theta, before any feedback.
        const long n_e = env.rng.poisson(params.lambda_star * params.xi_base * theta);
        for (long e = 0; e < n_e; ++e) {
            const int ahl = static_cast<int>(env.rng.categorical(params.p));
            std::array<double, kHurtLevels> tail{};
            for (int l = ahl; l < kHurtLevels; ++l) tail[l] = params.p[l];
            const int phl = static_cast<int>(env.rng.categorical(tail));
            rec.incidents->push_back(Incident{HurtLevel{ahl}, HurtLevel{phl}});
        }

        // Feedback, then drift.
        theta *= std::exp(log_keep);
        theta = std::min(1.0, params.k * theta + params.alpha_drift);

        records.push_back(std::move(rec));
    }

    env.day += 1;
    return {std::move(env), std::move(records)};
}

std::map<std::string, TrueMetrics> true_metrics(const EnvState& env,
                                                const Scenario& scenario,
                                                const LossVector& c) {
    std::map<std::string, TrueMetrics> out;
    for (const auto& [id, params] : scenario.vulns) {
        const double theta = env.theta.at(id);
        const double rate = params.lambda_star * params.xi_base * theta;
        double mean_loss = 0.0;
        for (int j = 0; j < kHurtLevels; ++j) mean_loss += c.c[j] * params.p[j];
        const double severe = params.p[4] + params.p[5];
        out[id] = TrueMetrics{rate * mean_loss, 1.0 - std::exp(-rate * severe)};
    }
    return out;
}

}  // namespace vigil
