#include "vigil/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "vigil/errors.hpp"

namespace vigil {

using nlohmann::json;

namespace {

template <typename T>
void maybe(const json& node, const char* key, T& out) {
    if (node.contains(key)) out = node.at(key).get<T>();
}

}  // namespace

EngineConfig parse_engine_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw DataError(std::string("config parse error: ") + e.what());
    }
    try {
        EngineConfig cfg;
        if (root.contains("mcmc")) {
            const json& m = root["mcmc"];
            maybe(m, "n_warmup", cfg.mcmc.n_warmup);
            maybe(m, "n_kept", cfg.mcmc.n_kept);
            maybe(m, "target_acceptance", cfg.mcmc.target_acceptance);
            maybe(m, "n_leapfrog", cfg.mcmc.n_leapfrog);
            maybe(m, "max_step_attempts", cfg.mcmc.max_step_attempts);
        }
        if (root.contains("loss")) {
            const auto values = root["loss"].get<std::vector<double>>();
            if (values.size() != kHurtLevels) {
                throw DataError("loss vector must have 6 entries");
            }
            std::copy(values.begin(), values.end(), cfg.loss.c.begin());
            cfg.loss.validate();
        }
        if (root.contains("heuristic")) {
            const json& h = root["heuristic"];
            maybe(h, "w_obs", cfg.heuristic.w_obs);
            maybe(h, "w_inc", cfg.heuristic.w_inc);
            maybe(h, "w_ahl", cfg.heuristic.w_ahl);
            maybe(h, "w_phl", cfg.heuristic.w_phl);
            maybe(h, "window", cfg.heuristic.window);
            cfg.heuristic.validate();
        }
        if (root.contains("optimizer")) {
            const json& o = root["optimizer"];
            maybe(o, "max_iterations", cfg.optimizer.max_iterations);
            maybe(o, "gradient_tolerance", cfg.optimizer.gradient_tolerance);
            maybe(o, "min_proportion", cfg.optimizer.min_proportion);
            maybe(o, "steepness", cfg.optimizer.curve.steepness);
            maybe(o, "midpoint", cfg.optimizer.curve.midpoint);
        }
        if (root.contains("priors")) {
            const json& p = root["priors"];
            maybe(p, "gamma_k", cfg.beta_prior_init.k);
            maybe(p, "gamma_theta", cfg.beta_prior_init.theta);
        }
        return cfg;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed config: ") + e.what());
    }
}

EngineConfig load_engine_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_engine_config(buffer.str());
}

Scenario parse_scenario(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw DataError(std::string("scenario parse error: ") + e.what());
    }
    try {
        Scenario s;
        for (const auto& [id, v] : root.at("vulnerabilities").items()) {
            VulnEnvParams params;
            params.lambda_star = v.at("lambda_star").get<double>();
            params.xi_base = v.at("xi_base").get<double>();
            params.theta0 = v.at("theta0").get<double>();
            params.k = v.at("k").get<double>();
            params.alpha_drift = v.at("alpha_drift").get<double>();
            const auto p = v.at("p").get<std::vector<double>>();
            if (p.size() != kHurtLevels) {
                throw DataError("scenario Hurt distribution must have 6 entries");
            }
            std::copy(p.begin(), p.end(), params.p.begin());
            s.vulns.emplace(id, params);
        }
        for (const auto& [name, t] : root.at("observation_types").items()) {
            ObsTypeParams params;
            params.m = t.at("m").get<long>();
            params.delta_neg = t.at("delta_neg").get<double>();
            params.eta_neg = t.at("eta_neg").get<double>();
            params.eta_pos = t.at("eta_pos").get<double>();
            s.obs_types.emplace(name, params);
        }
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed scenario: ") + e.what());
    }
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open scenario: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

std::string scenario_to_json(const Scenario& scenario) {
    json root;
    json vulns = json::object();
    for (const auto& [id, v] : scenario.vulns) {
        vulns[id] = {{"lambda_star", v.lambda_star}, {"xi_base", v.xi_base},
                     {"theta0", v.theta0},           {"k", v.k},
                     {"alpha_drift", v.alpha_drift}, {"p", v.p}};
    }
    root["vulnerabilities"] = std::move(vulns);
    json types = json::object();
    for (const auto& [name, t] : scenario.obs_types) {
        types[name] = {{"m", t.m},
                       {"delta_neg", t.delta_neg},
                       {"eta_neg", t.eta_neg},
                       {"eta_pos", t.eta_pos}};
    }
    root["observation_types"] = std::move(types);
    return root.dump(2) + "\n";
}

}  // namespace vigil
