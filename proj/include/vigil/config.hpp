#pragma once

#include <string>

#include "vigil/environment.hpp"
#include "vigil/mcmc.hpp"
#include "vigil/policies.hpp"
#include "vigil/simulation.hpp"

namespace vigil {

// Engine configuration shared by the CLI subcommands. Every field has a
// working default; a JSON config file overrides selectively.
struct EngineConfig {
    McmcConfig mcmc{};
    LossVector loss{};
    HeuristicConfig heuristic{};
    OptConfig optimizer{};
    GammaKT beta_prior_init{1.0, 0.1};

    PolicyOptions policy_options() const {
        return PolicyOptions{heuristic, optimizer, loss};
    }
};

EngineConfig load_engine_config_file(const std::string& path);
EngineConfig parse_engine_config(const std::string& json_text);

// Scenario files carry the environment tables verbatim as a key-value tree.
Scenario load_scenario_file(const std::string& path);
Scenario parse_scenario(const std::string& json_text);
std::string scenario_to_json(const Scenario& scenario);

}  // namespace vigil
