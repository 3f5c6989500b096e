#include "vigil/snapshot.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "vigil/errors.hpp"

namespace vigil {

using nlohmann::json;

std::string save_snapshot(const GlobalState& state) {
    json root;
    root["schema_version"] = state.schema_version;
    root["day"] = state.day;
    root["obs_types"] = state.obs_types;
    root["xi"] = state.xi;
    json vulns = json::object();
    for (const auto& [id, vs] : state.vulns) {
        json v;
        v["alpha"] = vs.alpha;
        v["gamma_k"] = vs.beta_prior.k;
        v["gamma_theta"] = vs.beta_prior.theta;
        json ab = json::array();
        for (const BetaAB& pair : vs.beta_ab) ab.push_back({pair.a, pair.b});
        v["beta_ab"] = ab;
        if (vs.rate_product) {
            v["rate_product"] = {vs.rate_product->k, vs.rate_product->theta};
        } else {
            v["rate_product"] = nullptr;
        }
        vulns[id] = std::move(v);
    }
    root["vulns"] = std::move(vulns);
    return root.dump(2) + "\n";
}

GlobalState load_snapshot(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw DataError(std::string("snapshot parse error: ") + e.what());
    }
    try {
        GlobalState state;
        state.schema_version = root.at("schema_version").get<int>();
        if (state.schema_version > kSnapshotSchemaVersion) {
            throw DataError("snapshot schema version " +
                            std::to_string(state.schema_version) +
                            " is newer than supported version " +
                            std::to_string(kSnapshotSchemaVersion));
        }
        state.day = root.at("day").get<long>();
        state.obs_types = root.at("obs_types").get<std::vector<std::string>>();
        state.xi = root.at("xi").get<std::vector<double>>();
        for (const auto& [id, v] : root.at("vulns").items()) {
            VulnerabilityState vs;
            const auto alpha = v.at("alpha").get<std::vector<double>>();
            if (alpha.size() != kHurtLevels) {
                throw DataError("snapshot alpha for " + id + " must have 6 entries");
            }
            std::copy(alpha.begin(), alpha.end(), vs.alpha.begin());
            vs.beta_prior = GammaKT{v.at("gamma_k").get<double>(),
                                    v.at("gamma_theta").get<double>()};
            for (const auto& pair : v.at("beta_ab")) {
                vs.beta_ab.push_back(BetaAB{pair.at(0).get<double>(),
                                            pair.at(1).get<double>()});
            }
            if (!v.at("rate_product").is_null()) {
                vs.rate_product = GammaKT{v.at("rate_product").at(0).get<double>(),
                                          v.at("rate_product").at(1).get<double>()};
            }
            state.vulns.emplace(id, std::move(vs));
        }
        state.validate();
        return state;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed snapshot: ") + e.what());
    }
}

void save_snapshot_file(const std::string& path, const GlobalState& state) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write snapshot: " + path);
    out << save_snapshot(state);
}

GlobalState load_snapshot_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open snapshot: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_snapshot(buffer.str());
}

}  // namespace vigil
