#include "vigil/types.hpp"

#include <cmath>

#include "vigil/errors.hpp"

namespace vigil {

HurtLevel::HurtLevel(int l) : level(l) {
    if (l < 0 || l >= kHurtLevels) {
        throw DataError("hurt level " + std::to_string(l) + " outside {0..5}");
    }
}

void DailyRecord::validate() const {
    if (incidents) {
        for (const Incident& e : *incidents) {
            if (e.phl < e.ahl) {
                throw DataError("record " + vuln_id + " day " + std::to_string(day) +
                                ": PHL must be >= AHL");
            }
        }
    }
    for (const auto& [type, counts] : obs) {
        if (counts.n_total < 0 || counts.n_neg < 0 || counts.n_neg > counts.n_total) {
            throw DataError("record " + vuln_id + " day " + std::to_string(day) + " type " +
                            type + ": need 0 <= n_neg <= n_total");
        }
    }
}

std::array<double, kHurtLevels> count_levels(const std::vector<Incident>& incidents,
                                             bool potential) {
    std::array<double, kHurtLevels> counts{};
    for (const Incident& e : incidents) {
        counts[potential ? e.phl.level : e.ahl.level] += 1.0;
    }
    return counts;
}

void LossVector::validate() const {
    if (c[0] != 0.0) throw DataError("loss vector must have c[0] = 0");
    for (int j = 0; j < kHurtLevels; ++j) {
        if (!(c[j] >= 0.0)) throw DataError("loss vector entries must be non-negative");
        if (j > 0 && c[j] < c[j - 1]) {
            throw DataError("loss vector must be non-decreasing in severity");
        }
    }
}

double LossVector::dot(const std::array<double, kHurtLevels>& counts) const {
    double s = 0.0;
    for (int j = 0; j < kHurtLevels; ++j) s += c[j] * counts[j];
    return s;
}

void VulnerabilityState::validate(std::size_t n_obs_types) const {
    for (double a : alpha) {
        if (!(a > 0.0)) throw DataError("alpha entries must be strictly positive");
    }
    if (!(beta_prior.k > 0.0) || !(beta_prior.theta > 0.0)) {
        throw DataError("Gamma hyperparameters must be strictly positive");
    }
    if (beta_ab.size() != n_obs_types) {
        throw DimensionError("beta_ab size does not match observation-type set");
    }
    for (const BetaAB& ab : beta_ab) {
        if (!(ab.a > 0.0) || !(ab.b > 0.0)) {
            throw DataError("Beta hyperparameters must be strictly positive");
        }
    }
    if (rate_product && (!(rate_product->k > 0.0) || !(rate_product->theta > 0.0))) {
        throw DataError("rate-product fit must be strictly positive");
    }
}

void GlobalState::validate() const {
    if (obs_types.empty()) throw DataError("at least one observation type required");
    if (xi.size() != obs_types.size()) {
        throw DimensionError("xi size does not match observation-type set");
    }
    for (double x : xi) {
        if (!(x > 0.0)) throw DataError("xi entries must be strictly positive");
    }
    for (const auto& [id, vs] : vulns) {
        (void)id;
        vs.validate(obs_types.size());
    }
}

std::size_t GlobalState::obs_type_index(const std::string& name) const {
    for (std::size_t i = 0; i < obs_types.size(); ++i) {
        if (obs_types[i] == name) return i;
    }
    throw DimensionError("unknown observation type: " + name);
}

std::size_t LatentParams::obs_type_index(const std::string& name) const {
    for (std::size_t i = 0; i < obs_types.size(); ++i) {
        if (obs_types[i] == name) return i;
    }
    throw DimensionError("unknown observation type: " + name);
}

double LatentParams::mixed_kappa(const VulnLatent& v) const {
    if (v.kappa.size() != w.size()) {
        throw DimensionError("kappa and w must cover the same observation types");
    }
    double mix = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) mix += w[i] * v.kappa[i];
    return mix;
}

GlobalState GlobalState::make_default(const std::vector<std::string>& types,
                                      const std::vector<std::string>& vuln_ids) {
    GlobalState g;
    g.obs_types = types;
    g.xi.assign(types.size(), 1.0);
    for (const std::string& id : vuln_ids) {
        VulnerabilityState vs;
        vs.beta_ab.assign(types.size(), BetaAB{});
        g.vulns.emplace(id, std::move(vs));
    }
    g.validate();
    return g;
}

}  // namespace vigil
