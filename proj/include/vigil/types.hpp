#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vigil {

// Number of Hurt severity grades. Level 0 is a near-miss, levels 4 and 5 are
// single and multiple fatalities.
inline constexpr int kHurtLevels = 6;

// Severity grade in {0..5}.
struct HurtLevel {
    int level = 0;

    HurtLevel() = default;
    explicit HurtLevel(int l);  // validates range

    auto operator<=>(const HurtLevel&) const = default;
};

// One recorded incident: realized severity and assessed worst-case severity.
// Invariant: phl >= ahl.
struct Incident {
    HurtLevel ahl;
    HurtLevel phl;
};

// Total and unsafe-flagged observation counts for one observation type.
struct ObsCounts {
    long n_total = 0;
    long n_neg = 0;

    auto operator<=>(const ObsCounts&) const = default;
};

// One day of safety data for one vulnerability. `incidents` is nullopt when
// the incident channel was not recorded that day (used to exercise the
// observation likelihood in isolation); an empty vector means "recorded, no
// incidents" and does contribute a zero-count likelihood term.
struct DailyRecord {
    std::string vuln_id;
    long day = 0;
    std::optional<std::vector<Incident>> incidents;
    std::map<std::string, ObsCounts> obs;

    long n_incidents() const {
        return incidents ? static_cast<long>(incidents->size()) : 0;
    }

    // Throws DataError when an invariant is violated.
    void validate() const;
};

// Per-level counts of a list of severities.
std::array<double, kHurtLevels> count_levels(const std::vector<Incident>& incidents,
                                             bool potential = false);

// Non-negative loss per Hurt level, monotone non-decreasing with c[0] = 0.
struct LossVector {
    std::array<double, kHurtLevels> c{0.0, 1.0, 10.0, 100.0, 1000.0, 10000.0};

    void validate() const;
    double dot(const std::array<double, kHurtLevels>& counts) const;
};

// Beta hyperparameters for one (vulnerability, observation type) pair.
struct BetaAB {
    double a = 1.0;
    double b = 1.0;
};

// Gamma hyperparameters, shape/scale.
struct GammaKT {
    double k = 1.0;
    double theta = 1.0;

    double mean() const { return k * theta; }
};

// Hyperparameter set for one vulnerability. `beta_ab` is aligned with the
// owning GlobalState's observation-type order. `rate_product` is the Gamma
// fit of the per-draw product kappa*beta and is absent until the first refit.
struct VulnerabilityState {
    std::array<double, kHurtLevels> alpha{1, 1, 1, 1, 1, 1};
    GammaKT beta_prior{1.0, 0.1};
    std::vector<BetaAB> beta_ab;
    std::optional<GammaKT> rate_product;

    void validate(std::size_t n_obs_types) const;
};

// Shared observation-type weight hyperparameters plus all per-vulnerability
// states. Values are immutable snapshots; updates construct successors.
struct GlobalState {
    int schema_version = 1;
    long day = 0;
    std::vector<std::string> obs_types;
    std::vector<double> xi;  // Dirichlet concentration over obs_types
    std::map<std::string, VulnerabilityState> vulns;

    void validate() const;
    std::size_t obs_type_index(const std::string& name) const;  // throws DimensionError

    // Uniform-prior state: xi = 1, alpha = 1, Gamma(1, 0.1), Beta(1, 1).
    static GlobalState make_default(const std::vector<std::string>& obs_types,
                                    const std::vector<std::string>& vuln_ids);
};

// Per-vulnerability latent parameters for density evaluation.
struct VulnLatent {
    double beta = 1.0;                    // residual incident-rate factor
    std::vector<double> kappa;            // flagged-unsafe proportion per type
    std::array<double, kHurtLevels> p{};  // Hurt-level probabilities
};

// Full latent parameter set targeted by the daily update: global weights w
// plus per-vulnerability (beta, kappa, p). `w` and every `kappa` vector are
// aligned with `obs_types`.
struct LatentParams {
    std::vector<std::string> obs_types;
    std::vector<double> w;  // simplex over obs_types
    std::map<std::string, VulnLatent> vulns;

    std::size_t obs_type_index(const std::string& name) const;  // throws DimensionError

    // kappa = sum_X w_X kappa_X for one vulnerability.
    double mixed_kappa(const VulnLatent& v) const;
};

}  // namespace vigil
