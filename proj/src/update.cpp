#include "vigil/update.hpp"

#include "vigil/errors.hpp"

namespace vigil {

std::array<double, kHurtLevels> update_hurt_dirichlet(
    const std::array<double, kHurtLevels>& alpha, const std::vector<HurtLevel>& ahl) {
    std::array<double, kHurtLevels> out = alpha;
    for (const HurtLevel& l : ahl) out[l.level] += 1.0;
    return out;
}

std::array<double, kHurtLevels> update_hurt_phl(
    const std::array<double, kHurtLevels>& alpha_hat, HurtLevel a, HurtLevel p) {
    if (p < a) throw DataError("PHL must be >= AHL in the tail update");

    double rho = 0.0;
    for (int j = a.level; j < kHurtLevels; ++j) rho += alpha_hat[j];
    const double scale = rho / (rho + 1.0);

    std::array<double, kHurtLevels> out = alpha_hat;
    for (int j = a.level; j < kHurtLevels; ++j) {
        out[j] = scale * (alpha_hat[j] + (j == p.level ? 1.0 : 0.0));
    }
    return out;
}

GlobalState daily_update(const GlobalState& global,
                         const std::vector<DailyRecord>& records,
                         const McmcConfig& cfg, bool apply_phl) {
    for (const DailyRecord& rec : records) {
        if (rec.day != global.day + 1) {
            throw DataError("record for day " + std::to_string(rec.day) +
                            " does not follow state day " + std::to_string(global.day));
        }
    }

    const SampleSet samples = sample_posterior(global, records, cfg);
    GlobalState out = refit_hyperparameters(samples, global);

    for (const DailyRecord& rec : records) {
        if (!rec.incidents || rec.incidents->empty()) continue;
        VulnerabilityState& vs = out.vulns.at(rec.vuln_id);

        std::vector<HurtLevel> ahl;
        ahl.reserve(rec.incidents->size());
        for (const Incident& e : *rec.incidents) ahl.push_back(e.ahl);
        vs.alpha = update_hurt_dirichlet(vs.alpha, ahl);

        if (apply_phl) {
            for (const Incident& e : *rec.incidents) {
                vs.alpha = update_hurt_phl(vs.alpha, e.ahl, e.phl);
            }
        }
    }

    out.day = global.day + 1;
    return out;
}

}  // namespace vigil
