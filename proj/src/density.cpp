#include "vigil/density.hpp"

#include <cmath>
#include <span>

#include "vigil/errors.hpp"
#include "vigil/mathx.hpp"

namespace vigil {

namespace {

const VulnLatent& latent_for(const LatentParams& params, const std::string& vuln_id) {
    auto it = params.vulns.find(vuln_id);
    if (it == params.vulns.end()) {
        throw DimensionError("no latent parameters for vulnerability " + vuln_id);
    }
    return it->second;
}

double log_binomial_pmf(long n, long k, double p) {
    if (p <= 0.0) {
        if (k > 0) throw BoundaryError("Binomial evaluated at kappa = 0 with n_neg > 0");
        return 0.0;
    }
    if (p >= 1.0) {
        if (k < n) throw BoundaryError("Binomial evaluated at kappa = 1 with n_neg < n_total");
        return 0.0;
    }
    return log_choose(static_cast<double>(n), static_cast<double>(k)) +
           static_cast<double>(k) * std::log(p) +
           static_cast<double>(n - k) * std::log1p(-p);
}

}  // namespace

double log_counts_likelihood(const DailyRecord& record, const LatentParams& params) {
    const VulnLatent& v = latent_for(params, record.vuln_id);
    const double kappa_mix = params.mixed_kappa(v);

    double ll = 0.0;
    // A record may cover a subset of the configured types; each present type
    // must be known to the parameter set.
    for (const auto& [type, counts] : record.obs) {
        const std::size_t x = params.obs_type_index(type);
        ll += log_binomial_pmf(counts.n_total, counts.n_neg, v.kappa[x]);
    }

    if (record.incidents) {
        const double rate = kappa_mix * v.beta;
        const long n_e = record.n_incidents();
        if (rate <= 0.0) {
            if (n_e > 0) throw BoundaryError("Poisson evaluated at rate 0 with incidents present");
            // rate == 0 and no incidents: pmf mass 1.
        } else {
            ll += static_cast<double>(n_e) * std::log(rate) - rate -
                  std::lgamma(static_cast<double>(n_e) + 1.0);
        }
    }
    return ll;
}

double log_hurt_likelihood(const DailyRecord& record,
                           const std::array<double, kHurtLevels>& p) {
    if (!record.incidents || record.incidents->empty()) return 0.0;
    const std::vector<Incident>& incidents = *record.incidents;

    const std::array<double, kHurtLevels> counts = count_levels(incidents);
    double ll = std::lgamma(static_cast<double>(incidents.size()) + 1.0);
    for (int j = 0; j < kHurtLevels; ++j) {
        if (counts[j] == 0.0) continue;
        if (!(p[j] > 0.0)) {
            throw BoundaryError("Hurt probability is zero at an observed level");
        }
        ll += counts[j] * std::log(p[j]) - std::lgamma(counts[j] + 1.0);
    }

    for (const Incident& e : incidents) {
        double tail = 0.0;
        for (int l = e.ahl.level; l < kHurtLevels; ++l) tail += p[l];
        if (!(p[e.phl.level] > 0.0) || !(tail > 0.0)) {
            throw BoundaryError("Hurt probability is zero at an observed PHL");
        }
        ll += std::log(p[e.phl.level]) - std::log(tail);
    }
    return ll;
}

namespace {

double log_dirichlet_pdf(std::span<const double> x, std::span<const double> conc) {
    double ll = 0.0;
    double conc_total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0)) throw BoundaryError("Dirichlet evaluated at a zero component");
        ll += (conc[i] - 1.0) * std::log(x[i]) - std::lgamma(conc[i]);
        conc_total += conc[i];
    }
    return ll + std::lgamma(conc_total);
}

double log_gamma_pdf(double x, const GammaKT& g) {
    if (!(x > 0.0)) throw BoundaryError("Gamma evaluated at a non-positive point");
    return (g.k - 1.0) * std::log(x) - x / g.theta - g.k * std::log(g.theta) -
           std::lgamma(g.k);
}

double log_beta_pdf(double x, const BetaAB& ab) {
    if (!(x > 0.0) || !(x < 1.0)) throw BoundaryError("Beta evaluated outside (0, 1)");
    return (ab.a - 1.0) * std::log(x) + (ab.b - 1.0) * std::log1p(-x) -
           log_beta_fn(ab.a, ab.b);
}

}  // namespace

double log_prior(const LatentParams& params, const GlobalState& global) {
    if (params.w.size() != global.xi.size()) {
        throw DimensionError("w dimension does not match xi");
    }
    double ll = log_dirichlet_pdf(params.w, global.xi);
    for (const auto& [id, latent] : params.vulns) {
        auto it = global.vulns.find(id);
        if (it == global.vulns.end()) {
            throw DimensionError("no hyperparameters for vulnerability " + id);
        }
        const VulnerabilityState& vs = it->second;
        if (latent.kappa.size() != vs.beta_ab.size()) {
            throw DimensionError("kappa dimension mismatch for vulnerability " + id);
        }
        ll += log_gamma_pdf(latent.beta, vs.beta_prior);
        for (std::size_t x = 0; x < latent.kappa.size(); ++x) {
            ll += log_beta_pdf(latent.kappa[x], vs.beta_ab[x]);
        }
    }
    return ll;
}

}  // namespace vigil
