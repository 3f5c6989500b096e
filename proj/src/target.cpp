#include "vigil/target.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "vigil/errors.hpp"
#include "vigil/mathx.hpp"

namespace vigil {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

CountsPosterior::CountsPosterior(const GlobalState& global,
                                 const std::vector<DailyRecord>& records) {
    global.validate();
    obs_types_ = global.obs_types;
    n_types_ = obs_types_.size();
    xi_ = global.xi;

    vuln_ids_.reserve(global.vulns.size());
    blocks_.reserve(global.vulns.size());
    for (const auto& [id, vs] : global.vulns) {
        vuln_ids_.push_back(id);
        VulnBlock b;
        b.beta_prior = vs.beta_prior;
        b.kappa_prior = vs.beta_ab;
        b.n_total.assign(n_types_, 0);
        b.n_neg.assign(n_types_, 0);
        blocks_.push_back(std::move(b));
    }

    std::set<std::string> seen;
    for (const DailyRecord& rec : records) {
        rec.validate();
        if (!seen.insert(rec.vuln_id).second) {
            throw DataError("multiple records for vulnerability " + rec.vuln_id +
                            " on one day");
        }
        auto it = global.vulns.find(rec.vuln_id);
        if (it == global.vulns.end()) {
            throw DimensionError("record for unknown vulnerability " + rec.vuln_id);
        }
        const std::size_t v =
            static_cast<std::size_t>(std::distance(global.vulns.begin(), it));
        VulnBlock& b = blocks_[v];
        for (const auto& [type, counts] : rec.obs) {
            const std::size_t x = global.obs_type_index(type);
            b.n_total[x] = counts.n_total;
            b.n_neg[x] = counts.n_neg;
        }
        if (rec.incidents) {
            b.has_incidents = true;
            b.n_e = rec.n_incidents();
        }
    }

    dim_ = w_dim() + vuln_ids_.size() * (1 + n_types_);
}

void CountsPosterior::softmax_w(std::span<const double> x, std::span<double> w) const {
    // Last type is the reference coordinate with implicit z = 0.
    double zmax = 0.0;
    for (std::size_t j = 0; j < w_dim(); ++j) zmax = std::max(zmax, x[j]);
    double total = std::exp(-zmax);
    for (std::size_t j = 0; j < w_dim(); ++j) {
        w[j] = std::exp(x[j] - zmax);
        total += w[j];
    }
    for (std::size_t j = 0; j < w_dim(); ++j) w[j] /= total;
    w[n_types_ - 1] = std::exp(-zmax) / total;
}

double CountsPosterior::log_density(std::span<const double> x) const {
    std::vector<double> grad;  // unused
    grad.resize(dim_);
    return log_density_gradient(x, grad);
}

double CountsPosterior::log_density_gradient(std::span<const double> x,
                                             std::span<double> grad) const {
    for (double& g : grad) g = 0.0;

    std::vector<double> w(n_types_);
    softmax_w(x, w);

    double lp = 0.0;
    double xi_total = 0.0;

    // Dirichlet prior on w plus the ALR Jacobian sum_X log w_X gives
    // sum_X xi_X log w_X up to constants.
    for (std::size_t j = 0; j < n_types_; ++j) {
        if (!(w[j] > 0.0)) return kNegInf;
        lp += xi_[j] * std::log(w[j]) - std::lgamma(xi_[j]);
        xi_total += xi_[j];
    }
    lp += std::lgamma(xi_total);
    for (std::size_t j = 0; j < w_dim(); ++j) {
        grad[j] += xi_[j] - xi_total * w[j];
    }

    for (std::size_t v = 0; v < blocks_.size(); ++v) {
        const VulnBlock& b = blocks_[v];
        const std::size_t off = vuln_offset(v);
        const double log_beta = x[off];
        const double beta = std::exp(log_beta);
        if (!std::isfinite(beta)) return kNegInf;

        // Gamma prior with the log transform Jacobian.
        lp += b.beta_prior.k * log_beta - beta / b.beta_prior.theta -
              b.beta_prior.k * std::log(b.beta_prior.theta) - std::lgamma(b.beta_prior.k);
        grad[off] += b.beta_prior.k - beta / b.beta_prior.theta;

        double kappa_mix = 0.0;
        for (std::size_t t = 0; t < n_types_; ++t) {
            const double y = x[off + 1 + t];
            const double kappa = sigmoid(y);
            const double log_k = log_sigmoid(y);
            const double log_1mk = log_sigmoid(-y);
            const BetaAB& ab = b.kappa_prior[t];

            // Beta prior with the logit Jacobian.
            lp += ab.a * log_k + ab.b * log_1mk - log_beta_fn(ab.a, ab.b);
            grad[off + 1 + t] += ab.a * (1.0 - kappa) - ab.b * kappa;

            if (b.n_total[t] > 0) {
                const double n = static_cast<double>(b.n_total[t]);
                const double k_neg = static_cast<double>(b.n_neg[t]);
                lp += log_choose(n, k_neg) + k_neg * log_k + (n - k_neg) * log_1mk;
                grad[off + 1 + t] += k_neg * (1.0 - kappa) - (n - k_neg) * kappa;
            }
            kappa_mix += w[t] * kappa;
        }

        if (b.has_incidents) {
            if (!(kappa_mix > 0.0)) return kNegInf;
            const double rate = kappa_mix * beta;
            const double n_e = static_cast<double>(b.n_e);
            lp += n_e * std::log(rate) - rate - std::lgamma(n_e + 1.0);

            grad[off] += n_e - rate;
            const double dl_dkappa = n_e / kappa_mix - beta;
            for (std::size_t t = 0; t < n_types_; ++t) {
                const double kappa = sigmoid(x[off + 1 + t]);
                grad[off + 1 + t] += dl_dkappa * w[t] * kappa * (1.0 - kappa);
            }
            for (std::size_t j = 0; j < w_dim(); ++j) {
                const double kappa_j = sigmoid(x[off + 1 + j]);
                grad[j] += dl_dkappa * w[j] * (kappa_j - kappa_mix);
            }
        }
    }
    return lp;
}

std::vector<double> CountsPosterior::initial_point() const {
    std::vector<double> x(dim_, 0.0);
    for (std::size_t j = 0; j < w_dim(); ++j) {
        x[j] = std::log(xi_[j] / xi_[n_types_ - 1]);
    }
    for (std::size_t v = 0; v < blocks_.size(); ++v) {
        const VulnBlock& b = blocks_[v];
        const std::size_t off = vuln_offset(v);
        x[off] = std::log(b.beta_prior.k * b.beta_prior.theta);
        for (std::size_t t = 0; t < n_types_; ++t) {
            x[off + 1 + t] = std::log(b.kappa_prior[t].a / b.kappa_prior[t].b);
        }
    }
    return x;
}

LatentDraw CountsPosterior::to_constrained(std::span<const double> x) const {
    LatentDraw d;
    d.w.resize(n_types_);
    softmax_w(x, d.w);
    d.beta.resize(blocks_.size());
    d.kappa.resize(blocks_.size());
    for (std::size_t v = 0; v < blocks_.size(); ++v) {
        const std::size_t off = vuln_offset(v);
        d.beta[v] = std::exp(x[off]);
        d.kappa[v].resize(n_types_);
        for (std::size_t t = 0; t < n_types_; ++t) {
            d.kappa[v][t] = sigmoid(x[off + 1 + t]);
        }
    }
    return d;
}

}  // namespace vigil
