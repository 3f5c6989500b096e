#pragma once

#include <span>
#include <string>
#include <vector>

#include "vigil/types.hpp"

namespace vigil {

// One posterior draw over the non-conjugate block, in constrained space.
struct LatentDraw {
    std::vector<double> w;                    // simplex over obs types
    std::vector<double> beta;                 // per vulnerability
    std::vector<std::vector<double>> kappa;   // [vulnerability][obs type]
};

// Unconstrained view of the daily posterior over (w, {beta_i, kappa_iX}).
// The Hurt-level block is conjugate and handled analytically elsewhere.
//
// Coordinates: additive-log-ratio transform of w against the last type
// (K - 1 entries), then per vulnerability in id order: log beta followed by
// logit kappa for each type. Log-density values include the Jacobian of the
// transform, so the target is the pushforward of the constrained posterior.
class CountsPosterior {
  public:
    // `records` holds at most one record per vulnerability for the day that
    // follows global.day; vulnerabilities without a record contribute
    // prior-only terms. Throws DimensionError on unknown ids or types.
    CountsPosterior(const GlobalState& global, const std::vector<DailyRecord>& records);

    std::size_t dim() const { return dim_; }
    std::size_t n_vulns() const { return vuln_ids_.size(); }
    std::size_t n_types() const { return n_types_; }
    const std::vector<std::string>& vuln_ids() const { return vuln_ids_; }
    const std::vector<std::string>& obs_types() const { return obs_types_; }

    double log_density(std::span<const double> x) const;
    // Returns log density and fills grad (same length as x).
    double log_density_gradient(std::span<const double> x, std::span<double> grad) const;

    // Prior means mapped to unconstrained coordinates.
    std::vector<double> initial_point() const;

    LatentDraw to_constrained(std::span<const double> x) const;

  private:
    struct VulnBlock {
        GammaKT beta_prior;
        std::vector<BetaAB> kappa_prior;     // per type
        std::vector<long> n_total, n_neg;    // per type, zero when absent
        bool has_incidents = false;
        long n_e = 0;
    };

    std::size_t w_dim() const { return n_types_ - 1; }
    std::size_t vuln_offset(std::size_t v) const { return w_dim() + v * (1 + n_types_); }
    void softmax_w(std::span<const double> x, std::span<double> w) const;

    std::vector<std::string> obs_types_;
    std::vector<std::string> vuln_ids_;
    std::vector<double> xi_;
    std::vector<VulnBlock> blocks_;
    std::size_t n_types_ = 0;
    std::size_t dim_ = 0;
};

}  // namespace vigil
