#pragma once

#include "vigil/types.hpp"

// Log-densities of the generative model. The observation counts of each type
// are Binomial in the type's flagged-unsafe proportion kappa_X, the daily
// incident count is Poisson with rate kappa * beta where
// kappa = sum_X w_X kappa_X, and severities are Multinomial with the PHL term
// tail-renormalized on {level >= AHL}.

namespace vigil {

// Binomial terms for every observation type present in `record` plus the
// Poisson incident term when the incident channel was recorded. Throws
// BoundaryError when a parameter sits on the boundary of its support with
// incompatible counts, DimensionError on unknown observation types.
double log_counts_likelihood(const DailyRecord& record, const LatentParams& params);

// Multinomial log-pmf of the AHL counts under p plus, per incident, the log
// tail-renormalized PHL probability p[phl] / sum_{l >= ahl} p[l].
double log_hurt_likelihood(const DailyRecord& record,
                           const std::array<double, kHurtLevels>& p);

// Dirichlet(w | xi) plus, per vulnerability, Gamma(beta | k, theta) and
// Beta(kappa_X | a_X, b_X). The Dirichlet(p | alpha) factor is excluded; the
// Hurt-level block is conjugate and updated analytically elsewhere.
// Normalizing constants are included.
double log_prior(const LatentParams& params, const GlobalState& global);

}  // namespace vigil
