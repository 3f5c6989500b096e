#pragma once

#include <cstdint>

#include "vigil/target.hpp"
#include "vigil/types.hpp"

namespace vigil {

struct McmcConfig {
    int n_warmup = 200;
    int n_kept = 200;
    double target_acceptance = 0.8;
    int n_leapfrog = 16;          // leapfrog steps per trajectory (upper end of jitter)
    int max_step_attempts = 100;  // cap on the initial step-size bracketing
    std::uint64_t seed = 0;

    void validate() const;
};

// Posterior draws of (w, {beta_i, kappa_iX}) from one daily update.
struct SampleSet {
    std::vector<std::string> obs_types;
    std::vector<std::string> vuln_ids;
    std::vector<LatentDraw> draws;
    int n_warmup = 0;
    int n_kept = 0;
    double acceptance_rate = 0.0;
    double step_size = 0.0;
    std::uint64_t seed = 0;
};

// Hamiltonian Monte Carlo on the unconstrained reparameterization of the
// day's counts posterior. Step size is adapted by dual averaging during
// warmup to cfg.target_acceptance; the trajectory length is fixed. Throws
// NonConvergenceError when the post-warmup acceptance rate leaves
// [0.1, 0.99], DimensionError on inconsistent observation-type sets.
SampleSet sample_posterior(const GlobalState& global,
                           const std::vector<DailyRecord>& records,
                           const McmcConfig& cfg);

}  // namespace vigil
