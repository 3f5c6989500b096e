#pragma once

#include "vigil/fit.hpp"
#include "vigil/mcmc.hpp"
#include "vigil/types.hpp"

namespace vigil {

// Conjugate Dirichlet-Multinomial update: alpha + per-level counts of `ahl`.
std::array<double, kHurtLevels> update_hurt_dirichlet(
    const std::array<double, kHurtLevels>& alpha, const std::vector<HurtLevel>& ahl);

// Tail update for one (AHL, PHL) pair. With rho the pseudo-count mass at
// levels >= a, entries below a are untouched, entries at or above a are
// scaled by rho / (rho + 1), and the PHL entry receives the extra unit
// before scaling. The total pseudo-count mass is preserved exactly. Throws
// DataError when p < a.
std::array<double, kHurtLevels> update_hurt_phl(
    const std::array<double, kHurtLevels>& alpha_hat, HurtLevel a, HurtLevel p);

// One step of the daily recursion: sample the counts posterior, refit the
// hyperparameters from the draws, then fold the day's severities into each
// vulnerability's alpha (AHL counts first, then the PHL tail update per
// incident in record order). The returned state carries day + 1. Failures
// propagate as exceptions and leave `global` untouched. `apply_phl` disables
// the tail updates for ablation runs.
GlobalState daily_update(const GlobalState& global,
                         const std::vector<DailyRecord>& records,
                         const McmcConfig& cfg, bool apply_phl = true);

}  // namespace vigil
