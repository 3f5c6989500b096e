#pragma once

#include <span>
#include <vector>

#include "vigil/mcmc.hpp"
#include "vigil/types.hpp"

// Maximum-likelihood fits of the prior families to posterior samples. Gamma
// uses Newton iteration on the digamma equation, Beta a method-of-moments
// start followed by Newton, Dirichlet the fixed-point iteration on the
// inverse digamma. All fitters cap at 200 iterations with tolerance 1e-8 and
// throw FitError (carrying the parameter name) on failure.

namespace vigil {

inline constexpr int kFitMaxIterations = 200;
inline constexpr double kFitTolerance = 1e-8;
inline constexpr double kDegenerateVariance = 1e-12;

GammaKT fit_gamma(std::span<const double> samples, const std::string& name = "gamma");
BetaAB fit_beta(std::span<const double> samples, const std::string& name = "beta");
// `samples` holds one simplex vector per draw, all of equal length.
std::vector<double> fit_dirichlet(const std::vector<std::vector<double>>& samples,
                                  const std::string& name = "dirichlet");

// New GlobalState with xi, (k, theta), (a, b) and the rate-product Gamma
// refitted from the draws; alpha vectors pass through unchanged. Throws
// DegenerateSampleError when a sample dimension has variance below 1e-12.
GlobalState refit_hyperparameters(const SampleSet& samples, const GlobalState& old);

}  // namespace vigil
