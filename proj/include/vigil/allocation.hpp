#pragma once

#include <span>
#include <vector>

#include "vigil/types.hpp"

namespace vigil {

// Logistic intervention-response curve: the fraction by which a
// vulnerability's expected incident rate drops when it receives proportion r
// of the observation resources. Defaults follow the design targets of a 50%
// reduction at r = 0.34 and roughly 90% at r = 0.5.
struct InterventionCurve {
    double steepness = 15.0;
    double midpoint = 0.34;

    double operator()(double r) const;
    double slope(double r) const;  // dh/dr
};

// h(r) with the default curve.
double intervention_response(double r);

// (1 - h(r)) * expected_loss(state, c).
double conditional_expected_loss(const VulnerabilityState& state, const LossVector& c,
                                 double r, const InterventionCurve& curve = {});

struct OptConfig {
    int max_iterations = 5000;
    double gradient_tolerance = 1e-10;
    double min_proportion = 1e-6;  // floor applied to every proportion
    InterventionCurve curve{};

    void validate(std::size_t n) const;  // requires min_proportion * n < 1
};

struct AllocationResult {
    std::vector<double> proportions;  // on the simplex, entries >= floor
    double objective_value = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Net expected loss sum_i (1 - h(r_i)) * unit_loss_i and its gradient in r.
// `r` need not lie on the simplex; the objective extends separably.
double allocation_objective(std::span<const double> unit_losses, std::span<const double> r,
                            const InterventionCurve& curve = {});
std::vector<double> allocation_objective_gradient(std::span<const double> unit_losses,
                                                  std::span<const double> r,
                                                  const InterventionCurve& curve = {});

// Minimizes the net expected loss over the simplex by gradient descent on a
// floored softmax reparameterization, starting from the uniform allocation.
// Non-convergence is reported through `converged`, not an exception; the
// best iterate is returned either way.
AllocationResult optimize_allocation(const std::vector<VulnerabilityState>& states,
                                     const LossVector& c, const OptConfig& cfg = {});

// Same optimizer on precomputed per-unit losses.
AllocationResult optimize_allocation_units(std::span<const double> unit_losses,
                                           const OptConfig& cfg = {});

}  // namespace vigil
