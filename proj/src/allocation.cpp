#include "vigil/allocation.hpp"

#include <algorithm>
#include <cmath>

#include "vigil/errors.hpp"
#include "vigil/mathx.hpp"
#include "vigil/risk.hpp"

namespace vigil {

double InterventionCurve::operator()(double r) const {
    return sigmoid(steepness * (r - midpoint));
}

double InterventionCurve::slope(double r) const {
    const double h = (*this)(r);
    return steepness * h * (1.0 - h);
}

double intervention_response(double r) { return InterventionCurve{}(r); }

double conditional_expected_loss(const VulnerabilityState& state, const LossVector& c,
                                 double r, const InterventionCurve& curve) {
    return (1.0 - curve(r)) * expected_loss(state, c);
}

void OptConfig::validate(std::size_t n) const {
    if (max_iterations < 1 || !(gradient_tolerance > 0.0)) {
        throw DataError("invalid optimizer configuration");
    }
    if (!(min_proportion > 0.0) ||
        min_proportion * static_cast<double>(n) >= 1.0) {
        throw DataError("min_proportion * n must be below 1");
    }
}

double allocation_objective(std::span<const double> unit_losses, std::span<const double> r,
                            const InterventionCurve& curve) {
    double total = 0.0;
    for (std::size_t i = 0; i < unit_losses.size(); ++i) {
        total += (1.0 - curve(r[i])) * unit_losses[i];
    }
    return total;
}

std::vector<double> allocation_objective_gradient(std::span<const double> unit_losses,
                                                  std::span<const double> r,
                                                  const InterventionCurve& curve) {
    std::vector<double> g(unit_losses.size());
    for (std::size_t i = 0; i < unit_losses.size(); ++i) {
        g[i] = -curve.slope(r[i]) * unit_losses[i];
    }
    return g;
}

namespace {

// r = floor + (1 - n * floor) * softmax(z).
void to_proportions(std::span<const double> z, double floor, std::span<double> r) {
    const std::size_t n = z.size();
    const double span = 1.0 - floor * static_cast<double>(n);
    double zmax = z[0];
    for (double v : z) zmax = std::max(zmax, v);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = std::exp(z[i] - zmax);
        total += r[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = floor + span * r[i] / total;
    }
}

}  // namespace

namespace {

// Reassigns the multiset of proportions so that a larger unit loss never
// gets a smaller share. Since h is increasing, this never increases the
// objective (rearrangement inequality) and preserves feasibility.
std::vector<double> rearrange_by_loss(std::span<const double> unit_losses,
                                      std::vector<double> r) {
    const std::size_t n = r.size();
    std::vector<std::size_t> by_loss(n);
    for (std::size_t i = 0; i < n; ++i) by_loss[i] = i;
    std::stable_sort(by_loss.begin(), by_loss.end(), [&](std::size_t a, std::size_t b) {
        return unit_losses[a] > unit_losses[b];
    });
    std::vector<double> shares = r;
    std::sort(shares.begin(), shares.end(), std::greater<>());
    std::vector<double> out(n);
    for (std::size_t rank = 0; rank < n; ++rank) out[by_loss[rank]] = shares[rank];
    return out;
}

}  // namespace

AllocationResult optimize_allocation_units(std::span<const double> unit_losses,
                                           const OptConfig& cfg) {
    const std::size_t n = unit_losses.size();
    if (n < 2) throw DataError("allocation needs at least 2 vulnerabilities");
    cfg.validate(n);
    const double floor = cfg.min_proportion;
    const double span = 1.0 - floor * static_cast<double>(n);

    std::vector<double> z(n, 0.0), r(n), softmax(n), grad_z(n);

    auto eval = [&](std::span<const double> zz, std::span<double> rr) {
        to_proportions(zz, floor, rr);
        return allocation_objective(unit_losses, rr, cfg.curve);
    };

    double f = eval(z, r);
    AllocationResult result;

    auto descend = [&]() {
        double step = 1.0;
        while (result.iterations < cfg.max_iterations) {
            // softmax(z) recovered from r to avoid a second exponential pass.
            for (std::size_t i = 0; i < n; ++i) softmax[i] = (r[i] - floor) / span;

            const std::vector<double> grad_r =
                allocation_objective_gradient(unit_losses, r, cfg.curve);
            double inner = 0.0;
            for (std::size_t i = 0; i < n; ++i) inner += grad_r[i] * softmax[i];
            double grad_norm_sq = 0.0, grad_inf = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                grad_z[i] = span * softmax[i] * (grad_r[i] - inner);
                grad_norm_sq += grad_z[i] * grad_z[i];
                grad_inf = std::max(grad_inf, std::abs(grad_z[i]));
            }

            if (grad_inf < cfg.gradient_tolerance) {
                result.converged = true;
                return;
            }

            // Backtracking descent with a growing initial step.
            bool accepted = false;
            std::vector<double> z_try(n), r_try(n);
            while (step > 1e-14) {
                for (std::size_t i = 0; i < n; ++i) z_try[i] = z[i] - step * grad_z[i];
                const double f_try = eval(z_try, r_try);
                if (f_try <= f - 1e-4 * step * grad_norm_sq) {
                    z.swap(z_try);
                    r.swap(r_try);
                    f = f_try;
                    step = std::min(step * 2.0, 1e6);
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) return;  // no descent direction at machine precision
            result.iterations += 1;
        }
    };

    // Descent passes separated by loss-ordered rearrangements of the shares.
    for (int pass = 0; pass < 4; ++pass) {
        descend();
        std::vector<double> ordered = rearrange_by_loss(unit_losses, r);
        const double f_ordered = allocation_objective(unit_losses, ordered, cfg.curve);
        if (f_ordered >= f - 1e-15) break;
        r = std::move(ordered);
        f = f_ordered;
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = std::log((r[i] - floor) / span);
        }
        result.converged = false;
    }

    result.proportions.assign(r.begin(), r.end());
    result.objective_value = f;
    return result;
}

AllocationResult optimize_allocation(const std::vector<VulnerabilityState>& states,
                                     const LossVector& c, const OptConfig& cfg) {
    std::vector<double> unit_losses;
    unit_losses.reserve(states.size());
    for (const VulnerabilityState& s : states) {
        unit_losses.push_back(expected_loss(s, c));
    }
    return optimize_allocation_units(unit_losses, cfg);
}

}  // namespace vigil
