#include "vigil/fit.hpp"

#include <algorithm>
#include <cmath>

#include "vigil/errors.hpp"
#include "vigil/mathx.hpp"

namespace vigil {

namespace {

double mean_of(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double variance_of(std::span<const double> xs) {
    const double m = mean_of(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size());
}

void require_variance(std::span<const double> xs, const std::string& name) {
    if (xs.empty()) throw DegenerateSampleError("no samples for " + name);
    if (variance_of(xs) < kDegenerateVariance) {
        throw DegenerateSampleError("sample variance below 1e-12 for " + name);
    }
}

constexpr double kInteriorEps = 1e-12;

}  // namespace

GammaKT fit_gamma(std::span<const double> samples, const std::string& name) {
    if (samples.empty()) throw FitError(name, "no samples");
    double mean = 0.0, mean_log = 0.0;
    for (double x : samples) {
        if (!(x > 0.0)) throw FitError(name, "non-positive sample");
        mean += x;
        mean_log += std::log(x);
    }
    const double n = static_cast<double>(samples.size());
    mean /= n;
    mean_log /= n;

    const double s = std::log(mean) - mean_log;
    if (!(s > 0.0)) throw FitError(name, "degenerate log-moment gap");

    // Minka's closed-form start, then Newton on log k - psi(k) = s.
    double k = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
    bool converged = false;
    for (int i = 0; i < kFitMaxIterations; ++i) {
        const double f = std::log(k) - digamma(k) - s;
        const double fp = 1.0 / k - trigamma(k);
        double step = f / fp;
        while (k - step <= 0.0) step *= 0.5;
        k -= step;
        if (std::abs(step) < kFitTolerance * std::max(1.0, k)) {
            converged = true;
            break;
        }
    }
    if (!converged) throw FitError(name, "Newton iteration did not converge");
    return GammaKT{k, mean / k};
}

BetaAB fit_beta(std::span<const double> samples, const std::string& name) {
    if (samples.empty()) throw FitError(name, "no samples");
    double mean = 0.0, mean_log = 0.0, mean_log1m = 0.0, mean_sq = 0.0;
    for (double raw : samples) {
        const double x = std::clamp(raw, kInteriorEps, 1.0 - kInteriorEps);
        mean += x;
        mean_sq += x * x;
        mean_log += std::log(x);
        mean_log1m += std::log1p(-x);
    }
    const double n = static_cast<double>(samples.size());
    mean /= n;
    mean_sq /= n;
    mean_log /= n;
    mean_log1m /= n;

    const double var = std::max(mean_sq - mean * mean, kDegenerateVariance);
    double common = mean * (1.0 - mean) / var - 1.0;
    if (!(common > 0.0)) common = 1.0;
    double a = std::max(mean * common, kInteriorEps);
    double b = std::max((1.0 - mean) * common, kInteriorEps);

    bool converged = false;
    for (int i = 0; i < kFitMaxIterations; ++i) {
        const double psi_ab = digamma(a + b);
        const double g1 = mean_log - digamma(a) + psi_ab;
        const double g2 = mean_log1m - digamma(b) + psi_ab;

        const double tri_ab = trigamma(a + b);
        const double h11 = -trigamma(a) + tri_ab;
        const double h22 = -trigamma(b) + tri_ab;
        const double det = h11 * h22 - tri_ab * tri_ab;
        if (!(std::abs(det) > 0.0)) throw FitError(name, "singular Hessian");

        double da = -(h22 * g1 - tri_ab * g2) / det;
        double db = -(h11 * g2 - tri_ab * g1) / det;
        double scale = 1.0;
        while (a + scale * da <= 0.0 || b + scale * db <= 0.0) scale *= 0.5;
        a += scale * da;
        b += scale * db;

        if (std::abs(g1) < kFitTolerance && std::abs(g2) < kFitTolerance) {
            converged = true;
            break;
        }
    }
    if (!converged) throw FitError(name, "Newton iteration did not converge");
    return BetaAB{a, b};
}

std::vector<double> fit_dirichlet(const std::vector<std::vector<double>>& samples,
                                  const std::string& name) {
    if (samples.empty()) throw FitError(name, "no samples");
    const std::size_t dim = samples.front().size();
    if (dim < 2) throw FitError(name, "dimension must be at least 2");

    std::vector<double> mean_log(dim, 0.0);
    for (const std::vector<double>& w : samples) {
        if (w.size() != dim) throw FitError(name, "ragged sample matrix");
        for (std::size_t j = 0; j < dim; ++j) {
            mean_log[j] += std::log(std::clamp(w[j], kInteriorEps, 1.0));
        }
    }
    for (double& v : mean_log) v /= static_cast<double>(samples.size());

    // Minka fixed point: xi_j <- psi^-1(psi(sum xi) + mean log w_j).
    std::vector<double> xi(dim, 1.0);
    for (int i = 0; i < kFitMaxIterations; ++i) {
        double total = 0.0;
        for (double v : xi) total += v;
        const double psi_total = digamma(total);
        double delta = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            const double next = inv_digamma(psi_total + mean_log[j]);
            delta = std::max(delta, std::abs(next - xi[j]));
            xi[j] = next;
        }
        if (delta < kFitTolerance) return xi;
    }
    throw FitError(name, "fixed-point iteration did not converge");
}

GlobalState refit_hyperparameters(const SampleSet& samples, const GlobalState& old) {
    if (samples.draws.empty()) throw DegenerateSampleError("empty sample set");
    if (samples.obs_types != old.obs_types) {
        throw DimensionError("sample observation types do not match state");
    }
    const std::size_t n_types = old.obs_types.size();
    const std::size_t n_draws = samples.draws.size();

    GlobalState out = old;

    // Weight block. A single observation type has no free weight dimension,
    // so xi passes through untouched.
    if (n_types >= 2) {
        std::vector<std::vector<double>> w_draws;
        w_draws.reserve(n_draws);
        for (const LatentDraw& d : samples.draws) w_draws.push_back(d.w);
        for (std::size_t j = 0; j < n_types; ++j) {
            std::vector<double> col(n_draws);
            for (std::size_t i = 0; i < n_draws; ++i) col[i] = w_draws[i][j];
            require_variance(col, "w[" + old.obs_types[j] + "]");
        }
        out.xi = fit_dirichlet(w_draws, "xi");
    }

    std::size_t v = 0;
    for (const std::string& id : samples.vuln_ids) {
        auto it = out.vulns.find(id);
        if (it == out.vulns.end()) {
            throw DimensionError("sampled vulnerability " + id + " missing from state");
        }
        VulnerabilityState& vs = it->second;

        std::vector<double> beta_col(n_draws), product_col(n_draws);
        for (std::size_t i = 0; i < n_draws; ++i) {
            const LatentDraw& d = samples.draws[i];
            beta_col[i] = d.beta[v];
            double mix = 0.0;
            for (std::size_t t = 0; t < n_types; ++t) mix += d.w[t] * d.kappa[v][t];
            product_col[i] = mix * d.beta[v];
        }
        require_variance(beta_col, "beta[" + id + "]");
        require_variance(product_col, "rate_product[" + id + "]");
        vs.beta_prior = fit_gamma(beta_col, "beta[" + id + "]");
        vs.rate_product = fit_gamma(product_col, "rate_product[" + id + "]");

        for (std::size_t t = 0; t < n_types; ++t) {
            std::vector<double> kappa_col(n_draws);
            for (std::size_t i = 0; i < n_draws; ++i) {
                kappa_col[i] = samples.draws[i].kappa[v][t];
            }
            const std::string label = "kappa[" + id + "," + old.obs_types[t] + "]";
            require_variance(kappa_col, label);
            vs.beta_ab[t] = fit_beta(kappa_col, label);
        }
        ++v;
    }
    return out;
}

}  // namespace vigil
