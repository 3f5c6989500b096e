#include "vigil/mcmc.hpp"

#include <cmath>
#include <limits>

#include "vigil/errors.hpp"
#include "vigil/rng.hpp"

namespace vigil {

void McmcConfig::validate() const {
    if (!(target_acceptance > 0.0) || !(target_acceptance < 1.0)) {
        throw DataError("target_acceptance must lie in (0, 1)");
    }
    if (n_kept < 100) throw DataError("n_kept must be at least 100");
    if (n_warmup < 1 || n_leapfrog < 1 || max_step_attempts < 1) {
        throw DataError("MCMC iteration counts must be positive");
    }
}

namespace {

struct Phase {
    const CountsPosterior& target;
    Rng& rng;
    int n_leapfrog;

    std::vector<double> x, grad;
    double lp;

    Phase(const CountsPosterior& t, Rng& r, int leapfrog, std::vector<double> x0)
        : target(t), rng(r), n_leapfrog(leapfrog), x(std::move(x0)), grad(t.dim()) {
        lp = target.log_density_gradient(x, grad);
    }

    // One HMC transition; returns the Metropolis acceptance probability.
    // The trajectory length is jittered over [n/2, n] leapfrog steps to
    // break U-turn resonance.
    double step(double eps) {
        const std::size_t n = x.size();
        std::vector<double> p(n), x_new(x), g_new(grad);
        double kinetic = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = rng.normal();
            kinetic += 0.5 * p[i] * p[i];
        }
        const double h0 = -lp + kinetic;

        const int min_steps = std::max(1, n_leapfrog / 2);
        const int steps =
            min_steps +
            static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n_leapfrog - min_steps + 1)));
        double lp_new = lp;
        for (int l = 0; l < steps; ++l) {
            for (std::size_t i = 0; i < n; ++i) p[i] += 0.5 * eps * g_new[i];
            for (std::size_t i = 0; i < n; ++i) x_new[i] += eps * p[i];
            lp_new = target.log_density_gradient(x_new, g_new);
            if (!std::isfinite(lp_new)) break;
            for (std::size_t i = 0; i < n; ++i) p[i] += 0.5 * eps * g_new[i];
        }

        double h1 = std::numeric_limits<double>::infinity();
        if (std::isfinite(lp_new)) {
            double kinetic_new = 0.0;
            for (std::size_t i = 0; i < n; ++i) kinetic_new += 0.5 * p[i] * p[i];
            h1 = -lp_new + kinetic_new;
        }

        const double accept_prob = std::isfinite(h1) ? std::min(1.0, std::exp(h0 - h1)) : 0.0;
        if (rng.uniform() < accept_prob) {
            x.swap(x_new);
            grad.swap(g_new);
            lp = lp_new;
        }
        return accept_prob;
    }
};

// Doubling/halving search for a step size with acceptance near 0.5.
double initial_step_size(Phase& phase, int max_attempts) {
    double eps = 0.1;
    std::vector<double> x0 = phase.x;
    std::vector<double> g0 = phase.grad;
    const double lp0 = phase.lp;

    auto probe = [&](double e) {
        const double a = phase.step(e);
        phase.x = x0;
        phase.grad = g0;
        phase.lp = lp0;
        return a;
    };

    double a = probe(eps);
    const bool increase = a > 0.5;
    for (int i = 0; i < max_attempts; ++i) {
        if (increase) {
            if (a <= 0.5) break;
            eps *= 2.0;
        } else {
            if (a >= 0.5) break;
            eps *= 0.5;
        }
        a = probe(eps);
    }
    return eps;
}

}  // namespace

SampleSet sample_posterior(const GlobalState& global,
                           const std::vector<DailyRecord>& records,
                           const McmcConfig& cfg) {
    cfg.validate();
    const CountsPosterior target(global, records);

    Rng rng(mix_seed(cfg.seed, 0x6d636d63ULL));
    Phase phase(target, rng, cfg.n_leapfrog, target.initial_point());
    if (!std::isfinite(phase.lp)) {
        throw NumericalError("posterior is non-finite at the initial point");
    }

    double eps = initial_step_size(phase, cfg.max_step_attempts);

    // Dual averaging (Nesterov) on log step size.
    const double mu = std::log(10.0 * eps);
    const double gamma = 0.05, t0 = 10.0, da_kappa = 0.75;
    double h_bar = 0.0, log_eps_bar = std::log(eps);

    for (int m = 1; m <= cfg.n_warmup; ++m) {
        const double a = phase.step(eps);
        const double frac = 1.0 / (m + t0);
        h_bar = (1.0 - frac) * h_bar + frac * (cfg.target_acceptance - a);
        const double log_eps = mu - std::sqrt(static_cast<double>(m)) / gamma * h_bar;
        const double w = std::pow(static_cast<double>(m), -da_kappa);
        log_eps_bar = w * log_eps + (1.0 - w) * log_eps_bar;
        eps = std::exp(log_eps);
    }
    eps = std::exp(log_eps_bar);

    SampleSet out;
    out.obs_types = target.obs_types();
    out.vuln_ids = target.vuln_ids();
    out.n_warmup = cfg.n_warmup;
    out.n_kept = cfg.n_kept;
    out.seed = cfg.seed;
    out.step_size = eps;
    out.draws.reserve(cfg.n_kept);

    double accept_total = 0.0;
    for (int m = 0; m < cfg.n_kept; ++m) {
        accept_total += phase.step(eps);
        out.draws.push_back(target.to_constrained(phase.x));
    }
    out.acceptance_rate = accept_total / cfg.n_kept;

    if (out.acceptance_rate < 0.1 || out.acceptance_rate > 0.99) {
        throw NonConvergenceError("sampler acceptance rate " +
                                  std::to_string(out.acceptance_rate) +
                                  " outside [0.1, 0.99]");
    }
    return out;
}

}  // namespace vigil
