#include "vigil/rng.hpp"

#include <cmath>
#include <numbers>

#include "vigil/errors.hpp"

namespace vigil {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag0, std::uint64_t tag1) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(seed) ^ tag0) ^ tag1);
}

double Rng::uniform() {
    // 53-bit mantissa, never returns 1.0.
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::uniform_int(std::uint64_t n) {
    if (n == 0) throw DataError("uniform_int: empty range");
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
        v = engine_();
    } while (v >= limit);
    return v % n;
}

double Rng::normal() {
    double u1;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::exponential(double mean) {
    double u;
    do {
        u = uniform();
    } while (u <= 0.0);
    return -mean * std::log(u);
}

double Rng::gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0)) throw DataError("gamma: parameters must be positive");
    if (shape < 1.0) {
        // Boost trick: Gamma(a) = Gamma(a+1) * U^{1/a}.
        double u;
        do {
            u = uniform();
        } while (u <= 0.0);
        return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return scale * d * v;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
            return scale * d * v;
        }
    }
}

double Rng::beta(double a, double b) {
    const double x = gamma(a, 1.0);
    const double y = gamma(b, 1.0);
    return x / (x + y);
}

std::vector<double> Rng::dirichlet(std::span<const double> alpha) {
    std::vector<double> out(alpha.size());
    double total = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        out[i] = gamma(alpha[i], 1.0);
        total += out[i];
    }
    for (double& v : out) v /= total;
    return out;
}

long Rng::poisson(double mean) {
    if (!(mean >= 0.0)) throw DataError("poisson: mean must be non-negative");
    if (mean == 0.0) return 0;
    // Exact split keeps the multiplicative method in its accurate range.
    if (mean > 30.0) {
        return poisson(mean * 0.5) + poisson(mean - mean * 0.5);
    }
    const double limit = std::exp(-mean);
    long k = 0;
    double prod = uniform();
    while (prod > limit) {
        ++k;
        prod *= uniform();
    }
    return k;
}

long Rng::binomial(long n, double p) {
    if (n < 0) throw DataError("binomial: negative count");
    if (p <= 0.0) return 0;
    if (p >= 1.0) return n;
    long k = 0;
    for (long i = 0; i < n; ++i) {
        if (uniform() < p) ++k;
    }
    return k;
}

std::size_t Rng::categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw DataError("categorical: weights sum to zero");
    double u = uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        u -= weights[i];
        if (u < 0.0) return i;
    }
    return weights.size() - 1;
}

std::vector<long> Rng::multinomial(long n, std::span<const double> probs) {
    std::vector<long> counts(probs.size(), 0);
    for (long i = 0; i < n; ++i) {
        counts[categorical(probs)] += 1;
    }
    return counts;
}

}  // namespace vigil
