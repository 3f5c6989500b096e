#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace vigil {

// splitmix64 mix step; used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag0, std::uint64_t tag1 = 0);

// Deterministic random source. All samplers are implemented in-house so that
// traces are reproducible across standard libraries; std::*_distribution is
// deliberately not used.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1).
    double uniform();
    // Uniform on [0, n).
    std::uint64_t uniform_int(std::uint64_t n);
    bool bernoulli(double p) { return uniform() < p; }

    double normal();  // standard normal, Box-Muller
    double exponential(double mean);

    // Gamma with shape/scale parameterization (Marsaglia-Tsang).
    double gamma(double shape, double scale);
    double beta(double a, double b);
    std::vector<double> dirichlet(std::span<const double> alpha);

    long poisson(double mean);
    long binomial(long n, double p);
    // Index draw from an unnormalized weight vector.
    std::size_t categorical(std::span<const double> weights);
    std::vector<long> multinomial(long n, std::span<const double> probs);

    std::mt19937_64& engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
};

}  // namespace vigil
