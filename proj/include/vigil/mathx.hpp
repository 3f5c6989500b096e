#pragma once

#include <cmath>

// Scalar special functions and numerically stable helpers used across the
// density, fitting and risk code. All functions are pure.

namespace vigil {

// psi(x), the logarithmic derivative of the gamma function. x > 0.
double digamma(double x);

// psi'(x). x > 0.
double trigamma(double x);

// Inverse of digamma via Newton iteration (accurate to ~1e-12).
double inv_digamma(double y);

// log of the beta function B(a, b).
inline double log_beta_fn(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// log of the binomial coefficient C(n, k), 0 <= k <= n.
inline double log_choose(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Logistic function, stable for large |x|.
inline double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// log(sigmoid(x)) without overflow.
inline double log_sigmoid(double x) {
    if (x >= 0.0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

inline double sqr(double x) { return x * x; }

}  // namespace vigil
