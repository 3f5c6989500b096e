#include "vigil/mathx.hpp"

#include <limits>

namespace vigil {

double digamma(double x) {
    if (!(x > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    double result = 0.0;
    // Shift up until the asymptotic expansion is accurate.
    while (x < 6.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // ln x - 1/(2x) - sum of Bernoulli terms.
    result += std::log(x) - 0.5 * inv -
              inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 / 240.0)));
    return result;
}

double trigamma(double x) {
    if (!(x > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    double result = 0.0;
    while (x < 6.0) {
        result += 1.0 / (x * x);
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    result += inv * (1.0 + 0.5 * inv +
                     inv2 * (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 * (1.0 / 42.0 - inv2 / 30.0))));
    return result;
}

double inv_digamma(double y) {
    // Initialization from Minka, "Estimating a Dirichlet distribution".
    double x = (y >= -2.22) ? std::exp(y) + 0.5 : -1.0 / (y + 0.57721566490153286);
    for (int i = 0; i < 8; ++i) {
        x -= (digamma(x) - y) / trigamma(x);
        if (!(x > 0.0)) x = 1e-12;
    }
    return x;
}

}  // namespace vigil
