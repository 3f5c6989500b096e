#pragma once

#include <span>

namespace vigil {

double mean(std::span<const double> xs);
double sample_sd(std::span<const double> xs);  // n - 1 denominator

// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

// P(T <= t) for Student's t with nu degrees of freedom.
double student_t_cdf(double t, double nu);

// One-sided paired test of mean(a - b) < 0. Returns the p-value; 1.0 when
// the difference has no variance and is non-negative, 0.0 when it is
// strictly negative with no variance.
double paired_t_pvalue_less(std::span<const double> a, std::span<const double> b);

struct MeanBand {
    double mean = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

// Normal-approximation 95% confidence band: mean +/- 1.96 * SE.
MeanBand mean_band(std::span<const double> xs);

}  // namespace vigil
