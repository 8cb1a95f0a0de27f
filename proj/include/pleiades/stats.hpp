#pragma once

#include <span>

namespace pleiades {

// Inverse standard normal CDF. Rational approximation with one Halley
// refinement; absolute error below 1e-12 on (0, 1). Returns -inf/+inf at 0/1.
double normal_quantile(double p);
double normal_cdf(double x);
double normal_pdf(double x);

double mean(std::span<const double> x);
// Sample variance (n - 1 denominator).
double variance(std::span<const double> x);
double stddev(std::span<const double> x);
// Pearson correlation; NaN when either column is constant.
double pearson(std::span<const double> x, std::span<const double> y);

// Adjusted Fisher-Pearson skewness G1 and sample excess kurtosis G2.
double skewness(std::span<const double> x);
double excess_kurtosis(std::span<const double> x);

double student_t_cdf(double t, double df);
double student_t_quantile(double p, double df);
// P(|T| >= |t|) for T ~ Student t with df degrees of freedom.
double student_t_two_sided(double t, double df);

}  // namespace pleiades
