#pragma once

#include <cstddef>

namespace gtetrad {

// Standard normal CDF, accurate in both tails (erfc based).
double normal_cdf(double x);

// Standard normal quantile function (inverse CDF), Wichura's AS241 PPND16
// rational approximations; relative accuracy ~1e-16 over (0, 1). Returns
// +/-infinity at the endpoints.
double normal_quantile(double p);

// Upper-tail probability of a chi-square distribution with two degrees of
// freedom: P(X >= t) = exp(-t/2).
double chi2_survival_df2(double t);

// p-value of the generalized tetrad statistic: 2{1 - Phi(sqrt(t))},
// computed as erfc(sqrt(t/2)) for tail accuracy.
double gt_p_value(double t_n);

// Decision threshold z^2_{1-alpha/2} for the generalized tetrad test.
double gt_threshold(double alpha);

double mean(const double* x, std::size_t n);
double variance(const double* x, std::size_t n);  // denominator n

}  // namespace gtetrad
