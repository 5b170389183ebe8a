#pragma once

namespace procbench {

double normal_cdf(double z);
// Upper tail 1 - cdf(z), accurate for large z.
double normal_sf(double z);
// Inverse of normal_cdf for p in (0, 1).
double normal_quantile(double p);

// Regularised incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Survival function of the chi-square distribution: Q(df/2, x/2). Throws InputError for x < 0
// or df <= 0.
double chi_square_sf(double x, int df);

}  // namespace procbench
