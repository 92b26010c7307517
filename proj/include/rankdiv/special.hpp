#pragma once

#include <cstddef>

namespace rankdiv {

/// Standard normal CDF, evaluated through erfc so the tails keep full
/// relative precision (no series truncation, no table lookup).
double normal_cdf(double z);

/// Cumulative Gaussian in x with mean mu and width sigma.
double normal_cdf(double x, double mu, double sigma);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
/// Series expansion for x < a + 1, Lentz continued fraction otherwise;
/// relative error <= 1e-12 over the usable double range.
double regularized_gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double regularized_gamma_q(double a, double x);

/// Survival function of the chi-square distribution with dof degrees of
/// freedom: probability of exceeding the given statistic.
double chi_square_survival(double chi2, std::size_t dof);

}  // namespace rankdiv
