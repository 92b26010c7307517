#include "rankdiv/special.hpp"

#include <cmath>
#include <limits>

#include "rankdiv/errors.hpp"

namespace rankdiv {

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double normal_cdf(double x, double mu, double sigma) {
    return normal_cdf((x - mu) / sigma);
}

namespace {

constexpr int kMaxIterations = 500;
constexpr double kEpsilon = 1e-15;

// Series representation: P(a,x) = x^a e^-x / Gamma(a+1) * sum x^n / rising(a,n).
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int n = 0; n < kMaxIterations; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEpsilon) {
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
        }
    }
    throw FitError("incomplete gamma series did not converge", {a, x}, sum,
                   kMaxIterations);
}

// Modified Lentz continued fraction for Q(a,x), stable for x >= a + 1.
double gamma_q_continued_fraction(double a, double x) {
    const double tiny = std::numeric_limits<double>::min() / kEpsilon;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEpsilon) {
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
        }
    }
    throw FitError("incomplete gamma continued fraction did not converge",
                   {a, x}, h, kMaxIterations);
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (a <= 0.0) throw DomainError("regularized_gamma_p: a must be positive");
    if (x < 0.0) throw DomainError("regularized_gamma_p: x must be non-negative");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
    if (a <= 0.0) throw DomainError("regularized_gamma_q: a must be positive");
    if (x < 0.0) throw DomainError("regularized_gamma_q: x must be non-negative");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_continued_fraction(a, x);
}

double chi_square_survival(double chi2, std::size_t dof) {
    if (dof == 0) throw DomainError("chi_square_survival: dof must be >= 1");
    if (chi2 < 0.0) throw DomainError("chi_square_survival: chi2 must be >= 0");
    return regularized_gamma_q(0.5 * static_cast<double>(dof), 0.5 * chi2);
}

}  // namespace rankdiv
