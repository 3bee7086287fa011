#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tvar {

/// Regularized lower incomplete gamma P(a, x) by its power series.
/// Converges quickly for x < a + 1.
inline double regularized_gamma_p_series(double a, double x) {
    if (x <= 0.0) return 0.0;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 1000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

/// Regularized upper incomplete gamma Q(a, x) by Lentz continued fraction.
/// Converges quickly for x >= a + 1.
inline double regularized_gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double regularized_gamma_p(double a, double x) {
    if (a <= 0.0) throw std::invalid_argument("regularized_gamma_p: need a > 0");
    if (x < 0.0) throw std::invalid_argument("regularized_gamma_p: need x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return regularized_gamma_p_series(a, x);
    return 1.0 - regularized_gamma_q_cf(a, x);
}

inline double regularized_gamma_q(double a, double x) {
    if (a <= 0.0) throw std::invalid_argument("regularized_gamma_q: need a > 0");
    if (x < 0.0) throw std::invalid_argument("regularized_gamma_q: need x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - regularized_gamma_p_series(a, x);
    return regularized_gamma_q_cf(a, x);
}

/// P(chi^2_dof > q), the upper tail of the chi-squared distribution.
inline double chi_squared_tail(double q, double dof) {
    if (dof <= 0.0) throw std::invalid_argument("chi_squared_tail: need dof > 0");
    if (q <= 0.0) return 1.0;
    return regularized_gamma_q(0.5 * dof, 0.5 * q);
}

/// Standard normal CDF via the complementary error function.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Two-sided standard normal tail probability 2*(1 - Phi(|z|)).
inline double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

}  // namespace tvar
