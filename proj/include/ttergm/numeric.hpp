#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

namespace ttergm {

// Overflow-safe logistic function.
inline double logistic(double x) {
    if (x >= 0.0)
        return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

// log(1/m * sum exp(v_i)) with max subtraction.
inline double log_mean_exp(std::span<const double> v) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double x : v)
        mx = std::max(mx, x);
    if (!std::isfinite(mx))
        return mx;
    double s = 0.0;
    for (double x : v)
        s += std::exp(x - mx);
    return mx + std::log(s / static_cast<double>(v.size()));
}

// Regularized incomplete beta function I_x(a, b) via the Lentz continued
// fraction (Numerical Recipes style). Accurate to ~1e-12 for the t-test
// range used here.
double incomplete_beta(double a, double b, double x);

// Two-sided p-value of a Student-t statistic with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

} // namespace ttergm
