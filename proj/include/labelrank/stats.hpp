#pragma once

#include <cstddef>
#include <span>

namespace labelrank {

// Regularized incomplete beta I_x(a, b), continued fraction evaluated by the
// Lentz iteration to absolute tolerance 1e-12.
double reg_inc_beta(double a, double b, double x);

// CDF of Student's t with df degrees of freedom.
double student_t_cdf(double t, double df);

// Product-moment correlation, clamped into [-1, 1]. Needs n >= 3 and both
// series non-constant.
double pearson_r(std::span<const double> x, std::span<const double> y);

// Two-sided significance of a correlation r over n samples:
// t = r·sqrt((n-2)/(1-r^2)), p = 2·(1 - CDF_t(|t|; n-2)). |r| = 1 gives 0.
double t_test_two_sided(double r, std::size_t n);

}  // namespace labelrank
