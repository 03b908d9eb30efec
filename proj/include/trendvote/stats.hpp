#pragma once

#include <functional>

namespace trendvote::stats {

// Adaptive Gauss-Kronrod (7/15) quadrature of f over [lo, hi].
double integrate(const std::function<double(double)>& f, double lo, double hi, double abs_tol = 1e-13,
                 int max_depth = 60);

double log_beta(double a, double b);

// I_x(a, b), by quadrature of the beta integrand after substitutions that
// remove the endpoint singularities.
double regularized_incomplete_beta(double a, double b, double x);

double student_t_cdf(double t, double df);

// P(|T| >= |t|) for T ~ Student-t(df).
double student_t_two_sided_p(double t, double df);

}  // namespace trendvote::stats
