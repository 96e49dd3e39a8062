#ifndef TAILGAP_SPECIAL_FUNCTIONS_HPP
#define TAILGAP_SPECIAL_FUNCTIONS_HPP

#include <cstddef>

namespace tailgap::sf {

// Accuracy knobs for the iterative kernels below.
struct AccuracyBudget {
    double rel_tol = 1e-12;
    int max_iterations = 500;

    AccuracyBudget() = default;
    AccuracyBudget(double rel_tol_, int max_iterations_);
};

// Error function. Odd, monotone, |erf(x)| <= 1.
double erf(double x);

// Complement, accurate in the far tail.
double erfc(double x);

// ln Gamma(s) for s > 0. Throws std::domain_error otherwise.
double log_gamma(double s);

// Upper incomplete gamma Gamma(s, x) = int_x^inf t^(s-1) e^(-t) dt,
// s > 0, x >= 0. Unregularized; overflows to +inf for very large s,
// use the regularized/log forms for ratios.
double upper_incomplete_gamma(double s, double x,
                              const AccuracyBudget& budget = {});

// Regularized forms: P(s,x) = gammainc_lower(s,x) / Gamma(s),
// Q(s,x) = 1 - P(s,x). Series for x < s + 1, continued fraction
// otherwise.
double reg_lower_gamma(double s, double x, const AccuracyBudget& budget = {});
double reg_upper_gamma(double s, double x, const AccuracyBudget& budget = {});

// log(P(s,x)) and log(Q(s,x)), safe when the regularized value
// underflows double precision.
double log_reg_lower_gamma(double s, double x,
                           const AccuracyBudget& budget = {});
double log_reg_upper_gamma(double s, double x,
                           const AccuracyBudget& budget = {});

// Standard normal CDF and its inverse.
double normal_cdf(double z);
double inverse_normal_cdf(double p);

// log of the standard normal upper tail P(Z > z); asymptotic series
// beyond the range where erfc underflows.
double normal_log_tail(double z);

}  // namespace tailgap::sf

#endif
