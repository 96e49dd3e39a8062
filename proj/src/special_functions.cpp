#include "tailgap/special_functions.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "tailgap/errors.hpp"

namespace tailgap::sf {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Internal accumulation runs in long double: the Pareto posterior
// normalizer differences two near-equal gamma values.
using wide = long double;

[[noreturn]] void domain_fail(const char* fn, const char* msg, double v) {
    std::ostringstream os;
    os << fn << ": " << msg << " (got " << v << ")";
    throw std::domain_error(os.str());
}

void check_gamma_args(const char* fn, double s, double x) {
    if (!(s > 0.0)) domain_fail(fn, "shape s must be > 0", s);
    if (!(x >= 0.0)) domain_fail(fn, "argument x must be >= 0", x);
}

// Series for the regularized lower gamma: returns ln of the series sum,
// i.e. ln( sum_k x^k / ((s+1)...(s+k)) / s ). Converges for x < s + 1.
wide log_lower_series(double s, double x, const AccuracyBudget& budget) {
    wide sum = 1.0L / s;
    wide term = sum;
    wide ap = s;
    for (int i = 0; i < budget.max_iterations; ++i) {
        ap += 1.0L;
        term *= x / ap;
        sum += term;
        if (std::fabs((double)(term / sum)) < budget.rel_tol) {
            return std::log(sum);
        }
    }
    throw numeric_error("reg_lower_gamma: series did not converge");
}

// Continued fraction for the regularized upper gamma (modified Lentz).
// Returns ln(CF) where Q(s,x) = exp(s ln x - x - lgamma(s)) * CF.
// Converges for x >= s + 1.
wide log_upper_cf(double s, double x, const AccuracyBudget& budget) {
    const wide tiny = 1e-300L;
    wide b = x + 1.0L - s;
    wide c = 1.0L / tiny;
    wide d = 1.0L / b;
    wide h = d;
    for (int i = 1; i <= budget.max_iterations; ++i) {
        wide an = -(wide)i * ((wide)i - s);
        b += 2.0L;
        d = an * d + b;
        if (std::fabs((double)d) < (double)tiny) d = tiny;
        c = b + an / c;
        if (std::fabs((double)c) < (double)tiny) c = tiny;
        d = 1.0L / d;
        wide del = d * c;
        h *= del;
        if (std::fabs((double)(del - 1.0L)) < budget.rel_tol) {
            return std::log(h);
        }
    }
    throw numeric_error("reg_upper_gamma: continued fraction did not converge");
}

// ln of the prefactor x^s e^{-x} / Gamma(s).
wide log_prefactor(double s, double x) {
    return (wide)s * std::log((wide)x) - (wide)x - (wide)std::lgamma(s);
}

}  // namespace

AccuracyBudget::AccuracyBudget(double rel_tol_, int max_iterations_)
    : rel_tol(rel_tol_), max_iterations(max_iterations_) {
    if (!(rel_tol > 0.0))
        throw std::invalid_argument("AccuracyBudget: rel_tol must be > 0");
    if (max_iterations < 1)
        throw std::invalid_argument("AccuracyBudget: max_iterations must be >= 1");
}

double erf(double x) { return std::erf(x); }

double erfc(double x) { return std::erfc(x); }

double log_gamma(double s) {
    if (!(s > 0.0)) domain_fail("log_gamma", "s must be > 0", s);
    return std::lgamma(s);
}

double reg_lower_gamma(double s, double x, const AccuracyBudget& budget) {
    check_gamma_args("reg_lower_gamma", s, x);
    if (x == 0.0) return 0.0;
    if (x < s + 1.0) {
        wide lp = log_prefactor(s, x) + log_lower_series(s, x, budget);
        return (double)std::exp(lp);
    }
    return 1.0 - reg_upper_gamma(s, x, budget);
}

double reg_upper_gamma(double s, double x, const AccuracyBudget& budget) {
    check_gamma_args("reg_upper_gamma", s, x);
    if (x == 0.0) return 1.0;
    if (x >= s + 1.0) {
        wide lq = log_prefactor(s, x) + log_upper_cf(s, x, budget);
        return (double)std::exp(lq);
    }
    return 1.0 - reg_lower_gamma(s, x, budget);
}

double log_reg_lower_gamma(double s, double x, const AccuracyBudget& budget) {
    check_gamma_args("log_reg_lower_gamma", s, x);
    if (x == 0.0) return -std::numeric_limits<double>::infinity();
    if (x < s + 1.0) {
        return (double)(log_prefactor(s, x) + log_lower_series(s, x, budget));
    }
    // P is bounded away from 0 here; go through Q.
    double q = reg_upper_gamma(s, x, budget);
    return std::log1p(-q);
}

double log_reg_upper_gamma(double s, double x, const AccuracyBudget& budget) {
    check_gamma_args("log_reg_upper_gamma", s, x);
    if (x == 0.0) return 0.0;
    if (x >= s + 1.0) {
        return (double)(log_prefactor(s, x) + log_upper_cf(s, x, budget));
    }
    double p = reg_lower_gamma(s, x, budget);
    return std::log1p(-p);
}

double upper_incomplete_gamma(double s, double x, const AccuracyBudget& budget) {
    check_gamma_args("upper_incomplete_gamma", s, x);
    if (x == 0.0) return std::exp(std::lgamma(s));
    // Gamma(s,x) = Q(s,x) * Gamma(s), assembled in log space.
    double lq = log_reg_upper_gamma(s, x, budget);
    return std::exp(lq + std::lgamma(s));
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0))
        domain_fail("inverse_normal_cdf", "p must lie in (0,1)", p);

    // Acklam's rational approximation, then one Newton step against the
    // erfc-based CDF.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;

    double x;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    double err = normal_cdf(x) - p;
    double pdf = std::exp(-0.5 * x * x) / 2.5066282746310002;
    if (pdf > 0.0) x -= err / pdf;
    return x;
}

double normal_log_tail(double z) {
    if (z < 36.0) {
        return std::log(0.5 * std::erfc(z / kSqrt2));
    }
    // Asymptotic: P(Z>z) = phi(z)/z * (1 - 1/z^2 + 3/z^4 - 15/z^6 + 105/z^8 - ...)
    double inv2 = 1.0 / (z * z);
    double series = 1.0 + inv2 * (-1.0 + inv2 * (3.0 + inv2 * (-15.0 + inv2 * 105.0)));
    return -0.5 * z * z - 0.5 * std::log(2.0 * 3.141592653589793) - std::log(z) +
           std::log(series);
}

}  // namespace tailgap::sf
