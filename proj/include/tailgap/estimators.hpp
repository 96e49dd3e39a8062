#ifndef TAILGAP_ESTIMATORS_HPP
#define TAILGAP_ESTIMATORS_HPP

#include <string>
#include <vector>

#include "tailgap/posterior.hpp"

namespace tailgap {

enum class BayesMethod { ClosedForm, Quadrature };

// One threshold's worth of estimator comparison. d_exact is always the
// literal difference p_bayes - p_freq; the log fields carry the sign
// information when both tails underflow.
struct TailComparison {
    double a = 0.0;
    double p_bayes = 0.0;
    double p_freq = 0.0;
    double log_p_bayes = 0.0;
    double log_p_freq = 0.0;
    double d_exact = 0.0;
    double d_taylor = std::numeric_limits<double>::quiet_NaN();
    double term1 = std::numeric_limits<double>::quiet_NaN();
    double term2 = std::numeric_limits<double>::quiet_NaN();
    double term3 = std::numeric_limits<double>::quiet_NaN();
    BayesMethod method_bayes = BayesMethod::ClosedForm;
    bool has_taylor = false;
    bool term3_is_fd = false;
};

// The Lagrange point in the cubic remainder is unknowable; term3 is
// evaluated at theta_hat and this reports a conservative bound from a
// scan of the third derivative over theta_hat +- 4 sqrt(m2).
struct TaylorDiagnostics {
    ParamVector remainder_eval_point;
    double remainder_magnitude_bound = 0.0;
};

// Plug-in estimator 1 - F(a | theta_hat).
double p_frequentist(const PosteriorSpec& spec, double a);
double log_p_frequentist(const PosteriorSpec& spec, double a);

// Posterior expectation of the tail. Closed forms for Exponential and
// Pareto with their Jeffreys priors, adaptive quadrature otherwise.
double p_bayes(const PosteriorSpec& spec, double a);
double log_p_bayes(const PosteriorSpec& spec, double a);

// Forced quadrature path, the oracle for the closed forms.
double p_bayes_quadrature(const PosteriorSpec& spec, double a);

BayesMethod bayes_method_for(const PosteriorSpec& spec);

TailComparison difference_exact(const PosteriorSpec& spec, double a);

TailComparison difference_taylor(const PosteriorSpec& spec, double a,
                                 TaylorDiagnostics* diagnostics = nullptr);

// Taylor terms assembled from explicitly supplied moments (point-mass
// posteriors, sensitivity studies). One-parameter families.
TailComparison taylor_from_moments(const PosteriorSpec& spec, double a,
                                   const PosteriorMoments& moments);

struct GapPoint {
    TailComparison cmp;
    bool ok = false;
    std::string error;
};

// One TailComparison per grid point (grid sorted ascending). Failures
// are recorded per point; monotonicity of both estimators in a is
// checked across the successful points.
std::vector<GapPoint> gap_curve(const PosteriorSpec& spec,
                                const std::vector<double>& a_grid);

}  // namespace tailgap

#endif
