#ifndef TAILGAP_CONVEXITY_HPP
#define TAILGAP_CONVEXITY_HPP

#include <optional>

#include "tailgap/estimators.hpp"

namespace tailgap {

enum class ConvexityVerdict { ConvexTail, Indefinite, ConcaveTail };

std::string to_string(ConvexityVerdict v);

// phi(theta) = 1 - F(a|theta) is convex at theta exactly when the
// Hessian of F there is negative definite.
struct ConvexityReport {
    double a = 0.0;
    ParamVector theta;
    int dim = 1;
    std::array<double, 4> hessian_of_F{0.0, 0.0, 0.0, 0.0};
    double max_eigenvalue = 0.0;
    double min_eigenvalue = 0.0;
    ConvexityVerdict verdict = ConvexityVerdict::Indefinite;
    double tol = 0.0;
};

// tol < 0 selects the default 1e-12 * ||H||.
ConvexityReport convexity_at(const FamilySpec& spec, const ParamVector& theta,
                             double a, double tol = -1.0);

// v^T H_theta(F) v. Rejects the zero vector.
double quadratic_form(const FamilySpec& spec, const ParamVector& theta,
                      double a, const ParamVector& v);

// Smallest a* in [a_lo, a_hi] with verdict ConvexTail for every tested
// a >= a*, bisection-refined to 1e-6 relative. nullopt when no suffix
// of the grid is convex.
std::optional<double> convexity_threshold(const FamilySpec& spec,
                                          const ParamVector& theta,
                                          double a_lo, double a_hi,
                                          int grid_size);

struct JensenCheck {
    double e_phi = 0.0;        // E[phi(theta)] under the posterior
    double phi_of_mean = 0.0;  // phi(E[theta])
    double phi_of_mle = 0.0;   // phi(theta_hat)
    bool convex_over_support = false;  // ConvexTail across theta_hat +- 6 sqrt(m2)
    double support_lo = 0.0;
    double support_hi = 0.0;
};

// All three quantities by quadrature. convex_over_support reports
// whether the convexity verdict holds across the posterior's effective
// support; only then does Jensen's inequality bind.
JensenCheck jensen_check(const PosteriorSpec& spec, double a);

}  // namespace tailgap

#endif
