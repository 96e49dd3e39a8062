#include "tailgap/convexity.hpp"

#include <cmath>
#include <stdexcept>

#include "tailgap/errors.hpp"

namespace tailgap {

std::string to_string(ConvexityVerdict v) {
    switch (v) {
        case ConvexityVerdict::ConvexTail: return "convex-tail";
        case ConvexityVerdict::Indefinite: return "indefinite";
        case ConvexityVerdict::ConcaveTail: return "concave-tail";
    }
    return "?";
}

ConvexityReport convexity_at(const FamilySpec& spec, const ParamVector& theta,
                             double a, double tol) {
    const DerivativeBundle d = derivatives(spec, theta, a, 2);

    ConvexityReport r;
    r.a = a;
    r.theta = theta;
    r.dim = d.dim;
    r.hessian_of_F = d.hessian;

    if (d.dim == 1) {
        r.max_eigenvalue = d.hess1();
        r.min_eigenvalue = d.hess1();
    } else {
        // Symmetric 2x2 eigenvalues in closed form.
        const double h11 = d.hess(0, 0), h22 = d.hess(1, 1), h12 = d.hess(0, 1);
        const double mean = 0.5 * (h11 + h22);
        const double disc = std::sqrt(0.25 * (h11 - h22) * (h11 - h22) + h12 * h12);
        r.max_eigenvalue = mean + disc;
        r.min_eigenvalue = mean - disc;
    }

    double norm = 0.0;
    for (int i = 0; i < (d.dim == 1 ? 1 : 4); ++i)
        norm = std::max(norm, std::fabs(d.hessian[(size_t)i]));
    r.tol = tol >= 0.0 ? tol : 1e-12 * norm;

    if (r.max_eigenvalue < -r.tol)
        r.verdict = ConvexityVerdict::ConvexTail;
    else if (r.min_eigenvalue > r.tol)
        r.verdict = ConvexityVerdict::ConcaveTail;
    else
        r.verdict = ConvexityVerdict::Indefinite;
    return r;
}

double quadratic_form(const FamilySpec& spec, const ParamVector& theta,
                      double a, const ParamVector& v) {
    if (v.dim() != spec.param_dim())
        throw std::invalid_argument("quadratic_form: vector dimension mismatch");
    double norm2 = 0.0;
    for (int i = 0; i < v.dim(); ++i) norm2 += v[i] * v[i];
    if (!(norm2 > 0.0))
        throw std::invalid_argument("quadratic_form: zero vector rejected");

    const DerivativeBundle d = derivatives(spec, theta, a, 2);
    if (d.dim == 1) return v[0] * v[0] * d.hess1();
    double q = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) q += v[i] * d.hess(i, j) * v[j];
    return q;
}

std::optional<double> convexity_threshold(const FamilySpec& spec,
                                          const ParamVector& theta,
                                          double a_lo, double a_hi,
                                          int grid_size) {
    if (!(a_lo < a_hi))
        throw std::invalid_argument("convexity_threshold: requires a_lo < a_hi");
    if (grid_size < 2)
        throw std::invalid_argument("convexity_threshold: grid_size must be >= 2");
    if (a_lo < spec.support_lower())
        throw std::domain_error("convexity_threshold: range starts below the support");

    auto convex = [&](double a) {
        return convexity_at(spec, theta, a).verdict == ConvexityVerdict::ConvexTail;
    };

    // Smallest grid index whose whole suffix is convex.
    int first_good = -1;
    for (int i = grid_size - 1; i >= 0; --i) {
        const double a = a_lo + (a_hi - a_lo) * (double)i / (double)(grid_size - 1);
        if (convex(a)) {
            first_good = i;
        } else {
            break;
        }
    }
    if (first_good < 0) return std::nullopt;
    if (first_good == 0) return a_lo;  // convex from the range's lower edge

    double lo = a_lo + (a_hi - a_lo) * (double)(first_good - 1) / (double)(grid_size - 1);
    double hi = a_lo + (a_hi - a_lo) * (double)first_good / (double)(grid_size - 1);
    while (hi - lo > 1e-6 * std::max(std::fabs(hi), 1e-30)) {
        const double mid = 0.5 * (lo + hi);
        if (convex(mid)) hi = mid; else lo = mid;
    }
    return hi;
}

JensenCheck jensen_check(const PosteriorSpec& spec, double a) {
    JensenCheck jc;
    jc.e_phi = p_bayes_quadrature(spec, a);
    jc.phi_of_mle = p_frequentist(spec, a);
    const ParamVector mean = posterior_mean(spec);
    jc.phi_of_mean = tail(spec.family(), mean, a);

    if (spec.family().param_dim() == 1) {
        const double m2 = moments_quadrature(spec, 2).m2();
        const double hat = spec.theta_hat()[0];
        const double w = 6.0 * std::sqrt(std::max(0.0, m2));
        const Interval dom = spec.family().param_domain(0);
        const double eps = 1e-9 * std::max(1.0, std::fabs(hat));
        jc.support_lo = std::max(hat - w, dom.lo + eps);
        jc.support_hi = std::min(hat + w, dom.hi - (std::isfinite(dom.hi) ? eps : 0.0));
        bool all_convex = jc.support_lo < jc.support_hi;
        const int kPoints = 64;
        for (int i = 0; all_convex && i < kPoints; ++i) {
            const double t = jc.support_lo +
                             (jc.support_hi - jc.support_lo) * (double)i /
                                 (double)(kPoints - 1);
            all_convex = convexity_at(spec.family(), ParamVector(t), a).verdict ==
                         ConvexityVerdict::ConvexTail;
        }
        jc.convex_over_support = all_convex;
    } else {
        // The Normal (mu, sigma) Hessian of F has determinant
        // -phi(z)^2 / sigma^4 < 0, so it is indefinite everywhere and
        // the convexity premise never holds jointly.
        jc.convex_over_support = false;
        jc.support_lo = jc.support_hi = 0.0;
    }
    return jc;
}

}  // namespace tailgap
