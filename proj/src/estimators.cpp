#include "tailgap/estimators.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "tailgap/errors.hpp"
#include "tailgap/quadrature.hpp"
#include "tailgap/special_functions.hpp"

namespace tailgap {

namespace {

double exponential_log_pb(const PosteriorSpec& spec, double a) {
    if (a <= 0.0) return 0.0;  // tail == 1 on the whole support
    const double S = spec.sample().sum();
    const double n = (double)spec.sample().size();
    return -n * std::log1p(a / S);
}

double pareto_log_pb(const PosteriorSpec& spec, double a) {
    if (a <= 1.0) return 0.0;
    const double n = (double)spec.sample().size();
    const double L = spec.sample().sum_log();
    const double M = L + std::log(a);
    return n * (std::log(L) - std::log(M)) + sf::log_reg_lower_gamma(n, M) -
           sf::log_reg_lower_gamma(n, L);
}

}  // namespace

double p_frequentist(const PosteriorSpec& spec, double a) {
    return tail(spec.family(), spec.theta_hat(), a);
}

double log_p_frequentist(const PosteriorSpec& spec, double a) {
    return log_tail(spec.family(), spec.theta_hat(), a);
}

BayesMethod bayes_method_for(const PosteriorSpec& spec) {
    switch (spec.prior()) {
        case PriorKind::JeffreysExponential:
        case PriorKind::JeffreysPareto:
            return BayesMethod::ClosedForm;
        default:
            return BayesMethod::Quadrature;
    }
}

namespace {

// Initial panel boundaries centered on the MLE; a blind first panel can
// report a concentrated posterior as zero.
std::vector<double> hat_breakpoints(double hat, std::size_t n) {
    const double s =
        std::max(std::fabs(hat), 1e-8) / std::sqrt((double)std::max<std::size_t>(n, 1));
    std::vector<double> pts;
    for (double k : {-4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0})
        pts.push_back(hat + k * s);
    pts.push_back(0.5 * hat);
    pts.push_back(2.0 * hat);
    return pts;
}

}  // namespace

double p_bayes_quadrature(const PosteriorSpec& spec, double a) {
    quad::QuadOptions opts;
    opts.rel_tol = 1e-10;

    if (spec.prior() == PriorKind::NormalReference) {
        // mu integrates out exactly: E_mu[P(X > a | mu, sigma)] with
        // mu ~ N(x-bar, sigma^2/n) is the tail of N(x-bar, sigma^2 (1 + 1/n)).
        const Sample& x = spec.sample();
        const double n = (double)x.size();
        const double infl = std::sqrt(1.0 + 1.0 / n);
        auto f = [&](double s) {
            if (!(s > 0.0)) return 0.0;
            const double z = (a - x.mean()) / (s * infl);
            return sf::normal_cdf(-z) *
                   std::exp(normal_sigma_log_density(spec, s));
        };
        return quad::integrate_semi_infinite(
                   f, 0.0, opts,
                   hat_breakpoints(spec.theta_hat()[1], x.size()))
            .value;
    }

    const Interval dom = spec.family().param_domain(0);
    const std::vector<double> hints =
        hat_breakpoints(spec.theta_hat()[0], spec.sample().size());
    auto f = [&](double t) {
        if (!dom.contains(t)) return 0.0;
        return tail(spec.family(), ParamVector(t), a) *
               std::exp(log_posterior_density(spec, ParamVector(t)));
    };
    if (std::isfinite(dom.lo) && std::isfinite(dom.hi))
        return quad::integrate(f, dom.lo, dom.hi, opts, hints).value;
    if (std::isfinite(dom.lo))
        return quad::integrate_semi_infinite(f, dom.lo, opts, hints).value;
    return quad::integrate_real_line(f, opts, hints).value;
}

double log_p_bayes(const PosteriorSpec& spec, double a) {
    switch (spec.prior()) {
        case PriorKind::JeffreysExponential:
            return exponential_log_pb(spec, a);
        case PriorKind::JeffreysPareto:
            return pareto_log_pb(spec, a);
        default:
            return std::log(p_bayes_quadrature(spec, a));
    }
}

double p_bayes(const PosteriorSpec& spec, double a) {
    switch (spec.prior()) {
        case PriorKind::JeffreysExponential:
            return std::exp(exponential_log_pb(spec, a));
        case PriorKind::JeffreysPareto:
            return std::exp(pareto_log_pb(spec, a));
        default:
            return p_bayes_quadrature(spec, a);
    }
}

TailComparison difference_exact(const PosteriorSpec& spec, double a) {
    TailComparison c;
    c.a = a;
    c.method_bayes = bayes_method_for(spec);
    c.p_bayes = p_bayes(spec, a);
    c.p_freq = p_frequentist(spec, a);
    c.log_p_bayes = log_p_bayes(spec, a);
    c.log_p_freq = log_p_frequentist(spec, a);
    c.d_exact = c.p_bayes - c.p_freq;
    return c;
}

namespace {

// term1 = -grad F . m1, term2 = -(1/2) m2 : H, term3 = -(1/6) m3 : D3.
void fill_terms_1d(TailComparison& c, const DerivativeBundle& d,
                   double m1, double m2, double m3) {
    c.term1 = -d.grad1() * m1;
    c.term2 = -0.5 * d.hess1() * m2;
    c.term3 = -(1.0 / 6.0) * d.third1() * m3;
    c.d_taylor = c.term1 + c.term2 + c.term3;
    c.has_taylor = true;
    c.term3_is_fd = d.third_is_fd;
}

double remainder_bound_1d(const PosteriorSpec& spec, double a, double m2,
                          double m3) {
    // Scan |d3F| over theta_hat +- 4 sqrt(m2), clipped to where the
    // formula is defined.
    const double hat = spec.theta_hat()[0];
    const double half_width = 4.0 * std::sqrt(std::max(0.0, m2));
    const Interval dom = spec.family().formula_domain(0);
    const double lo = std::max(hat - half_width, dom.lo + 1e-12 * std::max(1.0, std::fabs(dom.lo)));
    const double hi = std::min(hat + half_width, dom.hi);
    double max_abs = 0.0;
    const int kPoints = 33;
    for (int i = 0; i < kPoints; ++i) {
        const double t = lo + (hi - lo) * (double)i / (double)(kPoints - 1);
        if (!dom.contains(t)) continue;
        const DerivativeBundle d = derivatives(spec.family(), ParamVector(t), a, 3);
        max_abs = std::max(max_abs, std::fabs(d.third1()));
    }
    return max_abs * std::fabs(m3) / 6.0;
}

TailComparison taylor_normal(const PosteriorSpec& spec, double a,
                             TaylorDiagnostics* diagnostics) {
    TailComparison c = difference_exact(spec, a);
    const NormalPosteriorStats st = normal_posterior_stats(spec);
    const DerivativeBundle d = derivatives(spec.family(), spec.theta_hat(), a, 3);

    // Odd mu-moments vanish (mu | sigma is symmetric about x-bar), so
    // the contractions keep only the sigma-aligned entries.
    c.term1 = -d.gradient[1] * st.m1_sigma;
    c.term2 = -0.5 * (d.hess(0, 0) * st.m2_mu + d.hess(1, 1) * st.m2_sigma);
    c.term3 = -(1.0 / 6.0) * (d.third_entry(1, 1, 1) * st.m3_sigma +
                              3.0 * d.third_entry(0, 0, 1) * st.m3_mmu_sigma);
    c.d_taylor = c.term1 + c.term2 + c.term3;
    c.has_taylor = true;
    c.term3_is_fd = true;

    if (diagnostics) {
        diagnostics->remainder_eval_point = spec.theta_hat();
        // Scan the contraction magnitude over a +-4 sd box in (mu, sigma).
        const double wm = 4.0 * std::sqrt(st.m2_mu);
        const double ws = 4.0 * std::sqrt(st.m2_sigma);
        double worst = 0.0;
        const int kPoints = 9;
        for (int i = 0; i < kPoints; ++i) {
            for (int j = 0; j < kPoints; ++j) {
                const double mu = spec.theta_hat()[0] +
                                  wm * (2.0 * i / (kPoints - 1.0) - 1.0);
                const double sg = spec.theta_hat()[1] +
                                  ws * (2.0 * j / (kPoints - 1.0) - 1.0);
                if (!(sg > 0.0)) continue;
                const DerivativeBundle dt =
                    derivatives(spec.family(), ParamVector(mu, sg), a, 3);
                const double mag =
                    std::fabs(dt.third_entry(1, 1, 1) * st.m3_sigma +
                              3.0 * dt.third_entry(0, 0, 1) * st.m3_mmu_sigma) /
                    6.0;
                worst = std::max(worst, mag);
            }
        }
        diagnostics->remainder_magnitude_bound = worst;
    }
    return c;
}

}  // namespace

TailComparison taylor_from_moments(const PosteriorSpec& spec, double a,
                                   const PosteriorMoments& moments) {
    if (spec.family().param_dim() != 1)
        throw std::invalid_argument(
            "taylor_from_moments: one-parameter families only");
    TailComparison c = difference_exact(spec, a);
    const DerivativeBundle d = derivatives(spec.family(), spec.theta_hat(), a, 3);
    fill_terms_1d(c, d, moments.m1(), moments.m2(), moments.m3());
    return c;
}

TailComparison difference_taylor(const PosteriorSpec& spec, double a,
                                 TaylorDiagnostics* diagnostics) {
    if (spec.prior() == PriorKind::NormalReference)
        return taylor_normal(spec, a, diagnostics);

    PosteriorMoments m = (spec.prior() == PriorKind::Custom)
                             ? moments_quadrature(spec, 3)
                             : moments_closed(spec, 3);
    TailComparison c = taylor_from_moments(spec, a, m);
    if (diagnostics) {
        diagnostics->remainder_eval_point = spec.theta_hat();
        diagnostics->remainder_magnitude_bound =
            remainder_bound_1d(spec, a, m.m2(), m.m3());
    }
    return c;
}

std::vector<GapPoint> gap_curve(const PosteriorSpec& spec,
                                const std::vector<double>& a_grid) {
    for (std::size_t i = 1; i < a_grid.size(); ++i) {
        if (!(a_grid[i] > a_grid[i - 1]))
            throw std::invalid_argument("gap_curve: grid must be sorted ascending");
    }
    std::vector<GapPoint> out;
    out.reserve(a_grid.size());
    for (double a : a_grid) {
        GapPoint p;
        try {
            p.cmp = difference_exact(spec, a);
            p.ok = true;
        } catch (const std::exception& e) {
            p.ok = false;
            p.error = e.what();
            p.cmp.a = a;
        }
        out.push_back(std::move(p));
    }
    // Both estimators are tails, hence non-increasing in a.
    const GapPoint* prev = nullptr;
    for (const GapPoint& p : out) {
        if (!p.ok) continue;
        if (prev) {
            const double slack = 1e-12;
            if (p.cmp.p_bayes > prev->cmp.p_bayes * (1.0 + slack) + 1e-300 ||
                p.cmp.p_freq > prev->cmp.p_freq * (1.0 + slack) + 1e-300) {
                std::ostringstream os;
                os << "gap_curve: estimator not monotone at a = " << p.cmp.a;
                throw numeric_error(os.str());
            }
        }
        prev = &p;
    }
    return out;
}

}  // namespace tailgap
