#include "tailgap/posterior.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "tailgap/errors.hpp"
#include "tailgap/quadrature.hpp"
#include "tailgap/special_functions.hpp"

namespace tailgap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093453;

double log_likelihood(const FamilySpec& family, const Sample& sample,
                      const ParamVector& theta) {
    const double n = (double)sample.size();
    switch (family.kind()) {
        case FamilyKind::Exponential:
            return -n * std::log(theta[0]) - sample.sum() / theta[0];
        case FamilyKind::Pareto:
            return n * std::log(theta[0]) - (theta[0] + 1.0) * sample.sum_log();
        case FamilyKind::Normal: {
            const double mu = theta[0], sigma = theta[1];
            const double dev = sample.sum_sq_dev() +
                               n * (sample.mean() - mu) * (sample.mean() - mu);
            return -0.5 * n * kLog2Pi - n * std::log(sigma) -
                   dev / (2.0 * sigma * sigma);
        }
        case FamilyKind::Generic:
            throw std::invalid_argument(
                "posterior: generic families need a custom prior and density");
    }
    throw std::logic_error("log_likelihood: unreachable");
}

// gamma(n, L) = Gamma(n) P(n, L), the Pareto normalizer, in log space.
double pareto_log_normalizer(double n, double L) {
    const double log_p = sf::log_reg_lower_gamma(n, L);
    if (!std::isfinite(log_p))
        throw numeric_error("pareto posterior: normalizer underflows (L too small)");
    return sf::log_gamma(n) + log_p;
}

void require_one_param(const PosteriorSpec& spec, const char* what) {
    if (spec.family().param_dim() != 1) {
        std::ostringstream os;
        os << what << ": defined for one-parameter families only "
           << "(Normal moments reduce to sigma-marginal expectations; "
           << "see normal_posterior_stats)";
        throw std::invalid_argument(os.str());
    }
}

// Initial panel boundaries around the MLE so adaptive subdivision never
// loses a concentrated posterior inside one blind panel.
std::vector<double> mle_breakpoints(double hat, std::size_t n) {
    const double s =
        std::max(std::fabs(hat), 1e-8) / std::sqrt((double)std::max<std::size_t>(n, 1));
    std::vector<double> pts;
    for (double k : {-4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0})
        pts.push_back(hat + k * s);
    pts.push_back(0.5 * hat);
    pts.push_back(2.0 * hat);
    return pts;
}

// Quadrature over the parameter domain with the right change of variable.
quad::QuadResult integrate_over_domain(const Interval& domain,
                                       const quad::Integrand& f,
                                       const quad::QuadOptions& opts,
                                       const std::vector<double>& breakpoints) {
    const bool lo_finite = std::isfinite(domain.lo);
    const bool hi_finite = std::isfinite(domain.hi);
    if (lo_finite && hi_finite)
        return quad::integrate(f, domain.lo, domain.hi, opts, breakpoints);
    if (lo_finite)
        return quad::integrate_semi_infinite(f, domain.lo, opts, breakpoints);
    if (hi_finite) {
        auto g = [&f, &domain](double x) { return f(domain.hi - x); };
        std::vector<double> flipped;
        for (double b : breakpoints) flipped.push_back(domain.hi - b);
        return quad::integrate_semi_infinite(g, 0.0, opts, flipped);
    }
    return quad::integrate_real_line(f, opts, breakpoints);
}

}  // namespace

PosteriorSpec::PosteriorSpec(FamilySpec family, Sample sample, PriorKind prior)
    : family_(std::move(family)), sample_(std::move(sample)), prior_(prior) {
    family_.validate_sample(sample_);
    const bool ok =
        (prior_ == PriorKind::JeffreysExponential &&
         family_.kind() == FamilyKind::Exponential) ||
        (prior_ == PriorKind::JeffreysPareto && family_.kind() == FamilyKind::Pareto) ||
        (prior_ == PriorKind::NormalReference && family_.kind() == FamilyKind::Normal);
    if (!ok)
        throw std::invalid_argument("PosteriorSpec: prior does not match family");
    MleResult m = mle(family_, sample_);
    theta_hat_ = m.theta;
    mle_out_of_model_ = m.out_of_model;
}

PosteriorSpec::PosteriorSpec(FamilySpec family, Sample sample,
                             std::function<double(const ParamVector&)> custom_log_prior)
    : family_(std::move(family)),
      sample_(std::move(sample)),
      prior_(PriorKind::Custom),
      custom_log_prior_(std::move(custom_log_prior)) {
    family_.validate_sample(sample_);
    if (!custom_log_prior_)
        throw std::invalid_argument("PosteriorSpec: custom prior evaluator required");
    if (family_.param_dim() != 1)
        throw std::invalid_argument(
            "PosteriorSpec: custom priors supported for one-parameter families");
    MleResult m = mle(family_, sample_);
    theta_hat_ = m.theta;
    mle_out_of_model_ = m.out_of_model;
}

PosteriorSpec PosteriorSpec::jeffreys(FamilySpec family, Sample sample) {
    switch (family.kind()) {
        case FamilyKind::Exponential:
            return PosteriorSpec(std::move(family), std::move(sample),
                                 PriorKind::JeffreysExponential);
        case FamilyKind::Pareto:
            return PosteriorSpec(std::move(family), std::move(sample),
                                 PriorKind::JeffreysPareto);
        case FamilyKind::Normal:
            return PosteriorSpec(std::move(family), std::move(sample),
                                 PriorKind::NormalReference);
        case FamilyKind::Generic:
            throw std::invalid_argument(
                "PosteriorSpec: generic families need an explicit custom prior");
    }
    throw std::logic_error("jeffreys: unreachable");
}

PosteriorMoments::PosteriorMoments(double m1, double m2, double m3, int k_max,
                                   MomentMethod method)
    : m1_(m1), m2_(m2), m3_(m3), k_max_(k_max), method_(method) {
    if (k_max_ < 1 || k_max_ > 3)
        throw std::invalid_argument("PosteriorMoments: k_max must be 1..3");
    if (k_max_ >= 2 && !(m2_ >= 0.0))
        throw std::invalid_argument("PosteriorMoments: m2 must be >= 0");
}

double PosteriorMoments::m1() const { return m1_; }

double PosteriorMoments::m2() const {
    if (k_max_ < 2) throw std::logic_error("PosteriorMoments: m2 not computed");
    return m2_;
}

double PosteriorMoments::m3() const {
    if (k_max_ < 3) throw std::logic_error("PosteriorMoments: m3 not computed");
    return m3_;
}

double log_posterior_density(const PosteriorSpec& spec, const ParamVector& theta) {
    const FamilySpec& fam = spec.family();
    const Sample& x = spec.sample();
    const double n = (double)x.size();

    switch (spec.prior()) {
        case PriorKind::JeffreysExponential: {
            if (theta.dim() != 1 || !(theta[0] > 0.0))
                throw std::domain_error("posterior: lambda must be > 0");
            const double S = x.sum();
            const double lam = theta[0];
            return n * std::log(S) - sf::log_gamma(n) - (n + 1.0) * std::log(lam) -
                   S / lam;
        }
        case PriorKind::JeffreysPareto: {
            if (theta.dim() != 1 || !(theta[0] > 0.0 && theta[0] < 1.0))
                throw std::domain_error(
                    "posterior: pareto posterior is supported on alpha in (0,1)");
            const double L = x.sum_log();
            const double alpha = theta[0];
            return n * std::log(L) + (n - 1.0) * std::log(alpha) - alpha * L -
                   pareto_log_normalizer(n, L);
        }
        case PriorKind::NormalReference: {
            if (theta.dim() != 2 || !(theta[1] > 0.0))
                throw std::domain_error("posterior: sigma must be > 0");
            const double mu = theta[0], sigma = theta[1];
            // pi(mu | sigma, x) = N(x-bar, sigma^2/n); times sigma marginal.
            const double lmu = -0.5 * (kLog2Pi + std::log(sigma * sigma / n)) -
                               n * (mu - x.mean()) * (mu - x.mean()) /
                                   (2.0 * sigma * sigma);
            return lmu + normal_sigma_log_density(spec, sigma);
        }
        case PriorKind::Custom: {
            fam.require_evaluable(theta);
            if (!fam.in_model_domain(theta))
                throw std::domain_error("posterior: theta outside the prior support");
            const double lp = log_likelihood(fam, x, theta) +
                              spec.custom_log_prior()(theta);
            // Normalize by quadrature over the domain.
            const Interval dom = fam.param_domain(0);
            auto f = [&](double t) {
                if (!dom.contains(t)) return 0.0;
                return std::exp(log_likelihood(fam, x, ParamVector(t)) +
                                spec.custom_log_prior()(ParamVector(t)));
            };
            quad::QuadResult norm = integrate_over_domain(
                dom, f, {}, mle_breakpoints(spec.theta_hat()[0], x.size()));
            if (!(norm.value > 0.0))
                throw numeric_error("posterior: custom prior normalizer vanished");
            return lp - std::log(norm.value);
        }
    }
    throw std::logic_error("log_posterior_density: unreachable");
}

double posterior_density(const PosteriorSpec& spec, const ParamVector& theta) {
    return std::exp(log_posterior_density(spec, theta));
}

double log_marginal_likelihood(const PosteriorSpec& spec) {
    const Sample& x = spec.sample();
    const double n = (double)x.size();
    switch (spec.prior()) {
        case PriorKind::JeffreysExponential:
            return sf::log_gamma(n) - n * std::log(x.sum());
        case PriorKind::JeffreysPareto: {
            const double L = x.sum_log();
            return pareto_log_normalizer(n, L) - L - n * std::log(L);
        }
        case PriorKind::NormalReference: {
            const double c = 0.5 * x.sum_sq_dev();
            if (!(c > 0.0))
                throw degenerate_sample_error(
                    "normal marginal: needs sample scatter (n >= 2, not all equal)");
            return -0.5 * (n - 1.0) * kLog2Pi - 0.5 * std::log(n) +
                   sf::log_gamma(0.5 * n) - std::log(2.0) - 0.5 * n * std::log(c);
        }
        case PriorKind::Custom:
            throw std::invalid_argument(
                "marginal_likelihood: custom priors carry no calibrated normalizer");
    }
    throw std::logic_error("log_marginal_likelihood: unreachable");
}

double marginal_likelihood(const PosteriorSpec& spec) {
    const double lm = log_marginal_likelihood(spec);
    const double m = std::exp(lm);
    if (m == 0.0) {
        std::ostringstream os;
        os << "marginal_likelihood underflows double precision; log value " << lm;
        throw numeric_error(os.str());
    }
    return m;
}

PosteriorMoments moments_closed(const PosteriorSpec& spec, int k_max) {
    if (k_max < 1 || k_max > 3)
        throw std::invalid_argument("moments_closed: k_max must be 1..3");
    const Sample& x = spec.sample();
    const double n = (double)x.size();

    switch (spec.prior()) {
        case PriorKind::JeffreysExponential: {
            // Moments exist only while the posterior integrals converge:
            // m_k needs n >= k + 1.
            const double xbar = x.mean();
            if ((int)x.size() < k_max + 1) {
                std::ostringstream os;
                os << "exponential posterior: m" << k_max << " needs n >= "
                   << (k_max + 1) << ", got n = " << x.size();
                throw insufficient_sample_error(os.str());
            }
            const double m1 = xbar / (n - 1.0);
            const double m2 =
                k_max >= 2 ? xbar * xbar * (n + 2.0) / ((n - 1.0) * (n - 2.0)) : 0.0;
            const double m3 = k_max >= 3
                                  ? xbar * xbar * xbar * (7.0 * n + 6.0) /
                                        ((n - 1.0) * (n - 2.0) * (n - 3.0))
                                  : 0.0;
            return PosteriorMoments(m1, m2, m3, k_max, MomentMethod::ClosedForm);
        }
        case PriorKind::JeffreysPareto: {
            // Truncated-gamma moments via the recurrence
            // gamma(s+1,L) = s gamma(s,L) - L^s e^{-L}; g below is
            // L^n e^{-L} / gamma(n,L), evaluated in log space.
            const double L = x.sum_log();
            const double g =
                std::exp(n * std::log(L) - L - pareto_log_normalizer(n, L));
            const double L2 = L * L;
            const double m1 = -g / L;
            const double m2 = k_max >= 2 ? (n + (n - 1.0 - L) * g) / L2 : 0.0;
            const double m3 =
                k_max >= 3
                    ? (2.0 * n -
                       (n * n + 2.0 + (2.0 - 2.0 * n) * L + L2) * g) / (L2 * L)
                    : 0.0;
            return PosteriorMoments(m1, m2, m3, k_max, MomentMethod::ClosedForm);
        }
        case PriorKind::NormalReference:
        case PriorKind::Custom:
            throw std::invalid_argument(
                "moments_closed: closed forms exist for Exponential and Pareto only");
    }
    throw std::logic_error("moments_closed: unreachable");
}

namespace {

double central_moment_quadrature(const PosteriorSpec& spec, int k) {
    // The model domain is the posterior support (Pareto: (0,1)).
    const Interval dom = spec.family().param_domain(0);
    const double hat = spec.theta_hat()[0];
    auto f = [&spec, hat, k, &dom](double t) {
        if (!dom.contains(t)) return 0.0;
        double d = 1.0;
        const double delta = t - hat;
        for (int i = 0; i < k; ++i) d *= delta;
        return d * std::exp(log_posterior_density(spec, ParamVector(t)));
    };
    quad::QuadOptions opts;
    opts.rel_tol = 1e-10;
    return integrate_over_domain(
               dom, f, opts,
               mle_breakpoints(hat, spec.sample().size()))
        .value;
}

}  // namespace

PosteriorMoments moments_quadrature(const PosteriorSpec& spec, int k_max) {
    if (k_max < 1 || k_max > 3)
        throw std::invalid_argument("moments_quadrature: k_max must be 1..3");
    require_one_param(spec, "moments_quadrature");

    const double m1 = central_moment_quadrature(spec, 1);
    const double m2 = k_max >= 2 ? central_moment_quadrature(spec, 2) : 0.0;
    const double m3 = k_max >= 3 ? central_moment_quadrature(spec, 3) : 0.0;
    return PosteriorMoments(m1, m2, m3, k_max, MomentMethod::Quadrature);
}

double posterior_normalization(const PosteriorSpec& spec) {
    if (spec.family().param_dim() == 1) {
        const Interval dom = spec.family().param_domain(0);
        auto f = [&spec, &dom](double t) {
            if (!dom.contains(t)) return 0.0;
            return std::exp(log_posterior_density(spec, ParamVector(t)));
        };
        return integrate_over_domain(
                   dom, f, {},
                   mle_breakpoints(spec.theta_hat()[0], spec.sample().size()))
            .value;
    }
    // Normal: integrate the sigma marginal; the mu slice is an exact
    // Gaussian and contributes factor 1.
    auto f = [&spec](double s) {
        if (!(s > 0.0)) return 0.0;
        return std::exp(normal_sigma_log_density(spec, s));
    };
    return quad::integrate_semi_infinite(
               f, 0.0, {},
               mle_breakpoints(spec.theta_hat()[1], spec.sample().size()))
        .value;
}

ParamVector posterior_mean(const PosteriorSpec& spec) {
    if (spec.family().param_dim() == 1) {
        if (spec.prior() == PriorKind::JeffreysExponential && spec.sample().size() < 2)
            throw insufficient_sample_error(
                "exponential posterior mean needs n >= 2");
        const double m1 = central_moment_quadrature(spec, 1);
        return ParamVector(spec.theta_hat()[0] + m1);
    }
    NormalPosteriorStats st = normal_posterior_stats(spec);
    return ParamVector(spec.sample().mean(), st.e_sigma);
}

NormalPosteriorStats normal_posterior_stats(const PosteriorSpec& spec) {
    if (spec.prior() != PriorKind::NormalReference)
        throw std::invalid_argument("normal_posterior_stats: Normal posterior only");
    const Sample& x = spec.sample();
    const double n = (double)x.size();
    if (x.size() < 4)
        throw insufficient_sample_error(
            "normal posterior sigma moments need n >= 4");
    const double sigma_hat = spec.theta_hat()[1];
    const double c = 0.5 * n * sigma_hat * sigma_hat;

    // sigma^2 | x ~ InvGamma(n/2, c):  E[(sigma^2)^r] = c^r G(n/2 - r)/G(n/2).
    const double lg = sf::log_gamma(0.5 * n);
    auto sigma_pow = [&](double r) {
        return std::exp(r * std::log(c) + sf::log_gamma(0.5 * n - r) - lg);
    };
    const double e1 = sigma_pow(0.5);
    const double e2 = sigma_pow(1.0);
    const double e3 = sigma_pow(1.5);

    NormalPosteriorStats st;
    st.e_sigma = e1;
    st.e_sigma2 = e2;
    st.m1_sigma = e1 - sigma_hat;
    st.m2_sigma = e2 - 2.0 * sigma_hat * e1 + sigma_hat * sigma_hat;
    st.m3_sigma = e3 - 3.0 * sigma_hat * e2 + 3.0 * sigma_hat * sigma_hat * e1 -
                  sigma_hat * sigma_hat * sigma_hat;
    st.m2_mu = e2 / n;
    st.m3_mmu_sigma = (e3 - sigma_hat * e2) / n;
    return st;
}

double normal_sigma_log_density(const PosteriorSpec& spec, double sigma) {
    if (spec.prior() != PriorKind::NormalReference)
        throw std::invalid_argument("normal_sigma_log_density: Normal posterior only");
    if (!(sigma > 0.0))
        throw std::domain_error("normal_sigma_log_density: sigma must be > 0");
    const Sample& x = spec.sample();
    const double n = (double)x.size();
    const double c = 0.5 * x.sum_sq_dev();
    if (!(c > 0.0))
        throw degenerate_sample_error(
            "normal posterior: needs sample scatter (n >= 2, not all equal)");
    return std::log(2.0) + 0.5 * n * std::log(c) - sf::log_gamma(0.5 * n) -
           (n + 1.0) * std::log(sigma) - c / (sigma * sigma);
}

}  // namespace tailgap
