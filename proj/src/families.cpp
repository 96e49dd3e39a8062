#include "tailgap/families.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "tailgap/errors.hpp"
#include "tailgap/special_functions.hpp"

namespace tailgap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = 2.220446049250313e-16;
const double kSqrt2Pi = 2.5066282746310002;

double fd_step(double theta, double exponent) {
    return std::pow(kEps, exponent) * std::max(1.0, std::fabs(theta));
}

double normal_phi(double z) { return std::exp(-0.5 * z * z) / kSqrt2Pi; }

}  // namespace

std::string to_string(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::Exponential: return "exponential";
        case FamilyKind::Pareto: return "pareto";
        case FamilyKind::Normal: return "normal";
        case FamilyKind::Generic: return "generic";
    }
    return "?";
}

Sample::Sample(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty())
        throw std::invalid_argument("Sample: needs at least one value");
    bool all_positive = true;
    for (double v : values_) {
        if (!std::isfinite(v))
            throw std::invalid_argument("Sample: values must be finite");
        sum_ += v;
        if (v <= 0.0) all_positive = false;
    }
    mean_ = sum_ / (double)values_.size();
    for (double v : values_) ssd_ += (v - mean_) * (v - mean_);
    if (all_positive) {
        for (double v : values_) sum_log_ += std::log(v);
        has_sum_log_ = true;
    }
}

double Sample::sum_log() const {
    if (!has_sum_log_)
        throw std::domain_error("Sample: sum_log requires all values > 0");
    return sum_log_;
}

FamilySpec FamilySpec::exponential() {
    FamilySpec s;
    s.kind_ = FamilyKind::Exponential;
    s.param_dim_ = 1;
    s.support_lower_ = 0.0;
    s.model_domain_ = {Interval{0.0, kInf}};
    s.formula_domain_ = s.model_domain_;
    return s;
}

FamilySpec FamilySpec::pareto() {
    FamilySpec s;
    s.kind_ = FamilyKind::Pareto;
    s.param_dim_ = 1;
    s.support_lower_ = 1.0;
    // The model restricts alpha to (0,1); the CDF formula is valid for
    // any alpha > 0, which is what out-of-model MLE plug-ins need.
    s.model_domain_ = {Interval{0.0, 1.0}};
    s.formula_domain_ = {Interval{0.0, kInf}};
    return s;
}

FamilySpec FamilySpec::normal() {
    FamilySpec s;
    s.kind_ = FamilyKind::Normal;
    s.param_dim_ = 2;
    s.support_lower_ = -kInf;
    s.model_domain_ = {Interval{-kInf, kInf}, Interval{0.0, kInf}};
    s.formula_domain_ = s.model_domain_;
    return s;
}

FamilySpec FamilySpec::generic(CdfEvaluator cdf, double support_lower,
                               std::vector<Interval> param_domain) {
    if (!cdf) throw std::invalid_argument("generic family: cdf evaluator required");
    if (param_domain.empty() || param_domain.size() > 2)
        throw std::invalid_argument("generic family: param_dim must be 1 or 2");
    FamilySpec s;
    s.kind_ = FamilyKind::Generic;
    s.param_dim_ = (int)param_domain.size();
    s.support_lower_ = support_lower;
    s.model_domain_ = param_domain;
    s.formula_domain_ = std::move(param_domain);
    s.generic_cdf_ = std::move(cdf);
    return s;
}

bool FamilySpec::in_model_domain(const ParamVector& theta) const {
    if (theta.dim() != param_dim_) return false;
    for (int i = 0; i < param_dim_; ++i)
        if (!model_domain_[(size_t)i].contains(theta[i])) return false;
    return true;
}

void FamilySpec::require_evaluable(const ParamVector& theta) const {
    if (theta.dim() != param_dim_) {
        std::ostringstream os;
        os << to_string(kind_) << ": parameter dimension " << theta.dim()
           << " != " << param_dim_;
        throw std::domain_error(os.str());
    }
    for (int i = 0; i < param_dim_; ++i) {
        if (!std::isfinite(theta[i]) || !formula_domain_[(size_t)i].contains(theta[i])) {
            std::ostringstream os;
            os << to_string(kind_) << ": parameter " << i << " = " << theta[i]
               << " outside (" << formula_domain_[(size_t)i].lo << ", "
               << formula_domain_[(size_t)i].hi << ")";
            throw std::domain_error(os.str());
        }
    }
}

void FamilySpec::validate_sample(const Sample& sample) const {
    for (double v : sample.values()) {
        if (v < support_lower_) {
            std::ostringstream os;
            os << to_string(kind_) << ": sample value " << v
               << " below support lower edge " << support_lower_;
            throw std::domain_error(os.str());
        }
    }
}

double DerivativeBundle::third_entry(int i, int j, int k) const {
    if (dim == 1) return third[0];
    const int ones = (i == 1) + (j == 1) + (k == 1);
    return third[(size_t)ones];
}

double cdf(const FamilySpec& spec, const ParamVector& theta, double a) {
    spec.require_evaluable(theta);
    if (!std::isfinite(a)) {
        if (std::isnan(a)) throw std::domain_error("cdf: a is NaN");
        return a > 0 ? 1.0 : 0.0;
    }
    switch (spec.kind()) {
        case FamilyKind::Exponential:
            return a <= 0.0 ? 0.0 : -std::expm1(-a / theta[0]);
        case FamilyKind::Pareto:
            return a <= 1.0 ? 0.0 : -std::expm1(-theta[0] * std::log(a));
        case FamilyKind::Normal:
            return sf::normal_cdf((a - theta[0]) / theta[1]);
        case FamilyKind::Generic: {
            double v = spec.generic_cdf()(theta, a);
            if (!(v >= -1e-12 && v <= 1.0 + 1e-12))
                throw numeric_error("generic cdf evaluator returned a value outside [0,1]");
            return std::min(1.0, std::max(0.0, v));
        }
    }
    throw std::logic_error("cdf: unreachable");
}

double pdf(const FamilySpec& spec, const ParamVector& theta, double a) {
    spec.require_evaluable(theta);
    switch (spec.kind()) {
        case FamilyKind::Exponential:
            return a < 0.0 ? 0.0 : std::exp(-a / theta[0]) / theta[0];
        case FamilyKind::Pareto:
            return a < 1.0 ? 0.0
                           : theta[0] * std::exp(-(theta[0] + 1.0) * std::log(a));
        case FamilyKind::Normal:
            return normal_phi((a - theta[0]) / theta[1]) / theta[1];
        case FamilyKind::Generic: {
            // Central difference of the cdf in a.
            const double h = fd_step(a, 1.0 / 3.0);
            return (cdf(spec, theta, a + h) - cdf(spec, theta, a - h)) / (2.0 * h);
        }
    }
    throw std::logic_error("pdf: unreachable");
}

double tail(const FamilySpec& spec, const ParamVector& theta, double a) {
    spec.require_evaluable(theta);
    if (!std::isfinite(a)) {
        if (std::isnan(a)) throw std::domain_error("tail: a is NaN");
        return a > 0 ? 0.0 : 1.0;
    }
    switch (spec.kind()) {
        case FamilyKind::Exponential:
            return a <= 0.0 ? 1.0 : std::exp(-a / theta[0]);
        case FamilyKind::Pareto:
            return a <= 1.0 ? 1.0 : std::exp(-theta[0] * std::log(a));
        case FamilyKind::Normal:
            return sf::normal_cdf(-(a - theta[0]) / theta[1]);
        case FamilyKind::Generic:
            return 1.0 - cdf(spec, theta, a);
    }
    throw std::logic_error("tail: unreachable");
}

double log_tail(const FamilySpec& spec, const ParamVector& theta, double a) {
    spec.require_evaluable(theta);
    if (!std::isfinite(a)) {
        if (std::isnan(a)) throw std::domain_error("log_tail: a is NaN");
        return a > 0 ? -kInf : 0.0;
    }
    switch (spec.kind()) {
        case FamilyKind::Exponential:
            return a <= 0.0 ? 0.0 : -a / theta[0];
        case FamilyKind::Pareto:
            return a <= 1.0 ? 0.0 : -theta[0] * std::log(a);
        case FamilyKind::Normal:
            return sf::normal_log_tail((a - theta[0]) / theta[1]);
        case FamilyKind::Generic:
            return std::log1p(-cdf(spec, theta, a));
    }
    throw std::logic_error("log_tail: unreachable");
}

namespace {

DerivativeBundle exponential_derivatives(double lambda, double a, int order) {
    DerivativeBundle b;
    b.dim = 1;
    b.order = order;
    if (a <= 0.0) return b;  // F == 0 on this side
    const double e = std::exp(-a / lambda);
    const double l2 = lambda * lambda;
    b.gradient[0] = -(a / l2) * e;
    if (order >= 2) b.hessian[0] = (2.0 - a / lambda) * (a / (l2 * lambda)) * e;
    if (order >= 3) {
        const double l4 = l2 * l2;
        b.third[0] = -(6.0 * a / l4 - 6.0 * a * a / (l4 * lambda) +
                       a * a * a / (l4 * l2)) * e;
    }
    return b;
}

DerivativeBundle pareto_derivatives(double alpha, double a, int order) {
    DerivativeBundle b;
    b.dim = 1;
    b.order = order;
    if (a <= 1.0) return b;
    const double w = std::log(a);
    const double t = std::exp(-alpha * w);  // a^`-alpha`
    b.gradient[0] = w * t;
    if (order >= 2) b.hessian[0] = -w * w * t;
    if (order >= 3) b.third[0] = w * w * w * t;
    return b;
}

void normal_hessian(double mu, double sigma, double a, double* h) {
    const double z = (a - mu) / sigma;
    const double phi = normal_phi(z);
    const double s2 = sigma * sigma;
    h[0] = -z * phi / s2;                    // d2F/dmu2
    h[1] = -(z * z - 1.0) * phi / s2;        // d2F/dmu dsigma
    h[2] = h[1];
    h[3] = -z * (z * z - 2.0) * phi / s2;    // d2F/dsigma2
}

DerivativeBundle normal_derivatives(const ParamVector& theta, double a, int order) {
    const double mu = theta[0];
    const double sigma = theta[1];
    DerivativeBundle b;
    b.dim = 2;
    b.order = order;
    const double z = (a - mu) / sigma;
    const double phi = normal_phi(z);
    b.gradient[0] = -phi / sigma;
    b.gradient[1] = -z * phi / sigma;
    if (order >= 2) normal_hessian(mu, sigma, a, b.hessian.data());
    if (order >= 3) {
        // No analytic third derivative; central differences of the
        // analytic Hessian, symmetrized over index permutations.
        b.third_is_fd = true;
        auto hess_at = [a](double m, double s, int idx) {
            double h[4];
            normal_hessian(m, s, a, h);
            return h[idx];
        };
        const double hm = fd_step(mu, 1.0 / 3.0);
        const double hs = fd_step(sigma, 1.0 / 3.0);
        auto dmu = [&](int idx) {
            return (hess_at(mu + hm, sigma, idx) - hess_at(mu - hm, sigma, idx)) /
                   (2.0 * hm);
        };
        auto dsigma = [&](int idx) {
            return (hess_at(mu, sigma + hs, idx) - hess_at(mu, sigma - hs, idx)) /
                   (2.0 * hs);
        };
        b.third[0] = dmu(0);                            // t_mmm
        b.third[1] = 0.5 * (dsigma(0) + dmu(1));        // t_mms
        b.third[2] = 0.5 * (dsigma(1) + dmu(3));        // t_mss
        b.third[3] = dsigma(3);                         // t_sss
    }
    return b;
}

DerivativeBundle generic_derivatives(const FamilySpec& spec,
                                     const ParamVector& theta, double a,
                                     int order) {
    const int dim = spec.param_dim();
    DerivativeBundle b;
    b.dim = dim;
    b.order = order;
    b.third_is_fd = true;

    auto F = [&](const ParamVector& th) { return cdf(spec, th, a); };
    auto shifted = [&](int i, double d) {
        ParamVector th = theta;
        th[i] += d;
        return th;
    };

    const double f0 = F(theta);
    double hg[2], hh[2], ht[2];
    for (int i = 0; i < dim; ++i) {
        hg[i] = fd_step(theta[i], 1.0 / 3.0);
        hh[i] = fd_step(theta[i], 1.0 / 4.0);
        ht[i] = fd_step(theta[i], 1.0 / 5.0);
    }

    for (int i = 0; i < dim; ++i) {
        b.gradient[(size_t)i] =
            (F(shifted(i, hg[i])) - F(shifted(i, -hg[i]))) / (2.0 * hg[i]);
    }
    if (order >= 2) {
        for (int i = 0; i < dim; ++i) {
            const double h = hh[i];
            b.hessian[(size_t)(2 * i + i)] =
                (F(shifted(i, h)) - 2.0 * f0 + F(shifted(i, -h))) / (h * h);
        }
        if (dim == 2) {
            auto shifted2 = [&](double d0, double d1) {
                ParamVector th = theta;
                th[0] += d0;
                th[1] += d1;
                return th;
            };
            const double h0 = hh[0], h1 = hh[1];
            const double cross =
                (F(shifted2(h0, h1)) - F(shifted2(h0, -h1)) -
                 F(shifted2(-h0, h1)) + F(shifted2(-h0, -h1))) /
                (4.0 * h0 * h1);
            b.hessian[1] = cross;
            b.hessian[2] = cross;
        }
    }
    if (order >= 3) {
        if (dim == 1) {
            const double h = ht[0];
            b.third[0] = (F(shifted(0, 2.0 * h)) - 2.0 * F(shifted(0, h)) +
                          2.0 * F(shifted(0, -h)) - F(shifted(0, -2.0 * h))) /
                         (2.0 * h * h * h);
        } else {
            // Central difference of the FD Hessian; noisy but usable as
            // the last-resort path for user families.
            auto hess_entry = [&](const ParamVector& th, int r, int c) {
                return generic_derivatives(spec, th, a, 2).hess(r, c);
            };
            auto d_hess = [&](int k, int r, int c) {
                const double h = ht[k];
                return (hess_entry(shifted(k, h), r, c) -
                        hess_entry(shifted(k, -h), r, c)) /
                       (2.0 * h);
            };
            b.third[0] = d_hess(0, 0, 0);
            b.third[1] = 0.5 * (d_hess(1, 0, 0) + d_hess(0, 0, 1));
            b.third[2] = 0.5 * (d_hess(0, 1, 1) + d_hess(1, 0, 1));
            b.third[3] = d_hess(1, 1, 1);
        }
    }
    return b;
}

}  // namespace

DerivativeBundle derivatives(const FamilySpec& spec, const ParamVector& theta,
                             double a, int order) {
    if (order < 1 || order > 3)
        throw std::invalid_argument("derivatives: order must be 1, 2 or 3");
    spec.require_evaluable(theta);
    switch (spec.kind()) {
        case FamilyKind::Exponential:
            return exponential_derivatives(theta[0], a, order);
        case FamilyKind::Pareto:
            return pareto_derivatives(theta[0], a, order);
        case FamilyKind::Normal:
            return normal_derivatives(theta, a, order);
        case FamilyKind::Generic:
            return generic_derivatives(spec, theta, a, order);
    }
    throw std::logic_error("derivatives: unreachable");
}

MleResult mle(const FamilySpec& spec, const Sample& sample) {
    spec.validate_sample(sample);
    const double n = (double)sample.size();
    switch (spec.kind()) {
        case FamilyKind::Exponential: {
            const double lambda = sample.mean();
            if (!(lambda > 0.0))
                throw degenerate_sample_error(
                    "exponential MLE degenerate: sample mean is 0");
            return MleResult{ParamVector(lambda), false};
        }
        case FamilyKind::Pareto: {
            const double L = sample.sum_log();
            if (!(L > 0.0))
                throw degenerate_sample_error(
                    "pareto MLE degenerate: all values equal 1 (sum of logs is 0)");
            const double alpha = n / L;
            return MleResult{ParamVector(alpha), alpha >= 1.0};
        }
        case FamilyKind::Normal: {
            const double sigma = std::sqrt(sample.sum_sq_dev() / n);
            if (!(sigma > 0.0))
                throw degenerate_sample_error(
                    "normal MLE degenerate: sample standard deviation is 0");
            return MleResult{ParamVector(sample.mean(), sigma), false};
        }
        case FamilyKind::Generic:
            throw std::invalid_argument("mle: not available for generic families");
    }
    throw std::logic_error("mle: unreachable");
}

double quantile(const FamilySpec& spec, const ParamVector& theta, double p) {
    spec.require_evaluable(theta);
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("quantile: p must lie in (0,1)");
    switch (spec.kind()) {
        case FamilyKind::Exponential:
            return -theta[0] * std::log1p(-p);
        case FamilyKind::Pareto:
            return std::exp(-std::log1p(-p) / theta[0]);
        case FamilyKind::Normal:
            return theta[0] + theta[1] * sf::inverse_normal_cdf(p);
        case FamilyKind::Generic: {
            // Bracket then bisect on the cdf.
            double lo = std::isfinite(spec.support_lower()) ? spec.support_lower() : -1.0;
            double hi = std::max(1.0, lo + 1.0);
            while (cdf(spec, theta, hi) < p) {
                hi = lo + 2.0 * (hi - lo);
                if (!std::isfinite(hi))
                    throw numeric_error("quantile: failed to bracket");
            }
            if (!std::isfinite(spec.support_lower())) {
                while (cdf(spec, theta, lo) > p) {
                    lo = hi - 2.0 * (hi - lo);
                    if (!std::isfinite(lo))
                        throw numeric_error("quantile: failed to bracket");
                }
            }
            for (int i = 0; i < 200; ++i) {
                const double mid = 0.5 * (lo + hi);
                if (cdf(spec, theta, mid) < p) lo = mid; else hi = mid;
                if (hi - lo <= 1e-14 * std::max(1.0, std::fabs(mid))) break;
            }
            return 0.5 * (lo + hi);
        }
    }
    throw std::logic_error("quantile: unreachable");
}

}  // namespace tailgap
