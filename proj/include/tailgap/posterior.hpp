#ifndef TAILGAP_POSTERIOR_HPP
#define TAILGAP_POSTERIOR_HPP

#include <functional>

#include "tailgap/families.hpp"

namespace tailgap {

enum class PriorKind {
    JeffreysExponential,  // pi(lambda) ~ 1/lambda
    JeffreysPareto,       // pi(alpha) ~ 1/alpha on (0,1)
    NormalReference,      // pi(mu, sigma) ~ 1/sigma^2
    Custom,               // user log-density on the parameter domain
};

// Family + sample + prior. Validates that the prior matches the family
// and that the sample lies in the family's support.
class PosteriorSpec {
public:
    PosteriorSpec(FamilySpec family, Sample sample, PriorKind prior);
    PosteriorSpec(FamilySpec family, Sample sample,
                  std::function<double(const ParamVector&)> custom_log_prior);

    // Picks the matching noninformative prior for the family.
    static PosteriorSpec jeffreys(FamilySpec family, Sample sample);

    const FamilySpec& family() const { return family_; }
    const Sample& sample() const { return sample_; }
    PriorKind prior() const { return prior_; }
    const std::function<double(const ParamVector&)>& custom_log_prior() const {
        return custom_log_prior_;
    }
    const ParamVector& theta_hat() const { return theta_hat_; }
    bool mle_out_of_model() const { return mle_out_of_model_; }

private:
    FamilySpec family_;
    Sample sample_;
    PriorKind prior_;
    std::function<double(const ParamVector&)> custom_log_prior_;
    ParamVector theta_hat_;
    bool mle_out_of_model_ = false;
};

enum class MomentMethod { ClosedForm, Quadrature };

// Central moments m_k = E[(theta - theta_hat)^k] about the MLE, k <= k_max.
class PosteriorMoments {
public:
    PosteriorMoments(double m1, double m2, double m3, int k_max,
                     MomentMethod method);

    double m1() const;
    double m2() const;
    double m3() const;
    int k_max() const { return k_max_; }
    MomentMethod method() const { return method_; }

private:
    double m1_, m2_, m3_;
    int k_max_;
    MomentMethod method_;
};

double log_posterior_density(const PosteriorSpec& spec, const ParamVector& theta);
double posterior_density(const PosteriorSpec& spec, const ParamVector& theta);

double log_marginal_likelihood(const PosteriorSpec& spec);
double marginal_likelihood(const PosteriorSpec& spec);

// Closed-form moments (Exponential, Pareto). Throws
// insufficient_sample_error when a requested moment does not exist.
PosteriorMoments moments_closed(const PosteriorSpec& spec, int k_max = 3);

// Adaptive-quadrature moments; the oracle for the closed forms.
// One-parameter families only.
PosteriorMoments moments_quadrature(const PosteriorSpec& spec, int k_max = 3);

// Integral of the posterior density over its support (== 1), a test hook.
double posterior_normalization(const PosteriorSpec& spec);

ParamVector posterior_mean(const PosteriorSpec& spec);

// Normal-specific reductions used by the Taylor machinery: with the
// reference prior, mu | sigma, x ~ N(x-bar, sigma^2/n), so every mixed
// moment collapses to an expectation over the sigma marginal.
struct NormalPosteriorStats {
    double e_sigma;       // E[sigma]
    double e_sigma2;      // E[sigma^2]
    double m1_sigma;      // E[sigma - sigma_hat]
    double m2_sigma;      // E[(sigma - sigma_hat)^2]
    double m3_sigma;      // E[(sigma - sigma_hat)^3]
    double m2_mu;         // E[(mu - mu_hat)^2]  = E[sigma^2]/n
    double m3_mmu_sigma;  // E[(mu - mu_hat)^2 (sigma - sigma_hat)]
};
NormalPosteriorStats normal_posterior_stats(const PosteriorSpec& spec);

// log of the sigma-marginal posterior density (Normal reference prior).
double normal_sigma_log_density(const PosteriorSpec& spec, double sigma);

}  // namespace tailgap

#endif
