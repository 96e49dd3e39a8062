#include <doctest.h>

#include <cmath>
#include <vector>

#include "tailgap/errors.hpp"
#include "tailgap/posterior.hpp"
#include "tailgap/quadrature.hpp"

using namespace tailgap;

namespace {

Sample exponential_sample(std::size_t n, double xbar) {
    // Deterministic sample with the requested mean: pair deviations
    // around xbar so the sum is exact.
    std::vector<double> v(n, xbar);
    for (std::size_t i = 0; i + 1 < n; i += 2) {
        const double d = 0.3 * xbar * (double)(i % 5 + 1) / 5.0;
        v[i] = xbar - d;
        v[i + 1] = xbar + d;
    }
    return Sample(std::move(v));
}

Sample pareto_sample(std::size_t n) {
    // log-values 1.5 + 0.5 sin(i) keep alpha-hat = n / L inside (0,1).
    std::vector<double> v;
    v.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        v.push_back(std::exp(1.5 + 0.5 * std::sin((double)i)));
    return Sample(std::move(v));
}

// Oracle: integral of likelihood x prior over the parameter domain,
// independent of the closed-form marginal.
double marginal_by_quadrature(const PosteriorSpec& spec) {
    const Sample& x = spec.sample();
    const double n = (double)x.size();
    if (spec.prior() == PriorKind::JeffreysExponential) {
        auto f = [&](double lam) {
            if (!(lam > 0.0)) return 0.0;
            return std::exp(-(n + 1.0) * std::log(lam) - x.sum() / lam);
        };
        return quad::integrate_semi_infinite(f, 0.0).value;
    }
    // Pareto: likelihood alpha^n e^{-(alpha+1) L}, prior 1/alpha.
    const double L = x.sum_log();
    auto f = [&](double alpha) {
        if (!(alpha > 0.0 && alpha < 1.0)) return 0.0;
        return std::exp((n - 1.0) * std::log(alpha) - (alpha + 1.0) * L);
    };
    return quad::integrate(f, 0.0, 1.0).value;
}

}  // namespace

TEST_CASE("exponential posterior density anchor") {
    // n = 2, S = 2: pi(1 | x) = 4 e^{-2}.
    const PosteriorSpec spec =
        PosteriorSpec::jeffreys(FamilySpec::exponential(), Sample({0.5, 1.5}));
    CHECK(posterior_density(spec, ParamVector(1.0)) ==
          doctest::Approx(4.0 * std::exp(-2.0)).epsilon(1e-13));
    CHECK(posterior_density(spec, ParamVector(1.0)) ==
          doctest::Approx(0.5413411329464508).epsilon(1e-12));
}

TEST_CASE("exponential posterior mode sits at S/(n+1)") {
    const PosteriorSpec spec = PosteriorSpec::jeffreys(
        FamilySpec::exponential(), Sample({1.0, 2.0, 3.0, 4.0, 5.0}));
    const double S = 15.0;
    const double mode = S / 6.0;
    const double at_mode = posterior_density(spec, ParamVector(mode));
    for (int i = 1; i <= 400; ++i) {
        const double lam = 0.02 * i;
        CHECK(posterior_density(spec, ParamVector(lam)) <= at_mode * (1.0 + 1e-12));
    }
}

TEST_CASE("posterior densities integrate to one") {
    const PosteriorSpec exp_spec =
        PosteriorSpec::jeffreys(FamilySpec::exponential(), exponential_sample(8, 2.0));
    CHECK(posterior_normalization(exp_spec) == doctest::Approx(1.0).epsilon(1e-8));

    const PosteriorSpec par_spec =
        PosteriorSpec::jeffreys(FamilySpec::pareto(), pareto_sample(10));
    CHECK(posterior_normalization(par_spec) == doctest::Approx(1.0).epsilon(1e-8));

    const PosteriorSpec nrm_spec = PosteriorSpec::jeffreys(
        FamilySpec::normal(), Sample({0.5, 1.7, 2.1, 3.3, 0.9, 2.8}));
    CHECK(posterior_normalization(nrm_spec) == doctest::Approx(1.0).epsilon(1e-8));

    // Full 2-D check of the Normal density by nested quadrature.
    auto sigma_slice = [&](double sigma) {
        auto g = [&](double mu) {
            return posterior_density(nrm_spec, ParamVector(mu, sigma));
        };
        return quad::integrate_real_line(g, {1e-9, 1e-300, 4000}).value;
    };
    quad::QuadOptions outer{1e-9, 1e-300, 4000};
    CHECK(quad::integrate_semi_infinite(sigma_slice, 0.0, outer).value ==
          doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("posterior density domain errors") {
    const PosteriorSpec spec =
        PosteriorSpec::jeffreys(FamilySpec::exponential(), Sample({1.0, 2.0}));
    CHECK_THROWS_AS((void)posterior_density(spec, ParamVector(-0.5)),
                    std::domain_error);
    const PosteriorSpec par =
        PosteriorSpec::jeffreys(FamilySpec::pareto(), pareto_sample(4));
    CHECK_THROWS_AS((void)posterior_density(par, ParamVector(1.5)),
                    std::domain_error);
}

TEST_CASE("prior must match family") {
    CHECK_THROWS_AS(PosteriorSpec(FamilySpec::exponential(), Sample({1.0}),
                                  PriorKind::JeffreysPareto),
                    std::invalid_argument);
}

TEST_CASE("marginal likelihood closed forms and quadrature oracle") {
    // n = 1, x = {1}: Gamma(1) * 1 = 1.
    const PosteriorSpec one =
        PosteriorSpec::jeffreys(FamilySpec::exponential(), Sample({1.0}));
    CHECK(marginal_likelihood(one) == doctest::Approx(1.0).epsilon(1e-13));

    // n = 3, S = 6: Gamma(3) 6^{-3} = 2/216.
    const PosteriorSpec three =
        PosteriorSpec::jeffreys(FamilySpec::exponential(), Sample({1.0, 2.0, 3.0}));
    CHECK(marginal_likelihood(three) == doctest::Approx(2.0 / 216.0).epsilon(1e-13));
    CHECK(marginal_likelihood(three) ==
          doctest::Approx(marginal_by_quadrature(three)).epsilon(1e-8));

    // Pareto n = 2, x = {e, e}: (Gamma(2,0) - Gamma(2,2)) / (e^2 2^2),
    // with Gamma(2,2) = 3 e^{-2}.
    const double e = std::exp(1.0);
    const PosteriorSpec pareto2 =
        PosteriorSpec::jeffreys(FamilySpec::pareto(), Sample({e, e}));
    const double want = (1.0 - 3.0 * std::exp(-2.0)) / (e * e * 4.0);
    CHECK(marginal_likelihood(pareto2) == doctest::Approx(want).epsilon(1e-12));
    CHECK(marginal_likelihood(pareto2) ==
          doctest::Approx(marginal_by_quadrature(pareto2)).epsilon(1e-8));
}

TEST_CASE("marginal likelihood flags underflow but keeps the log form") {
    const PosteriorSpec spec = PosteriorSpec::jeffreys(
        FamilySpec::exponential(), exponential_sample(300, 1e5));
    CHECK(std::isfinite(log_marginal_likelihood(spec)));
    CHECK(log_marginal_likelihood(spec) < -708.0);
    CHECK_THROWS_AS((void)marginal_likelihood(spec), numeric_error);
}

TEST_CASE("exponential closed moments match the stated formulas") {
    const PosteriorSpec spec =
        PosteriorSpec::jeffreys(FamilySpec::exponential(), exponential_sample(5, 2.0));
    REQUIRE(spec.sample().mean() == doctest::Approx(2.0).epsilon(1e-15));
    const PosteriorMoments m = moments_closed(spec);
    CHECK(m.m1() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(m.m2() == doctest::Approx(7.0 / 3.0).epsilon(1e-14));
    CHECK(m.method() == MomentMethod::ClosedForm);

    // n = 4 is the smallest size with a third moment.
    const PosteriorSpec four =
        PosteriorSpec::jeffreys(FamilySpec::exponential(), exponential_sample(4, 1.0));
    CHECK(moments_closed(four).m3() ==
          doctest::Approx(34.0 / 6.0).epsilon(1e-13));
}

TEST_CASE("insufficient sample sizes are rejected moment by moment") {
    auto spec_of = [](std::size_t n) {
        return PosteriorSpec::jeffreys(FamilySpec::exponential(),
                                       exponential_sample(n, 1.0));
    };
    CHECK_THROWS_AS((void)moments_closed(spec_of(3), 3), insufficient_sample_error);
    CHECK_THROWS_AS((void)moments_closed(spec_of(2), 2), insufficient_sample_error);
    CHECK_THROWS_AS((void)moments_closed(spec_of(1), 1), insufficient_sample_error);
    CHECK_NOTHROW((void)moments_closed(spec_of(3), 2));
    CHECK_NOTHROW((void)moments_closed(spec_of(4), 3));
}

TEST_CASE("closed moments agree with the quadrature oracle") {
    for (std::size_t n : {5, 10, 50}) {
        for (double xbar : {0.5, 1.0, 10.0}) {
            const PosteriorSpec spec = PosteriorSpec::jeffreys(
                FamilySpec::exponential(), exponential_sample(n, xbar));
            const PosteriorMoments closed = moments_closed(spec);
            const PosteriorMoments quadr = moments_quadrature(spec);
            CHECK(quadr.m1() == doctest::Approx(closed.m1()).epsilon(1e-6));
            CHECK(quadr.m2() == doctest::Approx(closed.m2()).epsilon(1e-6));
            CHECK(quadr.m3() == doctest::Approx(closed.m3()).epsilon(1e-6));
        }
    }
    for (std::size_t n : {5, 10, 50}) {
        const PosteriorSpec spec =
            PosteriorSpec::jeffreys(FamilySpec::pareto(), pareto_sample(n));
        const PosteriorMoments closed = moments_closed(spec);
        const PosteriorMoments quadr = moments_quadrature(spec);
        CHECK(quadr.m1() == doctest::Approx(closed.m1()).epsilon(1e-6));
        CHECK(quadr.m2() == doctest::Approx(closed.m2()).epsilon(1e-6));
        CHECK(quadr.m3() == doctest::Approx(closed.m3()).epsilon(1e-6));
        CHECK(quadr.m2() > 0.0);
    }
}

TEST_CASE("pareto posterior concentrates as n grows") {
    // Fixed L/n: the posterior collapses onto alpha-hat, so m1 -> 0.
    std::vector<double> v(400, std::exp(2.0));
    v[0] = std::exp(1.9);
    v[1] = std::exp(2.1);
    const PosteriorSpec spec =
        PosteriorSpec::jeffreys(FamilySpec::pareto(), Sample(std::move(v)));
    CHECK(std::fabs(moments_closed(spec).m1()) < 1e-20);
    CHECK(std::fabs(moments_quadrature(spec, 1).m1()) < 1e-8);
}

TEST_CASE("normalization check doubles as the k = 0 moment") {
    const PosteriorSpec spec =
        PosteriorSpec::jeffreys(FamilySpec::exponential(), exponential_sample(6, 1.5));
    CHECK(posterior_normalization(spec) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_THROWS_AS((void)moments_quadrature(spec, 0), std::invalid_argument);
    CHECK_THROWS_AS((void)moments_quadrature(spec, 4), std::invalid_argument);
}

TEST_CASE("custom prior posterior normalizes") {
    const PosteriorSpec spec(
        FamilySpec::exponential(), exponential_sample(6, 2.0),
        [](const ParamVector& th) {
            const double d = (th[0] - 2.0) / 0.5;
            return -0.5 * d * d;
        });
    CHECK(posterior_normalization(spec) == doctest::Approx(1.0).epsilon(1e-8));
    const PosteriorMoments m = moments_quadrature(spec, 2);
    CHECK(m.m2() > 0.0);
}

TEST_CASE("posterior mean via quadrature matches the exponential closed form") {
    const PosteriorSpec spec =
        PosteriorSpec::jeffreys(FamilySpec::exponential(), exponential_sample(10, 2.0));
    // E[lambda] = S / (n - 1).
    CHECK(posterior_mean(spec)[0] ==
          doctest::Approx(20.0 / 9.0).epsilon(1e-9));
    const PosteriorSpec one =
        PosteriorSpec::jeffreys(FamilySpec::exponential(), Sample({1.0}));
    CHECK_THROWS_AS((void)posterior_mean(one), insufficient_sample_error);
}

TEST_CASE("normal posterior reductions match quadrature over the sigma marginal") {
    const PosteriorSpec spec = PosteriorSpec::jeffreys(
        FamilySpec::normal(), Sample({0.5, 1.7, 2.1, 3.3, 0.9, 2.8}));
    const NormalPosteriorStats st = normal_posterior_stats(spec);

    auto sigma_moment = [&](auto&& weight) {
        auto f = [&](double s) {
            if (!(s > 0.0)) return 0.0;
            return weight(s) * std::exp(normal_sigma_log_density(spec, s));
        };
        return quad::integrate_semi_infinite(f, 0.0).value;
    };
    CHECK(sigma_moment([](double) { return 1.0; }) ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(st.e_sigma ==
          doctest::Approx(sigma_moment([](double s) { return s; })).epsilon(1e-9));
    CHECK(st.e_sigma2 ==
          doctest::Approx(sigma_moment([](double s) { return s * s; })).epsilon(1e-9));
    const double hat = spec.theta_hat()[1];
    CHECK(st.m2_sigma == doctest::Approx(sigma_moment([&](double s) {
                             return (s - hat) * (s - hat);
                         })).epsilon(1e-8));
    CHECK(st.m3_sigma == doctest::Approx(sigma_moment([&](double s) {
                             return std::pow(s - hat, 3.0);
                         })).epsilon(1e-7));
    CHECK(st.m3_mmu_sigma == doctest::Approx(sigma_moment([&](double s) {
                                 return (s - hat) * s * s;
                             }) / 6.0).epsilon(1e-8));

    // Posterior mean: mu component is exactly x-bar.
    const ParamVector mean = posterior_mean(spec);
    CHECK(mean[0] == doctest::Approx(spec.sample().mean()).epsilon(1e-14));
    CHECK(mean[1] == doctest::Approx(st.e_sigma).epsilon(1e-12));

    // Scalar moment interfaces refuse the two-parameter family.
    CHECK_THROWS_AS((void)moments_quadrature(spec, 2), std::invalid_argument);
    CHECK_THROWS_AS((void)moments_closed(spec, 2), std::invalid_argument);
}
