#include <doctest.h>

#include <cmath>
#include <vector>

#include "tailgap/errors.hpp"
#include "tailgap/families.hpp"
#include "tailgap/quadrature.hpp"

using namespace tailgap;

namespace {

constexpr double kEps = 2.220446049250313e-16;

double fd_gradient(const FamilySpec& spec, ParamVector theta, int i, double a) {
    const double h = std::cbrt(kEps) * std::max(1.0, std::fabs(theta[i]));
    ParamVector up = theta, dn = theta;
    up[i] += h;
    dn[i] -= h;
    return (cdf(spec, up, a) - cdf(spec, dn, a)) / (2.0 * h);
}

double fd_hessian(const FamilySpec& spec, ParamVector theta, int i, int j,
                  double a) {
    const double hi = std::pow(kEps, 0.25) * std::max(1.0, std::fabs(theta[i]));
    const double hj = std::pow(kEps, 0.25) * std::max(1.0, std::fabs(theta[j]));
    if (i == j) {
        ParamVector up = theta, dn = theta;
        up[i] += hi;
        dn[i] -= hi;
        return (cdf(spec, up, a) - 2.0 * cdf(spec, theta, a) + cdf(spec, dn, a)) /
               (hi * hi);
    }
    ParamVector pp = theta, pm = theta, mp = theta, mm = theta;
    pp[i] += hi; pp[j] += hj;
    pm[i] += hi; pm[j] -= hj;
    mp[i] -= hi; mp[j] += hj;
    mm[i] -= hi; mm[j] -= hj;
    return (cdf(spec, pp, a) - cdf(spec, pm, a) - cdf(spec, mp, a) +
            cdf(spec, mm, a)) /
           (4.0 * hi * hj);
}

double fd_third(const FamilySpec& spec, ParamVector theta, double a) {
    const double h = std::pow(kEps, 0.2) * std::max(1.0, std::fabs(theta[0]));
    auto at = [&](double d) {
        ParamVector t = theta;
        t[0] += d;
        return cdf(spec, t, a);
    };
    return (at(2.0 * h) - 2.0 * at(h) + 2.0 * at(-h) - at(-2.0 * h)) /
           (2.0 * h * h * h);
}

void check_close(double got, double want, double rel = 1e-5, double abs = 1e-10) {
    if (std::fabs(want) < abs) {
        CHECK(std::fabs(got - want) < abs);
    } else {
        CHECK(got == doctest::Approx(want).epsilon(rel));
    }
}

}  // namespace

TEST_CASE("cdf support-edge and symmetry anchors") {
    CHECK(cdf(FamilySpec::exponential(), ParamVector(1.0), 0.0) == 0.0);
    CHECK(cdf(FamilySpec::pareto(), ParamVector(0.5), 1.0) == 0.0);
    CHECK(cdf(FamilySpec::normal(), ParamVector(0.0, 1.0), 0.0) ==
          doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("cdf rejects out-of-domain parameters") {
    CHECK_THROWS_AS((void)cdf(FamilySpec::exponential(), ParamVector(-1.0), 1.0),
                    std::domain_error);
    CHECK_THROWS_AS((void)cdf(FamilySpec::pareto(), ParamVector(0.0), 2.0),
                    std::domain_error);
    CHECK_THROWS_AS((void)cdf(FamilySpec::normal(), ParamVector(0.0, -1.0), 1.0),
                    std::domain_error);
    CHECK_THROWS_AS((void)cdf(FamilySpec::normal(), ParamVector(0.0), 1.0),
                    std::domain_error);  // dimension mismatch
}

TEST_CASE("tail closed forms against quadrature of the pdf") {
    // Exponential lambda = 2 at a = 2: integrate the density out to
    // a + 50 lambda; the truncated mass is ~ e^{-50} relative.
    {
        const FamilySpec spec = FamilySpec::exponential();
        const ParamVector theta(2.0);
        auto f = [&](double x) { return pdf(spec, theta, x); };
        const double got = quad::integrate(f, 2.0, 2.0 + 100.0).value;
        CHECK(tail(spec, theta, 2.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
        CHECK(got == doctest::Approx(tail(spec, theta, 2.0)).epsilon(1e-8));
    }
    // Pareto alpha = 0.5 at b = 10, integrated in u = ln x so the
    // heavy tail becomes exponential; truncation beyond u = 60 is
    // ~ 1e-13 of the tail.
    {
        const FamilySpec spec = FamilySpec::pareto();
        const ParamVector theta(0.5);
        auto f = [&](double u) {
            const double x = std::exp(u);
            return pdf(spec, theta, x) * x;
        };
        const double got = quad::integrate(f, std::log(10.0), 60.0).value;
        CHECK(tail(spec, theta, 10.0) ==
              doctest::Approx(std::pow(10.0, -0.5)).epsilon(1e-14));
        CHECK(got == doctest::Approx(tail(spec, theta, 10.0)).epsilon(1e-8));
    }
    // Normal (0,1) at a = 3.
    {
        const FamilySpec spec = FamilySpec::normal();
        const ParamVector theta(0.0, 1.0);
        auto f = [&](double x) { return pdf(spec, theta, x); };
        const double got = quad::integrate(f, 3.0, 43.0).value;
        CHECK(got == doctest::Approx(tail(spec, theta, 3.0)).epsilon(1e-8));
    }
}

TEST_CASE("normal deep tail flushes toward zero") {
    const double t = tail(FamilySpec::normal(), ParamVector(0.0, 1.0), 40.0);
    CHECK(t < 1e-300);
    CHECK(log_tail(FamilySpec::normal(), ParamVector(0.0, 1.0), 40.0) < -690.0);
}

TEST_CASE("log_tail agrees with log of tail at moderate depth") {
    CHECK(log_tail(FamilySpec::exponential(), ParamVector(2.0), 2.0) ==
          doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(log_tail(FamilySpec::pareto(), ParamVector(0.5), 10.0) ==
          doctest::Approx(std::log(tail(FamilySpec::pareto(), ParamVector(0.5), 10.0)))
              .epsilon(1e-12));
    CHECK(log_tail(FamilySpec::normal(), ParamVector(1.0, 2.0), 7.0) ==
          doctest::Approx(std::log(tail(FamilySpec::normal(), ParamVector(1.0, 2.0), 7.0)))
              .epsilon(1e-12));
}

TEST_CASE("frozen derivative anchors") {
    // Exponential at the convexity boundary a = 2 lambda.
    CHECK(derivatives(FamilySpec::exponential(), ParamVector(1.0), 2.0, 2).hess1() ==
          0.0);
    // Pareto at b = e: d2F/dalpha2 = -e^{-1/2}.
    CHECK(derivatives(FamilySpec::pareto(), ParamVector(0.5), std::exp(1.0), 2)
              .hess1() == doctest::Approx(-std::exp(-0.5)).epsilon(1e-14));
    // Normal (0,1), a = 3: d2F/dmu2 = -(3/sqrt(2 pi)) e^{-4.5}; the
    // value is frozen from the closed form and double-checked by FD.
    const double want = -3.0 * std::exp(-4.5) / 2.5066282746310002;
    CHECK(want == doctest::Approx(-0.013295545235814022).epsilon(1e-12));
    const DerivativeBundle b =
        derivatives(FamilySpec::normal(), ParamVector(0.0, 1.0), 3.0, 2);
    CHECK(b.hess(0, 0) == doctest::Approx(want).epsilon(1e-13));
    check_close(fd_hessian(FamilySpec::normal(), ParamVector(0.0, 1.0), 0, 0, 3.0),
                want);
}

TEST_CASE("analytic derivatives agree with central differences on grids") {
    // Exponential: 4 lambdas x 5 thresholds.
    {
        const FamilySpec spec = FamilySpec::exponential();
        for (double lambda : {0.5, 1.0, 2.0, 5.0}) {
            for (double r : {0.5, 2.0, 3.0, 6.0, 8.0}) {
                const ParamVector theta(lambda);
                const double a = r * lambda;
                const DerivativeBundle d = derivatives(spec, theta, a, 3);
                check_close(d.grad1(), fd_gradient(spec, theta, 0, a));
                check_close(d.hess1(), fd_hessian(spec, theta, 0, 0, a));
                check_close(fd_third(spec, theta, a), d.third1(), 2e-5, 1e-8);
            }
        }
    }
    // Pareto: 5 shapes x 4 thresholds.
    {
        const FamilySpec spec = FamilySpec::pareto();
        for (double alpha : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            for (double b : {1.5, 3.0, 10.0, 100.0}) {
                const ParamVector theta(alpha);
                const DerivativeBundle d = derivatives(spec, theta, b, 3);
                check_close(d.grad1(), fd_gradient(spec, theta, 0, b));
                check_close(d.hess1(), fd_hessian(spec, theta, 0, 0, b));
                check_close(fd_third(spec, theta, b), d.third1(), 2e-5, 1e-8);
            }
        }
    }
    // Normal: 4 parameter points x 5 standardized thresholds.
    {
        const FamilySpec spec = FamilySpec::normal();
        const std::vector<ParamVector> thetas = {
            ParamVector(0.0, 1.0), ParamVector(1.0, 2.0), ParamVector(-1.0, 0.5),
            ParamVector(2.0, 3.0)};
        for (const ParamVector& theta : thetas) {
            for (double z : {0.5, 1.0, 2.0, 3.0, 5.0}) {
                const double a = theta[0] + z * theta[1];
                const DerivativeBundle d = derivatives(spec, theta, a, 2);
                for (int i = 0; i < 2; ++i)
                    check_close(d.gradient[(size_t)i], fd_gradient(spec, theta, i, a));
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j)
                        check_close(d.hess(i, j), fd_hessian(spec, theta, i, j, a));
                CHECK(d.hess(0, 1) == d.hess(1, 0));
            }
        }
    }
}

TEST_CASE("normal third derivatives come back flagged as FD") {
    const DerivativeBundle d =
        derivatives(FamilySpec::normal(), ParamVector(0.0, 1.0), 3.0, 3);
    CHECK(d.third_is_fd);
    // Spot value: t_mmm = d3F/dmu3 = -(z^2 - 1) phi(z) / sigma^3.
    const double z = 3.0;
    const double phi = std::exp(-0.5 * z * z) / 2.5066282746310002;
    CHECK(d.third_entry(0, 0, 0) == doctest::Approx(-(z * z - 1.0) * phi).epsilon(1e-7));
}

TEST_CASE("exponential curvature changes sign exactly at a = 2 lambda") {
    for (double lambda : {0.5, 1.0, 3.0}) {
        const FamilySpec spec = FamilySpec::exponential();
        const ParamVector theta(lambda);
        const double boundary = 2.0 * lambda;
        CHECK(derivatives(spec, theta, boundary * (1.0 - 1e-9), 2).hess1() > 0.0);
        CHECK(derivatives(spec, theta, boundary * (1.0 + 1e-9), 2).hess1() < 0.0);
    }
}

TEST_CASE("pareto curvature is nonpositive for every b > 1") {
    for (double alpha : {0.05, 0.3, 0.6, 0.95}) {
        for (double b : {1.0 + 1e-9, 1.1, 2.0, 50.0, 1e6}) {
            CHECK(derivatives(FamilySpec::pareto(), ParamVector(alpha), b, 2).hess1() <=
                  0.0);
        }
    }
}

TEST_CASE("third derivative decays deep in the tail") {
    for (double lambda : {0.7, 1.0, 2.5}) {
        const FamilySpec spec = FamilySpec::exponential();
        const double far =
            std::fabs(derivatives(spec, ParamVector(lambda), 50.0 * lambda, 3).third1());
        const double near =
            std::fabs(derivatives(spec, ParamVector(lambda), 2.0 * lambda, 3).third1());
        CHECK(far < 1e-12 * near);
    }
}

TEST_CASE("mle closed forms") {
    {
        const MleResult m = mle(FamilySpec::exponential(), Sample({2.0, 4.0}));
        CHECK(m.theta[0] == 3.0);
        CHECK_FALSE(m.out_of_model);
    }
    {
        const double e = std::exp(1.0);
        const MleResult m = mle(FamilySpec::pareto(), Sample({e, e}));
        CHECK(m.theta[0] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(m.out_of_model);  // alpha-hat = 1 falls outside (0,1)
    }
    {
        const MleResult m = mle(FamilySpec::normal(), Sample({0.0, 2.0}));
        CHECK(m.theta[0] == 1.0);
        CHECK(m.theta[1] == 1.0);
    }
}

TEST_CASE("mle degenerate samples") {
    CHECK_THROWS_AS((void)mle(FamilySpec::pareto(), Sample({1.0, 1.0})),
                    degenerate_sample_error);
    CHECK_THROWS_AS((void)mle(FamilySpec::normal(), Sample({5.0})),
                    degenerate_sample_error);
    CHECK_THROWS_AS((void)mle(FamilySpec::normal(), Sample({2.0, 2.0, 2.0})),
                    degenerate_sample_error);
    CHECK_THROWS_AS((void)mle(FamilySpec::exponential(), Sample({0.0, 0.0})),
                    degenerate_sample_error);
    CHECK_THROWS_AS(Sample({}), std::invalid_argument);
    // Support violations surface as domain errors.
    CHECK_THROWS_AS((void)mle(FamilySpec::pareto(), Sample({0.5, 2.0})),
                    std::domain_error);
    CHECK_THROWS_AS((void)mle(FamilySpec::exponential(), Sample({-1.0})),
                    std::domain_error);
}

TEST_CASE("quantile closed forms and round trips") {
    CHECK(quantile(FamilySpec::exponential(), ParamVector(1.0),
                   1.0 - std::exp(-1.0)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(quantile(FamilySpec::pareto(), ParamVector(0.5), 0.99) ==
          doctest::Approx(1e4).epsilon(1e-12));
    CHECK(quantile(FamilySpec::normal(), ParamVector(0.0, 1.0), 0.5) ==
          doctest::Approx(0.0).epsilon(1e-14));

    const std::vector<FamilySpec> specs = {
        FamilySpec::exponential(), FamilySpec::pareto(), FamilySpec::normal()};
    const std::vector<ParamVector> thetas = {ParamVector(2.0), ParamVector(0.4),
                                             ParamVector(1.0, 2.0)};
    for (std::size_t i = 0; i < specs.size(); ++i) {
        for (double p : {0.01, 0.3, 0.7, 0.99, 0.9999}) {
            const double q = quantile(specs[i], thetas[i], p);
            CHECK(std::fabs(cdf(specs[i], thetas[i], q) - p) < 1e-10);
        }
    }
    CHECK_THROWS_AS((void)quantile(FamilySpec::exponential(), ParamVector(1.0), 0.0),
                    std::domain_error);
    CHECK_THROWS_AS((void)quantile(FamilySpec::exponential(), ParamVector(1.0), 1.0),
                    std::domain_error);
}

TEST_CASE("generic family runs everything through finite differences") {
    // Wrap the exponential CDF as an opaque evaluator; the analytic
    // bundle is the oracle for the generic FD path.
    const FamilySpec generic = FamilySpec::generic(
        [](const ParamVector& th, double a) {
            return a <= 0.0 ? 0.0 : -std::expm1(-a / th[0]);
        },
        0.0, {Interval{0.0, std::numeric_limits<double>::infinity()}});
    const FamilySpec exact = FamilySpec::exponential();

    for (double lambda : {0.8, 1.0, 2.0}) {
        for (double a : {1.0, 3.0, 7.0}) {
            const DerivativeBundle got = derivatives(generic, ParamVector(lambda), a, 3);
            const DerivativeBundle want = derivatives(exact, ParamVector(lambda), a, 3);
            CHECK(got.third_is_fd);
            check_close(got.grad1(), want.grad1());
            check_close(got.hess1(), want.hess1(), 1e-5, 1e-8);
            check_close(got.third1(), want.third1(), 2e-4, 1e-7);
        }
    }

    // Quantile falls back to bisection on the evaluator.
    for (double p : {0.05, 0.5, 0.999}) {
        const double q = quantile(generic, ParamVector(1.5), p);
        CHECK(std::fabs(cdf(generic, ParamVector(1.5), q) - p) < 1e-10);
    }

    // A Weibull evaluator covers the shapes the closed forms skip.
    const FamilySpec weibull = FamilySpec::generic(
        [](const ParamVector& th, double a) {
            return a <= 0.0 ? 0.0 : -std::expm1(-std::pow(a / th[0], 1.5));
        },
        0.0, {Interval{0.0, std::numeric_limits<double>::infinity()}});
    const DerivativeBundle d = derivatives(weibull, ParamVector(1.0), 4.0, 2);
    CHECK(std::isfinite(d.grad1()));
    CHECK(d.hess1() < 0.0);  // convex tail far out, same as the paper's families
}
