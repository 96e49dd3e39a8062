#include "tailgap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include "tailgap/errors.hpp"

namespace tailgap::quad {

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK dqk15).
const double kXgk[8] = {0.991455371120812639206854697526329,
                        0.949107912342758524526189684047851,
                        0.864864423359769072789712788640926,
                        0.741531185599394439863864773280788,
                        0.586087235467691130294144838258730,
                        0.405845151377397166906606412076961,
                        0.207784955007898467600689403773245,
                        0.000000000000000000000000000000000};
const double kWgk[8] = {0.022935322010529224963732008058970,
                        0.063092092629978553290700663189204,
                        0.104790010322250183839876322541518,
                        0.140653259715525918745189590510238,
                        0.169004726639267902826583426598550,
                        0.190350578064785409913256402421014,
                        0.204432940075298892414161999234649,
                        0.209482141084727828012999174891714};
const double kWg[4] = {0.129484966168869693270611432679082,
                       0.279705391489276667901467771423780,
                       0.381830050505118944950369775488975,
                       0.417959183673469387755102040816327};

struct Panel {
    double lo, hi;
    double value;      // Kronrod estimate
    double abs_error;  // QUADPACK-style error estimate
    double resabs;     // integral of |f| over the panel
    long seq;          // insertion index, deterministic tie-break
};

struct PanelWorse {
    bool operator()(const Panel& a, const Panel& b) const {
        if (a.abs_error != b.abs_error) return a.abs_error < b.abs_error;
        return a.seq > b.seq;
    }
};

void check_finite(double fx, double x) {
    if (!std::isfinite(fx)) {
        std::ostringstream os;
        os << "quadrature: integrand not finite at x = " << x;
        throw numeric_error(os.str());
    }
}

Panel evaluate_panel(const Integrand& f, double lo, double hi, long seq) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);

    double fv1[7], fv2[7];
    const double fc = f(center);
    check_finite(fc, center);

    double resg = kWg[3] * fc;
    double resk = kWgk[7] * fc;
    double resabs = std::fabs(resk);
    for (int j = 0; j < 7; ++j) {
        const double absc = half * kXgk[j];
        fv1[j] = f(center - absc);
        fv2[j] = f(center + absc);
        check_finite(fv1[j], center - absc);
        check_finite(fv2[j], center + absc);
        const double fsum = fv1[j] + fv2[j];
        if (j % 2 == 1) resg += kWg[j / 2] * fsum;
        resk += kWgk[j] * fsum;
        resabs += kWgk[j] * (std::fabs(fv1[j]) + std::fabs(fv2[j]));
    }

    const double reskh = resk * 0.5;
    double resasc = kWgk[7] * std::fabs(fc - reskh);
    for (int j = 0; j < 7; ++j) {
        resasc += kWgk[j] * (std::fabs(fv1[j] - reskh) + std::fabs(fv2[j] - reskh));
    }

    double err = std::fabs((resk - resg) * half);
    resasc *= half;
    resabs *= half;
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    const double epmach = 2.220446049250313e-16;
    const double uflow = 2.2250738585072014e-308;
    if (resabs > uflow / (50.0 * epmach)) {
        err = std::max(epmach * 50.0 * resabs, err);
    }

    return Panel{lo, hi, resk * half, err, resabs, seq};
}

double total_value(const std::vector<Panel>& done) {
    // Fixed order: sum panels sorted by position.
    std::vector<Panel> sorted = done;
    std::sort(sorted.begin(), sorted.end(),
              [](const Panel& a, const Panel& b) { return a.lo < b.lo; });
    double v = 0.0;
    for (const Panel& p : sorted) v += p.value;
    return v;
}

}  // namespace

QuadResult integrate(const Integrand& f, double lo, double hi,
                     const QuadOptions& opts,
                     const std::vector<double>& breakpoints) {
    if (!(lo < hi))
        throw std::invalid_argument("integrate: requires lo < hi");

    std::vector<double> edges{lo};
    for (double b : breakpoints)
        if (std::isfinite(b) && b > lo && b < hi) edges.push_back(b);
    edges.push_back(hi);
    std::sort(edges.begin(), edges.end());

    long seq = 0;
    std::priority_queue<Panel, std::vector<Panel>, PanelWorse> active;
    double sum_val = 0.0;
    double sum_err = 0.0;
    double sum_resabs = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        if (!(edges[i] < edges[i + 1])) continue;
        Panel p = evaluate_panel(f, edges[i], edges[i + 1], seq++);
        sum_val += p.value;
        sum_err += p.abs_error;
        sum_resabs += p.resabs;
        active.push(p);
    }

    const double epmach = 2.220446049250313e-16;
    while (true) {
        // The per-panel error estimate is floored at 50 eps |f|, so a
        // cancelling integrand can never be resolved below the roundoff
        // of its absolute mass; stop there rather than spinning.
        const double target =
            std::max({opts.abs_floor, opts.rel_tol * std::fabs(sum_val),
                      100.0 * epmach * sum_resabs});
        if (sum_err <= target) break;
        if ((int)active.size() >= opts.max_panels) {
            std::ostringstream os;
            os << "quadrature: panel budget (" << opts.max_panels
               << ") exhausted; achieved abs error " << sum_err
               << " against target " << target;
            throw numeric_error(os.str());
        }
        Panel worst = active.top();
        active.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(worst.lo < mid && mid < worst.hi)) {
            // Interval at machine resolution; keep as is.
            worst.abs_error = 0.0;
            active.push(worst);
            continue;
        }
        Panel left = evaluate_panel(f, worst.lo, mid, seq++);
        Panel right = evaluate_panel(f, mid, worst.hi, seq++);
        sum_val += left.value + right.value - worst.value;
        sum_err += left.abs_error + right.abs_error - worst.abs_error;
        sum_resabs += left.resabs + right.resabs - worst.resabs;
        active.push(left);
        active.push(right);
    }

    std::vector<Panel> done;
    done.reserve(active.size());
    while (!active.empty()) {
        done.push_back(active.top());
        active.pop();
    }
    QuadResult out;
    out.value = total_value(done);
    out.abs_error = sum_err;
    out.panels = (int)done.size();
    return out;
}

QuadResult integrate_semi_infinite(const Integrand& f, double lo,
                                   const QuadOptions& opts,
                                   const std::vector<double>& breakpoints) {
    auto g = [&f, lo](double t) {
        const double om = 1.0 - t;
        const double x = lo + t / om;
        return f(x) / (om * om);
    };
    std::vector<double> tb;
    tb.reserve(breakpoints.size());
    for (double x : breakpoints) {
        const double d = x - lo;
        if (std::isfinite(d) && d > 0.0) tb.push_back(d / (1.0 + d));
    }
    return integrate(g, 0.0, 1.0, opts, tb);
}

QuadResult integrate_real_line(const Integrand& f, const QuadOptions& opts,
                               const std::vector<double>& breakpoints) {
    auto g = [&f](double t) {
        const double om = 1.0 - t * t;
        const double x = t / om;
        return f(x) * (1.0 + t * t) / (om * om);
    };
    std::vector<double> tb;
    tb.reserve(breakpoints.size());
    for (double x : breakpoints) {
        if (!std::isfinite(x)) continue;
        // Invert x = t / (1 - t^2) for t in (-1, 1).
        if (x == 0.0) {
            tb.push_back(0.0);
        } else {
            tb.push_back((std::sqrt(1.0 + 4.0 * x * x) - 1.0) / (2.0 * x));
        }
    }
    return integrate(g, -1.0, 1.0, opts, tb);
}

}  // namespace tailgap::quad
