#ifndef TAILGAP_QUADRATURE_HPP
#define TAILGAP_QUADRATURE_HPP

#include <functional>
#include <vector>

namespace tailgap::quad {

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;  // estimated
    int panels = 0;          // panels in the final partition
};

struct QuadOptions {
    double rel_tol = 1e-10;
    double abs_floor = 1e-300;  // never chase error below this
    int max_panels = 4000;
};

using Integrand = std::function<double(double)>;

// Globally adaptive Gauss(7)/Kronrod(15) on a finite interval,
// worst-panel-first subdivision, deterministic accumulation order.
// Breakpoints become initial panel boundaries; pass the locations of
// known peaks there, or a blind first panel can report a spike as zero.
// Throws numeric_error with the achieved tolerance if the panel budget
// runs out before the target is met.
QuadResult integrate(const Integrand& f, double lo, double hi,
                     const QuadOptions& opts = {},
                     const std::vector<double>& breakpoints = {});

// [lo, inf) via x = lo + t/(1-t). Breakpoints are in x coordinates.
QuadResult integrate_semi_infinite(const Integrand& f, double lo,
                                   const QuadOptions& opts = {},
                                   const std::vector<double>& breakpoints = {});

// (-inf, inf) via x = t/(1-t^2). Breakpoints are in x coordinates.
QuadResult integrate_real_line(const Integrand& f,
                               const QuadOptions& opts = {},
                               const std::vector<double>& breakpoints = {});

}  // namespace tailgap::quad

#endif
