#ifndef TAILGAP_ERRORS_HPP
#define TAILGAP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tailgap {

// Numerical failure (quadrature non-convergence, underflow degeneracy).
// Distinct from argument/domain errors so callers can map exit codes.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// Sample admits no usable MLE (all-ones Pareto, single-point Normal, ...).
class degenerate_sample_error : public std::invalid_argument {
public:
    explicit degenerate_sample_error(const std::string& what)
        : std::invalid_argument(what) {}
};

// A requested posterior moment does not exist for this sample size.
class insufficient_sample_error : public std::invalid_argument {
public:
    explicit insufficient_sample_error(const std::string& what)
        : std::invalid_argument(what) {}
};

}  // namespace tailgap

#endif
