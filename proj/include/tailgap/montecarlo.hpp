#ifndef TAILGAP_MONTECARLO_HPP
#define TAILGAP_MONTECARLO_HPP

#include <cstdint>
#include <vector>

#include "tailgap/families.hpp"
#include "tailgap/rng.hpp"

namespace tailgap::mc {

enum class ARule { FixedList, QuantileOfTruth };

struct ExperimentConfig {
    FamilySpec family;
    ParamVector true_theta;
    std::size_t n = 0;
    std::size_t reps = 0;
    ARule a_rule = ARule::QuantileOfTruth;
    std::vector<double> a_values;  // thresholds, or probabilities in (0,1)
    std::uint64_t seed = 0;
};

struct PerThreshold {
    double a = 0.0;
    double frac_bayes_higher = 0.0;
    double mean_d = 0.0;
    double mean_log_ratio = 0.0;
    double true_tail = 0.0;
};

struct ExperimentSummary {
    std::vector<PerThreshold> per_a;
    std::size_t reps_used = 0;
    std::size_t rep_failures = 0;   // degenerate MLE, excluded
    std::size_t out_of_model = 0;   // Pareto alpha-hat >= 1, excluded
};

// n i.i.d. draws by inverse-CDF transform (Exponential, Pareto) or
// inverse normal CDF; consumes exactly n uniforms from the stream.
Sample sample_family(const FamilySpec& family, const ParamVector& true_theta,
                     std::size_t n, RandomStream& stream);

// Deterministic given the config (rep r uses stream index r; accumulation
// is in rep order).
ExperimentSummary run_experiment(const ExperimentConfig& config);

}  // namespace tailgap::mc

#endif
