#include "tailgap/montecarlo.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "tailgap/errors.hpp"
#include "tailgap/estimators.hpp"
#include "tailgap/special_functions.hpp"

namespace tailgap::mc {

Sample sample_family(const FamilySpec& family, const ParamVector& true_theta,
                     std::size_t n, RandomStream& stream) {
    family.require_evaluable(true_theta);
    if (n == 0) throw std::invalid_argument("sample_family: n must be >= 1");

    std::vector<double> values;
    values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = stream.next_uniform01();
        switch (family.kind()) {
            case FamilyKind::Exponential:
                values.push_back(-true_theta[0] * std::log1p(-u));
                break;
            case FamilyKind::Pareto:
                values.push_back(std::exp(-std::log1p(-u) / true_theta[0]));
                break;
            case FamilyKind::Normal: {
                // Clamp away from 0/1; u == 0 occurs with probability 2^-53.
                const double p = std::max(u, 0x1.0p-60);
                values.push_back(true_theta[0] +
                                 true_theta[1] * sf::inverse_normal_cdf(p));
                break;
            }
            case FamilyKind::Generic:
                throw std::invalid_argument(
                    "sample_family: generic families have no sampler");
        }
    }
    return Sample(std::move(values));
}

ExperimentSummary run_experiment(const ExperimentConfig& config) {
    if (config.reps < 1)
        throw std::invalid_argument("run_experiment: reps must be >= 1");
    if (config.a_values.empty())
        throw std::invalid_argument("run_experiment: no thresholds given");
    config.family.require_evaluable(config.true_theta);

    std::vector<double> thresholds;
    thresholds.reserve(config.a_values.size());
    for (double v : config.a_values) {
        if (config.a_rule == ARule::QuantileOfTruth) {
            if (!(v > 0.0 && v < 1.0))
                throw std::invalid_argument(
                    "run_experiment: quantile probabilities must lie in (0,1)");
            thresholds.push_back(quantile(config.family, config.true_theta, v));
        } else {
            thresholds.push_back(v);
        }
    }

    const std::size_t k = thresholds.size();
    std::vector<std::size_t> higher(k, 0);
    std::vector<double> sum_d(k, 0.0), sum_log_ratio(k, 0.0);

    ExperimentSummary out;
    for (std::size_t rep = 0; rep < config.reps; ++rep) {
        RandomStream stream(config.seed, rep);
        Sample sample = sample_family(config.family, config.true_theta,
                                      config.n, stream);
        MleResult fit;
        try {
            fit = mle(config.family, sample);
        } catch (const degenerate_sample_error&) {
            ++out.rep_failures;
            continue;
        }
        if (fit.out_of_model) {
            ++out.out_of_model;
            continue;
        }
        const PosteriorSpec spec =
            PosteriorSpec::jeffreys(config.family, std::move(sample));
        for (std::size_t j = 0; j < k; ++j) {
            const double lpb = log_p_bayes(spec, thresholds[j]);
            const double lpf = log_p_frequentist(spec, thresholds[j]);
            if (lpb > lpf) ++higher[j];
            sum_d[j] += std::exp(lpb) - std::exp(lpf);
            sum_log_ratio[j] += lpb - lpf;
        }
        ++out.reps_used;
    }

    if (out.reps_used == 0) {
        std::ostringstream os;
        os << "run_experiment: all " << config.reps
           << " reps failed or fell out of model";
        throw numeric_error(os.str());
    }

    out.per_a.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
        PerThreshold row;
        row.a = thresholds[j];
        row.frac_bayes_higher = (double)higher[j] / (double)out.reps_used;
        row.mean_d = sum_d[j] / (double)out.reps_used;
        row.mean_log_ratio = sum_log_ratio[j] / (double)out.reps_used;
        row.true_tail = tail(config.family, config.true_theta, thresholds[j]);
        out.per_a.push_back(row);
    }
    return out;
}

}  // namespace tailgap::mc
