// tailgap: Bayesian vs plug-in tail probability estimates, the gap
// between them, and convexity diagnostics, as machine-readable tables.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tailgap/convexity.hpp"
#include "tailgap/errors.hpp"
#include "tailgap/estimators.hpp"
#include "tailgap/montecarlo.hpp"
#include "tailgap/table.hpp"
#include "tailgap/version.hpp"

namespace {

using namespace tailgap;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

FamilySpec family_from_name(const std::string& name) {
    if (name == "exponential") return FamilySpec::exponential();
    if (name == "pareto") return FamilySpec::pareto();
    if (name == "normal") return FamilySpec::normal();
    throw std::invalid_argument("unknown family '" + name +
                                "' (expected exponential|pareto|normal)");
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream is(text);
    std::string cell;
    while (std::getline(is, cell, ',')) {
        std::size_t used = 0;
        out.push_back(std::stod(cell, &used));
        if (used != cell.size())
            throw std::invalid_argument("malformed number '" + cell + "'");
    }
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

// "lo:hi:count", inclusive endpoints.
std::vector<double> parse_grid(const std::string& text, bool log_spaced) {
    double lo = 0.0, hi = 0.0;
    long count = 0;
    char c1 = 0, c2 = 0;
    std::istringstream is(text);
    if (!(is >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' ||
        !(is >> std::ws).eof())
        throw std::invalid_argument("malformed grid '" + text + "' (want lo:hi:count)");
    if (count < 1) throw std::invalid_argument("grid count must be >= 1");
    if (count > 1 && !(lo < hi))
        throw std::invalid_argument("grid needs lo < hi");
    if (log_spaced && !(lo > 0.0))
        throw std::invalid_argument("log-spaced grid needs lo > 0");
    std::vector<double> out;
    out.reserve((std::size_t)count);
    for (long i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : (double)i / (double)(count - 1);
        out.push_back(log_spaced ? lo * std::pow(hi / lo, t)
                                 : lo + (hi - lo) * t);
    }
    return out;
}

std::vector<double> read_data_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open data file '" + path + "'");
    std::vector<double> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double v;
        if (ls >> v) {
            out.push_back(v);
            std::string rest;
            if (ls >> rest)
                throw std::invalid_argument("data file: one value per line, got '" +
                                            line + "'");
        }
    }
    if (out.empty())
        throw std::invalid_argument("data file '" + path + "' holds no values");
    return out;
}

double verdict_code(ConvexityVerdict v) {
    switch (v) {
        case ConvexityVerdict::ConvexTail: return 1.0;
        case ConvexityVerdict::Indefinite: return 0.0;
        case ConvexityVerdict::ConcaveTail: return -1.0;
    }
    return 0.0;
}

void emit(const io::OutputTable& table, bool as_json) {
    std::cout << (as_json ? table.to_json() : table.to_csv());
}

io::OutputTable base_table(const std::string& family) {
    io::OutputTable t;
    t.metadata["tool"] = "tailgap";
    t.metadata["version"] = TAILGAP_VERSION;
    t.metadata["family"] = family;
    return t;
}

struct SampleArgs {
    std::string data;
    std::string data_file;

    Sample resolve() const {
        if (data.empty() == data_file.empty())
            throw std::invalid_argument(
                "exactly one of --data or --data-file is required");
        return Sample(data.empty() ? read_data_file(data_file) : parse_list(data));
    }
};

ParamVector theta_from_list(const FamilySpec& family, const std::string& text) {
    const std::vector<double> v = parse_list(text);
    if ((int)v.size() != family.param_dim())
        throw std::invalid_argument("--theta needs " +
                                    std::to_string(family.param_dim()) +
                                    " value(s) for this family");
    return v.size() == 1 ? ParamVector(v[0]) : ParamVector(v[0], v[1]);
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("TAILGAP_SEED")) {
        std::size_t used = 0;
        const std::string s(env);
        const unsigned long long v = std::stoull(s, &used);
        if (used != s.size())
            throw std::invalid_argument("TAILGAP_SEED is not an integer");
        return v;
    }
    return 0;
}

// ---- estimate ----------------------------------------------------------

struct EstimateArgs {
    std::string family;
    SampleArgs sample;
    std::optional<double> a;
    std::optional<double> a_quantile;
    bool json = false;
};

int run_estimate(const EstimateArgs& args) {
    const FamilySpec family = family_from_name(args.family);
    const PosteriorSpec spec =
        PosteriorSpec::jeffreys(family, args.sample.resolve());

    if (args.a.has_value() == args.a_quantile.has_value())
        throw std::invalid_argument("exactly one of --a or --a-quantile is required");
    const double a = args.a ? *args.a
                            : quantile(family, spec.theta_hat(), *args.a_quantile);

    io::OutputTable t = base_table(args.family);
    t.metadata["n"] = std::to_string(spec.sample().size());
    if (spec.mle_out_of_model()) t.metadata["mle_out_of_model"] = "1";
    t.metadata["verdict_encoding"] = "1=convex-tail;0=indefinite;-1=concave-tail";
    t.column_names = {"a",     "p_bayes", "p_freq", "d_exact",     "d_taylor",
                      "term1", "term2",   "term3",  "log_p_bayes", "log_p_freq",
                      "verdict"};

    TailComparison c;
    try {
        c = difference_taylor(spec, a);
    } catch (const insufficient_sample_error&) {
        c = difference_exact(spec, a);  // Taylor columns stay NaN
    }
    const ConvexityReport report = convexity_at(family, spec.theta_hat(), a);
    t.append_row({c.a, c.p_bayes, c.p_freq, c.d_exact, c.d_taylor, c.term1,
                  c.term2, c.term3, c.log_p_bayes, c.log_p_freq,
                  verdict_code(report.verdict)});
    emit(t, args.json);
    return kExitOk;
}

// ---- curve -------------------------------------------------------------

struct CurveArgs {
    std::string family;
    std::string mode = "gap";
    SampleArgs sample;
    std::string a_grid;
    std::string quantile_grid;
    bool log_spaced = false;
    std::optional<double> a;
    std::string theta_grid;
    std::optional<double> sigma;
    bool json = false;
};

int run_curve(const CurveArgs& args) {
    const FamilySpec family = family_from_name(args.family);

    if (args.mode == "cdf-vs-theta") {
        if (!args.a) throw std::invalid_argument("cdf-vs-theta needs --a");
        if (args.theta_grid.empty())
            throw std::invalid_argument("cdf-vs-theta needs --theta-grid");
        if (family.kind() == FamilyKind::Normal && !args.sigma)
            throw std::invalid_argument("cdf-vs-theta for normal needs --sigma");

        io::OutputTable t = base_table(args.family);
        t.metadata["mode"] = args.mode;
        t.metadata["a"] = io::format_double(*args.a);
        t.column_names = {"theta", "cdf", "tail"};
        for (double th : parse_grid(args.theta_grid, false)) {
            const ParamVector theta = family.kind() == FamilyKind::Normal
                                          ? ParamVector(th, *args.sigma)
                                          : ParamVector(th);
            t.append_row({th, cdf(family, theta, *args.a),
                          tail(family, theta, *args.a)});
        }
        emit(t, args.json);
        return kExitOk;
    }

    if (args.mode != "gap")
        throw std::invalid_argument("unknown --mode '" + args.mode +
                                    "' (expected gap|cdf-vs-theta)");

    const PosteriorSpec spec =
        PosteriorSpec::jeffreys(family, args.sample.resolve());
    std::vector<double> grid;
    if (!args.a_grid.empty()) {
        grid = parse_grid(args.a_grid, args.log_spaced);
    } else if (!args.quantile_grid.empty()) {
        for (double p : parse_list(args.quantile_grid))
            grid.push_back(quantile(family, spec.theta_hat(), p));
    } else {
        throw std::invalid_argument("gap mode needs --a-grid or --quantile-grid");
    }

    io::OutputTable t = base_table(args.family);
    t.metadata["mode"] = "gap";
    t.metadata["n"] = std::to_string(spec.sample().size());
    t.column_names = {"a",           "p_bayes",    "p_freq", "d_exact",
                      "log_p_bayes", "log_p_freq", "ok"};
    for (const GapPoint& p : gap_curve(spec, grid)) {
        if (p.ok) {
            t.append_row({p.cmp.a, p.cmp.p_bayes, p.cmp.p_freq, p.cmp.d_exact,
                          p.cmp.log_p_bayes, p.cmp.log_p_freq, 1.0});
        } else {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            t.append_row({p.cmp.a, nan, nan, nan, nan, nan, 0.0});
        }
    }
    emit(t, args.json);
    return kExitOk;
}

// ---- convexity ---------------------------------------------------------

struct ConvexityArgs {
    std::string family;
    std::string theta;
    std::string a_range;
    int grid = 50;
    bool threshold = false;
    bool json = false;
};

int run_convexity(const ConvexityArgs& args) {
    const FamilySpec family = family_from_name(args.family);
    const ParamVector theta = theta_from_list(family, args.theta);
    family.require_evaluable(theta);

    double lo = 0.0, hi = 0.0;
    {
        char c = 0;
        std::istringstream is(args.a_range);
        if (!(is >> lo >> c >> hi) || c != ':' || !(is >> std::ws).eof() || !(lo < hi))
            throw std::invalid_argument("malformed --a-range (want lo:hi with lo < hi)");
    }
    if (lo < family.support_lower())
        throw std::domain_error("--a-range starts below the support");
    if (args.grid < 2) throw std::invalid_argument("--grid must be >= 2");

    io::OutputTable t = base_table(args.family);
    t.metadata["verdict_encoding"] = "1=convex-tail;0=indefinite;-1=concave-tail";
    t.column_names = {"a", "max_eigenvalue", "min_eigenvalue", "verdict"};
    for (int i = 0; i < args.grid; ++i) {
        const double a = lo + (hi - lo) * (double)i / (double)(args.grid - 1);
        const ConvexityReport r = convexity_at(family, theta, a);
        t.append_row({a, r.max_eigenvalue, r.min_eigenvalue,
                      verdict_code(r.verdict)});
    }
    if (args.threshold) {
        const std::optional<double> astar =
            convexity_threshold(family, theta, lo, hi, args.grid);
        t.metadata["threshold_a"] = astar ? io::format_double(*astar) : "none";
    }
    emit(t, args.json);
    return kExitOk;
}

// ---- simulate ----------------------------------------------------------

struct SimulateArgs {
    std::string family;
    std::string theta;
    std::size_t n = 0;
    std::size_t reps = 0;
    std::optional<std::uint64_t> seed;
    std::string quantiles;
    std::string a_list;
    bool json = false;
};

int run_simulate(const SimulateArgs& args) {
    mc::ExperimentConfig config;
    config.family = family_from_name(args.family);
    config.true_theta = theta_from_list(config.family, args.theta);
    config.n = args.n;
    config.reps = args.reps;
    config.seed = args.seed ? *args.seed : default_seed();
    if (args.quantiles.empty() == args.a_list.empty())
        throw std::invalid_argument(
            "exactly one of --quantiles or --a-list is required");
    if (!args.quantiles.empty()) {
        config.a_rule = mc::ARule::QuantileOfTruth;
        config.a_values = parse_list(args.quantiles);
    } else {
        config.a_rule = mc::ARule::FixedList;
        config.a_values = parse_list(args.a_list);
    }

    const mc::ExperimentSummary summary = mc::run_experiment(config);

    io::OutputTable t = base_table(args.family);
    t.metadata["n"] = std::to_string(config.n);
    t.metadata["reps"] = std::to_string(config.reps);
    t.metadata["reps_used"] = std::to_string(summary.reps_used);
    t.metadata["rep_failures"] = std::to_string(summary.rep_failures);
    t.metadata["out_of_model"] = std::to_string(summary.out_of_model);
    t.metadata["seed"] = std::to_string(config.seed);
    t.column_names = {"a", "frac_bayes_higher", "mean_d", "mean_log_ratio",
                      "true_tail"};
    for (const mc::PerThreshold& row : summary.per_a) {
        t.append_row({row.a, row.frac_bayes_higher, row.mean_d,
                      row.mean_log_ratio, row.true_tail});
    }
    emit(t, args.json);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian vs plug-in tail probability estimates"};
    app.require_subcommand(1);

    EstimateArgs est;
    auto* est_cmd = app.add_subcommand(
        "estimate", "Both estimators, the gap and its Taylor expansion at one threshold");
    est_cmd->add_option("--family", est.family, "exponential|pareto|normal")->required();
    est_cmd->add_option("--data", est.sample.data, "comma-separated sample values");
    est_cmd->add_option("--data-file", est.sample.data_file,
                        "file with one value per line, # comments");
    est_cmd->add_option("--a", est.a, "threshold");
    est_cmd->add_option("--a-quantile", est.a_quantile,
                        "resolve the threshold as a plug-in quantile");
    est_cmd->add_flag("--json", est.json, "emit JSON instead of CSV");

    CurveArgs curve;
    auto* curve_cmd = app.add_subcommand(
        "curve", "Sweep: gap over thresholds, or F(a|theta) over a theta grid");
    curve_cmd->add_option("--family", curve.family, "exponential|pareto|normal")->required();
    curve_cmd->add_option("--mode", curve.mode, "gap (default) or cdf-vs-theta");
    curve_cmd->add_option("--data", curve.sample.data, "comma-separated sample values");
    curve_cmd->add_option("--data-file", curve.sample.data_file, "sample file");
    curve_cmd->add_option("--a-grid", curve.a_grid, "lo:hi:count threshold grid");
    curve_cmd->add_option("--quantile-grid", curve.quantile_grid,
                          "comma-separated plug-in quantile probabilities");
    curve_cmd->add_flag("--log-spaced", curve.log_spaced, "log-space the --a-grid");
    curve_cmd->add_option("--a", curve.a, "fixed threshold (cdf-vs-theta)");
    curve_cmd->add_option("--theta-grid", curve.theta_grid,
                          "lo:hi:count parameter grid (cdf-vs-theta)");
    curve_cmd->add_option("--sigma", curve.sigma,
                          "fixed sigma when sweeping the normal mean");
    curve_cmd->add_flag("--json", curve.json, "emit JSON instead of CSV");

    ConvexityArgs cvx;
    auto* cvx_cmd = app.add_subcommand(
        "convexity", "Hessian eigenvalue scan of F(a|theta) over thresholds");
    cvx_cmd->add_option("--family", cvx.family, "exponential|pareto|normal")->required();
    cvx_cmd->add_option("--theta", cvx.theta, "parameter values, comma-separated")->required();
    cvx_cmd->add_option("--a-range", cvx.a_range, "lo:hi")->required();
    cvx_cmd->add_option("--grid", cvx.grid, "grid size (default 50)");
    cvx_cmd->add_flag("--threshold", cvx.threshold,
                      "also search the convexity-onset threshold");
    cvx_cmd->add_flag("--json", cvx.json, "emit JSON instead of CSV");

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand(
        "simulate", "Seeded repeated-sampling experiment comparing the estimators");
    sim_cmd->add_option("--family", sim.family, "exponential|pareto|normal")->required();
    sim_cmd->add_option("--theta", sim.theta, "true parameter values")->required();
    sim_cmd->add_option("--n", sim.n, "sample size per rep")->required();
    sim_cmd->add_option("--reps", sim.reps, "number of reps")->required();
    sim_cmd->add_option("--seed", sim.seed, "RNG seed (default: TAILGAP_SEED or 0)");
    sim_cmd->add_option("--quantiles", sim.quantiles,
                        "thresholds as quantiles of the truth, comma-separated");
    sim_cmd->add_option("--a-list", sim.a_list, "fixed thresholds, comma-separated");
    sim_cmd->add_flag("--json", sim.json, "emit JSON instead of CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "tailgap: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (est_cmd->parsed()) return run_estimate(est);
        if (curve_cmd->parsed()) return run_curve(curve);
        if (cvx_cmd->parsed()) return run_convexity(cvx);
        if (sim_cmd->parsed()) return run_simulate(sim);
        std::cerr << "tailgap: no subcommand\n";
        return kExitUsage;
    } catch (const tailgap::numeric_error& e) {
        std::cerr << "tailgap: numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "tailgap: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "tailgap: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "tailgap: " << e.what() << "\n";
        return kExitNumeric;
    }
}
