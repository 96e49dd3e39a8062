#ifndef TAILGAP_FAMILIES_HPP
#define TAILGAP_FAMILIES_HPP

#include <array>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace tailgap {

enum class FamilyKind { Exponential, Pareto, Normal, Generic };

std::string to_string(FamilyKind kind);

// Open interval; infinite endpoints allowed.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool contains(double x) const { return x > lo && x < hi; }
};

// Parameter vector, dimension 1 or 2.
class ParamVector {
public:
    ParamVector() = default;
    explicit ParamVector(double x) : coords_{x, 0.0}, dim_(1) {}
    ParamVector(double x, double y) : coords_{x, y}, dim_(2) {}

    int dim() const { return dim_; }
    double operator[](int i) const { return coords_[(size_t)i]; }
    double& operator[](int i) { return coords_[(size_t)i]; }

private:
    std::array<double, 2> coords_{0.0, 0.0};
    int dim_ = 0;
};

// Observed i.i.d. sample. Values validated finite and non-empty at
// construction; support membership is checked against a family by
// validate_for().
class Sample {
public:
    explicit Sample(std::vector<double> values);

    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double sum() const { return sum_; }           // S
    double mean() const { return mean_; }         // x-bar
    double sum_log() const;                       // L; requires all values > 0
    double sum_sq_dev() const { return ssd_; }    // sum (x - x-bar)^2

private:
    std::vector<double> values_;
    double sum_ = 0.0;
    double mean_ = 0.0;
    double sum_log_ = 0.0;
    bool has_sum_log_ = false;
    double ssd_ = 0.0;
};

// F(a | theta) for a user-supplied family.
using CdfEvaluator = std::function<double(const ParamVector&, double)>;

class FamilySpec {
public:
    static FamilySpec exponential();  // rate-mean lambda > 0, support [0, inf)
    static FamilySpec pareto();       // shape alpha, scale fixed at 1, support [1, inf)
    static FamilySpec normal();       // theta = (mu, sigma), sigma > 0
    static FamilySpec generic(CdfEvaluator cdf, double support_lower,
                              std::vector<Interval> param_domain);

    FamilyKind kind() const { return kind_; }
    int param_dim() const { return param_dim_; }
    double support_lower() const { return support_lower_; }

    // The model's parameter domain (Pareto: alpha in (0,1) as the model
    // restricts it). Used for prior support and out-of-model flagging.
    const Interval& param_domain(int i) const { return model_domain_[(size_t)i]; }

    // Where the CDF formula itself is defined (Pareto: alpha > 0).
    // Evaluation operations validate against this, so that a flagged
    // out-of-model MLE can still be plugged in.
    const Interval& formula_domain(int i) const { return formula_domain_[(size_t)i]; }

    bool in_model_domain(const ParamVector& theta) const;
    void require_evaluable(const ParamVector& theta) const;  // throws std::domain_error

    const CdfEvaluator& generic_cdf() const { return generic_cdf_; }

    void validate_sample(const Sample& sample) const;  // support membership

private:
    FamilyKind kind_ = FamilyKind::Exponential;
    int param_dim_ = 1;
    double support_lower_ = 0.0;
    std::vector<Interval> model_domain_;
    std::vector<Interval> formula_domain_;
    CdfEvaluator generic_cdf_;
};

// Derivatives of F(a|theta) with respect to theta. Derivatives are of F
// itself, not of the tail 1 - F; callers negate where needed.
struct DerivativeBundle {
    int dim = 1;
    int order = 1;
    std::array<double, 2> gradient{0.0, 0.0};
    // Row-major 2x2; entry [0] alone for 1-D families.
    std::array<double, 4> hessian{0.0, 0.0, 0.0, 0.0};
    // Unique entries of the symmetric rank-3 derivative:
    // 1-D: [0] = d3F/dtheta^3. 2-D: [t111, t112, t122, t222].
    std::array<double, 4> third{0.0, 0.0, 0.0, 0.0};
    bool third_is_fd = false;

    double grad1() const { return gradient[0]; }
    double hess1() const { return hessian[0]; }
    double third1() const { return third[0]; }
    double hess(int i, int j) const { return hessian[(size_t)(2 * i + j)]; }
    double third_entry(int i, int j, int k) const;
};

struct MleResult {
    ParamVector theta;
    bool out_of_model = false;  // Pareto alpha-hat >= 1
};

double cdf(const FamilySpec& spec, const ParamVector& theta, double a);
double pdf(const FamilySpec& spec, const ParamVector& theta, double a);

// 1 - cdf, computed in closed form (never by subtraction) for the
// closed-form families; log_tail carries the deep tail.
double tail(const FamilySpec& spec, const ParamVector& theta, double a);
double log_tail(const FamilySpec& spec, const ParamVector& theta, double a);

DerivativeBundle derivatives(const FamilySpec& spec, const ParamVector& theta,
                             double a, int order);

MleResult mle(const FamilySpec& spec, const Sample& sample);

double quantile(const FamilySpec& spec, const ParamVector& theta, double p);

}  // namespace tailgap

#endif
