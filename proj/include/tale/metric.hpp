#pragma once

#include "tale/group_theory.hpp"
#include "tale/linalg.hpp"

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace tale {

/// Value, gradient and Hessian of a scalar field at one point.
struct ScalarJet {
    double value = 0.0;
    Vec grad;
    Mat hess;

    static ScalarJet constant(int n, double v) { return {v, Vec::Zero(n), Mat::Zero(n, n)}; }
    /// f(this) given f, f', f'' at the current value.
    ScalarJet compose(double f, double df, double ddf) const;
    friend ScalarJet operator*(const ScalarJet& a, const ScalarJet& b);
};

/// Metric with first and second partial derivatives: d[k] = dg/dy_k, dd[k*n+l] = d2g/dy_k dy_l.
struct MetricJet {
    int order = 0;
    Mat g;
    std::vector<Mat> d;
    std::vector<Mat> dd;

    int dimension() const { return static_cast<int>(g.rows()); }
    const Mat& second(int k, int l) const { return dd[static_cast<size_t>(k * dimension() + l)]; }
    Mat& second(int k, int l) { return dd[static_cast<size_t>(k * dimension() + l)]; }
    static MetricJet zero(int n, int order);
};

/// Product rule for jets: (s A) and (A B).
MetricJet operator*(const ScalarJet& s, const MetricJet& a);
MetricJet jet_product(const MetricJet& a, const MetricJet& b);
MetricJet jet_sum(const MetricJet& a, const MetricJet& b);

enum class DomainKind { everywhere, exterior, punctured_ball };

struct ChartDomain {
    DomainKind kind = DomainKind::everywhere;
    double inner = 0.0;                                       // exterior: |y| > inner
    double outer = std::numeric_limits<double>::infinity();  // punctured ball: 0 < |y| < outer
    std::shared_ptr<const FiniteRotationGroup> deck;          // quotient by this group, if any
    std::string added_point;                                  // tag of the point added at the puncture

    bool contains(const Vec& y) const;
    int deck_order() const { return deck ? deck->order() : 1; }
};

/// Coordinate chart with a Riemannian metric y -> g(y).
///
/// Charts built with exact derivatives answer jet() analytically; otherwise jet() falls back
/// to central differences with step 1e-4 times the local coordinate scale.
class MetricChart {
public:
    /// Returns the jet up to the requested order (<= 2). Must throw DomainError outside the domain.
    using JetFunction = std::function<MetricJet(const Vec&, int)>;

    MetricChart(int dimension, ChartDomain domain, JetFunction fn, bool exact, std::string label);

    int dimension() const { return dim_; }
    const ChartDomain& domain() const { return domain_; }
    bool exact_derivatives() const { return exact_; }
    const std::string& label() const { return label_; }

    Mat metric(const Vec& y) const;
    MetricJet jet(const Vec& y, int order) const;
    MetricJet finite_difference_jet(const Vec& y, int order, double h) const;
    double default_step(const Vec& y) const;

    MetricChart with_domain(ChartDomain d) const;
    MetricChart with_label(std::string l) const;

private:
    void check(const Vec& y) const;

    int dim_;
    ChartDomain domain_;
    JetFunction fn_;
    bool exact_;
    std::string label_;
};

/// Scalar field with derivatives, used as a conformal factor.
struct ScalarField {
    std::function<ScalarJet(const Vec&, int)> eval;
    std::string label;
};

MetricChart flat_metric(int n);
MetricChart round_sphere_chart(int n, double radius);
MetricChart eguchi_hanson(double a);
MetricChart quotient_annulus(const MetricChart& base, const FiniteRotationGroup& group, double inner = 0.0);

/// g = alpha(s) I + sum_m beta_m(s) (M_m y)(M_m y)^T with s = |y|^2. Each radial profile returns
/// (f, f', f'') with derivatives taken in s.
using RadialProfile = std::function<std::array<double, 3>(double)>;
MetricChart radial_quadratic_chart(int n, RadialProfile alpha, std::vector<std::pair<RadialProfile, Mat>> terms,
                                   ChartDomain domain, std::string label);

/// g = I + |y|^(-tau) C on |y| > inner (C symmetric, small enough to stay positive definite).
MetricChart power_decay_chart(const Mat& c, double tau, double inner);

/// Conformal factor |y|^2, |y|^-2 and (1 + |y|^2)/2.
ScalarField rho_squared_factor(int n);
ScalarField inverse_rho_squared_factor(int n);
ScalarField sphere_factor(int n);
ScalarField constant_factor(int n, double c);

/// u^-2 g, derivatives by the product rule.
MetricChart conformal_rescale(const MetricChart& g, const ScalarField& u);

/// Complex structure used for the Hopf direction of the Eguchi-Hanson metric.
Eigen::Matrix4d eguchi_hanson_complex_structure();

/// Metric spec: flat:n, sphere:n:R, eguchi-hanson:a, quotient:<base>:<group>, rescale:<base>:<factor>,
/// invert:<base>:<R>.
MetricChart parse_metric_spec(const std::string& spec);

}  // namespace tale
