#pragma once

#include "tale/metric.hpp"

#include <memory>
#include <string>
#include <vector>

namespace tale {

/// z = y / |y|^2.
Vec invert_point(const Vec& y);

/// Derivative of the inversion at x: (I - 2 x x^T / |x|^2) / |x|^2. At x = z it is dy/dz.
Mat invert_jacobian(const Vec& x);

/// delta + h - 2 rho^2 (z (z^T h) + (h z) z^T) + 4 rho^4 z z^T (z^T h z), rho = 1/|z|.
Mat inverted_metric_value(const Mat& h, const Vec& z);

/// The metric rho^-4 g in inverted coordinates, on the punctured ball 0 < |z| < 1/R.
MetricChart pushforward_inverted_metric(const MetricChart& g, double R);

struct ALEDescriptor {
    double tau = 0.0;
    int mu = 0;
    double R = 1.0;
    std::shared_ptr<const FiniteRotationGroup> group;
};

struct SlopeFit {
    int k = 0;
    double slope = 0.0;
    double r2 = 0.0;
    std::vector<double> radii;
    std::vector<double> sup_norms;
};

struct ALEEstimate {
    ALEDescriptor descriptor;
    double tau_hat = 0.0;  // +infinity for a flat chart
    int mu_hat = 0;
    std::vector<SlopeFit> per_k;
    bool low_confidence = false;
    bool flat = false;
};

/// Geometric radii r0 ... r1 (count values).
std::vector<double> geometric_radii(double r0, double r1, int count);

/// Fits log sup|d^k (g - delta)| against log rho over 64 directions per radius, k <= kmax <= 3.
ALEEstimate estimate_ale_order(const MetricChart& g, const std::vector<double>& radii, int kmax);

/// Sup norm of the k-th derivatives of g - delta at |y| = radius (k <= 3).
double derivative_sup_norm(const MetricChart& g, double radius, int k, const std::vector<Vec>& directions);

struct RegularityOrder {
    int k = 0;
    std::vector<double> radii;
    std::vector<double> sup_norms;  // k-th divided differences of gbar - delta
    double slope = 0.0;
    bool bounded = false;     // does not grow towards the added point
    bool continuous = false;  // decays towards the added point
};

struct RegularityReport {
    std::vector<RegularityOrder> per_k;
    double decay_exponent = 0.0;  // fitted exponent of |gbar - delta| in |z|
    int tested_order = 0;         // floor(tau) - 1 bound under test
    int verdict_order = 0;        // largest m with C^m-consistent samples, m <= tested_order
    int first_failure = -1;       // first probed order whose derivatives do not converge, -1 if none
    bool extends = false;
    std::string added_point;
    int added_point_group_order = 1;
};

struct Compactification {
    MetricChart chart;
    RegularityReport report;
};

/// Probe of the compactified metric on dyadic shells |z| = 2^-j / R, j = jmin..jmax.
RegularityReport probe_regularity(const MetricChart& gbar, double tau, double R, int jmin = 3, int jmax = 8);

/// One-point compactification; requires mu >= tau - 1 >= 2 (or a flat end).
Compactification compactify(const MetricChart& g, const ALEDescriptor& desc);

}  // namespace tale
