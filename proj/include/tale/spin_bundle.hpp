#pragma once

#include "tale/clifford.hpp"
#include "tale/metric.hpp"
#include "tale/ode.hpp"

#include <functional>
#include <string>
#include <vector>

namespace tale {

/// Orthonormal frame and its connection forms at one point.
struct FramePoint {
    Mat E;                     // columns e_a in coordinates, E^T g E = Id
    std::vector<Mat> omega;    // omega[k](a, b) = g(nabla_{d_k} e_b, e_a), skew
};

/// Gram-Schmidt frame of the coordinate basis, in the given column order.
class FrameField {
public:
    explicit FrameField(MetricChart g, std::vector<int> order = {});

    const MetricChart& chart() const { return g_; }
    const std::vector<int>& order() const { return order_; }
    Mat frame(const Vec& y) const;
    FramePoint at(const Vec& y) const;
    FramePoint from_jet(const MetricJet& jet) const;

private:
    MetricChart g_;
    std::vector<int> order_;
};

/// (1,1)-Schouten tensor in the orthonormal frame: (s / (2(n-1)) Id - Ric) / (n - 2).
Mat schouten_endomorphism(const MetricChart& g, const FrameField& frame, const Vec& p);
Mat schouten_from_jet(const MetricJet& jet, const Mat& E);

/// The connection part A(X) of nabla^E_X = X + A(X) on E = Sigma + Sigma, for X given in the frame:
/// [[rho(omega(X)), (1/n) X.], [-(n/2) L(X)., rho(omega(X))]].
CMat twistor_connection(const CliffordRep& rep, const FrameField& frame, const Vec& p, const Vec& x_frame);

/// Spin connection part rho(omega(X)) alone.
CMat spin_connection(const CliffordRep& rep, const FrameField& frame, const Vec& p, const Vec& x_frame);

struct TwistorState {
    CVec phi;
    CVec psi;

    CVec stacked() const;
    static TwistorState from_stacked(const CVec& v);
};

/// C^1 curve t in [t0, t1] -> chart.
struct Curve {
    std::function<Vec(double)> point;
    std::function<Vec(double)> velocity;
    double t0 = 0.0;
    double t1 = 1.0;
    double length_estimate = 0.0;  // coordinate length
    std::vector<double> breaks;    // parameters where the velocity may jump

    static Curve segment(const Vec& a, const Vec& b);
    static Curve circle(const Vec& center, const Vec& u, const Vec& v, double radius);
    /// Piecewise linear through points (parameter = segment index).
    static Curve polyline(const std::vector<Vec>& points);
    /// Radial segment from p to |q| p/|p|, then the great-circle arc to q.
    static Curve radial_then_angular(const Vec& p, const Vec& q);
};

struct TransportOptions {
    double rtol = 1e-10;
    double atol = 1e-13;
    bool monitor = true;
};

struct TransportResult {
    CMat state;               // columns are transported vectors
    bool completed = true;    // false: curve left the chart, state is partial
    double epsilon = 0.0;     // sampled sup of the connection-form norm
    double max_monitor_ratio = 0.0;  // max of |state(t)| / (e^{eps t} |state(0)|)
};

/// Solves state' = -A(c') state along the curve, A the twistor (or spin) connection form.
/// Norm monitor: throws CertificateError if |state(t)| exceeds e^{eps t} |state(0)| beyond tolerance.
TransportResult integrate_parallel_section(const CliffordRep& rep, const FrameField& frame, const Curve& c,
                                           const CMat& initial, bool twistor = true, const TransportOptions& opt = {});

TwistorState integrate_parallel_section(const CliffordRep& rep, const FrameField& frame, const Curve& c,
                                        const TwistorState& initial, const TransportOptions& opt = {});

/// Holonomy of the spin connection (or twistor connection) around closed curves.
CMat holonomy(const CliffordRep& rep, const FrameField& frame, const Curve& loop, bool twistor,
              const TransportOptions& opt = {});

struct ParallelSpinorBasis {
    Vec basepoint;
    std::vector<CMat> holonomies;
    std::vector<double> singular_values;  // of the stacked (H - Id), ascending
    CMat basis;                           // columns: fixed vectors at the basepoint
    int dimension = 0;
};

/// Joint fixed space of spin holonomy over the given loops through the basepoint.
ParallelSpinorBasis parallel_spinors_from_loops(const CliffordRep& rep, const FrameField& frame, const Vec& basepoint,
                                                const std::vector<Curve>& loops, double tol = 1e-6);

/// Small coordinate-plane loops through the basepoint: circles in planes (i, j) for i < j.
std::vector<Curve> plane_loops(const Vec& basepoint, double radius);

}  // namespace tale
