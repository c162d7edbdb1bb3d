#include "tale/spin_bundle.hpp"

#include "tale/curvature.hpp"
#include "tale/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace tale {

FrameField::FrameField(MetricChart g, std::vector<int> order) : g_(std::move(g)), order_(std::move(order))
{
    const int n = g_.dimension();
    if (order_.empty()) {
        order_.resize(static_cast<size_t>(n));
        std::iota(order_.begin(), order_.end(), 0);
    }
    std::vector<int> sorted = order_;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < n; ++i)
        if (static_cast<int>(sorted.size()) != n || sorted[static_cast<size_t>(i)] != i)
            throw DomainError("frame order must be a permutation of the coordinates");
}

namespace {

Mat permutation(const std::vector<int>& order)
{
    const auto n = static_cast<Eigen::Index>(order.size());
    Mat p = Mat::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) p(order[static_cast<size_t>(i)], i) = 1.0;
    return p;
}

}  // namespace

Mat FrameField::frame(const Vec& y) const
{
    const Mat P = permutation(order_);
    const Mat gp = P.transpose() * g_.metric(y) * P;
    Eigen::LLT<Mat> llt(gp);
    if (llt.info() != Eigen::Success) throw DomainError("metric is not positive definite at the frame point");
    const Mat L = llt.matrixL();
    return P * L.inverse().transpose();
}

FramePoint FrameField::from_jet(const MetricJet& jet) const
{
    const int n = jet.dimension();
    const Mat P = permutation(order_);
    const Mat gp = P.transpose() * jet.g * P;
    Eigen::LLT<Mat> llt(gp);
    if (llt.info() != Eigen::Success) throw DomainError("metric is not positive definite at the frame point");
    const Mat L = llt.matrixL();
    const Mat Linv = L.inverse();
    const Mat F = Linv.transpose();
    FramePoint fp;
    fp.E = P * F;
    const auto gamma = christoffel(jet);
    const Mat gE = jet.g * fp.E;
    for (int k = 0; k < n; ++k) {
        // d(L L^T) = dg gives dL = L Phi(L^-1 dg L^-T), Phi keeping the lower triangle and half the diagonal.
        Mat m = Linv * (P.transpose() * jet.d[static_cast<size_t>(k)] * P) * Linv.transpose();
        Mat phi = m.triangularView<Eigen::StrictlyLower>();
        phi.diagonal() = 0.5 * m.diagonal();
        const Mat dL = L * phi;
        const Mat dE = P * (-F * dL.transpose() * F);
        Mat gk(n, n);
        for (int mm = 0; mm < n; ++mm)
            for (int i = 0; i < n; ++i) gk(mm, i) = gamma[static_cast<size_t>(mm)](k, i);
        fp.omega.push_back(gE.transpose() * (dE + gk * fp.E));
    }
    return fp;
}

FramePoint FrameField::at(const Vec& y) const { return from_jet(g_.jet(y, 1)); }

Mat schouten_from_jet(const MetricJet& jet, const Mat& E)
{
    const int n = jet.dimension();
    if (n <= 2) throw DomainError("the Schouten tensor needs n >= 3");
    const CurvatureBundle cb = curvature_from_jet(jet);
    const Mat ric = E.transpose() * cb.ricci * E;
    return (cb.scalar / (2.0 * (n - 1)) * Mat::Identity(n, n) - ric) / (n - 2);
}

Mat schouten_endomorphism(const MetricChart& g, const FrameField& frame, const Vec& p)
{
    const MetricJet jet = g.jet(p, 2);
    return schouten_from_jet(jet, frame.from_jet(jet).E);
}

namespace {

Mat omega_along(const FramePoint& fp, const Vec& x_coord)
{
    Mat w = Mat::Zero(fp.E.rows(), fp.E.cols());
    for (Eigen::Index k = 0; k < x_coord.size(); ++k) w += x_coord[k] * fp.omega[static_cast<size_t>(k)];
    return w;
}

// A(X) with X given in coordinates.
CMat connection_matrix(const CliffordRep& rep, const FrameField& frame, const Vec& p, const Vec& x_coord, bool twistor)
{
    const MetricJet jet = frame.chart().jet(p, twistor ? 2 : 1);
    const FramePoint fp = frame.from_jet(jet);
    const CMat spin = rep.spin_lie(omega_along(fp, x_coord));
    if (!twistor) return spin;
    const int n = rep.n;
    const int d = rep.spinor_dim;
    const Vec x_frame = fp.E.transpose() * jet.g * x_coord;
    const Mat L = schouten_from_jet(jet, fp.E);
    CMat a = CMat::Zero(2 * d, 2 * d);
    a.topLeftCorner(d, d) = spin;
    a.bottomRightCorner(d, d) = spin;
    a.topRightCorner(d, d) = (1.0 / n) * rep.clifford(x_frame);
    a.bottomLeftCorner(d, d) = (-0.5 * n) * rep.clifford(L * x_frame);
    return a;
}

}  // namespace

CMat twistor_connection(const CliffordRep& rep, const FrameField& frame, const Vec& p, const Vec& x_frame)
{
    return connection_matrix(rep, frame, p, frame.frame(p) * x_frame, true);
}

CMat spin_connection(const CliffordRep& rep, const FrameField& frame, const Vec& p, const Vec& x_frame)
{
    return connection_matrix(rep, frame, p, frame.frame(p) * x_frame, false);
}

CVec TwistorState::stacked() const
{
    CVec v(phi.size() + psi.size());
    v << phi, psi;
    return v;
}

TwistorState TwistorState::from_stacked(const CVec& v)
{
    const auto d = v.size() / 2;
    return {v.head(d), v.tail(d)};
}

Curve Curve::segment(const Vec& a, const Vec& b)
{
    Curve c;
    c.point = [a, b](double t) -> Vec { return a + t * (b - a); };
    c.velocity = [a, b](double) -> Vec { return b - a; };
    c.length_estimate = (b - a).norm();
    return c;
}

Curve Curve::circle(const Vec& center, const Vec& u, const Vec& v, double radius)
{
    Curve c;
    c.point = [=](double t) -> Vec { return center + radius * (std::cos(t) * u + std::sin(t) * v); };
    c.velocity = [=](double t) -> Vec { return radius * (-std::sin(t) * u + std::cos(t) * v); };
    c.t1 = 2 * std::numbers::pi;
    c.length_estimate = 2 * std::numbers::pi * radius;
    return c;
}

Curve Curve::polyline(const std::vector<Vec>& pts)
{
    if (pts.size() < 2) throw DomainError("a path needs at least two points");
    Curve c;
    const double last = static_cast<double>(pts.size() - 1);
    auto segment_of = [pts, last](double t) {
        return static_cast<size_t>(std::clamp(std::floor(t), 0.0, last - 1));
    };
    c.point = [pts, segment_of](double t) -> Vec {
        const size_t i = segment_of(t);
        return pts[i] + (t - static_cast<double>(i)) * (pts[i + 1] - pts[i]);
    };
    c.velocity = [pts, segment_of](double t) -> Vec {
        const size_t i = segment_of(t);
        return pts[i + 1] - pts[i];
    };
    c.t1 = last;
    for (size_t i = 1; i + 1 < pts.size(); ++i) c.breaks.push_back(static_cast<double>(i));
    for (size_t i = 0; i + 1 < pts.size(); ++i) c.length_estimate += (pts[i + 1] - pts[i]).norm();
    return c;
}

Curve Curve::radial_then_angular(const Vec& p, const Vec& q)
{
    const double r0 = p.norm(), r1 = q.norm();
    if (r0 == 0.0 || r1 == 0.0) throw DomainError("radial paths need points away from the origin");
    const Vec ph = p / r0, qh = q / r1;
    const double cosang = std::clamp(ph.dot(qh), -1.0, 1.0);
    const double theta = std::acos(cosang);
    Vec w = qh - cosang * ph;
    if (w.norm() < 1e-12) {
        // q is (anti)parallel to p: turn through any orthogonal direction.
        Vec e = Vec::Zero(p.size());
        Eigen::Index i = 0;
        ph.cwiseAbs().minCoeff(&i);
        e[i] = 1.0;
        w = e - ph.dot(e) * ph;
    }
    w.normalize();
    Curve c;
    c.point = [=](double t) -> Vec {
        if (t <= 1.0) return (r0 + t * (r1 - r0)) * ph;
        const double a = (t - 1.0) * theta;
        return r1 * (std::cos(a) * ph + std::sin(a) * w);
    };
    c.velocity = [=](double t) -> Vec {
        if (t <= 1.0) return (r1 - r0) * ph;
        const double a = (t - 1.0) * theta;
        return r1 * theta * (-std::sin(a) * ph + std::cos(a) * w);
    };
    c.t1 = 2.0;
    c.breaks = {1.0};
    c.length_estimate = std::abs(r1 - r0) + r1 * theta;
    return c;
}

TransportResult integrate_parallel_section(const CliffordRep& rep, const FrameField& frame, const Curve& c,
                                           const CMat& initial, bool twistor, const TransportOptions& opt)
{
    const auto rows = initial.rows(), cols = initial.cols();
    const Eigen::Index expected = twistor ? 2 * rep.spinor_dim : rep.spinor_dim;
    if (rows != expected) throw DomainError("initial state has the wrong size for the connection");
    TransportResult res;
    double eps = 0.0;
    auto rhs = [&](double t, const CVec& s) -> CVec {
        const Vec p = c.point(t);
        if (!frame.chart().domain().contains(p)) throw DomainError("transport curve left the chart");
        const CMat a = connection_matrix(rep, frame, p, c.velocity(t), twistor);
        eps = std::max(eps, a.norm());
        const CMat S = Eigen::Map<const CMat>(s.data(), rows, cols);
        const CMat out = -a * S;
        return Eigen::Map<const CVec>(out.data(), out.size());
    };
    const double n0 = initial.norm();
    OdeOptions oo;
    oo.rtol = opt.rtol;
    oo.atol = opt.atol;
    double monitor_ratio = 0.0;
    auto observer = [&](double t, const CVec& s) {
        if (!opt.monitor || n0 == 0.0) return true;
        const double bound = std::exp(eps * (t - c.t0)) * n0;
        monitor_ratio = std::max(monitor_ratio, s.norm() / bound);
        if (s.norm() > bound * (1 + 1e-6)) throw CertificateError("transport norm exceeded the e^(eps t) bound");
        return true;
    };
    CVec state = Eigen::Map<const CVec>(initial.data(), initial.size());
    std::vector<double> knots{c.t0};
    for (double b : c.breaks)
        if (b > c.t0 && b < c.t1) knots.push_back(b);
    knots.push_back(c.t1);
    for (size_t i = 0; i + 1 < knots.size(); ++i) {
        const auto r = integrate_dopri(rhs, knots[i], knots[i + 1], state, oo, observer);
        state = r.y;
        if (r.status != OdeStatus::completed) {
            res.completed = false;
            break;
        }
    }
    res.state = Eigen::Map<const CMat>(state.data(), rows, cols);
    res.epsilon = eps;
    res.max_monitor_ratio = monitor_ratio;
    return res;
}

TwistorState integrate_parallel_section(const CliffordRep& rep, const FrameField& frame, const Curve& c,
                                        const TwistorState& initial, const TransportOptions& opt)
{
    const CVec s0 = initial.stacked();
    const auto res = integrate_parallel_section(rep, frame, c, CMat(s0), true, opt);
    if (!res.completed) throw DomainError("transport curve left the chart");
    return TwistorState::from_stacked(res.state.col(0));
}

CMat holonomy(const CliffordRep& rep, const FrameField& frame, const Curve& loop, bool twistor,
              const TransportOptions& opt)
{
    const Eigen::Index d = twistor ? 2 * rep.spinor_dim : rep.spinor_dim;
    const auto res = integrate_parallel_section(rep, frame, loop, CMat::Identity(d, d), twistor, opt);
    if (!res.completed) throw DomainError("holonomy loop left the chart");
    return res.state;
}

std::vector<Curve> plane_loops(const Vec& basepoint, double radius)
{
    const auto n = basepoint.size();
    std::vector<Curve> loops;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            Vec u = Vec::Zero(n), v = Vec::Zero(n);
            u[i] = 1;
            v[j] = 1;
            loops.push_back(Curve::circle(basepoint - radius * u, u, v, radius));
        }
    return loops;
}

ParallelSpinorBasis parallel_spinors_from_loops(const CliffordRep& rep, const FrameField& frame, const Vec& basepoint,
                                                const std::vector<Curve>& loops, double tol)
{
    ParallelSpinorBasis out;
    out.basepoint = basepoint;
    const int d = rep.spinor_dim;
    CMat stacked(static_cast<Eigen::Index>(loops.size()) * d, d);
    Eigen::Index row = 0;
    for (const Curve& loop : loops) {
        if ((loop.point(loop.t0) - basepoint).norm() > 1e-9 || (loop.point(loop.t1) - basepoint).norm() > 1e-9)
            throw DomainError("holonomy loops must start and end at the basepoint");
        CMat h = holonomy(rep, frame, loop, false);
        stacked.middleRows(row, d) = h - CMat::Identity(d, d);
        row += d;
        out.holonomies.push_back(std::move(h));
    }
    Eigen::JacobiSVD<CMat> svd(stacked, Eigen::ComputeFullV);
    const Eigen::VectorXd sv = svd.singularValues();
    for (Eigen::Index i = sv.size() - 1; i >= 0; --i) out.singular_values.push_back(sv[i]);
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] < tol) ++out.dimension;
    out.basis = svd.matrixV().rightCols(out.dimension);
    return out;
}

}  // namespace tale
