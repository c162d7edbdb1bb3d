#include "tale/twistor.hpp"

#include "tale/conformal.hpp"
#include "tale/errors.hpp"
#include "tale/sampling.hpp"

#include <cmath>

namespace tale {

SpinorField flat_twistor_field(const CliffordRep& rep, const CVec& phi0, const CVec& psi0)
{
    if (phi0.size() != rep.spinor_dim || psi0.size() != rep.spinor_dim)
        throw DomainError("spinor has the wrong length for this Clifford module");
    return [rep, phi0, psi0](const Vec& x) -> CVec { return phi0 - (1.0 / rep.n) * (rep.clifford(x) * psi0); };
}

namespace {

double local_step(const FrameField& frame, const Vec& p, double h)
{
    return h > 0 ? h : 10.0 * frame.chart().default_step(p);
}

CVec partial(const SpinorField& f, const Vec& p, int k, double h)
{
    Vec e = Vec::Zero(p.size());
    e[k] = h;
    return (-f(p + 2 * e) + 8.0 * f(p + e) - 8.0 * f(p - e) + f(p - 2 * e)) / (12.0 * h);
}

}  // namespace

CovariantDerivatives covariant_derivatives(const CliffordRep& rep, const FrameField& frame, const SpinorField& field,
                                           const Vec& p, double h)
{
    const int n = rep.n;
    h = local_step(frame, p, h);
    const FramePoint fp = frame.at(p);
    const CVec phi = field(p);
    std::vector<CVec> coord;
    for (int k = 0; k < n; ++k) coord.push_back(partial(field, p, k, h) + rep.spin_lie(fp.omega[k]) * phi);
    CovariantDerivatives out;
    out.dirac = CVec::Zero(rep.spinor_dim);
    for (int a = 0; a < n; ++a) {
        CVec v = CVec::Zero(rep.spinor_dim);
        for (int k = 0; k < n; ++k) v += fp.E(k, a) * coord[k];
        out.dirac += rep.gamma[a] * v;
        out.along_frame.push_back(v);
    }
    return out;
}

SpinorField dirac_field(const CliffordRep& rep, const FrameField& frame, const SpinorField& field, double h)
{
    return [rep, frame, field, h](const Vec& p) -> CVec { return covariant_derivatives(rep, frame, field, p, h).dirac; };
}

CVec twistor_residual(const CliffordRep& rep, const FrameField& frame, const SpinorField& field, const Vec& p,
                      const Vec& x_frame, double h)
{
    const auto cd = covariant_derivatives(rep, frame, field, p, h);
    CVec r = (1.0 / rep.n) * (rep.clifford(x_frame) * cd.dirac);
    for (int a = 0; a < rep.n; ++a) r += x_frame[a] * cd.along_frame[a];
    return r;
}

CVec dirac_derivative_check(const CliffordRep& rep, const FrameField& frame, const SpinorField& field, const Vec& p,
                            const Vec& x_frame, double h)
{
    const double inner = local_step(frame, p, h);
    const SpinorField d = dirac_field(rep, frame, field, inner);
    const auto cd = covariant_derivatives(rep, frame, d, p, 10.0 * inner);
    CVec lhs = CVec::Zero(rep.spinor_dim);
    for (int a = 0; a < rep.n; ++a) lhs += x_frame[a] * cd.along_frame[a];
    const Mat L = schouten_endomorphism(frame.chart(), frame, p);
    return lhs - (0.5 * rep.n) * (rep.clifford(L * x_frame) * field(p));
}

SpinorField conformal_twistor_transport(const SpinorField& field, std::function<double(const Vec&)> u)
{
    return [field, u](const Vec& y) -> CVec {
        const double v = u(y);
        if (!(v > 0)) throw DomainError("conformal factor must be positive");
        return std::sqrt(v) * field(y);
    };
}

ZeroSearchResult twistor_zero_locus(const CliffordRep& rep, const SpinorField& field, const SpinorField& dirac,
                                    const Vec& lo, const Vec& hi, int seeds_per_axis)
{
    const int n = rep.n;
    if (lo.size() != n || hi.size() != n) throw DomainError("search box has the wrong dimension");
    const int d = rep.spinor_dim;
    auto residual = [&](const Vec& x) {
        const CVec f = field(x);
        Vec r(2 * d);
        r << f.real(), f.imag();
        return r;
    };
    const double scale = (hi - lo).norm();
    const double fd = 1e-6 * std::max(1.0, scale);

    ZeroSearchResult out;
    std::vector<int> idx(static_cast<size_t>(n), 0);
    const double total = std::pow(seeds_per_axis, n);
    for (long s = 0; s < static_cast<long>(total); ++s) {
        long rem = s;
        Vec x(n);
        for (int i = 0; i < n; ++i) {
            const int j = static_cast<int>(rem % seeds_per_axis);
            rem /= seeds_per_axis;
            x[i] = lo[i] + (hi[i] - lo[i]) * (j + 0.5) / seeds_per_axis;
        }
        ++out.seeds;
        Vec r = residual(x);
        double rn = r.norm();
        for (int it = 0; it < 40 && rn > 1e-13; ++it) {
            Mat J(2 * d, n);
            for (int k = 0; k < n; ++k) {
                Vec e = Vec::Zero(n);
                e[k] = fd;
                J.col(k) = (residual(x + e) - residual(x - e)) / (2 * fd);
            }
            const Vec step = J.completeOrthogonalDecomposition().solve(-r);
            if (step.norm() < 1e-15 * std::max(1.0, x.norm())) break;
            // Backtrack so |phi| decreases.
            double t = 1.0;
            Vec xn = x + step;
            Vec rn_vec = residual(xn);
            while (rn_vec.norm() > rn && t > 1e-4) {
                t *= 0.5;
                xn = x + t * step;
                rn_vec = residual(xn);
            }
            if (rn_vec.norm() >= rn) break;
            x = xn;
            r = rn_vec;
            rn = r.norm();
        }
        if (rn > 1e-9) continue;
        bool inside = true;
        for (int i = 0; i < n; ++i) inside = inside && x[i] >= lo[i] - 1e-9 && x[i] <= hi[i] + 1e-9;
        if (!inside) continue;
        bool seen = false;
        for (const Vec& z : out.zeros) seen = seen || (z - x).norm() < 1e-6;
        if (seen) continue;
        out.zeros.push_back(x);
    }
    for (const Vec& z : out.zeros) {
        CVec dphi;
        if (dirac) {
            dphi = dirac(z);
        } else {
            dphi = CVec::Zero(d);
            for (int k = 0; k < n; ++k) {
                Vec e = Vec::Zero(n);
                e[k] = 1e-4;
                dphi += rep.gamma[k] * ((field(z + e) - field(z - e)) / 2e-4);
            }
        }
        out.dirac_norms.push_back(dphi.norm());
        if (dphi.norm() < 1e-8) out.all_isolated = false;
    }
    return out;
}

double growth_exponent(const SpinorField& field, const Vec& p, const std::vector<double>& radii)
{
    if (radii.size() < 2) throw DomainError("growth fit needs at least two radii");
    const auto dirs = sphere_directions(static_cast<int>(p.size()), 64, kDefaultSeed);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (double r : radii) {
        double mean = 0;
        for (const Vec& d : dirs) mean += field(p + r * d).norm();
        mean /= static_cast<double>(dirs.size());
        const double lx = std::log(r), ly = std::log(mean);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double m = static_cast<double>(radii.size());
    return (sxy - sx * sy / m) / (sxx - sx * sx / m);
}

ExtensionResult extend_to_puncture(const CliffordRep& rep, const FrameField& frame, const Vec& puncture,
                                   const std::vector<std::pair<Vec, TwistorState>>& starts, double stop_radius,
                                   double tolerance, const TransportOptions& opt)
{
    if (starts.size() < 2) throw DomainError("path independence needs at least two incoming curves");
    ExtensionResult out;
    out.stop_radius = stop_radius;
    const int d = rep.spinor_dim;
    CVec sum = CVec::Zero(2 * d);
    for (const auto& [p, state] : starts) {
        const Vec dir = (p - puncture).normalized();
        const Vec near = puncture + 2 * stop_radius * dir, nearer = puncture + stop_radius * dir;
        const Curve c = Curve::segment(p, near);
        out.max_curve_length = std::max(out.max_curve_length, c.length_estimate + stop_radius);
        const TwistorState s2 = integrate_parallel_section(rep, frame, c, state, opt);
        const TwistorState s1 = integrate_parallel_section(rep, frame, Curve::segment(near, nearer), s2, opt);
        // The section is C^1 up to the puncture, so the endpoint values are linear in the remaining distance.
        const TwistorState end = TwistorState::from_stacked(2.0 * s1.stacked() - s2.stacked());
        out.per_curve.push_back(end);
        sum += end.stacked();
    }
    out.limit = TwistorState::from_stacked(sum / static_cast<double>(starts.size()));
    for (size_t i = 0; i < out.per_curve.size(); ++i)
        for (size_t j = i + 1; j < out.per_curve.size(); ++j)
            out.spread = std::max(out.spread, (out.per_curve[i].stacked() - out.per_curve[j].stacked()).norm());
    out.certified = out.spread <= tolerance;
    return out;
}

SpinorField parallel_field(const CliffordRep& rep, const FrameField& frame, const Vec& basepoint, const CVec& value,
                           const TransportOptions& opt)
{
    return [rep, frame, basepoint, value, opt](const Vec& y) -> CVec {
        if ((y - basepoint).norm() < 1e-14) return value;
        const Curve c = Curve::radial_then_angular(basepoint, y);
        TransportOptions o = opt;
        o.monitor = false;
        const auto res = integrate_parallel_section(rep, frame, c, CMat(value), false, o);
        if (!res.completed) throw DomainError("parallel transport path left the chart");
        return res.state.col(0);
    };
}

EHParallelResult parallel_spinor_on_EH(const FrameField& frame, double a, const Vec& basepoint, double loop_radius)
{
    const CliffordRep rep = build_clifford(4);
    EHParallelResult out;
    out.a = a;
    out.basis = parallel_spinors_from_loops(rep, frame, basepoint, plane_loops(basepoint, loop_radius));
    for (Eigen::Index i = 0; i < out.basis.basis.cols(); ++i)
        out.fields.push_back(parallel_field(rep, frame, basepoint, out.basis.basis.col(i)));
    out.chirality_plus_weight = (rep.proj_plus * out.basis.basis).norm();
    return out;
}

CompactifiedEH compactified_eguchi_hanson(double a, const TransportOptions& opt)
{
    CompactifiedEH out{a, 1.05 * a, flat_metric(4), flat_metric(4), {}, {}, {}};
    const MetricChart eh = eguchi_hanson(a);
    MetricChart gbar = pushforward_inverted_metric(eh, out.R);
    ChartDomain dom = gbar.domain();
    dom.added_point = "p_inf";
    out.gbar = gbar.with_domain(dom);
    out.gz = conformal_rescale(out.gbar, rho_squared_factor(4));
    const CliffordRep rep = build_clifford(4);
    const FrameField fz(out.gz);
    Vec z0 = Vec::Zero(4);
    z0[0] = 1.0 / (1.3 * a);
    out.basis = parallel_spinors_from_loops(rep, fz, z0, plane_loops(z0, 0.06 / a));
    if (out.basis.dimension < 1) throw CertificateError("no parallel spinor found on the compactified chart");
    out.phi = parallel_field(rep, fz, z0, out.basis.basis.col(0), opt);
    out.phibar = conformal_twistor_transport(out.phi, [](const Vec& z) { return z.squaredNorm(); });
    return out;
}

}  // namespace tale
