#include "tale/geodesic.hpp"

#include "tale/curvature.hpp"
#include "tale/errors.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace tale {

double metric_norm(const MetricChart& g, const Vec& p, const Vec& v) { return std::sqrt(v.dot(g.metric(p) * v)); }

GeodesicPath geodesic_shoot(const MetricChart& g, const Vec& p, const Vec& v, double T, const OdeOptions& opt)
{
    const int n = g.dimension();
    if (!g.domain().contains(p)) throw DomainError("geodesic base point outside the chart");
    auto rhs = [&](double, const Vec& s) {
        const Vec x = s.head(n);
        const Vec u = s.tail(n);
        if (!g.domain().contains(x)) throw DomainError("geodesic left the chart");
        const auto gamma = christoffel(g.jet(x, 1));
        Vec out(2 * n);
        out.head(n) = u;
        for (int k = 0; k < n; ++k) out[n + k] = -u.dot(gamma[k] * u);
        return out;
    };
    GeodesicPath path;
    Vec s0(2 * n);
    s0 << p, v;
    path.t.push_back(0.0);
    path.x.push_back(p);
    path.v.push_back(v);
    auto observer = [&](double t, const Vec& s) {
        path.t.push_back(t);
        path.x.push_back(s.head(n));
        path.v.push_back(s.tail(n));
        return true;
    };
    const auto res = integrate_dopri(rhs, 0.0, T, s0, opt, observer);
    path.exited = res.status != OdeStatus::completed;
    return path;
}

Vec exp_map(const MetricChart& g, const Vec& p, const Vec& v)
{
    const auto path = geodesic_shoot(g, p, v, 1.0);
    if (path.exited) throw DomainError("exponential map leaves the chart");
    return path.end();
}

DistanceEstimate distance_estimate(const MetricChart& g, const Vec& p, const Vec& q, int starts)
{
    const int n = g.dimension();
    OdeOptions opt;
    opt.rtol = 1e-9;
    DistanceEstimate best;
    best.distance = std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(0x5EED);
    std::normal_distribution<double> nd;
    const Vec chord = q - p;
    for (int s = 0; s < starts; ++s) {
        Vec v = chord;
        if (s > 0) {
            Vec noise(n);
            for (int i = 0; i < n; ++i) noise[i] = nd(rng);
            v += 0.3 * chord.norm() * noise / noise.norm();
        }
        bool ok = false;
        for (int it = 0; it < 30; ++it) {
            Vec end;
            try {
                end = exp_map(g, p, v);
            } catch (const DomainError&) {
                break;
            }
            const Vec r = end - q;
            if (r.norm() < 1e-10 * std::max(1.0, q.norm())) {
                ok = true;
                break;
            }
            Mat jac(n, n);
            const double h = 1e-6 * std::max(1.0, v.norm());
            bool jac_ok = true;
            for (int i = 0; i < n && jac_ok; ++i) {
                Vec dv = v;
                dv[i] += h;
                try {
                    jac.col(i) = (exp_map(g, p, dv) - end) / h;
                } catch (const DomainError&) {
                    jac_ok = false;
                }
            }
            if (!jac_ok) break;
            v -= jac.fullPivLu().solve(r);
        }
        if (!ok) continue;
        const double d = metric_norm(g, p, v);
        if (d < best.distance) {
            best.distance = d;
            best.initial_velocity = v;
            best.converged = true;
        }
    }
    if (!best.converged) throw DomainError("no shooting solution reached the target point");
    return best;
}

}  // namespace tale
