#include "tale/conformal.hpp"

#include "tale/errors.hpp"
#include "tale/sampling.hpp"

#include <cmath>
#include <limits>

namespace tale {

Vec invert_point(const Vec& y)
{
    const double s = y.squaredNorm();
    if (s == 0.0) throw DomainError("inversion is undefined at the origin");
    return y / s;
}

Mat invert_jacobian(const Vec& x)
{
    const double s = x.squaredNorm();
    if (s == 0.0) throw DomainError("inversion is undefined at the origin");
    const auto n = x.size();
    return (Mat::Identity(n, n) - 2.0 * x * x.transpose() / s) / s;
}

Mat inverted_metric_value(const Mat& h, const Vec& z)
{
    const double s = z.squaredNorm();
    if (s == 0.0) throw DomainError("inverted metric is undefined at the origin");
    const double rho2 = 1.0 / s;
    const auto n = z.size();
    const Vec hz = h * z;
    const double zhz = z.dot(hz);
    return Mat::Identity(n, n) + h - 2.0 * rho2 * (z * hz.transpose() + hz * z.transpose()) +
           4.0 * rho2 * rho2 * zhz * (z * z.transpose());
}

MetricChart pushforward_inverted_metric(const MetricChart& g, double R)
{
    if (!(R > 0)) throw DomainError("inner radius must be positive");
    const int n = g.dimension();
    ChartDomain dom;
    if (g.domain().kind == DomainKind::punctured_ball) {
        // Inverting a punctured ball gives back an exterior region.
        dom.kind = DomainKind::exterior;
        dom.inner = R;
    } else {
        dom.kind = DomainKind::punctured_ball;
        dom.outer = 1.0 / R;
    }
    dom.deck = g.domain().deck;

    auto fn = [g, n](const Vec& z, int order) {
        const double s = z.squaredNorm();
        const Mat id = Mat::Identity(n, n);
        const ScalarJet q{1.0 / s, -2.0 * z / (s * s), 8.0 * z * z.transpose() / (s * s * s) - 2.0 * id / (s * s)};
        const Vec y = z * q.value;
        const MetricJet base = g.jet(y, order);
        const Mat h = base.g - id;
        MetricJet out = MetricJet::zero(n, order);
        out.g = inverted_metric_value(h, z);
        if (order == 0) return out;

        // h(y(z)) by the chain rule; Y(k, a) = dy_k / dz_a.
        const Mat Y = q.value * id + z * q.grad.transpose();
        MetricJet H = MetricJet::zero(n, order);
        H.g = h;
        for (int a = 0; a < n; ++a)
            for (int k = 0; k < n; ++k) H.d[a] += Y(k, a) * base.d[k];
        if (order >= 2) {
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    Mat acc = Mat::Zero(n, n);
                    for (int k = 0; k < n; ++k) {
                        for (int l = 0; l < n; ++l) acc += Y(k, a) * Y(l, b) * base.second(k, l);
                        const double ddy = (k == a ? q.grad[b] : 0.0) + (k == b ? q.grad[a] : 0.0) + z[k] * q.hess(a, b);
                        acc += ddy * base.d[k];
                    }
                    H.second(a, b) = acc;
                }
        }

        // P = I - 2 z z^T / |z|^2
        MetricJet zz = MetricJet::zero(n, order);
        zz.g = z * z.transpose();
        for (int k = 0; k < n; ++k) {
            const Vec e = id.col(k);
            zz.d[k] = e * z.transpose() + z * e.transpose();
            for (int l = 0; l < n && order >= 2; ++l) {
                const Vec f = id.col(l);
                zz.second(k, l) = e * f.transpose() + f * e.transpose();
            }
        }
        MetricJet P = q * zz;
        P.g = id - 2.0 * P.g;
        for (auto& m : P.d) m *= -2.0;
        for (auto& m : P.dd) m *= -2.0;

        const MetricJet php = jet_product(jet_product(P, H), P);
        out.d = php.d;
        out.dd = php.dd;
        return out;
    };
    return MetricChart(n, dom, fn, g.exact_derivatives(), "invert:" + g.label());
}

std::vector<double> geometric_radii(double r0, double r1, int count)
{
    if (!(r0 > 0) || !(r1 > r0) || count < 2) throw UsageError("radii need 0 < r0 < r1 and count >= 2");
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(r0 * std::pow(r1 / r0, static_cast<double>(i) / (count - 1)));
    return out;
}

namespace {

struct LineFit {
    double slope = 0.0;
    double r2 = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y)
{
    const double m = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double cxx = sxx - sx * sx / m, cxy = sxy - sx * sy / m, cyy = syy - sy * sy / m;
    LineFit f;
    f.slope = cxy / cxx;
    f.r2 = cyy > 0 ? cxy * cxy / (cxx * cyy) : 1.0;
    return f;
}

LineFit fit_loglog(const std::vector<double>& r, const std::vector<double>& v)
{
    std::vector<double> lx, ly;
    for (size_t i = 0; i < r.size(); ++i) {
        lx.push_back(std::log(r[i]));
        ly.push_back(std::log(std::max(v[i], 1e-300)));
    }
    return fit_line(lx, ly);
}

int effective_floor(double tau)
{
    // Fitted orders near an integer count as that integer.
    const double nearest = std::round(tau);
    return std::abs(tau - nearest) <= 0.3 ? static_cast<int>(nearest) : static_cast<int>(std::floor(tau));
}

}  // namespace

double derivative_sup_norm(const MetricChart& g, double radius, int k, const std::vector<Vec>& directions)
{
    const int n = g.dimension();
    double sup = 0.0;
    for (const Vec& d : directions) {
        const Vec y = radius * d;
        if (k == 0) {
            sup = std::max(sup, (g.metric(y) - Mat::Identity(n, n)).cwiseAbs().maxCoeff());
        } else if (k == 1) {
            const MetricJet j = g.jet(y, 1);
            for (const Mat& m : j.d) sup = std::max(sup, m.cwiseAbs().maxCoeff());
        } else if (k == 2) {
            const MetricJet j = g.jet(y, 2);
            for (const Mat& m : j.dd) sup = std::max(sup, m.cwiseAbs().maxCoeff());
        } else if (k == 3) {
            const double h = 1e-3 * radius;
            for (int m = 0; m < n; ++m) {
                Vec e = Vec::Zero(n);
                e[m] = h;
                const MetricJet jp = g.jet(y + e, 2);
                const MetricJet jm = g.jet(y - e, 2);
                for (size_t i = 0; i < jp.dd.size(); ++i)
                    sup = std::max(sup, ((jp.dd[i] - jm.dd[i]) / (2 * h)).cwiseAbs().maxCoeff());
            }
        } else {
            throw UnsupportedError("derivative orders above 3 are not sampled");
        }
    }
    return sup;
}

ALEEstimate estimate_ale_order(const MetricChart& g, const std::vector<double>& radii, int kmax)
{
    if (radii.size() < 4) throw DomainError("insufficient data: ALE fit needs at least 4 radii");
    if (kmax < 0 || kmax > 3) throw UnsupportedError("kmax must lie in 0..3");
    for (size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] > radii[i - 1])) throw DomainError("radii must be increasing");
    const auto dirs = sphere_directions(g.dimension(), 64, kDefaultSeed);

    ALEEstimate est;
    for (int k = 0; k <= kmax; ++k) {
        SlopeFit f;
        f.k = k;
        f.radii = radii;
        for (double r : radii) f.sup_norms.push_back(derivative_sup_norm(g, r, k, dirs));
        est.per_k.push_back(f);
    }
    const auto& base = est.per_k.front().sup_norms;
    const double biggest = *std::max_element(base.begin(), base.end());
    est.descriptor.group = g.domain().deck;
    est.descriptor.R = g.domain().kind == DomainKind::exterior ? g.domain().inner : radii.front();
    if (biggest < 1e-14) {
        est.flat = true;
        est.tau_hat = std::numeric_limits<double>::infinity();
        est.mu_hat = kmax;
    } else {
        for (auto& f : est.per_k) {
            const LineFit lf = fit_loglog(f.radii, f.sup_norms);
            f.slope = lf.slope;
            f.r2 = lf.r2;
        }
        est.tau_hat = -est.per_k.front().slope;
        est.mu_hat = 0;
        for (int k = 1; k <= kmax; ++k) {
            if (std::abs(est.per_k[k].slope + est.tau_hat + k) > 0.3) break;
            est.mu_hat = k;
        }
        for (size_t i = 1; i < base.size(); ++i)
            if (base[i] > base[i - 1]) est.low_confidence = true;
    }
    est.descriptor.tau = est.tau_hat;
    est.descriptor.mu = est.mu_hat;
    return est;
}

RegularityReport probe_regularity(const MetricChart& gbar, double tau, double R, int jmin, int jmax)
{
    const int n = gbar.dimension();
    const auto dirs = sphere_directions(n, 64, kDefaultSeed);
    RegularityReport rep;
    const bool flat = !std::isfinite(tau);
    rep.tested_order = flat ? 3 : effective_floor(tau) - 1;
    const int kmax = flat ? 3 : std::min(rep.tested_order + 1, 4);
    std::vector<double> radii;
    for (int j = jmin; j <= jmax; ++j) radii.push_back(std::ldexp(1.0, -j) / R);

    static const int binom[5][5] = {{1}, {1, 1}, {1, 2, 1}, {1, 3, 3, 1}, {1, 4, 6, 4, 1}};
    const Mat id = Mat::Identity(n, n);
    for (int k = 0; k <= kmax; ++k) {
        RegularityOrder ro;
        ro.k = k;
        ro.radii = radii;
        for (double r : radii) {
            double sup = 0.0;
            const double h = 0.1 * r;
            for (const Vec& d : dirs) {
                const Vec z = r * d;
                if (k == 0) {
                    sup = std::max(sup, (gbar.metric(z) - id).cwiseAbs().maxCoeff());
                    continue;
                }
                std::vector<Vec> steps;
                for (int i = 0; i < n; ++i) steps.push_back(id.col(i));
                steps.push_back(d);
                for (const Vec& e : steps) {
                    Mat acc = Mat::Zero(n, n);
                    for (int j = 0; j <= k; ++j) {
                        const double sign = ((k - j) % 2 == 0) ? 1.0 : -1.0;
                        acc += sign * binom[k][j] * (gbar.metric(z + (j - 0.5 * k) * h * e) - id);
                    }
                    sup = std::max(sup, acc.cwiseAbs().maxCoeff() / std::pow(h, k));
                }
            }
            ro.sup_norms.push_back(sup);
        }
        const double biggest = *std::max_element(ro.sup_norms.begin(), ro.sup_norms.end());
        if (biggest < 1e-10) {
            ro.slope = std::numeric_limits<double>::infinity();
            ro.bounded = ro.continuous = true;
        } else {
            ro.slope = fit_loglog(radii, ro.sup_norms).slope;
            ro.continuous = ro.slope > 0.5;
            ro.bounded = ro.slope > -0.5;
        }
        rep.per_k.push_back(ro);
    }
    rep.decay_exponent = rep.per_k.front().slope;
    rep.verdict_order = -1;
    for (const auto& ro : rep.per_k) {
        if (!ro.continuous) {
            rep.first_failure = ro.k;
            break;
        }
        if (ro.k <= rep.tested_order) rep.verdict_order = ro.k;
    }
    rep.extends = rep.verdict_order == rep.tested_order;
    return rep;
}

Compactification compactify(const MetricChart& g, const ALEDescriptor& desc)
{
    const bool flat = !std::isfinite(desc.tau);
    if (!flat) {
        const double slack = 0.3;
        if (desc.tau - 1 < 2 - slack)
            throw DomainError("compactification needs tau - 1 >= 2 (got tau = " + std::to_string(desc.tau) + ")");
        if (desc.mu < desc.tau - 1 - slack)
            throw DomainError("compactification needs mu >= tau - 1 (got mu = " + std::to_string(desc.mu) +
                              ", tau = " + std::to_string(desc.tau) + ")");
    }
    if (!(desc.R > 0)) throw DomainError("ALE inner radius must be positive");
    MetricChart chart = pushforward_inverted_metric(g, desc.R);
    ChartDomain dom = chart.domain();
    dom.deck = desc.group ? desc.group : g.domain().deck;
    dom.added_point = "p_inf";
    chart = chart.with_domain(dom);
    RegularityReport rep = probe_regularity(chart, desc.tau, desc.R);
    rep.added_point = dom.added_point;
    rep.added_point_group_order = dom.deck_order();
    return {chart, rep};
}

}  // namespace tale
