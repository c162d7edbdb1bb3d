#include "tale/metric.hpp"

#include "tale/errors.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace tale {

ScalarJet ScalarJet::compose(double f, double df, double ddf) const
{
    ScalarJet r;
    r.value = f;
    if (grad.size() > 0) r.grad = df * grad;
    if (hess.size() > 0) r.hess = ddf * grad * grad.transpose() + df * hess;
    return r;
}

ScalarJet operator*(const ScalarJet& a, const ScalarJet& b)
{
    ScalarJet r;
    r.value = a.value * b.value;
    if (a.grad.size() > 0 && b.grad.size() > 0) r.grad = a.value * b.grad + b.value * a.grad;
    if (a.hess.size() > 0 && b.hess.size() > 0)
        r.hess = a.value * b.hess + b.value * a.hess + a.grad * b.grad.transpose() + b.grad * a.grad.transpose();
    return r;
}

MetricJet MetricJet::zero(int n, int order)
{
    MetricJet j;
    j.order = order;
    j.g = Mat::Zero(n, n);
    if (order >= 1) j.d.assign(static_cast<size_t>(n), Mat::Zero(n, n));
    if (order >= 2) j.dd.assign(static_cast<size_t>(n * n), Mat::Zero(n, n));
    return j;
}

MetricJet operator*(const ScalarJet& s, const MetricJet& a)
{
    const int n = a.dimension();
    MetricJet r = MetricJet::zero(n, a.order);
    r.g = s.value * a.g;
    for (int k = 0; k < n && a.order >= 1; ++k) r.d[k] = s.grad[k] * a.g + s.value * a.d[k];
    for (int k = 0; k < n && a.order >= 2; ++k)
        for (int l = 0; l < n; ++l)
            r.second(k, l) = s.hess(k, l) * a.g + s.grad[k] * a.d[l] + s.grad[l] * a.d[k] + s.value * a.second(k, l);
    return r;
}

MetricJet jet_product(const MetricJet& a, const MetricJet& b)
{
    const int n = a.dimension();
    const int order = std::min(a.order, b.order);
    MetricJet r = MetricJet::zero(n, order);
    r.g = a.g * b.g;
    for (int k = 0; k < n && order >= 1; ++k) r.d[k] = a.d[k] * b.g + a.g * b.d[k];
    for (int k = 0; k < n && order >= 2; ++k)
        for (int l = 0; l < n; ++l)
            r.second(k, l) = a.second(k, l) * b.g + a.d[k] * b.d[l] + a.d[l] * b.d[k] + a.g * b.second(k, l);
    return r;
}

MetricJet jet_sum(const MetricJet& a, const MetricJet& b)
{
    const int order = std::min(a.order, b.order);
    MetricJet r = MetricJet::zero(a.dimension(), order);
    r.g = a.g + b.g;
    for (size_t k = 0; k < r.d.size(); ++k) r.d[k] = a.d[k] + b.d[k];
    for (size_t k = 0; k < r.dd.size(); ++k) r.dd[k] = a.dd[k] + b.dd[k];
    return r;
}

bool ChartDomain::contains(const Vec& y) const
{
    if (!y.allFinite()) return false;
    const double r = y.norm();
    switch (kind) {
    case DomainKind::everywhere: return true;
    case DomainKind::exterior: return r > inner && r < outer;
    case DomainKind::punctured_ball: return r > 0.0 && r < outer;
    }
    return false;
}

MetricChart::MetricChart(int dimension, ChartDomain domain, JetFunction fn, bool exact, std::string label)
    : dim_(dimension), domain_(std::move(domain)), fn_(std::move(fn)), exact_(exact), label_(std::move(label))
{
}

void MetricChart::check(const Vec& y) const
{
    if (y.size() != dim_) throw DomainError("point has the wrong dimension for chart " + label_);
    if (!domain_.contains(y)) {
        std::ostringstream os;
        os << "point with |y| = " << y.norm() << " lies outside the domain of " << label_;
        throw DomainError(os.str());
    }
}

Mat MetricChart::metric(const Vec& y) const
{
    check(y);
    return fn_(y, 0).g;
}

double MetricChart::default_step(const Vec& y) const
{
    const double r = y.norm();
    double scale = std::max(r, 1e-2);
    if (domain_.kind == DomainKind::exterior) scale = std::min(scale, r - domain_.inner);
    if (domain_.kind == DomainKind::punctured_ball) scale = std::min({scale, r, domain_.outer - r});
    return 1e-4 * scale;
}

MetricJet MetricChart::jet(const Vec& y, int order) const
{
    check(y);
    if (order == 0 || exact_) return fn_(y, order);
    return finite_difference_jet(y, order, default_step(y));
}

MetricJet MetricChart::finite_difference_jet(const Vec& y, int order, double h) const
{
    check(y);
    const int n = dim_;
    MetricJet j = MetricJet::zero(n, order);
    j.g = fn_(y, 0).g;
    auto at = [&](const Vec& p) { return metric(p); };
    for (int k = 0; k < n && order >= 1; ++k) {
        Vec e = Vec::Zero(n);
        e[k] = h;
        j.d[k] = (at(y + e) - at(y - e)) / (2 * h);
    }
    if (order >= 2) {
        // Larger step for second differences balances truncation against rounding.
        const double h2 = 20 * h;
        for (int k = 0; k < n; ++k) {
            Vec ek = Vec::Zero(n);
            ek[k] = h2;
            j.second(k, k) = (at(y + ek) - 2 * j.g + at(y - ek)) / (h2 * h2);
            for (int l = k + 1; l < n; ++l) {
                Vec el = Vec::Zero(n);
                el[l] = h2;
                j.second(k, l) = (at(y + ek + el) - at(y + ek - el) - at(y - ek + el) + at(y - ek - el)) / (4 * h2 * h2);
                j.second(l, k) = j.second(k, l);
            }
        }
    }
    return j;
}

MetricChart MetricChart::with_domain(ChartDomain d) const
{
    MetricChart c = *this;
    c.domain_ = std::move(d);
    return c;
}

MetricChart MetricChart::with_label(std::string l) const
{
    MetricChart c = *this;
    c.label_ = std::move(l);
    return c;
}

namespace {

ScalarJet radius_squared_jet(const Vec& y)
{
    const auto n = y.size();
    return {y.squaredNorm(), 2.0 * y, 2.0 * Mat::Identity(n, n)};
}

}  // namespace

MetricChart radial_quadratic_chart(int n, RadialProfile alpha, std::vector<std::pair<RadialProfile, Mat>> terms,
                                   ChartDomain domain, std::string label)
{
    auto fn = [n, alpha, terms](const Vec& y, int order) {
        const ScalarJet s = radius_squared_jet(y);
        const auto a = alpha(s.value);
        const ScalarJet aj = s.compose(a[0], a[1], a[2]);
        MetricJet j = MetricJet::zero(n, order);
        const Mat id = Mat::Identity(n, n);
        j.g = aj.value * id;
        for (int k = 0; k < n && order >= 1; ++k) j.d[k] = aj.grad[k] * id;
        for (int k = 0; k < n && order >= 2; ++k)
            for (int l = 0; l < n; ++l) j.second(k, l) = aj.hess(k, l) * id;

        for (const auto& [profile, m] : terms) {
            const auto b = profile(s.value);
            const ScalarJet bj = s.compose(b[0], b[1], b[2]);
            const Vec v = m * y;
            const Mat vv = v * v.transpose();
            j.g += bj.value * vv;
            if (order < 1) continue;
            for (int k = 0; k < n; ++k) {
                const Vec ck = m.col(k);
                const Mat sym_k = ck * v.transpose() + v * ck.transpose();
                j.d[k] += bj.grad[k] * vv + bj.value * sym_k;
                if (order < 2) continue;
                for (int l = 0; l < n; ++l) {
                    const Vec cl = m.col(l);
                    const Mat sym_l = cl * v.transpose() + v * cl.transpose();
                    j.second(k, l) += bj.hess(k, l) * vv + bj.grad[k] * sym_l + bj.grad[l] * sym_k +
                                      bj.value * (ck * cl.transpose() + cl * ck.transpose());
                }
            }
        }
        return j;
    };
    return MetricChart(n, std::move(domain), fn, true, std::move(label));
}

MetricChart flat_metric(int n)
{
    if (n < 1) throw DomainError("dimension must be positive");
    auto fn = [n](const Vec&, int order) {
        MetricJet j = MetricJet::zero(n, order);
        j.g.setIdentity();
        return j;
    };
    return MetricChart(n, ChartDomain{}, fn, true, "flat:" + std::to_string(n));
}

MetricChart round_sphere_chart(int n, double radius)
{
    if (!(radius > 0)) throw DomainError("sphere radius must be positive");
    const double r2 = radius * radius;
    const double r4 = r2 * r2;
    RadialProfile alpha = [r2, r4](double s) -> std::array<double, 3> {
        const double q = r2 + s;
        return {4 * r4 / (q * q), -8 * r4 / (q * q * q), 24 * r4 / (q * q * q * q)};
    };
    std::ostringstream label;
    label << "sphere:" << n << ":" << radius;
    return radial_quadratic_chart(n, alpha, {}, ChartDomain{}, label.str());
}

Eigen::Matrix4d eguchi_hanson_complex_structure()
{
    Eigen::Matrix4d j = Eigen::Matrix4d::Zero();
    j(0, 1) = -1;
    j(1, 0) = 1;
    j(2, 3) = -1;
    j(3, 2) = 1;
    return j;
}

MetricChart eguchi_hanson(double a)
{
    if (!(a > 0)) throw DomainError("bolt parameter must be positive");
    const double a4 = a * a * a * a;
    RadialProfile one = [](double) -> std::array<double, 3> { return {1.0, 0.0, 0.0}; };
    // Radial direction: a^4 / (s (s^2 - a^4)).
    RadialProfile radial = [a4](double s) -> std::array<double, 3> {
        const double d = s * s * s - a4 * s;
        const double dd = 3 * s * s - a4;
        return {a4 / d, -a4 * dd / (d * d), a4 * (2 * dd * dd / (d * d * d) - 6 * s / (d * d))};
    };
    // Hopf direction: -a^4 / s^3.
    RadialProfile hopf = [a4](double s) -> std::array<double, 3> {
        return {-a4 / (s * s * s), 3 * a4 / (s * s * s * s), -12 * a4 / (s * s * s * s * s)};
    };
    ChartDomain dom;
    dom.kind = DomainKind::exterior;
    dom.inner = a;
    dom.deck = std::make_shared<const FiniteRotationGroup>(make_cyclic_subgroup(4, 2, 1, 1));
    std::ostringstream label;
    label << "eguchi-hanson:" << a;
    return radial_quadratic_chart(4, one,
                                  {{radial, Mat::Identity(4, 4)}, {hopf, Mat(eguchi_hanson_complex_structure())}},
                                  dom, label.str());
}

MetricChart quotient_annulus(const MetricChart& base, const FiniteRotationGroup& group, double inner)
{
    const int n = base.dimension();
    if (group.dimension() != n) throw DomainError("deck group dimension does not match the chart");
    ChartDomain dom = base.domain();
    if (inner > 0) {
        dom.kind = DomainKind::exterior;
        dom.inner = std::max(dom.inner, inner);
    }
    std::mt19937_64 rng(0x5EED);
    std::normal_distribution<double> nd;
    for (int t = 0; t < 16; ++t) {
        Vec y(n);
        for (int i = 0; i < n; ++i) y[i] = nd(rng);
        y *= (dom.inner + 0.5 + t * 0.25) / y.norm();
        if (!dom.contains(y)) continue;
        const Mat gy = base.metric(y);
        for (const Mat& m : group.elements()) {
            const Mat pulled = m.transpose() * base.metric(m * y) * m;
            if ((pulled - gy).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, gy.cwiseAbs().maxCoeff()))
                throw DomainError("group does not act by isometries of " + base.label());
        }
    }
    dom.deck = std::make_shared<const FiniteRotationGroup>(group);
    return base.with_domain(dom).with_label("quotient:" + base.label() + ":" + group.label);
}

MetricChart power_decay_chart(const Mat& c, double tau, double inner)
{
    const int n = static_cast<int>(c.rows());
    if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-14) throw DomainError("perturbation must be symmetric");
    auto fn = [n, c, tau](const Vec& y, int order) {
        const ScalarJet s = radius_squared_jet(y);
        const double p = -tau / 2;
        const double f = std::pow(s.value, p);
        const ScalarJet fj = s.compose(f, p * f / s.value, p * (p - 1) * f / (s.value * s.value));
        MetricJet j = MetricJet::zero(n, order);
        j.g = Mat::Identity(n, n) + fj.value * c;
        for (int k = 0; k < n && order >= 1; ++k) j.d[k] = fj.grad[k] * c;
        for (int k = 0; k < n && order >= 2; ++k)
            for (int l = 0; l < n; ++l) j.second(k, l) = fj.hess(k, l) * c;
        return j;
    };
    ChartDomain dom;
    dom.kind = DomainKind::exterior;
    dom.inner = inner;
    std::ostringstream label;
    label << "power-decay:" << tau;
    return MetricChart(n, dom, fn, true, label.str());
}

ScalarField rho_squared_factor(int)
{
    return {[](const Vec& y, int) { return radius_squared_jet(y); }, "rho2"};
}

ScalarField inverse_rho_squared_factor(int)
{
    return {[](const Vec& y, int) {
                const ScalarJet s = radius_squared_jet(y);
                return s.compose(1 / s.value, -1 / (s.value * s.value), 2 / (s.value * s.value * s.value));
            },
            "inv-rho2"};
}

ScalarField sphere_factor(int)
{
    return {[](const Vec& y, int) {
                const ScalarJet s = radius_squared_jet(y);
                return s.compose(0.5 * (1 + s.value), 0.5, 0.0);
            },
            "sphere-factor"};
}

ScalarField constant_factor(int n, double c)
{
    std::ostringstream label;
    label << "const-" << c;
    return {[n, c](const Vec&, int) { return ScalarJet::constant(n, c); }, label.str()};
}

MetricChart conformal_rescale(const MetricChart& g, const ScalarField& u)
{
    auto fn = [g, u](const Vec& y, int order) {
        const MetricJet base = g.jet(y, order);
        const ScalarJet uj = u.eval(y, order);
        if (!(uj.value > 0)) throw DomainError("degenerate conformal factor (u <= 0)");
        const double v = uj.value;
        ScalarJet c = uj;
        if (c.grad.size() == 0) {
            c.grad = Vec::Zero(g.dimension());
            c.hess = Mat::Zero(g.dimension(), g.dimension());
        }
        c = c.compose(1 / (v * v), -2 / (v * v * v), 6 / (v * v * v * v));
        return c * base;
    };
    return MetricChart(g.dimension(), g.domain(), fn, g.exact_derivatives(),
                       "rescale:" + g.label() + ":" + u.label);
}

}  // namespace tale
