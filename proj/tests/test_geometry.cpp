#include "tale/curvature.hpp"
#include "tale/errors.hpp"
#include "tale/geodesic.hpp"
#include "tale/metric.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace tale;

namespace {

Vec random_point(std::mt19937_64& rng, int n, double rmin, double rmax)
{
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(rmin, rmax);
    Vec y(n);
    for (int i = 0; i < n; ++i) y[i] = nd(rng);
    return y * (ud(rng) / y.norm());
}

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

// Eguchi-Hanson in Euler-angle form, summed from the left-invariant forms directly.
Mat eguchi_hanson_oracle(const Vec& x, double a)
{
    const double r2 = x.squaredNorm();
    const double r = std::sqrt(r2);
    const double f = 1 - std::pow(a / r, 4);
    // sigma_3 along J x, sigma_1, sigma_2 along the two remaining complex structures.
    Mat j1 = Mat(eguchi_hanson_complex_structure());
    Mat j2 = Mat::Zero(4, 4);
    j2(0, 2) = -1; j2(2, 0) = 1; j2(1, 3) = 1; j2(3, 1) = -1;
    Mat j3 = j1 * j2;
    const Vec dr = x / r;
    const Vec s3 = 2 * (j1 * x) / r2;
    const Vec s1 = 2 * (j2 * x) / r2;
    const Vec s2 = 2 * (j3 * x) / r2;
    return dr * dr.transpose() / f + (r2 / 4) * f * s3 * s3.transpose() +
           (r2 / 4) * (s1 * s1.transpose() + s2 * s2.transpose());
}

}  // namespace

TEST_CASE("simple charts")
{
    const auto flat = flat_metric(4);
    CHECK(max_abs(flat.metric(Vec::Random(4)) - Mat::Identity(4, 4)) == 0.0);
    const auto s4 = round_sphere_chart(4, 1.0);
    CHECK(max_abs(s4.metric(Vec::Zero(4)) - 4 * Mat::Identity(4, 4)) < 1e-15);
    const auto q = quotient_annulus(flat, make_cyclic_subgroup(4, 2, 1, 1));
    CHECK(q.domain().deck_order() == 2);
    CHECK(max_abs(q.metric(Vec::Ones(4)) - Mat::Identity(4, 4)) == 0.0);
    CHECK_THROWS_AS(eguchi_hanson(1.0).metric(Vec::Constant(4, 0.4)), DomainError);
}

TEST_CASE("Eguchi-Hanson chart matches the left-invariant form expression")
{
    std::mt19937_64 rng(5);
    const double a = 1.3;
    const auto eh = eguchi_hanson(a);
    for (int t = 0; t < 50; ++t) {
        const Vec y = random_point(rng, 4, 1.05 * a, 8 * a);
        const Mat g = eh.metric(y);
        CHECK(max_abs(g - eguchi_hanson_oracle(y, a)) < 1e-12 * std::max(1.0, max_abs(g)));
        CHECK(max_abs(g - g.transpose()) < 1e-12);
        CHECK(Eigen::LLT<Mat>(g).info() == Eigen::Success);
    }
    // Invariant under -1 and under the U(2) action commuting with J.
    const Vec y = random_point(rng, 4, 2, 3);
    CHECK(max_abs(eh.metric(-y) - eh.metric(y)) < 1e-14);
}

TEST_CASE("exact derivatives agree with finite differences at second order")
{
    std::mt19937_64 rng(17);
    Mat c = Mat::Random(4, 4);
    c = (0.1 * (c + c.transpose())).eval();
    const std::vector<MetricChart> charts{round_sphere_chart(4, 1.3), eguchi_hanson(1.0), power_decay_chart(c, 3.0, 1.0),
                                          conformal_rescale(eguchi_hanson(1.0), rho_squared_factor(4)),
                                          conformal_rescale(flat_metric(4), sphere_factor(4))};
    for (const auto& chart : charts) {
        CAPTURE(chart.label());
        for (int t = 0; t < 5; ++t) {
            const Vec y = random_point(rng, 4, 1.5, 3.0);
            const MetricJet exact = chart.jet(y, 2);
            double e1 = 0, e2 = 0;
            for (double h : {1e-3, 5e-4}) {
                const MetricJet fd = chart.finite_difference_jet(y, 1, h);
                double err = 0;
                for (int k = 0; k < 4; ++k) err = std::max(err, max_abs(fd.d[k] - exact.d[k]));
                (h == 1e-3 ? e1 : e2) = err;
            }
            // Halving h divides the error by four (Richardson).
            CHECK(e2 < 0.3 * e1 + 1e-11);
            const MetricJet fd2 = chart.finite_difference_jet(y, 2, 5e-5);
            for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l)
                    CHECK(max_abs(fd2.second(k, l) - exact.second(k, l)) < 1e-5 * std::max(1.0, max_abs(exact.second(k, l))));
        }
    }
}

TEST_CASE("conformal rescale")
{
    std::mt19937_64 rng(23);
    const auto flat = flat_metric(4);
    const auto same = conformal_rescale(flat, constant_factor(4, 1.0));
    const auto sphere = conformal_rescale(flat, sphere_factor(4));
    const auto s4 = round_sphere_chart(4, 1.0);
    for (int t = 0; t < 20; ++t) {
        const Vec y = random_point(rng, 4, 0.0, 3.0);
        CHECK(max_abs(same.metric(y) - flat.metric(y)) == 0.0);
        CHECK(max_abs(sphere.metric(y) - s4.metric(y)) < 1e-14);
        const auto c1 = curvature_at(sphere, y);
        const auto c2 = curvature_at(s4, y);
        CHECK(max_abs(c1.ricci - c2.ricci) < 1e-5);
        CHECK(std::abs(c1.scalar - 12.0) < 1e-5);
    }
    const auto bad = conformal_rescale(flat, constant_factor(4, -1.0));
    CHECK_THROWS_AS(bad.metric(Vec::Ones(4)), DomainError);
}

TEST_CASE("quotient rejects non-isometric deck groups")
{
    Mat c = Mat::Zero(4, 4);
    c(0, 0) = 0.3;
    const auto chart = power_decay_chart(c, 2.0, 0.5);
    CHECK_THROWS_AS(quotient_annulus(chart, make_cyclic_subgroup(4, 4, 1, 1)), DomainError);
    const auto eh = quotient_annulus(eguchi_hanson(1.0), make_cyclic_subgroup(4, 2, 1, 1));
    std::mt19937_64 rng(1);
    for (int t = 0; t < 10; ++t) {
        const Vec y = random_point(rng, 4, 1.2, 4.0);
        for (const Mat& m : eh.domain().deck->elements())
            CHECK(max_abs(m.transpose() * eh.metric(m * y) * m - eh.metric(y)) < 1e-10);
    }
}

TEST_CASE("curvature of model spaces")
{
    std::mt19937_64 rng(31);
    const auto flat = flat_metric(4);
    const auto c0 = curvature_at(flat, Vec::Ones(4));
    CHECK(c0.riemann_norm() < 1e-10);
    for (int n : {2, 3, 4}) {
        const auto s = round_sphere_chart(n, 1.0);
        const auto c = curvature_at(s, random_point(rng, n, 0, 2));
        CHECK(std::abs(c.scalar - n * (n - 1)) < 1e-6);
        CHECK(max_abs(c.ricci - (n - 1) * c.g) < 1e-6);
    }
    const auto s2 = round_sphere_chart(4, 2.0);
    CHECK(std::abs(curvature_at(s2, Vec::Ones(4)).scalar - 3.0) < 1e-6);
}

TEST_CASE("Riemann symmetries and Bianchi identity")
{
    std::mt19937_64 rng(37);
    Mat c = Mat::Random(4, 4);
    c = (0.2 * (c + c.transpose())).eval();
    for (const auto& chart : {eguchi_hanson(1.0), power_decay_chart(c, 2.0, 0.8), round_sphere_chart(4, 0.7)}) {
        const Vec y = random_point(rng, 4, 1.1, 2.0);
        const auto cb = curvature_at(chart, y);
        const double scale = std::max(1.0, cb.riemann_norm());
        double worst = 0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int cc = 0; cc < 4; ++cc)
                    for (int d = 0; d < 4; ++d) {
                        const double r = cb.R(a, b, cc, d);
                        worst = std::max({worst, std::abs(r + cb.R(b, a, cc, d)), std::abs(r + cb.R(a, b, d, cc)),
                                          std::abs(r - cb.R(cc, d, a, b)),
                                          std::abs(r + cb.R(a, cc, d, b) + cb.R(a, d, b, cc))});
                    }
        CHECK(worst < 1e-10 * scale);
        CHECK(std::abs(cb.ricci_endomorphism.trace() - cb.scalar) < 1e-12 * scale);
    }
}

TEST_CASE("Eguchi-Hanson is Ricci flat but not flat")
{
    std::mt19937_64 rng(41);
    const auto eh = eguchi_hanson(1.0);
    double worst = 0;
    for (int t = 0; t < 100; ++t) worst = std::max(worst, curvature_at(eh, random_point(rng, 4, 1.1, 10)).ricci_norm());
    CHECK(worst < 1e-6);
    CHECK(curvature_at(eh, random_point(rng, 4, 1.1, 1.2)).riemann_norm() > 0.01);
}

TEST_CASE("geodesics")
{
    const auto flat = flat_metric(4);
    const Vec v = (Vec(4) << 0.3, -1.0, 2.0, 0.5).finished();
    CHECK((exp_map(flat, Vec::Zero(4), v) - v).norm() < 1e-12);

    // Great circles through the chart origin run through infinity, so use the equator |x| = 1,
    // where the conformal factor is 1 and unit speed means |v| = 1.
    const auto s4 = round_sphere_chart(4, 1.0);
    const Vec start = (Vec(4) << 1.0, 0, 0, 0).finished();
    const Vec u = (Vec(4) << 0, 1.0, 0, 0).finished();
    const auto path = geodesic_shoot(s4, start, u, 2 * std::numbers::pi);
    REQUIRE_FALSE(path.exited);
    CHECK((path.end() - start).norm() < 1e-4);
    const auto tilted = geodesic_shoot(s4, start, (Vec(4) << 0, 0.6, 0, 0.8).finished(), 2 * std::numbers::pi);
    CHECK((tilted.end() - start).norm() < 1e-4);

    // Speed is a first integral.
    for (size_t i = 0; i < path.x.size(); i += 7)
        CHECK(std::abs(metric_norm(s4, path.x[i], path.v[i]) - 1.0) < 1e-6 * (1 + path.t[i]));

    // Radial geodesic on Eguchi-Hanson stays on its ray.
    const auto eh = eguchi_hanson(1.0);
    const Vec p = (Vec(4) << 2.0, 0, 0, 0).finished();
    const Vec dir = (Vec(4) << 1.0, 0, 0, 0).finished();
    const auto radial = geodesic_shoot(eh, p, dir, 3.0);
    for (const Vec& x : radial.x) CHECK(x.tail(3).cwiseAbs().maxCoeff() < 1e-8);

    // Inward: the coordinate system degenerates at the bolt, the path reaches r = a on the ray.
    const auto inward = geodesic_shoot(eh, p, -dir, 5.0);
    double rmin = 10;
    for (const Vec& x : inward.x) {
        rmin = std::min(rmin, x.norm());
        CHECK(x.tail(3).cwiseAbs().maxCoeff() < 1e-8);
    }
    CHECK(rmin > 1.0);
    CHECK(rmin < 1.0 + 1e-3);
}

TEST_CASE("distance estimate")
{
    const auto flat = flat_metric(3);
    const Vec p = Vec::Zero(3), q = (Vec(3) << 1, 2, 2).finished();
    CHECK(std::abs(distance_estimate(flat, p, q).distance - 3.0) < 1e-9);
    // Two points on the unit sphere at angle theta: chart points tan(theta/2) e1 and 0.
    const auto s3 = round_sphere_chart(3, 1.0);
    const Vec q2 = (Vec(3) << std::tan(0.4), 0, 0).finished();
    CHECK(std::abs(distance_estimate(s3, p, q2).distance - 0.8) < 1e-7);
}

TEST_CASE("metric spec strings")
{
    CHECK(parse_metric_spec("flat:3").dimension() == 3);
    const auto s = parse_metric_spec("sphere:4:2");
    CHECK(std::abs(s.metric(Vec::Zero(4))(0, 0) - 4.0) < 1e-12);
    const auto q = parse_metric_spec("quotient:flat:4:cyclic:2:1,1");
    CHECK(q.domain().deck_order() == 2);
    CHECK(parse_metric_spec("quotient:flat:4:binary-dihedral:3").domain().deck_order() == 12);
    CHECK(parse_metric_spec("eguchi-hanson:1.5").domain().deck_order() == 2);
    const auto r = parse_metric_spec("rescale:flat:4:sphere-factor");
    const Vec y = (Vec(4) << 0.3, 0.1, -0.2, 0.5).finished();
    CHECK((r.metric(y) - round_sphere_chart(4, 1.0).metric(y)).norm() < 1e-12);
    const auto inv = parse_metric_spec("invert:eguchi-hanson:1:1.05");
    CHECK(inv.domain().kind == DomainKind::punctured_ball);
    CHECK(parse_metric_spec("rescale:invert:eguchi-hanson:1:1.05:rho2").dimension() == 4);

    for (const char* bad : {"", "flat", "flat:x", "sphere:4", "torus:2", "flat:4:extra", "rescale:flat:4:nope",
                            "eguchi-hanson:-1", "quotient:flat:4"})
        CHECK_THROWS_AS(parse_metric_spec(bad), UsageError);
}
