#include "tale/errors.hpp"
#include "tale/geodesic.hpp"
#include "tale/group_theory.hpp"
#include "tale/volume.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace tale;

namespace {

constexpr double kPi = std::numbers::pi;

// Oracle: t^(n-1) |det d exp_p| at t theta by central differences of geodesic_shoot, in a g_p-orthonormal basis.
double fd_exp_jacobian(const MetricChart& g, const Vec& p, const Vec& theta, double t)
{
    const int n = g.dimension();
    const Mat gp = g.metric(p);
    const Eigen::LLT<Mat> llt(gp);
    const Mat F = llt.matrixU().solve(Mat::Identity(n, n));
    const Vec v = t * theta / std::sqrt(theta.dot(gp * theta));
    const double h = 1e-5 * std::max(1.0, t);
    Mat d(n, n);
    for (int i = 0; i < n; ++i) {
        const Vec e = F.col(i);
        d.col(i) = (exp_map(g, p, v + h * e) - exp_map(g, p, v - h * e)) / (2 * h);
    }
    const Vec q = exp_map(g, p, v);
    return std::sqrt(g.metric(q).determinant()) * std::abs(d.determinant()) * std::pow(t, n - 1);
}

}  // namespace

TEST_CASE("exp Jacobian on model spaces")
{
    const auto flat = flat_metric(4);
    const auto s4 = round_sphere_chart(4, 1.0);
    const Vec p = Vec::Unit(4, 0);
    const Vec dir = (Vec(4) << 0.2, -0.5, 0.7, 0.1).finished();
    for (double t : {0.1, 0.7, 1.5, 2.5}) {
        CHECK(std::abs(exp_jacobian(flat, p, dir, t).value - t * t * t) < 1e-6);
        const auto j = exp_jacobian(s4, p, dir, t);
        CHECK(std::abs(j.value - std::pow(std::sin(t), 3)) < 1e-4);
        CHECK_FALSE(j.conjugate);
    }
    // Past the antipode the determinant turns negative.
    CHECK(exp_jacobian(s4, p, dir, 3.5).conjugate);
}

TEST_CASE("exp Jacobian agrees with differenced geodesic shooting")
{
    const auto eh = eguchi_hanson(1.0);
    const Vec p = (Vec(4) << 1.6, 0.4, -0.3, 0.2).finished();
    for (const Vec& dir : {Vec(Vec::Unit(4, 0)), Vec((Vec(4) << 0.3, 1.0, -0.2, 0.5).finished())}) {
        for (double t : {0.3, 1.0}) {
            const double oracle = fd_exp_jacobian(eh, p, dir, t);
            CHECK(std::abs(exp_jacobian(eh, p, dir, t).value / oracle - 1.0) < 1e-5);
        }
    }
    // Ricci-flat: no t^2 correction.
    for (double t : {0.05, 0.1}) CHECK(std::abs(exp_jacobian(eh, p, Vec::Unit(4, 1), t).value / (t * t * t) - 1) < 1e-6);
}

TEST_CASE("ball volumes")
{
    VolumeOptions opt;
    opt.samples = 256;
    const auto flat = flat_metric(4);
    const auto ball = ball_volume(flat, Vec::Zero(4), 1.0, opt);
    CHECK(std::abs(ball.volume - kPi * kPi / 2) <= 2 * ball.stderr_);
    CHECK_FALSE(ball.approximate());

    const auto quotient = quotient_annulus(flat, parse_group_spec("cyclic:2:1,1", 4));
    const auto half = ball_volume(quotient, Vec::Zero(4), 1.0, opt);
    CHECK(std::abs(half.volume - kPi * kPi / 4) <= 2 * half.stderr_);

    opt.samples = 64;
    const auto s4 = round_sphere_chart(4, 1.0);
    const auto whole = ball_volume(s4, Vec::Unit(4, 0), kPi, opt);
    CHECK(std::abs(whole.volume / (8 * kPi * kPi / 3) - 1) < 0.01);

    CHECK_THROWS_AS(psi_table(flat, Vec::Zero(4), {1.0, 0.5}, opt), DomainError);
}

TEST_CASE("psi tables of flat quotients are constant")
{
    const auto z2 = parse_group_spec("cyclic:2:1,1", 4);
    const auto quotient = quotient_annulus(flat_metric(4), z2);
    VolumeOptions opt;
    opt.samples = 128;
    const std::vector<double> radii{0.1, 0.3, 1, 3, 10, 30, 100, 300};
    const auto t = psi_table(quotient, Vec::Zero(4), radii, opt);
    CHECK(t.group_order_at_p == 2);
    CHECK(t.group_order_at_infinity == 2);
    for (size_t i = 0; i < radii.size(); ++i) CHECK(std::abs(t.psi[i] - 0.5) <= 2 * t.stderr_[i]);
    CHECK(check_monotone(t).monotone);

    // Off the fixed point the quotient ball is a full ball until it meets its image.
    const auto off = psi_table(quotient, Vec::Unit(4, 0), {0.2, 1.5}, opt);
    CHECK(std::abs(off.psi[0] - 1.0) < 1e-6);
    CHECK(off.flags[1] == std::vector<std::string>{"deck-overlap", "rigid"});
}

TEST_CASE("Eguchi-Hanson bolt ratios")
{
    VolumeOptions opt;
    opt.samples = 512;
    const std::vector<double> radii{0.1, 0.2, 0.5, 1, 2, 5, 10, 20, 50, 100};
    const auto t = eh_bolt_psi_table(1.0, radii, opt);
    CHECK(std::abs(t.psi.front() - 1.0) < 0.02);
    CHECK(std::abs(t.psi.back() - 0.5) < 0.03);
    CHECK(check_monotone(t).monotone);
    for (double v : t.psi) CHECK((v > 0.5 && v <= 1.0 + 1e-6));
    // Scale invariance: a -> 2a, r -> 2r.
    const auto t2 = eh_bolt_psi_table(2.0, {0.4, 4.0}, opt);
    CHECK(std::abs(t2.psi[0] - t.psi[1]) < 1e-6);
    CHECK(std::abs(t2.psi[1] - t.psi[4]) < 1e-6);
}

TEST_CASE("bolt ratios approach one half like 1/r")
{
    VolumeOptions opt;
    opt.samples = 256;
    const auto t = eh_bolt_psi_table(1.0, {400.0}, opt);
    CHECK(std::abs(t.psi[0] - 0.5) < 0.005);
}

TEST_CASE("monotonicity and zero-sum verdicts")
{
    VolumeRatioTable t;
    t.radii = {1, 2, 3};
    t.psi = {1.0, 0.8, 0.9};
    t.stderr_ = {0.01, 0.01, 0.01};
    const auto v = check_monotone(t);
    CHECK_FALSE(v.monotone);
    CHECK(v.worst_index == 1);
    t.stderr_ = {0.05, 0.05, 0.05};
    CHECK(check_monotone(t).monotone);

    CHECK_FALSE(check_zero_sum_bound({1, 1}).admissible);
    CHECK(check_zero_sum_bound({1}).admissible);
    CHECK(check_zero_sum_bound({2, 2}).admissible);
    CHECK_FALSE(check_zero_sum_bound({1, 2}).admissible);
    CHECK(check_zero_sum_bound({2, 3, 6}).admissible);
    CHECK(check_zero_sum_bound({2, 3, 6}).smooth_count == 0);
    CHECK_THROWS_AS(check_zero_sum_bound({0}), DomainError);
}

TEST_CASE("psi tables do not depend on the worker count")
{
    const auto eh = eguchi_hanson(1.0);
    const Vec p = (Vec(4) << 1.5, 0.2, 0.0, -0.3).finished();
    VolumeOptions one, three;
    one.samples = three.samples = 24;
    one.threads = 1;
    three.threads = 3;
    const auto a = psi_table(eh, p, {0.1, 0.3}, one);
    const auto b = psi_table(eh, p, {0.1, 0.3}, three);
    CHECK(a.psi == b.psi);
    CHECK(a.stderr_ == b.stderr_);
    const auto c = eh_bolt_psi_table(1.0, {0.5, 5.0}, one);
    const auto d = eh_bolt_psi_table(1.0, {0.5, 5.0}, three);
    CHECK(c.psi == d.psi);
}
