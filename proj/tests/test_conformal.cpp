#include "tale/conformal.hpp"
#include "tale/errors.hpp"
#include "tale/metric.hpp"
#include "tale/sampling.hpp"

#include <doctest.h>

#include <cmath>
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

// First-principles path: |y|^-4 times the pullback of g under z -> y = z / |z|^2.
Mat pullback_oracle(const Mat& gy, const Vec& z)
{
    const double s = z.squaredNorm();
    const auto n = z.size();
    Mat dydz(n, n);
    for (int k = 0; k < n; ++k)
        for (int a = 0; a < n; ++a) dydz(k, a) = (k == a ? 1.0 / s : 0.0) - 2.0 * z[k] * z[a] / (s * s);
    const double rho = 1.0 / std::sqrt(s);
    return std::pow(rho, -4) * dydz.transpose() * gy * dydz;
}

}  // namespace

TEST_CASE("inversion of points")
{
    std::mt19937_64 rng(2);
    for (int t = 0; t < 100; ++t) {
        const Vec y = random_point(rng, 4, 0.1, 10);
        CHECK((invert_point(invert_point(y)) - y).norm() < 1e-12 * y.norm());
        const Vec u = y / y.norm();
        CHECK((invert_point(u) - u).norm() < 1e-15);
        // Chain rule through the involution.
        const Mat prod = invert_jacobian(invert_point(y)) * invert_jacobian(y);
        CHECK((prod - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
    }
    const Vec y = (Vec(4) << 2, 0, 0, 0).finished();
    CHECK((invert_point(y) - (Vec(4) << 0.5, 0, 0, 0).finished()).norm() == 0.0);
    CHECK_THROWS_AS(invert_point(Vec::Zero(4)), DomainError);
}

TEST_CASE("displayed inversion formula equals conformal pullback")
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    for (int t = 0; t < 1000; ++t) {
        Mat h(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) h(i, j) = nd(rng);
        h = (0.5 * (h + h.transpose())).eval();
        const Vec z = random_point(rng, 4, 0.05, 2.0);
        const Mat a = inverted_metric_value(h, z);
        const Mat b = pullback_oracle(Mat::Identity(4, 4) + h, z);
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10);
    }
    CHECK((inverted_metric_value(Mat::Zero(4, 4), Vec::Ones(4)) - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pushforward chart: values, derivatives and double inversion")
{
    std::mt19937_64 rng(4);
    const auto eh = eguchi_hanson(1.0);
    const auto gbar = pushforward_inverted_metric(eh, 1.5);
    CHECK(gbar.domain().kind == DomainKind::punctured_ball);
    CHECK(gbar.domain().deck_order() == 2);
    CHECK_THROWS_AS(gbar.metric(Vec::Constant(4, 0.5)), DomainError);
    const auto back = pushforward_inverted_metric(gbar, 1.5);
    for (int t = 0; t < 20; ++t) {
        const Vec z = random_point(rng, 4, 0.1, 0.6);
        CHECK((gbar.metric(z) - pullback_oracle(eh.metric(invert_point(z)), z)).cwiseAbs().maxCoeff() < 1e-12);
        const Vec y = random_point(rng, 4, 1.6, 5.0);
        CHECK((back.metric(y) - eh.metric(y)).cwiseAbs().maxCoeff() < 1e-10);

        const MetricJet exact = gbar.jet(z, 2);
        const MetricJet fd = gbar.finite_difference_jet(z, 2, 1e-5);
        for (int k = 0; k < 4; ++k) {
            CHECK((exact.d[k] - fd.d[k]).cwiseAbs().maxCoeff() < 1e-7);
            for (int l = 0; l < 4; ++l) CHECK((exact.second(k, l) - fd.second(k, l)).cwiseAbs().maxCoeff() < 1e-4);
        }
    }
    const auto flat = pushforward_inverted_metric(flat_metric(4), 1.0);
    CHECK((flat.metric(Vec::Constant(4, 0.1)) - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ALE order estimates")
{
    const auto flat = estimate_ale_order(flat_metric(4), geometric_radii(1, 16, 5), 3);
    CHECK(flat.flat);
    CHECK(std::isinf(flat.tau_hat));

    const auto eh = estimate_ale_order(eguchi_hanson(1.0), geometric_radii(4, 64, 5), 3);
    CHECK(eh.tau_hat == doctest::Approx(4.0).epsilon(0.05));
    CHECK(eh.mu_hat == 3);
    for (const auto& f : eh.per_k) CHECK(f.slope == doctest::Approx(-4.0 - f.k).epsilon(0.3 / (4 + f.k)));

    Mat c = Mat::Zero(4, 4);
    c(0, 0) = 0.2;
    c(1, 2) = c(2, 1) = -0.1;
    c(3, 3) = 0.05;
    const auto syn = estimate_ale_order(power_decay_chart(c, 3.0, 1.0), geometric_radii(2, 64, 6), 3);
    CHECK(std::abs(syn.tau_hat - 3.0) < 0.05);
    CHECK(syn.mu_hat == 3);

    CHECK_THROWS_AS(estimate_ale_order(eguchi_hanson(1.0), {4, 8, 16}, 2), DomainError);
}

TEST_CASE("compactified interior decay matches the exterior order")
{
    const auto eh = eguchi_hanson(1.0);
    const auto ext = estimate_ale_order(eh, geometric_radii(4, 64, 5), 2);
    const auto gbar = pushforward_inverted_metric(eh, 1.0);
    // Decay of gbar - delta towards z = 0 is |z|^tau.
    std::vector<double> zr{1.0 / 64, 1.0 / 32, 1.0 / 16, 1.0 / 8};
    const auto dirs = sphere_directions(4, 64, kDefaultSeed);
    std::vector<double> ln_r, ln_v;
    for (double r : zr) {
        ln_r.push_back(std::log(r));
        ln_v.push_back(std::log(derivative_sup_norm(gbar, r, 0, dirs)));
    }
    const double slope = (ln_v.back() - ln_v.front()) / (ln_r.back() - ln_r.front());
    CHECK(std::abs(slope - ext.tau_hat) < 0.3);
}

TEST_CASE("regularity probe")
{
    const auto eh = eguchi_hanson(1.0);
    const auto est = estimate_ale_order(eh, geometric_radii(4, 64, 5), 3);
    const auto comp = compactify(eh, est.descriptor);
    const auto& rep = comp.report;
    CHECK(rep.decay_exponent == doctest::Approx(4.0).epsilon(0.3 / 4));
    CHECK(rep.tested_order == 3);
    CHECK(rep.verdict_order == 3);
    CHECK(rep.extends);
    for (const auto& ro : rep.per_k) CHECK(ro.bounded);
    CHECK(comp.chart.domain().deck_order() == 2);
    CHECK(rep.added_point_group_order == 2);

    Mat c = Mat::Zero(4, 4);
    c(0, 0) = 0.2;
    c(1, 3) = c(3, 1) = 0.1;
    const auto syn = power_decay_chart(c, 3.0, 1.0);
    const auto sest = estimate_ale_order(syn, geometric_radii(2, 64, 6), 3);
    const auto scomp = compactify(syn, sest.descriptor);
    CHECK(scomp.report.tested_order == 2);
    CHECK(scomp.report.verdict_order == 2);
    CHECK(scomp.report.first_failure == 3);
    CHECK(scomp.report.per_k[3].bounded);

    const auto flatq = quotient_annulus(flat_metric(4), make_cyclic_subgroup(4, 2, 1, 1), 1.0);
    const auto fest = estimate_ale_order(flatq, geometric_radii(2, 32, 5), 3);
    const auto fcomp = compactify(flatq, fest.descriptor);
    CHECK(fcomp.report.extends);
    CHECK(fcomp.report.first_failure == -1);
    CHECK(fcomp.report.added_point_group_order == 2);
    CHECK((fcomp.chart.metric(Vec::Constant(4, 0.1)) - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);

    // Hypothesis mu >= tau - 1 >= 2 is enforced.
    ALEDescriptor weak{2.0, 1, 1.0, nullptr};
    CHECK_THROWS_AS(compactify(syn, weak), DomainError);
}
