#include "verify.hpp"

#include "cli_io.hpp"

#include "tale/clifford.hpp"
#include "tale/conformal.hpp"
#include "tale/curvature.hpp"
#include "tale/errors.hpp"
#include "tale/group_theory.hpp"
#include "tale/metric.hpp"
#include "tale/spin_bundle.hpp"
#include "tale/twistor.hpp"
#include "tale/volume.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

namespace tale::verify {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool passed = false;
    json measured = json::object();
    std::string detail;
};

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

CVec random_spinor(std::mt19937_64& rng, int d)
{
    std::normal_distribution<double> nd;
    CVec v(d);
    for (int i = 0; i < d; ++i) v[i] = Complex(nd(rng), nd(rng));
    return v;
}

Vec random_vec(std::mt19937_64& rng, int n)
{
    std::normal_distribution<double> nd;
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = nd(rng);
    return v;
}

Outcome spin_lift_counts(const Config&)
{
    Outcome o;
    o.passed = true;
    json rows = json::array();
    std::ostringstream bad;
    auto record = [&](const std::string& group, int dim, int expected, int found) {
        rows.push_back({{"group", group}, {"dim", dim}, {"expected", expected}, {"lifts", found}});
        if (found != expected) {
            o.passed = false;
            bad << (bad.tellp() > 0 ? "; " : "") << group << " in SO(" << dim << "): " << found << " lift(s), expected "
                << expected;
        }
    };
    for (int m : {1, 3, 5, 7, 9})
        record("cyclic:" + std::to_string(m), 2, 2,
               static_cast<int>(enumerate_spin_lifts(make_cyclic_subgroup(2, m)).size()));
    for (int m : {2, 4, 6, 8})
        record("cyclic:" + std::to_string(m), 2, 0,
               static_cast<int>(enumerate_spin_lifts(make_cyclic_subgroup(2, m)).size()));
    record("cyclic:2:1,1", 4, 2, static_cast<int>(enumerate_spin_lifts(parse_group_spec("cyclic:2:1,1", 4)).size()));
    o.measured["counts"] = rows;
    o.detail = o.passed ? "all counts match" : bad.str();
    return o;
}

Outcome weyl_fixed(const Config&)
{
    Outcome o;
    o.passed = true;
    const auto lifts = enumerate_spin_lifts(parse_group_spec("cyclic:2:1,1", 4));
    json rows = json::array();
    for (const auto& lift : lifts) {
        const auto w = weyl_fixed_subspaces(lift);
        rows.push_back({{"plus", w.plus}, {"minus", w.minus}});
        if ((w.plus != 0) == (w.minus != 0)) o.passed = false;
    }
    if (lifts.empty()) o.passed = false;
    o.measured["lifts"] = rows;
    o.detail = std::to_string(lifts.size()) + " lifts, each with exactly one nonzero Weyl fixed space: " +
               (o.passed ? "yes" : "no");
    return o;
}

Outcome clifford_identities(const Config&)
{
    Outcome o;
    o.passed = true;
    json rows = json::array();
    for (int n : {2, 4, 6}) {
        const auto rep = build_clifford(n);
        const int d = rep.spinor_dim;
        const CMat id = CMat::Identity(d, d);
        long failures = 0;
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                const CMat ac = rep.gamma[a] * rep.gamma[b] + rep.gamma[b] * rep.gamma[a];
                const CMat want = (a == b ? -2.0 : 0.0) * id;
                failures += ac != want;
            }
            failures += (rep.chirality * rep.gamma[a] + rep.gamma[a] * rep.chirality) != CMat::Zero(d, d);
        }
        failures += (rep.chirality * rep.chirality) != id;
        failures += (rep.proj_plus + rep.proj_minus) != id;
        rows.push_back({{"n", n}, {"spinor_dim", d}, {"failed_identities", failures}});
        if (failures != 0) o.passed = false;
    }
    o.measured["dimensions"] = rows;
    o.detail = o.passed ? "anticommutation and chirality identities hold exactly" : "some identity is inexact";
    return o;
}

Outcome eh_ricci_flat(const Config& cfg)
{
    const double a = 1.0;
    const auto eh = eguchi_hanson(a);
    const auto dirs = sphere_directions(4, 100, cfg.seed);
    const auto u = sobol_points(1, 100, cfg.seed + 1);
    double worst = 0.0;
    for (size_t i = 0; i < dirs.size(); ++i) {
        const double r = a * (1.1 + (10.0 - 1.1) * u[i][0]);
        worst = std::max(worst, curvature_at(eh, r * dirs[i]).ricci_norm());
    }
    Outcome o;
    o.passed = worst <= 1e-6;
    o.measured = {{"max_abs_ricci", worst}, {"points", 100}};
    o.detail = "max |Ric| = " + num(worst);
    return o;
}

Outcome eh_ale_order(const Config&)
{
    const auto est = estimate_ale_order(eguchi_hanson(1.0), geometric_radii(4, 64, 9), 3);
    Outcome o;
    o.passed = std::abs(est.tau_hat - 4.0) <= 0.2;
    json per = json::array();
    for (const auto& f : est.per_k) per.push_back({{"k", f.k}, {"slope", f.slope}, {"r2", f.r2}});
    o.measured = {{"tau_hat", est.tau_hat}, {"mu_hat", est.mu_hat}, {"per_k", per}};
    o.detail = "tau_hat = " + num(est.tau_hat) + " (mu_hat = " + std::to_string(est.mu_hat) + ")";
    return o;
}

// Pullback of g under z -> y = z/|z|^2 times |y|^-4, written out independently of the library.
Mat inversion_oracle(const Mat& gy, const Vec& z)
{
    const double s = z.squaredNorm();
    const auto n = z.size();
    Mat j(n, n);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) j(k, l) = ((k == l) ? 1.0 : 0.0) / s - 2.0 * z[k] * z[l] / (s * s);
    return s * s * j.transpose() * gy * j;
}

Outcome inversion_formula(const Config& cfg)
{
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(0.05, 2.0);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        Mat h(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 4; ++k) h(i, k) = nd(rng);
        h = (0.5 * (h + h.transpose())).eval();
        Vec z = random_vec(rng, 4);
        z *= ud(rng) / z.norm();
        const Mat diff = inverted_metric_value(h, z) - inversion_oracle(Mat::Identity(4, 4) + h, z);
        worst = std::max(worst, diff.cwiseAbs().maxCoeff());
    }
    Outcome o;
    o.passed = worst <= 1e-10;
    o.measured = {{"max_abs_difference", worst}, {"instances", 1000}};
    o.detail = "max entry difference = " + num(worst);
    return o;
}

Outcome eh_regularity(const Config&)
{
    const double a = 1.0;
    const auto eh = eguchi_hanson(a);
    const auto est = estimate_ale_order(eh, geometric_radii(4, 64, 9), 3);
    const auto comp = compactify(eh, est.descriptor);
    const auto& rep = comp.report;
    bool bounded = true;
    json per = json::array();
    for (const auto& ro : rep.per_k) {
        per.push_back({{"k", ro.k}, {"slope", ro.slope}, {"bounded", ro.bounded}, {"continuous", ro.continuous}});
        if (ro.k >= 1 && ro.k <= 3 && !ro.bounded) bounded = false;
    }
    const bool has_three = std::any_of(rep.per_k.begin(), rep.per_k.end(), [](const auto& r) { return r.k == 3; });
    Outcome o;
    o.passed = std::abs(rep.decay_exponent - 4.0) <= 0.3 && bounded && has_three;
    o.measured = {{"decay_exponent", rep.decay_exponent},
                  {"tested_order", rep.tested_order},
                  {"verdict_order", rep.verdict_order},
                  {"per_k", per}};
    o.detail = "decay exponent " + num(rep.decay_exponent) + ", bounded through order 3: " +
               (bounded && has_three ? "yes" : "no");
    return o;
}

Outcome flat_twistor(const Config& cfg)
{
    std::mt19937_64 rng(cfg.seed);
    const auto rep = build_clifford(4);
    const FrameField frame(flat_metric(4));
    const CVec phi0 = random_spinor(rng, 4), psi0 = random_spinor(rng, 4);
    const auto field = flat_twistor_field(rep, phi0, psi0);
    double residual = 0.0, eq2 = 0.0, hol = 0.0;
    for (int t = 0; t < 100; ++t) {
        const Vec p = random_vec(rng, 4), x = random_vec(rng, 4);
        residual = std::max(residual, twistor_residual(rep, frame, field, p, x).norm());
        eq2 = std::max(eq2, dirac_derivative_check(rep, frame, field, p, x).norm());
    }
    for (int t = 0; t < 6; ++t) {
        const Vec c = random_vec(rng, 4);
        const Curve loop = Curve::circle(c, Vec::Unit(4, t % 4), Vec::Unit(4, (t + 1) % 4), 0.25 + 0.1 * t);
        hol = std::max(hol, (holonomy(rep, frame, loop, true) - CMat::Identity(8, 8)).norm());
    }
    Outcome o;
    o.passed = residual <= 1e-9 && hol <= 1e-9 && eq2 <= 1e-8;
    o.measured = {{"max_twistor_residual", residual}, {"max_holonomy_deviation", hol}, {"max_eq2_residual", eq2}};
    std::ostringstream d;
    d << "residual " << residual << ", holonomy " << hol << ", Dirac derivative identity " << eq2;
    o.detail = d.str();
    return o;
}

Outcome zero_isolation(const Config& cfg)
{
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> ud(-1.5, 1.5);
    const auto rep = build_clifford(4);
    const Vec lo = Vec::Constant(4, -2.0), hi = Vec::Constant(4, 2.0);
    Outcome o;
    o.passed = true;
    json rows = json::array();
    std::ostringstream d;
    for (int t = 0; t < 3; ++t) {
        Vec x0(4);
        for (int i = 0; i < 4; ++i) x0[i] = ud(rng);
        const CVec psi0 = random_spinor(rng, 4);
        const CVec phi0 = rep.clifford(x0) * psi0 / 4.0;
        const auto field = flat_twistor_field(rep, phi0, psi0);
        const SpinorField dirac = [psi0](const Vec&) { return psi0; };
        const auto zeros = twistor_zero_locus(rep, field, dirac, lo, hi, 16);
        std::vector<double> radii;
        for (int j = 4; j <= 10; ++j) radii.push_back(std::ldexp(1.0, -j));
        const double expo = growth_exponent(field, x0, radii);
        const double err = zeros.zeros.size() == 1 ? (zeros.zeros[0] - x0).norm() : -1.0;
        rows.push_back({{"zeros", zeros.zeros.size()}, {"location_error", err}, {"growth_exponent", expo}});
        if (zeros.zeros.size() != 1 || std::abs(expo - 1.0) > 0.05 || !zeros.all_isolated) o.passed = false;
        d << (t ? "; " : "") << zeros.zeros.size() << " zero(s), exponent " << num(expo);
    }
    o.measured["fields"] = rows;
    o.detail = d.str();
    return o;
}

Outcome eh_parallel(const Config& cfg)
{
    const auto rep = build_clifford(4);
    const FrameField frame(eguchi_hanson(1.0));
    const Vec base = (Vec(4) << 1.4, 0.3, -0.2, 0.5).finished();
    const auto res = parallel_spinor_on_EH(frame, 1.0, base, 0.1);
    std::mt19937_64 rng(cfg.seed);
    double worst = 0.0;
    for (int t = 0; t < 8; ++t) {
        Vec y = random_vec(rng, 4);
        y *= (1.3 + 0.3 * t) / y.norm();
        const Vec x = random_vec(rng, 4);
        for (const auto& f : res.fields) worst = std::max(worst, twistor_residual(rep, frame, f, y, x).norm());
    }
    Outcome o;
    o.passed = res.basis.dimension == 2 && worst <= 1e-5;
    o.measured = {{"dimension", res.basis.dimension},
                  {"singular_values", res.basis.singular_values},
                  {"max_residual", worst}};
    o.detail = "fixed space dimension " + std::to_string(res.basis.dimension) + ", residual " + num(worst);
    return o;
}

Outcome compactified_twistor(const Config& cfg)
{
    const auto rep = build_clifford(4);
    const auto c = compactified_eguchi_hanson(1.0);
    const FrameField frame(c.gbar);
    std::mt19937_64 rng(cfg.seed);

    auto radial_distance = [&](const Vec& z) {
        const Vec u = z.normalized();
        const int steps = 64;
        double len = 0.0;
        for (int i = 0; i < steps; ++i) {
            const Vec p = (i + 0.5) / steps * z;
            len += std::sqrt(u.dot(c.gbar.metric(p) * u)) * z.norm() / steps;
        }
        return len;
    };

    double residual = 0.0;
    std::vector<double> ratios;
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    for (int annulus : {3, 4}) {
        const double r0 = std::ldexp(1.0, -annulus - 1);
        for (int t = 0; t < 4; ++t) {
            Vec z = random_vec(rng, 4);
            z *= r0 * (1.0 + ud(rng)) / z.norm();
            residual = std::max(residual, twistor_residual(rep, frame, c.phibar, z, random_vec(rng, 4)).norm());
            ratios.push_back(c.phibar(z).norm() / radial_distance(z));
        }
    }
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    const double variation = *hi / *lo - 1.0;

    const auto dirac = dirac_field(rep, frame, c.phibar);
    std::vector<std::pair<Vec, TwistorState>> starts;
    for (const Vec& d : sphere_directions(4, 8, cfg.seed)) {
        const Vec z = 0.1 * d;
        starts.push_back({z, TwistorState{c.phibar(z), dirac(z)}});
    }
    const auto ext = extend_to_puncture(rep, frame, Vec::Zero(4), starts, 1e-4, 1e-5);
    const double phi_norm = ext.limit.phi.norm(), psi_norm = ext.limit.psi.norm();

    Outcome o;
    o.passed = residual <= 1e-4 && variation <= 0.05 && ext.spread <= 1e-5 && phi_norm <= 1e-6 && psi_norm > 1e-3;
    o.measured = {{"max_residual", residual},          {"norm_ratio_variation", variation},
                  {"extension_spread", ext.spread},     {"phi_at_p_inf", phi_norm},
                  {"psi_at_p_inf", psi_norm},           {"parallel_dimension", c.basis.dimension}};
    std::ostringstream d;
    d << "residual " << residual << ", |phi|/dist variation " << variation << ", spread " << ext.spread
      << ", |phi(p_inf)| " << phi_norm << ", |psi(p_inf)| " << psi_norm;
    o.detail = d.str();
    return o;
}

json table_json(const VolumeRatioTable& t)
{
    json rows = json::array();
    for (size_t i = 0; i < t.radii.size(); ++i)
        rows.push_back({{"r", t.radii[i]}, {"psi", t.psi[i]}, {"stderr", t.stderr_[i]}, {"flags", t.flags[i]}});
    return rows;
}

Outcome volume_ratios(const Config& cfg)
{
    VolumeOptions opt;
    opt.samples = cfg.samples;
    opt.seed = cfg.seed;

    const auto quotient = quotient_annulus(flat_metric(4), parse_group_spec("cyclic:2:1,1", 4));
    const auto flat = psi_table(quotient, Vec::Zero(4), geometric_radii(0.1, 100, 8), opt);
    bool flat_ok = true;
    for (size_t i = 0; i < flat.psi.size(); ++i) flat_ok &= std::abs(flat.psi[i] - 0.5) <= 2 * flat.stderr_[i];

    const auto eh = eh_bolt_psi_table(1.0, geometric_radii(0.1, 100, 12), opt);
    const auto mono = check_monotone(eh);
    const bool small_ok = std::abs(eh.psi.front() - 1.0) <= 0.02;
    const bool large_ok = std::abs(eh.psi.back() - 0.5) <= 0.03;

    const std::vector<std::pair<std::vector<int>, bool>> configs{
        {{1}, true}, {{1, 1}, false}, {{1, 2}, false}, {{2, 2}, true}, {{2, 3, 6}, true}, {{2, 2, 2}, false}};
    bool sums_ok = true;
    json sums = json::array();
    for (const auto& [orders, expected] : configs) {
        const auto v = check_zero_sum_bound(orders);
        sums.push_back({{"orders", orders}, {"sum", v.sum}, {"admissible", v.admissible}});
        sums_ok &= v.admissible == expected;
    }

    Outcome o;
    o.passed = flat_ok && mono.monotone && small_ok && large_ok && sums_ok;
    o.measured = {{"flat_quotient", table_json(flat)},
                  {"eguchi_hanson_bolt", table_json(eh)},
                  {"monotone_worst_excess", mono.worst_excess},
                  {"zero_sum", sums}};
    std::ostringstream d;
    d << "flat psi = 1/2 at 8 radii: " << (flat_ok ? "yes" : "no") << "; EH psi(" << eh.radii.front()
      << ") = " << eh.psi.front() << ", psi(" << eh.radii.back() << ") = " << eh.psi.back()
      << ", monotone: " << (mono.monotone ? "yes" : "no") << "; zero-sum verdicts: " << (sums_ok ? "ok" : "wrong");
    o.detail = d.str();
    return o;
}

struct Spec {
    const char* name;
    double limit;
    Outcome (*fn)(const Config&);
};

const Spec kSpecs[] = {
    {"Spin-lift counts", 1, spin_lift_counts},
    {"Weyl fixed spaces of {+-1}", 1, weyl_fixed},
    {"Clifford identities n = 2, 4, 6", 1, clifford_identities},
    {"Eguchi-Hanson Ricci-flatness", 30, eh_ricci_flat},
    {"ALE order of Eguchi-Hanson", 30, eh_ale_order},
    {"Inversion formula vs pullback", 10, inversion_formula},
    {"Compactified Eguchi-Hanson regularity", 60, eh_regularity},
    {"Flat twistor family", 10, flat_twistor},
    {"Zero isolation and growth", 10, zero_isolation},
    {"Eguchi-Hanson parallel spinors", 120, eh_parallel},
    {"Compactified Eguchi-Hanson twistor spinor", 180, compactified_twistor},
    {"Volume ratios", 300, volume_ratios},
};

}  // namespace

CriterionResult run_criterion(int id, const Config& cfg)
{
    if (id < 1 || id > 12) throw UsageError("criterion id must be in 1..12");
    const Spec& s = kSpecs[id - 1];
    CriterionResult r;
    r.id = id;
    r.name = s.name;
    r.limit_seconds = s.limit;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        Outcome o = s.fn(cfg);
        r.passed = o.passed;
        r.measured = std::move(o.measured);
        r.detail = std::move(o.detail);
    } catch (const std::exception& e) {
        r.passed = false;
        r.measured = json::object();
        r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::vector<CriterionResult> run_criteria(const Config& cfg, const std::function<void(const CriterionResult&)>& progress)
{
    std::vector<CriterionResult> out;
    for (int id = 1; id <= 12; ++id) {
        out.push_back(run_criterion(id, cfg));
        if (progress) progress(out.back());
    }
    return out;
}

json results_json(const Config& cfg, const std::vector<CriterionResult>& results)
{
    json crit = json::array();
    for (const auto& r : results)
        crit.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"measured", r.measured},
                        {"detail", r.detail}});
    char seed[32];
    std::snprintf(seed, sizeof seed, "0x%llX", static_cast<unsigned long long>(cfg.seed));
    return {{"schema", 1}, {"command", "verify-all"}, {"seed", seed}, {"samples", cfg.samples}, {"criteria", crit}};
}

CriterionResult determinism_result(const std::string& first, const std::string& second, double seconds,
                                   double limit_seconds)
{
    CriterionResult r;
    r.id = 13;
    r.name = "Determinism of verify-all";
    r.seconds = seconds;
    r.limit_seconds = limit_seconds;
    const std::string h1 = cli::sha256_hex(first), h2 = cli::sha256_hex(second);
    r.passed = !first.empty() && h1 == h2;
    r.measured = {{"sha256_first", h1}, {"sha256_second", h2}, {"bytes", first.size()}};
    r.detail = r.passed ? "identical outputs, sha256 " + h1.substr(0, 16) : "outputs differ";
    return r;
}

std::string format_line(const CriterionResult& r)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f s / %.0f s", r.seconds, r.limit_seconds);
    std::string verdict = r.ok() ? "PASS" : "FAIL";
    std::string note = r.passed && !r.within_time() ? " [over time limit]" : "";
    return "[" + verdict + "] " + (r.id < 10 ? " " : "") + std::to_string(r.id) + "  " + r.name + ": " + r.detail +
           note + " (" + buf + ")";
}

}  // namespace tale::verify
