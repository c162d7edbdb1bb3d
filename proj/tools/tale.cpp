#include "cli_io.hpp"
#include "verify.hpp"

#include "tale/clifford.hpp"
#include "tale/conformal.hpp"
#include "tale/curvature.hpp"
#include "tale/errors.hpp"
#include "tale/group_theory.hpp"
#include "tale/metric.hpp"
#include "tale/spin_bundle.hpp"
#include "tale/twistor.hpp"
#include "tale/volume.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <memory>
#include <sstream>

using namespace tale;
using namespace tale::cli;

namespace {

struct Options {
    std::string group;
    int dim = 0;
    std::string metric;
    std::string point;
    std::string radii;
    int kmax = 3;
    double tau = 0.0;
    int mu = -1;
    double R = 0.0;
    std::string init;
    std::string path;
    std::string box = "-2:2";
    int seeds = 16;
    double a = 1.0;
    std::string basepoint;
    double loop_radius = 0.1;
    int samples = 4096;
    std::string format = "csv";
    std::string seed = "0x5EED";
    std::string out = "-";
    bool no_rerun = false;
};

json header(const std::string& command)
{
    return {{"schema", 1}, {"command", command}};
}

void emit(const Options& o, const json& j)
{
    write_output(o.out, j.dump(2) + "\n");
}

json spin_element_json(const SpinElement& s)
{
    if (s.dim == 2) return {{"angle", s.angle}};
    const auto q = [](const Quaternion& x) { return json::array({x.w, x.x, x.y, x.z}); };
    return {{"left", q(s.pair.left)}, {"right", q(s.pair.right)}};
}

FiniteRotationGroup group_from(const Options& o)
{
    if (o.group.empty()) throw UsageError("--group is required");
    return parse_group_spec(o.group, o.dim);
}

int cmd_spin_lifts(const Options& o)
{
    const auto g = group_from(o);
    const auto lifts = enumerate_spin_lifts(g);
    json j = header("spin-lifts");
    j["group"] = o.group;
    j["dimension"] = g.dimension();
    j["order"] = g.order();
    j["lifts"] = lifts.size();
    json list = json::array();
    for (const auto& lift : lifts) {
        json elems = json::array();
        for (size_t i = 0; i < lift.elements.size(); ++i)
            elems.push_back({{"rotation", matrix_json(g.element(static_cast<int>(i)))},
                             {"spin", spin_element_json(lift.elements[i])}});
        list.push_back(elems);
    }
    j["lift_elements"] = list;
    emit(o, j);
    return 0;
}

int cmd_weyl_fix(const Options& o)
{
    const auto g = group_from(o);
    if (g.dimension() != 4) throw UsageError("weyl-fix needs a subgroup of SO(4)");
    const auto lifts = enumerate_spin_lifts(g);
    json j = header("weyl-fix");
    j["group"] = o.group;
    j["order"] = g.order();
    json rows = json::array();
    for (const auto& lift : lifts) {
        const auto w = weyl_fixed_subspaces(lift);
        rows.push_back({{"fixed_plus", w.plus}, {"fixed_minus", w.minus}});
    }
    j["lifts"] = rows;
    emit(o, j);
    return 0;
}

MetricChart metric_from(const Options& o)
{
    if (o.metric.empty()) throw UsageError("--metric is required");
    return parse_metric_spec(o.metric);
}

Vec point_from(const Options& o, int n)
{
    if (o.point.empty()) throw UsageError("--point is required");
    const Vec p = parse_point(o.point);
    if (p.size() != n) throw UsageError("--point has the wrong number of coordinates");
    return p;
}

int cmd_curvature(const Options& o)
{
    const auto g = metric_from(o);
    const Vec p = point_from(o, g.dimension());
    const auto c = curvature_at(g, p);
    json j = header("curvature");
    j["metric"] = o.metric;
    j["point"] = vector_json(p);
    j["g"] = matrix_json(c.g);
    j["ricci"] = matrix_json(c.ricci);
    j["scalar"] = c.scalar;
    j["max_abs_ricci"] = c.ricci_norm();
    j["riemann_norm"] = c.riemann_norm();
    emit(o, j);
    return 0;
}

json report_json(const RegularityReport& r)
{
    json per = json::array();
    for (const auto& k : r.per_k)
        per.push_back({{"k", k.k},
                       {"slope", k.slope},
                       {"bounded", k.bounded},
                       {"continuous", k.continuous},
                       {"radii", k.radii},
                       {"sup_norms", k.sup_norms}});
    return {{"order", r.verdict_order},
            {"verdict", r.extends ? "extends as C^" + std::to_string(r.verdict_order) : "does not extend"},
            {"extends", r.extends},
            {"decay_exponent", r.decay_exponent},
            {"tested_order", r.tested_order},
            {"first_failure", r.first_failure},
            {"added_point", r.added_point},
            {"added_point_group_order", r.added_point_group_order},
            {"per_k", per}};
}

int cmd_invert(const Options& o)
{
    const auto g = metric_from(o);
    const auto radii = parse_radii(o.radii.empty() ? "4:64:9:log" : o.radii);
    if (o.kmax < 0 || o.kmax > 3) throw UsageError("--kmax must be in 0..3");
    const auto est = estimate_ale_order(g, radii, o.kmax);
    json j = header("invert");
    j["metric"] = o.metric;
    j["tau_hat"] = est.flat ? json("inf") : json(est.tau_hat);
    j["mu_hat"] = est.mu_hat;
    j["low_confidence"] = est.low_confidence;
    json per = json::array();
    for (const auto& f : est.per_k) per.push_back({{"k", f.k}, {"slope", f.slope}, {"r2", f.r2}});
    j["per_k"] = per;
    try {
        j["regularity"] = report_json(compactify(g, est.descriptor).report);
    } catch (const DomainError& e) {
        j["regularity"] = {{"order", nullptr}, {"verdict", std::string("not tested: ") + e.what()}};
    }
    emit(o, j);
    return 0;
}

int cmd_compactify(const Options& o)
{
    const auto g = metric_from(o);
    ALEDescriptor desc;
    if (o.tau > 0) {
        desc.tau = o.tau;
        desc.mu = o.mu >= 0 ? o.mu : 3;
        desc.R = o.R > 0 ? o.R : std::max(1.0, g.domain().inner);
        if (g.domain().deck) desc.group = g.domain().deck;
    } else {
        desc = estimate_ale_order(g, parse_radii(o.radii.empty() ? "4:64:9:log" : o.radii), 3).descriptor;
        if (o.R > 0) desc.R = o.R;
    }
    const auto comp = compactify(g, desc);
    json j = header("compactify");
    j["metric"] = o.metric;
    j["descriptor"] = {{"tau", desc.tau}, {"mu", desc.mu}, {"R", desc.R}};
    j["chart"] = {{"kind", "punctured_ball"}, {"outer", comp.chart.domain().outer}};
    j["regularity"] = report_json(comp.report);
    emit(o, j);
    return 0;
}

std::pair<CVec, CVec> init_from(const Options& o)
{
    const auto comma = o.init.find(',');
    if (comma == std::string::npos) throw UsageError("--init expects phi0.json,psi0.json");
    const CVec phi = read_spinor(o.init.substr(0, comma)), psi = read_spinor(o.init.substr(comma + 1));
    if (phi.size() != psi.size()) throw UsageError("phi0 and psi0 have different lengths");
    return {phi, psi};
}

int spinor_dimension_to_n(Eigen::Index d)
{
    return d == 2 ? 2 : d == 4 ? 4 : 6;
}

std::vector<Vec> read_path(const std::string& file, int n)
{
    json j;
    try {
        j = json::parse(read_file(file));
    } catch (const json::exception& e) {
        throw UsageError("path file '" + file + "' is not JSON: " + e.what());
    }
    const json& pts = j.is_object() ? j.at("points") : j;
    std::vector<Vec> out;
    for (const auto& p : pts) {
        if (!p.is_array() || static_cast<int>(p.size()) != n) throw UsageError("path points must have n coordinates");
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = p[static_cast<size_t>(i)].get<double>();
        out.push_back(v);
    }
    if (out.size() < 2) throw UsageError("a path needs at least two points");
    return out;
}

int cmd_twistor(const Options& o)
{
    const auto g = metric_from(o);
    const auto [phi, psi] = init_from(o);
    const int n = spinor_dimension_to_n(phi.size());
    if (n != g.dimension()) throw UsageError("spinor length does not match the metric dimension");
    if (o.path.empty()) throw UsageError("--path is required");
    const auto pts = read_path(o.path, n);
    const auto rep = build_clifford(n);
    const FrameField frame(g);
    const TwistorState init{phi, psi};
    const auto res = integrate_parallel_section(rep, frame, Curve::polyline(pts), CMat(init.stacked()), true);
    if (!res.completed) throw DomainError("the path leaves the chart");
    const auto end = TwistorState::from_stacked(res.state.col(0));
    json j = header("twistor");
    j["metric"] = o.metric;
    j["start"] = vector_json(pts.front());
    j["point"] = vector_json(pts.back());
    j["phi"] = spinor_json(end.phi);
    j["psi"] = spinor_json(end.psi);
    j["monitor"] = {{"epsilon", res.epsilon}, {"max_ratio", res.max_monitor_ratio}};
    emit(o, j);
    return 0;
}

int cmd_twistor_zeros(const Options& o)
{
    const auto g = metric_from(o);
    if (o.metric.rfind("flat:", 0) != 0) throw UnsupportedError("twistor-zeros works with flat:n metrics");
    const auto [phi, psi] = init_from(o);
    const int n = g.dimension();
    if (spinor_dimension_to_n(phi.size()) != n) throw UsageError("spinor length does not match the metric dimension");
    if (o.seeds < 1) throw UsageError("--seeds must be positive");
    const auto rep = build_clifford(n);
    const auto field = flat_twistor_field(rep, phi, psi);
    const CVec psi0 = psi;
    const SpinorField dirac = [psi0](const Vec&) { return psi0; };
    const auto [lo, hi] = parse_box(o.box);
    const auto res = twistor_zero_locus(rep, field, dirac, Vec::Constant(n, lo), Vec::Constant(n, hi), o.seeds);
    std::vector<double> radii;
    for (int j = 4; j <= 10; ++j) radii.push_back(std::ldexp(1.0, -j));
    json zeros = json::array();
    for (size_t i = 0; i < res.zeros.size(); ++i)
        zeros.push_back({{"point", vector_json(res.zeros[i])},
                         {"dirac_norm", res.dirac_norms[i]},
                         {"growth_exponent", growth_exponent(field, res.zeros[i], radii)}});
    json j = header("twistor-zeros");
    j["metric"] = o.metric;
    j["box"] = {lo, hi};
    j["seeds"] = res.seeds;
    j["zeros"] = zeros;
    j["all_isolated"] = res.all_isolated;
    emit(o, j);
    return 0;
}

int cmd_eh_parallel(const Options& o)
{
    if (!(o.a > 0)) throw UsageError("--a must be positive");
    const FrameField frame(eguchi_hanson(o.a));
    const Vec base = o.basepoint.empty() ? Vec((Vec(4) << 1.4, 0.3, -0.2, 0.5).finished() * o.a)
                                         : parse_point(o.basepoint);
    if (base.size() != 4) throw UsageError("--basepoint needs 4 coordinates");
    const auto res = parallel_spinor_on_EH(frame, o.a, base, o.loop_radius * o.a);
    json j = header("eh-parallel");
    j["a"] = o.a;
    j["basepoint"] = vector_json(base);
    j["dimension"] = res.basis.dimension;
    j["singular_values"] = res.basis.singular_values;
    json basis = json::array();
    for (Eigen::Index c = 0; c < res.basis.basis.cols(); ++c) basis.push_back(spinor_json(res.basis.basis.col(c)));
    j["basis"] = basis;
    j["chirality_plus_weight"] = res.chirality_plus_weight;
    emit(o, j);
    if (res.basis.dimension != 2) throw CertificateError("holonomy fixed space has dimension " +
                                                         std::to_string(res.basis.dimension) + ", expected 2");
    return 0;
}

int cmd_volume_ratio(const Options& o)
{
    const auto g = metric_from(o);
    const auto radii = parse_radii(o.radii.empty() ? "0.1:10:8:log" : o.radii);
    VolumeOptions opt;
    opt.samples = o.samples;
    opt.seed = parse_seed(o.seed);
    if (o.samples < 2) throw UsageError("--samples must be at least 2");
    VolumeRatioTable t;
    if (o.point == "bolt") {
        const std::string prefix = "eguchi-hanson:";
        if (o.metric.rfind(prefix, 0) != 0) throw UsageError("--point bolt needs an eguchi-hanson:a metric");
        t = eh_bolt_psi_table(std::stod(o.metric.substr(prefix.size())), radii, opt);
    } else {
        t = psi_table(g, point_from(o, g.dimension()), radii, opt);
    }
    if (o.format == "json") {
        json j = header("volume-ratio");
        j["metric"] = o.metric;
        j["point"] = o.point;
        j["samples"] = t.samples;
        j["group_order_at_p"] = t.group_order_at_p;
        j["group_order_at_infinity"] = t.group_order_at_infinity;
        json rows = json::array();
        for (size_t i = 0; i < t.radii.size(); ++i)
            rows.push_back({{"r", t.radii[i]}, {"psi", t.psi[i]}, {"stderr", t.stderr_[i]}, {"flags", t.flags[i]}});
        j["table"] = rows;
        j["monotone"] = check_monotone(t).monotone;
        emit(o, j);
    } else if (o.format == "csv") {
        std::ostringstream os;
        os.precision(17);
        os << "r,psi,stderr,flags\n";
        for (size_t i = 0; i < t.radii.size(); ++i) {
            os << t.radii[i] << ',' << t.psi[i] << ',' << t.stderr_[i] << ',';
            for (size_t f = 0; f < t.flags[i].size(); ++f) os << (f ? ";" : "") << t.flags[i][f];
            os << '\n';
        }
        write_output(o.out, os.str());
    } else {
        throw UsageError("--format must be csv or json");
    }
    return 0;
}

int cmd_verify_all(const Options& o)
{
    verify::Config cfg;
    cfg.seed = parse_seed(o.seed);
    cfg.samples = o.samples;
    const auto t0 = std::chrono::steady_clock::now();
    auto results = verify::run_criteria(cfg, [](const verify::CriterionResult& r) {
        std::cout << verify::format_line(r) << std::endl;
    });
    const std::string doc = verify::results_json(cfg, results).dump(2) + "\n";
    if (!o.no_rerun) {
        const auto again = verify::run_criteria(cfg);
        const std::string second = verify::results_json(cfg, again).dump(2) + "\n";
        const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        results.push_back(verify::determinism_result(doc, second, total, 15 * 60));
        std::cout << verify::format_line(results.back()) << std::endl;
    }
    int passed = 0;
    for (const auto& r : results) passed += r.ok();
    std::cout << passed << "/" << results.size() << " criteria passed" << std::endl;
    if (o.out != "-") write_output(o.out, doc);
    return passed == static_cast<int>(results.size()) ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"tale: spin orbifolds, ALE compactification, twistor spinors and volume ratios"};
    app.require_subcommand(1);
    Options o;

    auto add_out = [&](CLI::App* c) { c->add_option("--out", o.out, "output path, - for standard output"); };
    auto add_seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "RNG seed (decimal or 0x hex)"); };

    auto* lifts = app.add_subcommand("spin-lifts", "enumerate lifts of a finite rotation group to Spin(n)");
    lifts->add_option("--group", o.group, "group spec")->required();
    lifts->add_option("--dim", o.dim, "ambient dimension (2 or 4)");
    add_out(lifts);
    add_seed(lifts);

    auto* weyl = app.add_subcommand("weyl-fix", "fixed dimensions on the half-spin spaces for every lift");
    weyl->add_option("--group", o.group, "group spec")->required();
    o.dim = 0;
    add_out(weyl);
    add_seed(weyl);

    auto* curv = app.add_subcommand("curvature", "curvature of a metric at a point");
    curv->add_option("--metric", o.metric, "metric spec")->required();
    curv->add_option("--point", o.point, "comma-separated coordinates")->required();
    add_out(curv);
    add_seed(curv);

    auto* inv = app.add_subcommand("invert", "ALE order estimate and regularity after inversion");
    inv->add_option("--metric", o.metric, "metric spec")->required();
    inv->add_option("--radii", o.radii, "r0:r1:count[:log|lin]");
    inv->add_option("--kmax", o.kmax, "highest derivative order (<= 3)");
    add_out(inv);
    add_seed(inv);

    auto* comp = app.add_subcommand("compactify", "one-point compactification with a regularity report");
    comp->add_option("--metric", o.metric, "metric spec")->required();
    comp->add_option("--tau", o.tau, "decay order (estimated when omitted)");
    comp->add_option("--mu", o.mu, "number of decaying derivatives");
    comp->add_option("--R", o.R, "inner radius of the ALE end");
    comp->add_option("--radii", o.radii, "radii for the estimate when --tau is omitted");
    add_out(comp);
    add_seed(comp);

    auto* tw = app.add_subcommand("twistor", "transport (phi, D phi) along a polyline");
    tw->add_option("--metric", o.metric, "metric spec")->required();
    tw->add_option("--init", o.init, "phi0.json,psi0.json")->required();
    tw->add_option("--path", o.path, "JSON array of points")->required();
    add_out(tw);
    add_seed(tw);

    auto* tz = app.add_subcommand("twistor-zeros", "zeros of a flat twistor spinor in a box");
    tz->add_option("--metric", o.metric, "metric spec (flat:n)")->required();
    tz->add_option("--init", o.init, "phi0.json,psi0.json")->required();
    tz->add_option("--box", o.box, "lo:hi for every axis");
    tz->add_option("--seeds", o.seeds, "seeds per axis");
    add_out(tz);
    add_seed(tz);

    auto* ehp = app.add_subcommand("eh-parallel", "parallel spinors of Eguchi-Hanson from loop holonomy");
    ehp->add_option("--a", o.a, "Eguchi-Hanson parameter");
    ehp->add_option("--basepoint", o.basepoint, "comma-separated base point");
    ehp->add_option("--loop-radius", o.loop_radius, "loop radius in units of a");
    add_out(ehp);
    add_seed(ehp);

    auto* vr = app.add_subcommand("volume-ratio", "Bishop ratio table psi(r)");
    vr->add_option("--metric", o.metric, "metric spec")->required();
    vr->add_option("--point", o.point, "comma-separated base point, or bolt for eguchi-hanson")->required();
    vr->add_option("--radii", o.radii, "r0:r1:count[:log|lin]");
    vr->add_option("--samples", o.samples, "number of directions");
    vr->add_option("--format", o.format, "csv or json");
    add_out(vr);
    add_seed(vr);

    auto* va = app.add_subcommand("verify-all", "run every acceptance criterion");
    va->add_option("--samples", o.samples, "directions for the volume criterion");
    va->add_flag("--no-rerun", o.no_rerun, "skip the in-process determinism rerun");
    add_out(va);
    add_seed(va);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 64;
    }

    try {
        parse_seed(o.seed);
        if (*lifts) return cmd_spin_lifts(o);
        if (*weyl) return cmd_weyl_fix(o);
        if (*curv) return cmd_curvature(o);
        if (*inv) return cmd_invert(o);
        if (*comp) return cmd_compactify(o);
        if (*tw) return cmd_twistor(o);
        if (*tz) return cmd_twistor_zeros(o);
        if (*ehp) return cmd_eh_parallel(o);
        if (*vr) return cmd_volume_ratio(o);
        if (*va) return cmd_verify_all(o);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 64;
    } catch (const CertificateError& e) {
        std::cerr << "certificate failure: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 64;
}
