#include "tale/conformal.hpp"
#include "tale/errors.hpp"
#include "tale/group_theory.hpp"
#include "tale/metric.hpp"

#include <charconv>
#include <string>
#include <vector>

namespace tale {

namespace {

class SpecTokens {
public:
    explicit SpecTokens(const std::string& spec) : spec_(spec)
    {
        size_t start = 0;
        for (;;) {
            const size_t end = spec.find(':', start);
            tokens_.push_back(spec.substr(start, end - start));
            if (end == std::string::npos) break;
            start = end + 1;
        }
    }

    bool done() const { return pos_ >= tokens_.size(); }
    const std::string& peek() const { return tokens_[pos_]; }

    std::string next(const char* what)
    {
        if (done()) fail(std::string("missing ") + what);
        return tokens_[pos_++];
    }

    int next_int(const char* what)
    {
        const std::string t = next(what);
        int v = 0;
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || ptr != t.data() + t.size()) fail(std::string("bad integer for ") + what + ": " + t);
        return v;
    }

    double next_double(const char* what)
    {
        const std::string t = next(what);
        try {
            size_t used = 0;
            const double v = std::stod(t, &used);
            if (used != t.size()) throw std::invalid_argument(t);
            return v;
        } catch (const std::exception&) {
            fail(std::string("bad number for ") + what + ": " + t);
        }
    }

    [[noreturn]] void fail(const std::string& msg) const
    {
        throw UsageError("metric spec '" + spec_ + "': " + msg);
    }

private:
    std::string spec_;
    std::vector<std::string> tokens_;
    size_t pos_ = 0;
};

std::string take_group(SpecTokens& t)
{
    std::string head = t.next("group");
    if (head == "cyclic") {
        head += ":" + t.next("cyclic order");
        if (!t.done() && t.peek().find(',') != std::string::npos) head += ":" + t.next("embedding");
    } else if (head == "binary-dihedral") {
        head += ":" + t.next("dihedral index");
    }
    return head;
}

ScalarField take_factor(SpecTokens& t, int n)
{
    const std::string f = t.next("conformal factor");
    if (f == "rho2") return rho_squared_factor(n);
    if (f == "inv-rho2") return inverse_rho_squared_factor(n);
    if (f == "sphere-factor") return sphere_factor(n);
    t.fail("unknown conformal factor '" + f + "' (expected rho2, inv-rho2 or sphere-factor)");
}

MetricChart take_chart(SpecTokens& t)
{
    const std::string kind = t.next("metric kind");
    if (kind == "flat") {
        const int n = t.next_int("dimension");
        if (n < 1) t.fail("dimension must be positive");
        return flat_metric(n);
    }
    if (kind == "sphere") {
        const int n = t.next_int("dimension");
        const double r = t.next_double("radius");
        if (n < 1 || !(r > 0)) t.fail("sphere needs a positive dimension and radius");
        return round_sphere_chart(n, r);
    }
    if (kind == "eguchi-hanson") {
        const double a = t.next_double("Eguchi-Hanson parameter");
        if (!(a > 0)) t.fail("Eguchi-Hanson parameter must be positive");
        return eguchi_hanson(a);
    }
    if (kind == "quotient") {
        const MetricChart base = take_chart(t);
        const std::string group = take_group(t);
        return quotient_annulus(base, parse_group_spec(group, base.dimension()));
    }
    if (kind == "rescale") {
        const MetricChart base = take_chart(t);
        return conformal_rescale(base, take_factor(t, base.dimension()));
    }
    if (kind == "invert") {
        const MetricChart base = take_chart(t);
        const double r = t.next_double("inversion radius");
        if (!(r > 0)) t.fail("inversion radius must be positive");
        return pushforward_inverted_metric(base, r);
    }
    t.fail("unknown metric kind '" + kind + "'");
}

}  // namespace

MetricChart parse_metric_spec(const std::string& spec)
{
    SpecTokens t(spec);
    MetricChart chart = take_chart(t);
    if (!t.done()) t.fail("trailing tokens starting at '" + t.peek() + "'");
    return chart.with_label(spec);
}

}  // namespace tale
