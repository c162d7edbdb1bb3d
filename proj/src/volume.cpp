#include "tale/volume.hpp"

#include "tale/curvature.hpp"
#include "tale/errors.hpp"
#include "tale/ode.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <thread>

namespace tale {

namespace {

constexpr double kPi = std::numbers::pi;
// Relative error budget of the radial ODE quadrature, folded into every standard error.
constexpr double kQuadratureError = 1e-8;

// Euclidean-unit omega -> g_p-unit direction and a g_p-orthonormal basis of its complement.
struct PolarFrame {
    Vec theta;
    Mat complement;
    double orientation = 1.0;
};

PolarFrame polar_frame(const Mat& gp, const Vec& omega)
{
    const int n = static_cast<int>(gp.rows());
    const Eigen::LLT<Mat> llt(gp);
    if (llt.info() != Eigen::Success) throw DomainError("metric is not positive definite at the base point");
    const Mat F = llt.matrixU().solve(Mat::Identity(n, n));  // F^T g F = Id
    const Vec w = omega.normalized();
    const Eigen::HouseholderQR<Mat> qr{Mat(w)};
    const Mat q = qr.householderQ();
    PolarFrame out;
    out.theta = F * w;
    out.complement = F * q.rightCols(n - 1);
    Mat basis(n, n);
    basis << out.complement, out.theta;
    out.orientation = basis.determinant() > 0 ? 1.0 : -1.0;
    return out;
}

// State: x, v, Y (n x (n-1)), W = Y', running integral of J.
struct JacobiSystem {
    const MetricChart& g;
    Vec p;
    int n;
    double orientation;

    Eigen::Index size() const { return 2 * n + 2 * n * (n - 1) + 1; }

    Vec initial(const PolarFrame& f) const
    {
        const int m = n - 1;
        Vec s = Vec::Zero(size());
        s.segment(0, n) = p;
        s.segment(n, n) = f.theta;
        Eigen::Map<Mat>(s.data() + 2 * n + n * m, n, m) = f.complement;
        return s;
    }

    double jacobian(const Vec& s) const
    {
        const int m = n - 1;
        const Vec x = s.segment(0, n);
        Mat b(n, n);
        b << Eigen::Map<const Mat>(s.data() + 2 * n, n, m), s.segment(n, n);
        return orientation * std::sqrt(g.metric(x).determinant()) * b.determinant();
    }

    Vec operator()(double, const Vec& s) const
    {
        const int m = n - 1;
        const Vec x = s.segment(0, n);
        const Vec v = s.segment(n, n);
        if ((x - p).squaredNorm() > 0 && !g.domain().contains(x)) throw DomainError("geodesic left the chart");
        const MetricJet jet = g.jet(x, 2);
        const auto gamma = christoffel(jet);
        const auto dgamma = christoffel_derivatives(jet);
        const Eigen::Map<const Mat> Y(s.data() + 2 * n, n, m);
        const Eigen::Map<const Mat> W(s.data() + 2 * n + n * m, n, m);
        Vec out(size());
        out.segment(0, n) = v;
        for (int k = 0; k < n; ++k) out[n + k] = -v.dot(gamma[static_cast<size_t>(k)] * v);
        Eigen::Map<Mat> dY(out.data() + 2 * n, n, m);
        Eigen::Map<Mat> dW(out.data() + 2 * n + n * m, n, m);
        dY = W;
        for (int k = 0; k < n; ++k) {
            const Mat& gk = gamma[static_cast<size_t>(k)];
            for (int c = 0; c < m; ++c) {
                double acc = -2.0 * v.dot(gk * W.col(c));
                for (int l = 0; l < n; ++l)
                    acc -= Y(l, c) * v.dot(dgamma[static_cast<size_t>(l)][static_cast<size_t>(k)] * v);
                dW(k, c) = acc;
            }
        }
        Mat b(n, n);
        b << Y, v;
        out[size() - 1] = orientation * std::sqrt(jet.g.determinant()) * b.determinant();
        return out;
    }
};

OdeOptions volume_ode_options()
{
    OdeOptions o;
    o.rtol = 1e-9;
    o.atol = 1e-12;
    return o;
}

template <class Work>
void parallel_for(int count, int threads, Work&& work)
{
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) work(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (int i = next++; i < count && !failed; i = next++) {
                try {
                    work(i);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

void validate_radii(const std::vector<double>& radii)
{
    if (radii.empty()) throw DomainError("no radii given");
    for (size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0)) throw DomainError("radii must be positive");
        if (i > 0 && !(radii[i] > radii[i - 1])) throw DomainError("radii must be strictly increasing");
    }
}

struct DirectionStats {
    std::vector<double> mean;
    std::vector<double> stderr_;
};

DirectionStats reduce(const std::vector<std::vector<double>>& per_direction, size_t radii)
{
    DirectionStats s{std::vector<double>(radii, 0.0), std::vector<double>(radii, 0.0)};
    const double count = static_cast<double>(per_direction.size());
    for (size_t r = 0; r < radii; ++r) {
        double sum = 0.0, sq = 0.0;
        for (const auto& d : per_direction) sum += d[r];
        const double mean = sum / count;
        for (const auto& d : per_direction) sq += (d[r] - mean) * (d[r] - mean);
        s.mean[r] = mean;
        s.stderr_[r] = std::sqrt(sq / std::max(1.0, count - 1.0) / count);
    }
    return s;
}

// Stabilizer order of p in the deck group and the smallest coordinate distance to a non-trivial image.
std::pair<int, double> deck_data(const ChartDomain& dom, const Vec& p)
{
    if (!dom.deck) return {1, kNoTime};
    int stab = 0;
    double nearest = kNoTime;
    for (const Mat& m : dom.deck->elements()) {
        const double d = (m * p - p).norm();
        if (d < 1e-12 * std::max(1.0, p.norm()))
            ++stab;
        else
            nearest = std::min(nearest, d);
    }
    return {stab, nearest};
}

}  // namespace

int worker_count(int requested)
{
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    int want = requested > 0 ? requested : hw;
    if (const char* env = std::getenv("TALE_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) want = std::min(want, cap);
    }
    return std::max(1, want);
}

ExpJacobian exp_jacobian(const MetricChart& g, const Vec& p, const Vec& theta, double t)
{
    const int n = g.dimension();
    if (theta.size() != n) throw DomainError("direction has the wrong dimension");
    if (!(t >= 0)) throw DomainError("time must be non-negative");
    const Mat gp = g.metric(p);
    // Build the frame so that the g_p-unit direction equals theta / |theta|_g.
    const Eigen::LLT<Mat> llt(gp);
    const Vec omega = llt.matrixU() * theta;
    const PolarFrame f = polar_frame(gp, omega);
    const JacobiSystem sys{g, p, n, f.orientation};
    ExpJacobian out;
    if (t == 0) return out;
    double first_negative = kNoTime;
    auto observer = [&](double s, const Vec& y) {
        if (sys.jacobian(y) < 0 && s < first_negative) first_negative = s;
        return true;
    };
    const auto res = integrate_dopri(sys, 0.0, t, sys.initial(f), volume_ode_options(), observer);
    out.exited = res.status != OdeStatus::completed;
    out.value = sys.jacobian(res.y);
    out.conjugate = first_negative < t * (1 - 1e-6);
    return out;
}

RadialIntegral radial_integral(const MetricChart& g, const Vec& p, const Vec& theta, const std::vector<double>& radii,
                               const CutTime& cut)
{
    const int n = g.dimension();
    const Mat gp = g.metric(p);
    const Eigen::LLT<Mat> llt(gp);
    const PolarFrame f = polar_frame(gp, llt.matrixU() * theta);
    const JacobiSystem sys{g, p, n, f.orientation};
    RadialIntegral out;
    out.integral.assign(radii.size(), 0.0);
    if (cut) out.cut_time = cut(f.theta);
    const double last = radii.back();
    double stop = std::min(last, out.cut_time);

    Vec state = sys.initial(f);
    double t = 0.0;
    size_t next = 0;
    auto record_until = [&](double time, double value) {
        while (next < radii.size() && radii[next] <= time * (1 + 1e-12)) out.integral[next++] = value;
    };
    bool negative = false;
    auto observer = [&](double, const Vec& y) {
        negative = sys.jacobian(y) < 0;
        return !negative;
    };
    while (t < stop && next < radii.size()) {
        const double target = std::min(radii[next], stop);
        const auto res = integrate_dopri(sys, t, target, state, volume_ode_options(), observer);
        if (res.status == OdeStatus::stopped) {
            out.conjugate_time = res.t;
            state = res.y;
            t = res.t;
            break;
        }
        state = res.y;
        t = res.t;
        if (res.status != OdeStatus::completed) {
            out.exit_time = t;
            break;
        }
        record_until(t, state[state.size() - 1]);
    }
    // Everything past the stopping time keeps the integral reached there.
    const double final_value = state[state.size() - 1];
    while (next < radii.size()) out.integral[next++] = final_value;
    return out;
}

VolumeRatioTable psi_table(const MetricChart& g, const Vec& p, const std::vector<double>& radii,
                           const VolumeOptions& opt)
{
    validate_radii(radii);
    const int n = g.dimension();
    if (opt.samples < 2) throw DomainError("at least two direction samples are needed");
    const auto dirs = sphere_directions(n, opt.samples, opt.seed);
    const auto [stab, nearest] = deck_data(g.domain(), p);

    std::vector<RadialIntegral> per(dirs.size());
    parallel_for(static_cast<int>(dirs.size()), worker_count(opt.threads), [&](int i) {
        // Directions are given Euclidean-unit; radial_integral normalizes them in g_p.
        const Mat gp = g.metric(p);
        const Eigen::LLT<Mat> llt(gp);
        const Vec theta = llt.matrixU().solve(dirs[static_cast<size_t>(i)]);
        per[static_cast<size_t>(i)] = radial_integral(g, p, theta, radii, opt.cut);
    });

    std::vector<std::vector<double>> values;
    values.reserve(per.size());
    for (const auto& r : per) values.push_back(r.integral);
    const DirectionStats stats = reduce(values, radii.size());

    VolumeRatioTable table;
    table.basepoint = p;
    table.radii = radii;
    table.samples = opt.samples;
    table.group_order_at_p = stab;
    table.group_order_at_infinity = g.domain().deck_order();
    const double area = unit_sphere_area(n) / stab;
    const double ball = unit_ball_volume(n);
    for (size_t r = 0; r < radii.size(); ++r) {
        const double norm = ball * std::pow(radii[r], n);
        table.psi.push_back(area * stats.mean[r] / norm);
        table.stderr_.push_back(std::hypot(area * stats.stderr_[r] / norm, kQuadratureError * table.psi[r]));
        std::vector<std::string> flags;
        int conj = 0, exited = 0;
        for (const auto& d : per) {
            conj += d.conjugate_time < radii[r] * (1 - 1e-6);
            exited += d.exit_time < radii[r];
        }
        if (conj > 0.01 * static_cast<double>(per.size())) flags.push_back("conjugate");
        if (exited > 0) flags.push_back("truncated");
        if (radii[r] > 0.5 * nearest) flags.push_back("deck-overlap");
        if (std::abs(table.psi[r] - 1.0 / stab) <= 2 * table.stderr_[r]) flags.push_back("rigid");
        table.flags.push_back(flags);
    }
    return table;
}

BallVolume ball_volume(const MetricChart& g, const Vec& p, double r, const VolumeOptions& opt)
{
    const VolumeRatioTable t = psi_table(g, p, {r}, opt);
    const double norm = unit_ball_volume(g.dimension()) * std::pow(r, g.dimension());
    BallVolume out;
    out.volume = t.psi[0] * norm;
    out.stderr_ = t.stderr_[0] * norm;
    for (const auto& f : t.flags[0])
        if (f != "rigid") out.flags.push_back(f);
    return out;
}

namespace {

// Orbit-space geodesic from the bolt point with its alpha-variation.
// State: u, th, pu, pth, r, s (s = dr/du), then the same six varied, then the volume integral.
struct BoltSystem {
    double a;

    Vec operator()(double, const Vec& y) const
    {
        const double pu = y[2], pth = y[3], r = y[4], s = y[5];
        const double du = y[6], dth = y[7], dpu = y[8], dpth = y[9], dr = y[10], ds = y[11];
        (void)du;
        const double a4 = a * a * a * a;
        const double r5 = std::pow(r, 5);
        Vec out(13);
        out[0] = pu;
        out[1] = pth;
        out[2] = r * s * pth * pth / 4;
        out[3] = -2 * (s / r) * pu * pth;
        out[4] = s * pu;
        out[5] = 2 * a4 / r5 * pu;
        out[6] = dpu;
        out[7] = dpth;
        out[8] = (dr * s * pth * pth + r * ds * pth * pth + 2 * r * s * pth * dpth) / 4;
        out[9] = -2 * ((ds / r - s * dr / (r * r)) * pu * pth + (s / r) * (dpu * pth + pu * dpth));
        out[10] = ds * pu + s * dpu;
        out[11] = -10 * a4 / (r5 * r) * dr * pu + 2 * a4 / r5 * dpu;
        out[12] = density(y);
        (void)dth;
        return out;
    }

    static double density(const Vec& y)
    {
        const double jac = std::abs(y[6] * y[3] - y[7] * y[2]);
        return 0.5 * kPi * kPi * std::pow(y[4], 3) * y[5] * std::sin(y[1]) * jac;
    }
};

std::vector<double> bolt_direction(double a, double alpha, const std::vector<double>& radii)
{
    const BoltSystem sys{a};
    Vec y = Vec::Zero(13);
    y[2] = std::cos(alpha);
    y[3] = 2 * std::sin(alpha) / a;
    y[4] = a;
    y[8] = -std::sin(alpha);
    y[9] = 2 * std::cos(alpha) / a;
    OdeOptions o = volume_ode_options();
    o.max_step = 0.05 * a;

    std::vector<double> out(radii.size(), 0.0);
    double t = 0.0;
    bool cut = false;
    auto observer = [&](double, const Vec& s) { return s[1] < kPi; };
    for (size_t i = 0; i < radii.size(); ++i) {
        if (!cut && t < radii[i]) {
            auto res = integrate_dopri(sys, t, radii[i], y, o, observer);
            y = res.y;
            t = res.t;
            if (res.status == OdeStatus::stopped) {
                // Newton steps back onto theta = pi.
                for (int it = 0; it < 3 && std::abs(y[1] - kPi) > 1e-13; ++it) {
                    const double dt = (kPi - y[1]) / y[3];
                    const auto back = integrate_dopri(sys, t, t + dt, y, o);
                    y = back.y;
                    t = back.t;
                }
                cut = true;
            } else if (res.status != OdeStatus::completed) {
                throw CertificateError("orbit-space geodesic integration failed");
            }
        }
        out[i] = y[12];
    }
    return out;
}

}  // namespace

VolumeRatioTable eh_bolt_psi_table(double a, const std::vector<double>& radii, const VolumeOptions& opt)
{
    if (!(a > 0)) throw DomainError("Eguchi-Hanson parameter must be positive");
    validate_radii(radii);
    if (opt.samples < 2) throw DomainError("at least two direction samples are needed");
    const auto pts = sobol_points(1, opt.samples, opt.seed);
    std::vector<std::vector<double>> per(pts.size());
    parallel_for(static_cast<int>(pts.size()), worker_count(opt.threads), [&](int i) {
        per[static_cast<size_t>(i)] = bolt_direction(a, 0.5 * kPi * pts[static_cast<size_t>(i)][0], radii);
    });
    const DirectionStats stats = reduce(per, radii.size());

    VolumeRatioTable table;
    table.basepoint = Vec::Zero(4);
    table.basepoint_label = "bolt";
    table.radii = radii;
    table.samples = opt.samples;
    table.group_order_at_p = 1;
    table.group_order_at_infinity = 2;
    for (size_t r = 0; r < radii.size(); ++r) {
        const double norm = unit_ball_volume(4) * std::pow(radii[r], 4) / (0.5 * kPi);
        table.psi.push_back(stats.mean[r] / norm);
        table.stderr_.push_back(std::hypot(stats.stderr_[r] / norm, kQuadratureError * table.psi[r]));
        std::vector<std::string> flags;
        if (std::abs(table.psi[r] - 1.0) <= 2 * table.stderr_[r]) flags.push_back("rigid");
        table.flags.push_back(flags);
    }
    return table;
}

MonotoneVerdict check_monotone(const VolumeRatioTable& table)
{
    MonotoneVerdict v;
    v.worst_excess = -kNoTime;
    for (size_t i = 0; i + 1 < table.psi.size(); ++i) {
        const double slack = 2 * std::hypot(table.stderr_[i], table.stderr_[i + 1]);
        const double excess = table.psi[i + 1] - table.psi[i] - slack;
        if (excess > v.worst_excess) {
            v.worst_excess = excess;
            v.worst_index = static_cast<int>(i);
        }
    }
    if (table.psi.size() < 2) v.worst_excess = 0.0;
    v.monotone = v.worst_excess <= 0.0;
    return v;
}

ZeroSumVerdict check_zero_sum_bound(const std::vector<int>& group_orders)
{
    ZeroSumVerdict v;
    for (int k : group_orders) {
        if (k < 1) throw DomainError("group orders must be positive");
        v.sum += 1.0 / k;
        v.smooth_count += k == 1;
    }
    v.admissible = v.sum <= 1.0 + 1e-12;
    return v;
}

}  // namespace tale
