#pragma once

#include "tale/errors.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>

namespace tale {

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double initial_step = 0.0;  // 0: pick from the interval length
    double max_step = std::numeric_limits<double>::infinity();
    long max_steps = 2'000'000;
};

enum class OdeStatus { completed, stopped, domain_exit, step_underflow };

template <class State>
struct OdeResult {
    State y;
    double t = 0.0;
    OdeStatus status = OdeStatus::completed;
    long accepted = 0;
    long rejected = 0;
};

namespace detail {

template <class State>
double error_norm(const State& err, const State& y0, const State& y1, const OdeOptions& o)
{
    double worst = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double scale = o.atol + o.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        worst = std::max(worst, std::abs(err[i]) / scale);
    }
    return worst;
}

}  // namespace detail

/// Dormand-Prince 5(4) with local extrapolation and a PI-free step controller.
///
/// `rhs(t, y)` returns y'. It may throw DomainError when a stage leaves the chart; the step is
/// then halved, and integration stops with domain_exit once the step can no longer shrink.
/// `observer(t, y)` is called after each accepted step; returning false stops with `stopped`.
template <class State, class Rhs, class Observer>
OdeResult<State> integrate_dopri(Rhs&& rhs, double t0, double t1, State y0, const OdeOptions& opt,
                                 Observer&& observer)
{
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    OdeResult<State> res{y0, t0, OdeStatus::completed, 0, 0};
    const double span = t1 - t0;
    if (span == 0.0) return res;
    const double dir = span > 0 ? 1.0 : -1.0;
    double h = opt.initial_step > 0 ? opt.initial_step : std::min(std::abs(span) * 1e-2, opt.max_step);
    const double h_min = 1e-14 * std::max(1.0, std::abs(span));

    State y = y0;
    double t = t0;
    State k1 = rhs(t, y);
    while (dir * (t1 - t) > 0) {
        if (res.accepted + res.rejected > opt.max_steps) throw CertificateError("ODE step budget exhausted");
        h = std::min({h, opt.max_step, std::abs(t1 - t)});
        const double s = dir * h;
        State y_new, k7, err;
        bool stage_failed = false;
        try {
            const State k2 = rhs(t + c2 * s, State(y + s * (a21 * k1)));
            const State k3 = rhs(t + c3 * s, State(y + s * (a31 * k1 + a32 * k2)));
            const State k4 = rhs(t + c4 * s, State(y + s * (a41 * k1 + a42 * k2 + a43 * k3)));
            const State k5 = rhs(t + c5 * s, State(y + s * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
            const State k6 = rhs(t + s, State(y + s * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
            y_new = y + s * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            k7 = rhs(t + s, y_new);
            err = s * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        } catch (const DomainError&) {
            stage_failed = true;
        }
        if (stage_failed) {
            ++res.rejected;
            h *= 0.5;
            if (h < h_min) {
                res.y = y;
                res.t = t;
                res.status = OdeStatus::domain_exit;
                return res;
            }
            continue;
        }
        const double en = detail::error_norm(err, y, y_new, opt);
        if (!(en <= 1.0)) {
            ++res.rejected;
            const double shrink = std::isfinite(en) ? std::max(0.1, 0.9 * std::pow(en, -0.2)) : 0.1;
            h *= shrink;
            if (h < h_min) {
                res.y = y;
                res.t = t;
                res.status = OdeStatus::step_underflow;
                return res;
            }
            continue;
        }
        ++res.accepted;
        t = (std::abs(t1 - (t + s)) < h_min) ? t1 : t + s;
        y = std::move(y_new);
        k1 = std::move(k7);
        const double grow = en > 0 ? std::min(5.0, 0.9 * std::pow(en, -0.2)) : 5.0;
        h *= grow;
        if (!observer(t, y)) {
            res.y = y;
            res.t = t;
            res.status = OdeStatus::stopped;
            return res;
        }
    }
    res.y = y;
    res.t = t;
    return res;
}

template <class State, class Rhs>
OdeResult<State> integrate_dopri(Rhs&& rhs, double t0, double t1, State y0, const OdeOptions& opt = {})
{
    return integrate_dopri(std::forward<Rhs>(rhs), t0, t1, std::move(y0), opt,
                           [](double, const State&) { return true; });
}

}  // namespace tale
