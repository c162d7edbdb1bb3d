#pragma once

#include "tale/metric.hpp"
#include "tale/sampling.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace tale {

inline constexpr double kNoTime = std::numeric_limits<double>::infinity();

struct ExpJacobian {
    double value = 0.0;
    bool conjugate = false;  // the determinant changed sign before t
    bool exited = false;     // the geodesic left the chart before t
};

/// det d(exp_p) at t*theta times t^(n-1), from the Jacobi equation along the geodesic; flat space gives t^(n-1).
/// theta is rescaled to unit length in g_p.
ExpJacobian exp_jacobian(const MetricChart& g, const Vec& p, const Vec& theta, double t);

/// Polar integrals along one direction: integral[i] = int_0^min(radii[i], stop) J dt.
struct RadialIntegral {
    std::vector<double> integral;
    double conjugate_time = kNoTime;
    double exit_time = kNoTime;
    double cut_time = kNoTime;
};

/// Optional cut time per g_p-unit direction; integration stops there.
using CutTime = std::function<double(const Vec& theta)>;

RadialIntegral radial_integral(const MetricChart& g, const Vec& p, const Vec& theta, const std::vector<double>& radii,
                               const CutTime& cut = {});

struct VolumeOptions {
    int samples = 4096;
    std::uint64_t seed = kDefaultSeed;
    int threads = 0;  // 0: TALE_THREADS or hardware concurrency
    CutTime cut;
};

/// Flags: "conjugate" (conjugate point before r in more than 1% of directions), "truncated" (chart exit),
/// "deck-overlap" (p not fixed by the deck group and r beyond half the distance to its nearest image),
/// "rigid" (psi equals 1/#Gamma_p within 2 stderr).
struct BallVolume {
    double volume = 0.0;
    double stderr_ = 0.0;
    std::vector<std::string> flags;
    bool approximate() const { return !flags.empty(); }
};

BallVolume ball_volume(const MetricChart& g, const Vec& p, double r, const VolumeOptions& opt = {});

struct VolumeRatioTable {
    Vec basepoint;
    std::string basepoint_label;
    std::vector<double> radii;
    std::vector<double> psi;
    std::vector<double> stderr_;
    std::vector<std::vector<std::string>> flags;
    int samples = 0;
    int group_order_at_p = 1;
    int group_order_at_infinity = 1;
};

VolumeRatioTable psi_table(const MetricChart& g, const Vec& p, const std::vector<double>& radii,
                           const VolumeOptions& opt = {});

/// Eguchi-Hanson with the base point on the bolt. The isotropy torus at a bolt point makes every geodesic
/// from it orthogonal to the torus orbits, so volumes reduce to the orbit space du^2 + (r(u)/2)^2 dtheta^2
/// with orbit area (pi^2/2) r^3 (dr/du) sin(theta). Directions are an angle alpha in [0, pi/2]; the cut time
/// is the first arrival at theta = pi.
VolumeRatioTable eh_bolt_psi_table(double a, const std::vector<double>& radii, const VolumeOptions& opt = {});

struct MonotoneVerdict {
    bool monotone = true;
    double worst_excess = 0.0;  // max over i of psi[i+1] - psi[i] - 2 sqrt(se_i^2 + se_{i+1}^2)
    int worst_index = -1;
};

MonotoneVerdict check_monotone(const VolumeRatioTable& table);

struct ZeroSumVerdict {
    double sum = 0.0;  // sum of 1/#Gamma_{p_i}
    bool admissible = true;
    int smooth_count = 0;
};

/// 1 >= sum 1/#Gamma_{p_i} over the claimed zeros.
ZeroSumVerdict check_zero_sum_bound(const std::vector<int>& group_orders);

/// Worker count from TALE_THREADS, capped by the hardware.
int worker_count(int requested = 0);

}  // namespace tale
