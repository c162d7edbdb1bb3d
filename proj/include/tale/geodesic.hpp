#pragma once

#include "tale/metric.hpp"
#include "tale/ode.hpp"

#include <vector>

namespace tale {

struct GeodesicPath {
    std::vector<double> t;
    std::vector<Vec> x;
    std::vector<Vec> v;
    bool exited = false;  // left the chart before T; the path is truncated

    const Vec& end() const { return x.back(); }
};

/// Geodesic equation x'' = -Gamma(x', x') integrated with adaptive Dormand-Prince.
GeodesicPath geodesic_shoot(const MetricChart& g, const Vec& p, const Vec& v, double T, const OdeOptions& opt = {});

/// exp_p(v); throws DomainError if the geodesic leaves the chart before t = 1.
Vec exp_map(const MetricChart& g, const Vec& p, const Vec& v);

struct DistanceEstimate {
    double distance = 0.0;
    Vec initial_velocity;
    bool converged = false;
    bool approximate = true;  // no cut-locus guarantee
};

/// Smallest |v|_g over shooting solutions of exp_p(v) = q found from several starting guesses.
DistanceEstimate distance_estimate(const MetricChart& g, const Vec& p, const Vec& q, int starts = 8);

/// |v|_g
double metric_norm(const MetricChart& g, const Vec& p, const Vec& v);

}  // namespace tale
