#pragma once

#include "tale/linalg.hpp"

#include <cstdint>
#include <vector>

namespace tale {

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

/// Low-discrepancy points in [0,1)^dim: Sobol sequence with a seeded Cranley-Patterson shift.
std::vector<Vec> sobol_points(int dim, int count, std::uint64_t seed);

/// Unit vectors in R^n from Sobol points pushed through the normal quantile.
std::vector<Vec> sphere_directions(int n, int count, std::uint64_t seed);

/// Area of the unit sphere S^(n-1) and volume of the unit ball in R^n.
double unit_sphere_area(int n);
double unit_ball_volume(int n);

}  // namespace tale
