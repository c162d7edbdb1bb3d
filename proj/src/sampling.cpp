#include "tale/sampling.hpp"

#include "tale/errors.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/random/sobol.hpp>

#include <cmath>
#include <numbers>
#include <random>

namespace tale {

std::vector<Vec> sobol_points(int dim, int count, std::uint64_t seed)
{
    if (dim < 1 || count < 0) throw DomainError("invalid Sobol request");
    boost::random::sobol engine(static_cast<std::size_t>(dim));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    Vec shift(dim);
    for (int i = 0; i < dim; ++i) shift[i] = ud(rng);
    const double range = static_cast<double>(engine.max()) + 1.0;
    std::vector<Vec> out;
    out.reserve(static_cast<size_t>(count));
    for (int c = 0; c < count; ++c) {
        Vec p(dim);
        for (int i = 0; i < dim; ++i) {
            const double u = (static_cast<double>(engine()) + 0.5) / range + shift[i];
            p[i] = u - std::floor(u);
        }
        out.push_back(p);
    }
    return out;
}

std::vector<Vec> sphere_directions(int n, int count, std::uint64_t seed)
{
    const boost::math::normal normal;
    std::vector<Vec> out = sobol_points(n, count, seed);
    for (Vec& p : out) {
        for (int i = 0; i < n; ++i) {
            const double u = std::clamp(p[i], 1e-15, 1 - 1e-15);
            p[i] = boost::math::quantile(normal, u);
        }
        const double r = p.norm();
        if (r < 1e-12) {
            p.setZero();
            p[0] = 1;
        } else {
            p /= r;
        }
    }
    return out;
}

double unit_sphere_area(int n) { return 2 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0); }

double unit_ball_volume(int n) { return unit_sphere_area(n) / n; }

}  // namespace tale
