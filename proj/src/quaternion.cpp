#include "tale/quaternion.hpp"

#include <algorithm>

namespace tale {

Eigen::Matrix2cd Quaternion::su2() const
{
    const Complex a{w, x};
    const Complex b{y, z};
    Eigen::Matrix2cd m;
    m << a, b, -std::conj(b), std::conj(a);
    return m;
}

Quaternion quaternion_exp(const Eigen::Vector3d& v)
{
    const double t = v.norm();
    if (t < 1e-300) return {};
    const double s = std::sin(t) / t;
    return Quaternion{std::cos(t), s * v[0], s * v[1], s * v[2]}.normalized();
}

Eigen::Vector3d quaternion_log(const Quaternion& q)
{
    const Eigen::Vector3d im{q.x, q.y, q.z};
    const double s = im.norm();
    if (s < 1e-300) {
        // q = +1 gives 0; q = -1 gives any vector of length pi.
        return q.w > 0 ? Eigen::Vector3d::Zero() : Eigen::Vector3d{M_PI, 0.0, 0.0};
    }
    const double t = std::atan2(s, q.w);
    return (t / s) * im;
}

namespace {

Eigen::Matrix4d left_matrix(const Quaternion& p)
{
    Eigen::Matrix4d m;
    m.col(0) = (p * Quaternion{1, 0, 0, 0}).vec();
    m.col(1) = (p * Quaternion{0, 1, 0, 0}).vec();
    m.col(2) = (p * Quaternion{0, 0, 1, 0}).vec();
    m.col(3) = (p * Quaternion{0, 0, 0, 1}).vec();
    return m;
}

}  // namespace

Eigen::Matrix4d QuaternionPair::rotation() const
{
    Eigen::Matrix4d m;
    const Quaternion cr = right.conj();
    const Quaternion basis[4] = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
    for (int c = 0; c < 4; ++c) m.col(c) = (left * basis[c] * cr).vec();
    return m;
}

Quaternion quaternion_from_rotation3(const Eigen::Matrix3d& r)
{
    // Shepperd's method: pick the largest of the four squared components.
    const double tr = r.trace();
    const std::array<double, 4> cand{1 + tr, 1 + 2 * r(0, 0) - tr, 1 + 2 * r(1, 1) - tr, 1 + 2 * r(2, 2) - tr};
    const auto best = static_cast<int>(std::max_element(cand.begin(), cand.end()) - cand.begin());
    Quaternion q;
    const double s = 0.5 * std::sqrt(std::max(cand[best], 0.0));
    const double f = 0.25 / s;
    switch (best) {
    case 0:
        q = {s, (r(2, 1) - r(1, 2)) * f, (r(0, 2) - r(2, 0)) * f, (r(1, 0) - r(0, 1)) * f};
        break;
    case 1:
        q = {(r(2, 1) - r(1, 2)) * f, s, (r(0, 1) + r(1, 0)) * f, (r(0, 2) + r(2, 0)) * f};
        break;
    case 2:
        q = {(r(0, 2) - r(2, 0)) * f, (r(0, 1) + r(1, 0)) * f, s, (r(1, 2) + r(2, 1)) * f};
        break;
    default:
        q = {(r(1, 0) - r(0, 1)) * f, (r(0, 2) + r(2, 0)) * f, (r(1, 2) + r(2, 1)) * f, s};
        break;
    }
    return q.normalized();
}

QuaternionPair quaternion_pair_from_rotation4(const Eigen::Matrix4d& r)
{
    const Quaternion p = Quaternion::from_vec(r.col(0)).normalized();
    const Eigen::Matrix4d fixed_one = left_matrix(p.conj()) * r;
    const Quaternion qr = quaternion_from_rotation3(fixed_one.bottomRightCorner<3, 3>());
    return {unit_product(p, qr), qr};
}

}  // namespace tale
