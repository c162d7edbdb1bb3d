#pragma once

#include "tale/linalg.hpp"

#include <array>
#include <cmath>

namespace tale {

/// Hamilton quaternion w + x i + y j + z k. Unit quaternions model Sp(1) = SU(2) = Spin(3).
struct Quaternion {
    double w = 1.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    static Quaternion identity() { return {}; }

    friend Quaternion operator*(const Quaternion& a, const Quaternion& b)
    {
        return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
                a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
                a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
                a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
    }
    friend Quaternion operator-(const Quaternion& a) { return {-a.w, -a.x, -a.y, -a.z}; }
    friend Quaternion operator*(double s, const Quaternion& a) { return {s * a.w, s * a.x, s * a.y, s * a.z}; }
    friend Quaternion operator+(const Quaternion& a, const Quaternion& b)
    {
        return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z};
    }

    Quaternion conj() const { return {w, -x, -y, -z}; }
    double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
    Quaternion normalized() const { return (1.0 / norm()) * *this; }

    /// Components as a point of R^4 in the basis (1, i, j, k).
    Eigen::Vector4d vec() const { return {w, x, y, z}; }
    static Quaternion from_vec(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }

    /// 2x2 complex matrix of left multiplication on H = C^2 (standard SU(2) model).
    Eigen::Matrix2cd su2() const;

    double distance(const Quaternion& o) const
    {
        return std::sqrt((w - o.w) * (w - o.w) + (x - o.x) * (x - o.x) + (y - o.y) * (y - o.y) +
                         (z - o.z) * (z - o.z));
    }
};

/// Product of unit quaternions, renormalized to keep |q| = 1 to rounding.
inline Quaternion unit_product(const Quaternion& a, const Quaternion& b) { return (a * b).normalized(); }

/// exp of a pure imaginary quaternion (x, y, z).
Quaternion quaternion_exp(const Eigen::Vector3d& v);

/// Imaginary part u with exp(u) = q, |u| <= pi.
Eigen::Vector3d quaternion_log(const Quaternion& q);

/// Element (qL, qR) of Sp(1) x Sp(1) = Spin(4); acts on R^4 = H by x -> qL x conj(qR).
struct QuaternionPair {
    Quaternion left;
    Quaternion right;

    friend QuaternionPair operator*(const QuaternionPair& a, const QuaternionPair& b)
    {
        return {unit_product(a.left, b.left), unit_product(a.right, b.right)};
    }
    friend QuaternionPair operator-(const QuaternionPair& a) { return {-a.left, -a.right}; }

    Eigen::Matrix4d rotation() const;
    double distance(const QuaternionPair& o) const { return std::max(left.distance(o.left), right.distance(o.right)); }
};

/// Unit quaternion whose conjugation action on Im H reproduces the given SO(3) matrix (sign is arbitrary).
Quaternion quaternion_from_rotation3(const Eigen::Matrix3d& r);

/// One of the two preimages of an SO(4) matrix under (qL, qR) -> (x -> qL x conj(qR)).
QuaternionPair quaternion_pair_from_rotation4(const Eigen::Matrix4d& r);

}  // namespace tale
