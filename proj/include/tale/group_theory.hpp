#pragma once

#include "tale/linalg.hpp"
#include "tale/quaternion.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tale {

inline constexpr double kGroupTolerance = 1e-10;

/// Finite subgroup of SO(n), n in {2, 3, 4}, with its Cayley table.
///
/// Element 0 is always the identity. For n = 4 every element also carries one of its
/// two quaternion-pair preimages in Spin(4) = Sp(1) x Sp(1).
class FiniteRotationGroup {
public:
    /// Validates orthogonality, det = +1 and closure; builds the Cayley table.
    /// Throws DomainError when the matrices do not form a group in SO(n).
    static FiniteRotationGroup from_matrices(int dimension, std::vector<Mat> elements);

    int dimension() const { return dim_; }
    int order() const { return static_cast<int>(elements_.size()); }
    const Mat& element(int i) const { return elements_[static_cast<size_t>(i)]; }
    const std::vector<Mat>& elements() const { return elements_; }
    int product(int i, int j) const { return table_[static_cast<size_t>(i)][static_cast<size_t>(j)]; }
    int inverse(int i) const { return inverse_[static_cast<size_t>(i)]; }

    /// Index of the element equal to m within kGroupTolerance, or -1.
    int find(const Mat& m) const;

    bool has_quaternions() const { return !quaternions_.empty(); }
    const QuaternionPair& quaternion(int i) const { return quaternions_[static_cast<size_t>(i)]; }

    /// Conjugate every element by an orthogonal matrix (c g c^T).
    FiniteRotationGroup conjugated(const Mat& c) const;

    std::string label;

private:
    int dim_ = 0;
    std::vector<Mat> elements_;
    std::vector<std::vector<int>> table_;
    std::vector<int> inverse_;
    std::vector<QuaternionPair> quaternions_;
    std::map<std::vector<long long>, int> index_;
};

/// Rotation angles (radians) on the two coordinate planes of R^4 = C^2.
struct CyclicEmbedding {
    double first = 0.0;
    double second = 0.0;
};

/// Cyclic group of order m in SO(2) (rotation by 2 pi / m) or SO(4) (block rotation).
FiniteRotationGroup make_cyclic_subgroup(int n, int m, std::optional<CyclicEmbedding> embedding = std::nullopt);

/// SO(4) embedding with generator angles (k1 2 pi / m, k2 2 pi / m).
FiniteRotationGroup make_cyclic_subgroup(int n, int m, int k1, int k2);

enum class PolyhedralKind { dihedral, tetrahedral, octahedral, icosahedral };

/// Binary polyhedral subgroup of SU(2) acting on H = R^4 by left multiplication.
/// Orders 4k, 24, 48, 120. The dihedral parameter k must be >= 2.
FiniteRotationGroup make_binary_polyhedral(PolyhedralKind kind, int k = 2);

/// True iff no non-identity element has eigenvalue 1.
bool acts_freely(const FiniteRotationGroup& group);

/// Element of Spin(2) (angle, projecting to rotation by twice the angle) or Spin(4).
struct SpinElement {
    int dim = 4;
    double angle = 0.0;
    QuaternionPair pair;

    static SpinElement identity(int dim) { return SpinElement{dim, 0.0, {}}; }
    friend SpinElement operator*(const SpinElement& a, const SpinElement& b);
    friend SpinElement operator-(const SpinElement& a);
    Mat projection() const;
    double distance(const SpinElement& o) const;
    bool is_identity(double tol = kGroupTolerance) const { return distance(identity(dim)) < tol; }
};

/// Both preimages of a rotation (for n = 2, 4); the returned one is canonical, the other is its negative.
SpinElement spin_preimage(const Mat& rotation);

/// Subgroup of Spin(n) projecting isomorphically onto a FiniteRotationGroup.
struct SpinLift {
    std::shared_ptr<const FiniteRotationGroup> base;
    std::vector<SpinElement> elements;  // elements[i] lies over base->element(i)
};

/// All lifts of the group to Spin(n), n in {2, 4}. Empty means the singularity is not spin.
std::vector<SpinLift> enumerate_spin_lifts(const FiniteRotationGroup& group);

struct WeylFixedDimensions {
    int plus = 0;
    int minus = 0;
};

/// Complex dimensions of the common fixed spaces of a Spin(4) lift on Sigma+ and Sigma-.
/// Sigma+ carries the left Sp(1) factor, Sigma- the right one.
WeylFixedDimensions weyl_fixed_subspaces(const SpinLift& lift);

/// Parses the group mini-language: cyclic:m[:k1,k2], binary-dihedral:k, binary-tetrahedral,
/// binary-octahedral, binary-icosahedral, trivial, or a path to a JSON file of matrices.
FiniteRotationGroup parse_group_spec(const std::string& spec, int dimension);

}  // namespace tale
