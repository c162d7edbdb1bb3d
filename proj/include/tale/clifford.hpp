#pragma once

#include "tale/linalg.hpp"
#include "tale/quaternion.hpp"

#include <vector>

namespace tale {

/// Complex Clifford module of R^n, n even, with gamma_a gamma_b + gamma_b gamma_a = -2 delta_ab.
struct CliffordRep {
    int n = 0;
    int spinor_dim = 0;
    std::vector<CMat> gamma;
    CMat chirality;  // squares to Id, anticommutes with every gamma
    CMat proj_plus;
    CMat proj_minus;
    CMat intertwiner;  // n = 4: see quaternion_intertwiner

    /// Clifford multiplication by a vector given in the orthonormal frame.
    CMat clifford(const Vec& x) const;
    /// Spin representation of a skew matrix A in so(n): -1/4 sum A_ab gamma_a gamma_b.
    /// Satisfies [rho(A), gamma(v)] = gamma(A v).
    CMat spin_lie(const Mat& a) const;
};

/// Tensor-product (Jordan-Wigner) construction, entries in {0, +-1, +-i}. n even, 2 <= n <= 6.
CliffordRep build_clifford(int n);

/// n = 4 only: unitary U with U^-1 S(qL, qR) U = diag(su2(qL), su2(qR)); the first two columns
/// span Sigma+ (chirality +1), where the left Sp(1) factor acts.
CMat quaternion_intertwiner(const CliffordRep& rep);

/// Spinor matrix of a Spin(4) element, S gamma(v) S^-1 = gamma(R v) with R its rotation.
CMat spin_matrix(const CliffordRep& rep, const QuaternionPair& q);

}  // namespace tale
