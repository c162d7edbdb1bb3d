#include "tale/clifford.hpp"

#include "tale/errors.hpp"

#include <Eigen/SVD>

namespace tale {

namespace {

CMat kron(const CMat& a, const CMat& b)
{
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CMat kron_chain(const std::vector<CMat>& factors)
{
    CMat out = CMat::Identity(1, 1);
    for (const CMat& f : factors) out = kron(out, f);
    return out;
}

const Complex I(0.0, 1.0);

// Fix the chirality sign so that the left quaternion factor acts on its +1 eigenspace.
void orient_chirality(CliffordRep& rep)
{
    if (rep.n != 4) return;
    const CMat u = quaternion_intertwiner(rep);
    const CMat left = u.leftCols(2);
    if ((rep.chirality * left - left).norm() > 1e-10) rep.chirality = -rep.chirality;
    const CMat id = CMat::Identity(rep.spinor_dim, rep.spinor_dim);
    rep.proj_plus = 0.5 * (id + rep.chirality);
    rep.proj_minus = 0.5 * (id - rep.chirality);
    rep.intertwiner = u;
}

// Columns spanning the common null space of the given maps, from the SVD of their stack.
CMat null_space(const std::vector<CMat>& blocks, Eigen::Index cols)
{
    CMat stacked(static_cast<Eigen::Index>(blocks.size()) * blocks.front().rows(), cols);
    Eigen::Index row = 0;
    for (const CMat& b : blocks) {
        stacked.middleRows(row, b.rows()) = b;
        row += b.rows();
    }
    Eigen::JacobiSVD<CMat> svd(stacked, Eigen::ComputeFullV);
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > 1e-9) ++rank;
    return svd.matrixV().rightCols(cols - rank);
}

// Solves rho(A_k) X = X d_k for all generators; X is 4 x 2.
CMat block_intertwiner(const CliffordRep& rep, const std::vector<Mat>& gens, const std::vector<Eigen::Matrix2cd>& ds)
{
    std::vector<CMat> eqs;
    const CMat id4 = CMat::Identity(4, 4);
    const CMat id2 = CMat::Identity(2, 2);
    for (size_t k = 0; k < gens.size(); ++k) {
        const CMat sigma = rep.spin_lie(gens[k]);
        // vec(S X - X D) = (I (x) S - D^T (x) I) vec(X)
        eqs.push_back(kron(id2, sigma) - kron(CMat(ds[k].transpose()), id4));
    }
    const CMat ns = null_space(eqs, 8);
    if (ns.cols() != 1) throw CertificateError("Clifford intertwiner is not unique up to scale");
    CMat x(4, 2);
    x.col(0) = ns.col(0).head(4);
    x.col(1) = ns.col(0).tail(4);
    // Schur: X^H X is a positive multiple of the identity.
    x /= std::sqrt((x.adjoint() * x)(0, 0).real());
    // Phase convention: largest entry of the first column real positive.
    Eigen::Index r = 0;
    x.col(0).cwiseAbs().maxCoeff(&r);
    x *= std::conj(x(r, 0)) / std::abs(x(r, 0));
    return x;
}

Mat left_mult(const Quaternion& u)
{
    Mat m(4, 4);
    for (int c = 0; c < 4; ++c) {
        Eigen::Vector4d e = Eigen::Vector4d::Zero();
        e[c] = 1;
        m.col(c) = (u * Quaternion::from_vec(e)).vec();
    }
    return m;
}

Mat right_mult_neg(const Quaternion& u)
{
    Mat m(4, 4);
    for (int c = 0; c < 4; ++c) {
        Eigen::Vector4d e = Eigen::Vector4d::Zero();
        e[c] = 1;
        m.col(c) = -(Quaternion::from_vec(e) * u).vec();
    }
    return m;
}

}  // namespace

CMat CliffordRep::clifford(const Vec& x) const
{
    CMat out = CMat::Zero(spinor_dim, spinor_dim);
    for (int a = 0; a < n; ++a) out += x[a] * gamma[static_cast<size_t>(a)];
    return out;
}

CMat CliffordRep::spin_lie(const Mat& a) const
{
    CMat out = CMat::Zero(spinor_dim, spinor_dim);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (a(i, j) != 0.0) out += (-0.25 * a(i, j)) * (gamma[static_cast<size_t>(i)] * gamma[static_cast<size_t>(j)]);
    return out;
}

CliffordRep build_clifford(int n)
{
    if (n < 2 || n > 6 || n % 2 != 0) throw UnsupportedError("Clifford modules are built for even n in 2..6");
    const int m = n / 2;
    CMat X(2, 2), Y(2, 2), Z(2, 2), Id = CMat::Identity(2, 2);
    X << 0, 1, 1, 0;
    Y << 0, -I, I, 0;
    Z << 1, 0, 0, -1;

    CliffordRep rep;
    rep.n = n;
    rep.spinor_dim = 1 << m;
    for (int k = 0; k < m; ++k) {
        for (const CMat* pauli : {&X, &Y}) {
            std::vector<CMat> f;
            for (int j = 0; j < m; ++j) f.push_back(j < k ? Z : (j == k ? *pauli : Id));
            rep.gamma.push_back(I * kron_chain(f));
        }
    }
    CMat w = CMat::Identity(rep.spinor_dim, rep.spinor_dim);
    for (const CMat& g : rep.gamma) w = w * g;
    // (gamma_1 ... gamma_n)^2 = (-1)^m, so i^m times the product squares to one.
    Complex c(1, 0);
    for (int k = 0; k < m; ++k) c *= I;
    rep.chirality = c * w;
    const CMat id = CMat::Identity(rep.spinor_dim, rep.spinor_dim);
    rep.proj_plus = 0.5 * (id + rep.chirality);
    rep.proj_minus = 0.5 * (id - rep.chirality);
    orient_chirality(rep);
    return rep;
}

CMat quaternion_intertwiner(const CliffordRep& rep)
{
    if (rep.n != 4) throw UnsupportedError("the quaternionic model needs n = 4");
    if (rep.intertwiner.size() > 0) return rep.intertwiner;
    const std::vector<Quaternion> units{{0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
    std::vector<Mat> lg, rg;
    std::vector<Eigen::Matrix2cd> ld, rd;
    for (const Quaternion& u : units) {
        // Left factor: (u, 0) generates x -> u x; right factor: (0, u) generates x -> -x u.
        lg.push_back(left_mult(u));
        ld.push_back(u.su2());
        rg.push_back(right_mult_neg(u));
        rd.push_back(u.su2());
    }
    // Each block must also commute with the other factor's generators.
    std::vector<Mat> lall = lg, rall = rg;
    std::vector<Eigen::Matrix2cd> ldall = ld, rdall = rd;
    for (size_t k = 0; k < 3; ++k) {
        lall.push_back(rg[k]);
        ldall.push_back(Eigen::Matrix2cd::Zero());
        rall.push_back(lg[k]);
        rdall.push_back(Eigen::Matrix2cd::Zero());
    }
    CMat u(4, 4);
    u.leftCols(2) = block_intertwiner(rep, lall, ldall);
    u.rightCols(2) = block_intertwiner(rep, rall, rdall);
    return u;
}

CMat spin_matrix(const CliffordRep& rep, const QuaternionPair& q)
{
    const CMat u = rep.intertwiner.size() > 0 ? rep.intertwiner : quaternion_intertwiner(rep);
    CMat d = CMat::Zero(4, 4);
    d.topLeftCorner(2, 2) = q.left.su2();
    d.bottomRightCorner(2, 2) = q.right.su2();
    return u * d * u.adjoint();
}

}  // namespace tale
