#include "tale/errors.hpp"
#include "tale/group_theory.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

using namespace tale;

namespace {

// Oracle: choose one of the two preimages for every element, keep the choices
// that are closed under direct Spin multiplication.
int brute_force_lift_count(const FiniteRotationGroup& g)
{
    const int order = g.order();
    std::vector<SpinElement> pre;
    for (int i = 0; i < order; ++i) pre.push_back(spin_preimage(g.element(i)));
    int count = 0;
    for (unsigned long mask = 0; mask < (1UL << order); ++mask) {
        std::vector<SpinElement> chosen;
        for (int i = 0; i < order; ++i) chosen.push_back((mask >> i) & 1UL ? -pre[i] : pre[i]);
        bool closed = true;
        for (int i = 0; i < order && closed; ++i) {
            for (int j = 0; j < order && closed; ++j) {
                const SpinElement p = chosen[i] * chosen[j];
                const SpinElement& target = chosen[g.product(i, j)];
                closed = p.distance(target) < 1e-9;
            }
        }
        if (closed) ++count;
    }
    return count;
}

Mat random_rotation(int n, std::mt19937_64& rng)
{
    std::normal_distribution<double> nd;
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = nd(rng);
    Eigen::HouseholderQR<Mat> qr(a);
    Mat q = qr.householderQ();
    if (q.determinant() < 0) q.col(0) *= -1.0;
    return q;
}

std::vector<FiniteRotationGroup> sample_groups()
{
    return {make_cyclic_subgroup(2, 1),
            make_cyclic_subgroup(2, 3),
            make_cyclic_subgroup(2, 4),
            make_cyclic_subgroup(4, 2, 1, 1),
            make_cyclic_subgroup(4, 3, 1, 2),
            make_cyclic_subgroup(4, 4, 1, 1),
            make_cyclic_subgroup(4, 5, 1, 4),
            make_binary_polyhedral(PolyhedralKind::dihedral, 2)};
}

}  // namespace

TEST_CASE("quaternion products stay on the unit sphere")
{
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    Quaternion q{1, 0, 0, 0};
    for (int i = 0; i < 10000; ++i) {
        const Quaternion r = Quaternion{nd(rng), nd(rng), nd(rng), nd(rng)}.normalized();
        q = unit_product(q, r);
        CHECK(std::abs(q.norm() - 1.0) < 1e-12);
    }
    const Quaternion c = q.conj() * q;
    CHECK(c.distance(Quaternion::identity()) < 1e-12);
}

TEST_CASE("rotation pairs round-trip through SO(4)")
{
    std::mt19937_64 rng(11);
    for (int t = 0; t < 200; ++t) {
        const Eigen::Matrix4d r = random_rotation(4, rng);
        const QuaternionPair p = quaternion_pair_from_rotation4(r);
        CHECK((p.rotation() - r).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(((-p).rotation() - r).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("su2 matrix is a homomorphism")
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    for (int t = 0; t < 50; ++t) {
        const Quaternion a = Quaternion{nd(rng), nd(rng), nd(rng), nd(rng)}.normalized();
        const Quaternion b = Quaternion{nd(rng), nd(rng), nd(rng), nd(rng)}.normalized();
        CHECK(((a * b).su2() - a.su2() * b.su2()).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("cyclic groups")
{
    const auto trivial = make_cyclic_subgroup(2, 1);
    CHECK(trivial.order() == 1);
    CHECK((trivial.element(0) - Mat::Identity(2, 2)).norm() == 0.0);

    const auto eh = make_cyclic_subgroup(4, 2, 1, 1);
    CHECK(eh.order() == 2);
    CHECK((eh.element(1) + Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);

    // Z_5: brute-force table against index arithmetic on exponents.
    const auto z5 = make_cyclic_subgroup(2, 5);
    REQUIRE(z5.order() == 5);
    std::vector<int> exponent(5);
    for (int i = 0; i < 5; ++i) {
        const Mat& m = z5.element(i);
        const double angle = std::atan2(m(1, 0), m(0, 0));
        exponent[i] = static_cast<int>(std::lround(angle / (2 * std::numbers::pi / 5) + 5)) % 5;
    }
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) CHECK(exponent[z5.product(i, j)] == (exponent[i] + exponent[j]) % 5);

    CHECK_THROWS_AS(make_cyclic_subgroup(2, 0), DomainError);
    CHECK_THROWS_AS(make_cyclic_subgroup(4, 4, CyclicEmbedding{0.3, 0.1}), DomainError);
    CHECK_THROWS_AS(make_cyclic_subgroup(3, 2), UnsupportedError);
}

TEST_CASE("binary polyhedral orders")
{
    CHECK(make_binary_polyhedral(PolyhedralKind::dihedral, 2).order() == 8);
    CHECK(make_binary_polyhedral(PolyhedralKind::dihedral, 3).order() == 12);
    CHECK(make_binary_polyhedral(PolyhedralKind::dihedral, 5).order() == 20);
    CHECK(make_binary_polyhedral(PolyhedralKind::tetrahedral).order() == 24);
    CHECK(make_binary_polyhedral(PolyhedralKind::octahedral).order() == 48);
    CHECK(make_binary_polyhedral(PolyhedralKind::icosahedral).order() == 120);
}

TEST_CASE("quaternion group matches direct enumeration")
{
    // {±1, ±i, ±j, ±k} as left multiplication matrices.
    const std::vector<Quaternion> q8{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
    std::vector<Mat> mats;
    for (const Quaternion& q : q8) {
        mats.push_back(QuaternionPair{q, {}}.rotation());
        mats.push_back(QuaternionPair{-q, {}}.rotation());
    }
    const auto direct = FiniteRotationGroup::from_matrices(4, mats);
    const auto built = make_binary_polyhedral(PolyhedralKind::dihedral, 2);
    REQUIRE(direct.order() == built.order());
    for (const Mat& m : built.elements()) CHECK(direct.find(m) >= 0);
}

TEST_CASE("free actions")
{
    CHECK(acts_freely(make_cyclic_subgroup(4, 2, 1, 1)));
    CHECK_FALSE(acts_freely(make_cyclic_subgroup(4, 2, 1, 0)));
    CHECK(acts_freely(make_binary_polyhedral(PolyhedralKind::dihedral, 2)));
    CHECK(acts_freely(make_binary_polyhedral(PolyhedralKind::icosahedral)));

    // Eigenvalue-1 test on every nontrivial element of the quaternion group.
    const auto q8 = make_binary_polyhedral(PolyhedralKind::dihedral, 2);
    for (int i = 1; i < q8.order(); ++i) {
        Eigen::EigenSolver<Mat> es(q8.element(i));
        for (int k = 0; k < 4; ++k) CHECK(std::abs(es.eigenvalues()[k] - Complex(1, 0)) > 1e-6);
    }

    // A rotation group in odd dimension always fixes an axis.
    std::vector<Mat> z2{Mat::Identity(3, 3), Mat(Eigen::Vector3d(-1, -1, 1).asDiagonal())};
    CHECK_FALSE(acts_freely(FiniteRotationGroup::from_matrices(3, z2)));
}

TEST_CASE("invalid group input is rejected")
{
    Mat reflection = Mat::Identity(2, 2);
    reflection(0, 0) = -1;
    CHECK_THROWS_AS(FiniteRotationGroup::from_matrices(2, {Mat::Identity(2, 2), reflection}), DomainError);
    Mat r(2, 2);
    r << 0, -1, 1, 0;
    CHECK_THROWS_AS(FiniteRotationGroup::from_matrices(2, {Mat::Identity(2, 2), r}), DomainError);
}

TEST_CASE("lift counts for cyclic groups in SO(2)")
{
    for (int m = 1; m <= 9; ++m) {
        const auto g = make_cyclic_subgroup(2, m);
        const auto lifts = enumerate_spin_lifts(g);
        const int oracle = brute_force_lift_count(g);
        CAPTURE(m);
        CHECK(static_cast<int>(lifts.size()) == oracle);
        // Rotation by 2 pi/m lifts to an element of order m exactly when m is odd, and the
        // lift is then forced.
        CHECK(oracle == (m % 2 == 1 ? 1 : 0));
    }
}

TEST_CASE("lifts of -1 in SO(4)")
{
    const auto g = make_cyclic_subgroup(4, 2, 1, 1);
    const auto lifts = enumerate_spin_lifts(g);
    REQUIRE(lifts.size() == 2);
    CHECK(brute_force_lift_count(g) == 2);

    std::vector<WeylFixedDimensions> dims;
    for (const auto& l : lifts) dims.push_back(weyl_fixed_subspaces(l));
    // One lift sits in the left factor, the other in the right one.
    const bool order_a = dims[0].plus == 2 && dims[0].minus == 0 && dims[1].plus == 0 && dims[1].minus == 2;
    const bool order_b = dims[1].plus == 2 && dims[1].minus == 0 && dims[0].plus == 0 && dims[0].minus == 2;
    CHECK((order_a || order_b));

    for (const auto& l : lifts) {
        const SpinElement& e = l.elements[1];
        const WeylFixedDimensions d = weyl_fixed_subspaces(l);
        if (e.pair.left.distance(Quaternion::identity()) < 1e-12) CHECK(d.plus == 2);
        else CHECK(d.minus == 2);
    }
}

TEST_CASE("trivial lift fixes everything")
{
    const auto g = parse_group_spec("trivial", 4);
    const auto lifts = enumerate_spin_lifts(g);
    REQUIRE(lifts.size() == 1);
    const auto d = weyl_fixed_subspaces(lifts[0]);
    CHECK(d.plus == 2);
    CHECK(d.minus == 2);
}

TEST_CASE("lift properties over sample groups")
{
    std::mt19937_64 rng(99);
    for (const auto& g : sample_groups()) {
        CAPTURE(g.label);
        const auto lifts = enumerate_spin_lifts(g);
        if (g.order() <= 12) CHECK(static_cast<int>(lifts.size()) == brute_force_lift_count(g));
        for (const auto& l : lifts) {
            REQUIRE(static_cast<int>(l.elements.size()) == g.order());
            for (int i = 0; i < g.order(); ++i) {
                CHECK((l.elements[i].projection() - g.element(i)).cwiseAbs().maxCoeff() < 1e-10);
                for (int j = 0; j < g.order(); ++j)
                    CHECK((l.elements[i] * l.elements[j]).distance(l.elements[g.product(i, j)]) < 1e-10);
            }
            for (int i = 1; i < g.order(); ++i)
                CHECK(l.elements[i].distance(-SpinElement::identity(g.dimension())) > 1e-6);
            if (g.dimension() == 4 && g.order() > 1) {
                const auto d = weyl_fixed_subspaces(l);
                CHECK((d.plus == 0 || d.minus == 0));
            }
        }
        const Mat c = random_rotation(g.dimension(), rng);
        CHECK(enumerate_spin_lifts(g.conjugated(c)).size() == lifts.size());
        if (acts_freely(g) && g.order() > 1) CHECK(g.dimension() % 2 == 0);
    }
}

TEST_CASE("binary polyhedral groups lift to the left factor")
{
    // Lifts are (q, chi(q)) for the sign characters chi, counted by Hom(G, Z2) of the abelianization:
    // Z4 for dihedral with k odd, Z3 tetrahedral, Z2 octahedral, trivial icosahedral.
    const std::vector<std::pair<PolyhedralKind, size_t>> cases{{PolyhedralKind::dihedral, 2},
                                                              {PolyhedralKind::tetrahedral, 1},
                                                              {PolyhedralKind::octahedral, 2},
                                                              {PolyhedralKind::icosahedral, 1}};
    for (const auto& [kind, expected] : cases) {
        const auto g = make_binary_polyhedral(kind, 3);
        const auto lifts = enumerate_spin_lifts(g);
        CAPTURE(g.label);
        CHECK(lifts.size() == expected);
        int with_fixed_minus = 0;
        for (const auto& l : lifts) {
            const auto d = weyl_fixed_subspaces(l);
            CHECK(d.plus == 0);
            if (d.minus == 2) ++with_fixed_minus;
        }
        CHECK(with_fixed_minus == 1);
    }
    CHECK(enumerate_spin_lifts(make_binary_polyhedral(PolyhedralKind::dihedral, 2)).size() == 4);
}

TEST_CASE("group spec parsing")
{
    CHECK(parse_group_spec("cyclic:3", 2).order() == 3);
    CHECK(parse_group_spec("cyclic:2:1,1", 4).order() == 2);
    CHECK(parse_group_spec("binary-dihedral:4", 4).order() == 16);
    CHECK(parse_group_spec("binary-icosahedral", 4).order() == 120);
    CHECK_THROWS_AS(parse_group_spec("cyclic:x", 2), UsageError);
    CHECK_THROWS_AS(parse_group_spec("no-such-group", 4), UsageError);

    const std::string path = "group_spec_test.json";
    {
        std::ofstream out(path);
        out << "[[1,0,0,1],[-1,0,0,-1]]";
    }
    const auto g = parse_group_spec(path, 0);
    CHECK(g.dimension() == 2);
    CHECK(g.order() == 2);
    std::remove(path.c_str());
}
