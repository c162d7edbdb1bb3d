#include "tale/group_theory.hpp"

#include "tale/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace tale {

namespace {

std::vector<long long> canonical_key(const Mat& m)
{
    // Entries rounded to 12 decimal places.
    std::vector<long long> key(static_cast<size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        double v = std::round(m.data()[i] * 1e12);
        if (v == 0.0) v = 0.0;  // fold -0
        key[static_cast<size_t>(i)] = static_cast<long long>(v);
    }
    return key;
}

Mat rotation2(double angle)
{
    Mat r(2, 2);
    r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return r;
}

Mat block_rotation4(double a, double b)
{
    Mat r = Mat::Zero(4, 4);
    r.block(0, 0, 2, 2) = rotation2(a);
    r.block(2, 2, 2, 2) = rotation2(b);
    return r;
}

bool is_multiple_of(double angle, double step)
{
    const double k = angle / step;
    return std::abs(k - std::round(k)) < 1e-9;
}

}  // namespace

FiniteRotationGroup FiniteRotationGroup::from_matrices(int dimension, std::vector<Mat> elements)
{
    if (dimension < 2 || dimension > 4) throw UnsupportedError("rotation groups are supported for n in {2, 3, 4}");
    if (elements.empty()) throw DomainError("a group needs at least the identity");
    FiniteRotationGroup g;
    g.dim_ = dimension;
    const Mat id = Mat::Identity(dimension, dimension);
    for (const Mat& m : elements) {
        if (m.rows() != dimension || m.cols() != dimension) throw DomainError("element has the wrong size");
        if ((m.transpose() * m - id).cwiseAbs().maxCoeff() > kGroupTolerance)
            throw DomainError("element is not orthogonal");
        if (std::abs(m.determinant() - 1.0) > 1e-8) throw DomainError("element does not lie in SO(n)");
    }
    // Identity first.
    auto id_it = std::find_if(elements.begin(), elements.end(),
                              [&](const Mat& m) { return (m - id).cwiseAbs().maxCoeff() < kGroupTolerance; });
    if (id_it == elements.end()) throw DomainError("group does not contain the identity");
    std::iter_swap(elements.begin(), id_it);

    for (const Mat& m : elements) {
        if (g.find(m) >= 0) throw DomainError("duplicate group element");
        g.index_.emplace(canonical_key(m), static_cast<int>(g.elements_.size()));
        g.elements_.push_back(m);
    }

    const auto n = g.elements_.size();
    g.table_.assign(n, std::vector<int>(n, -1));
    g.inverse_.assign(n, -1);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            const int k = g.find(g.elements_[i] * g.elements_[j]);
            if (k < 0) throw DomainError("matrices are not closed under multiplication");
            g.table_[i][j] = k;
            if (k == 0) g.inverse_[i] = static_cast<int>(j);
        }
        if (g.inverse_[i] < 0) throw DomainError("element without inverse");
    }

    if (dimension == 4) {
        for (const Mat& m : g.elements_) g.quaternions_.push_back(quaternion_pair_from_rotation4(m));
    }
    return g;
}

int FiniteRotationGroup::find(const Mat& m) const
{
    if (auto it = index_.find(canonical_key(m)); it != index_.end()) return it->second;
    // Rounding boundary fallback.
    for (size_t i = 0; i < elements_.size(); ++i) {
        if ((elements_[i] - m).cwiseAbs().maxCoeff() < kGroupTolerance) return static_cast<int>(i);
    }
    return -1;
}

FiniteRotationGroup FiniteRotationGroup::conjugated(const Mat& c) const
{
    std::vector<Mat> els;
    els.reserve(elements_.size());
    for (const Mat& m : elements_) els.push_back(c * m * c.transpose());
    auto out = from_matrices(dim_, std::move(els));
    out.label = label + " (conjugated)";
    return out;
}

FiniteRotationGroup make_cyclic_subgroup(int n, int m, std::optional<CyclicEmbedding> embedding)
{
    if (m <= 0) throw DomainError("cyclic group order must be >= 1");
    const double step = 2.0 * std::numbers::pi / m;
    std::vector<Mat> els;
    if (n == 2) {
        for (int j = 0; j < m; ++j) els.push_back(rotation2(j * step));
    } else if (n == 4) {
        const CyclicEmbedding e = embedding.value_or(CyclicEmbedding{step, -step});
        if (!is_multiple_of(e.first, step) || !is_multiple_of(e.second, step))
            throw DomainError("embedding angles must be multiples of 2 pi / m");
        for (int j = 0; j < m; ++j) els.push_back(block_rotation4(j * e.first, j * e.second));
    } else {
        throw UnsupportedError("cyclic subgroups are built for n in {2, 4}");
    }
    // A non-primitive embedding (e.g. angles (0, 0) with m = 3) repeats elements.
    std::vector<Mat> unique;
    for (const Mat& x : els) {
        const bool seen = std::any_of(unique.begin(), unique.end(), [&](const Mat& u) {
            return (u - x).cwiseAbs().maxCoeff() < kGroupTolerance;
        });
        if (!seen) unique.push_back(x);
    }
    if (static_cast<int>(unique.size()) != m) throw DomainError("embedding does not generate a group of order m");
    auto g = FiniteRotationGroup::from_matrices(n, std::move(unique));
    g.label = "cyclic:" + std::to_string(m);
    return g;
}

FiniteRotationGroup make_cyclic_subgroup(int n, int m, int k1, int k2)
{
    if (m <= 0) throw DomainError("cyclic group order must be >= 1");
    const double step = 2.0 * std::numbers::pi / m;
    auto g = make_cyclic_subgroup(n, m, CyclicEmbedding{k1 * step, k2 * step});
    g.label = "cyclic:" + std::to_string(m) + ":" + std::to_string(k1) + "," + std::to_string(k2);
    return g;
}

FiniteRotationGroup make_binary_polyhedral(PolyhedralKind kind, int k)
{
    std::vector<Quaternion> gens;
    std::string label;
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    switch (kind) {
    case PolyhedralKind::dihedral:
        if (k < 2) throw DomainError("binary dihedral group needs k >= 2");
        gens = {{std::cos(std::numbers::pi / k), std::sin(std::numbers::pi / k), 0, 0}, {0, 0, 1, 0}};
        label = "binary-dihedral:" + std::to_string(k);
        break;
    case PolyhedralKind::tetrahedral:
        gens = {{0, 1, 0, 0}, {0, 0, 1, 0}, {0.5, 0.5, 0.5, 0.5}};
        label = "binary-tetrahedral";
        break;
    case PolyhedralKind::octahedral:
        gens = {{std::sqrt(0.5), std::sqrt(0.5), 0, 0}, {0, 0, 1, 0}, {0.5, 0.5, 0.5, 0.5}};
        label = "binary-octahedral";
        break;
    case PolyhedralKind::icosahedral:
        gens = {{0, 1, 0, 0}, {phi / 2, 0.5 / phi, 0.5, 0}};
        label = "binary-icosahedral";
        break;
    }
    std::vector<Quaternion> els{Quaternion::identity()};
    for (size_t i = 0; i < els.size(); ++i) {
        for (const Quaternion& g : gens) {
            const Quaternion p = unit_product(els[i], g);
            const bool seen =
                std::any_of(els.begin(), els.end(), [&](const Quaternion& q) { return q.distance(p) < 1e-9; });
            if (!seen) els.push_back(p);
        }
        if (els.size() > 1000) throw DomainError("generators do not close to a finite group");
    }
    std::vector<Mat> mats;
    for (const Quaternion& q : els) mats.push_back(QuaternionPair{q, Quaternion::identity()}.rotation());
    auto g = FiniteRotationGroup::from_matrices(4, std::move(mats));
    g.label = label;
    return g;
}

bool acts_freely(const FiniteRotationGroup& group)
{
    const int n = group.dimension();
    for (int i = 1; i < group.order(); ++i) {
        const Mat d = group.element(i) - Mat::Identity(n, n);
        Eigen::JacobiSVD<Mat> svd(d);
        if (svd.singularValues().minCoeff() < kGroupTolerance) return false;
    }
    return true;
}

SpinElement operator*(const SpinElement& a, const SpinElement& b)
{
    if (a.dim == 2) return SpinElement{2, std::remainder(a.angle + b.angle, 2.0 * std::numbers::pi), {}};
    return SpinElement{a.dim, 0.0, a.pair * b.pair};
}

SpinElement operator-(const SpinElement& a)
{
    if (a.dim == 2) return SpinElement{2, std::remainder(a.angle + std::numbers::pi, 2.0 * std::numbers::pi), {}};
    return SpinElement{a.dim, 0.0, -a.pair};
}

Mat SpinElement::projection() const
{
    if (dim == 2) return rotation2(2.0 * angle);
    return pair.rotation();
}

double SpinElement::distance(const SpinElement& o) const
{
    if (dim == 2) return std::abs(std::remainder(angle - o.angle, 2.0 * std::numbers::pi));
    return pair.distance(o.pair);
}

SpinElement spin_preimage(const Mat& rotation)
{
    if (rotation.rows() == 2) return SpinElement{2, 0.5 * std::atan2(rotation(1, 0), rotation(0, 0)), {}};
    if (rotation.rows() == 4) {
        const Eigen::Matrix4d r = rotation;
        return SpinElement{4, 0.0, quaternion_pair_from_rotation4(r)};
    }
    throw UnsupportedError("spin lifts are implemented for n in {2, 4}");
}

std::vector<SpinLift> enumerate_spin_lifts(const FiniteRotationGroup& group)
{
    const int n = group.dimension();
    if (n != 2 && n != 4) throw UnsupportedError("spin lifts are implemented for n in {2, 4}");
    const int order = group.order();

    // Fixed preimage s_i of every element; s_i s_j = c_ij s_{ij} with c_ij = +-1.
    std::vector<SpinElement> pre;
    pre.reserve(static_cast<size_t>(order));
    for (int i = 0; i < order; ++i) pre.push_back(spin_preimage(group.element(i)));
    if (pre[0].distance(SpinElement::identity(n)) > 0.5) pre[0] = -pre[0];
    std::vector<std::vector<int>> cocycle(static_cast<size_t>(order), std::vector<int>(static_cast<size_t>(order)));
    for (int i = 0; i < order; ++i) {
        for (int j = 0; j < order; ++j) {
            const SpinElement p = pre[static_cast<size_t>(i)] * pre[static_cast<size_t>(j)];
            const SpinElement& s = pre[static_cast<size_t>(group.product(i, j))];
            cocycle[static_cast<size_t>(i)][static_cast<size_t>(j)] = p.distance(s) < p.distance(-s) ? 1 : -1;
        }
    }

    // Greedy generating set.
    std::vector<int> gens;
    std::vector<char> reached(static_cast<size_t>(order), 0);
    reached[0] = 1;
    auto close = [&]() {
        std::vector<int> stack;
        for (int i = 0; i < order; ++i)
            if (reached[static_cast<size_t>(i)]) stack.push_back(i);
        while (!stack.empty()) {
            const int e = stack.back();
            stack.pop_back();
            for (int g : gens) {
                const int p = group.product(e, g);
                if (!reached[static_cast<size_t>(p)]) {
                    reached[static_cast<size_t>(p)] = 1;
                    stack.push_back(p);
                }
            }
        }
    };
    for (int i = 1; i < order; ++i) {
        if (!reached[static_cast<size_t>(i)]) {
            gens.push_back(i);
            close();
        }
    }

    auto base = std::make_shared<const FiniteRotationGroup>(group);
    std::vector<SpinLift> lifts;
    const auto k = gens.size();
    for (unsigned long mask = 0; mask < (1UL << k); ++mask) {
        // sign[i] = epsilon with lift(i) = epsilon * s_i; 0 = unassigned.
        std::vector<int> sign(static_cast<size_t>(order), 0);
        sign[0] = 1;
        std::vector<int> stack{0};
        bool consistent = true;
        while (!stack.empty() && consistent) {
            const int e = stack.back();
            stack.pop_back();
            for (size_t gi = 0; gi < k && consistent; ++gi) {
                const int g = gens[gi];
                const int gs = (mask >> gi) & 1UL ? -1 : 1;
                const int p = group.product(e, g);
                const int s = sign[static_cast<size_t>(e)] * gs * cocycle[static_cast<size_t>(e)][static_cast<size_t>(g)];
                if (sign[static_cast<size_t>(p)] == 0) {
                    sign[static_cast<size_t>(p)] = s;
                    stack.push_back(p);
                } else if (sign[static_cast<size_t>(p)] != s) {
                    consistent = false;  // closure contains -1
                }
            }
        }
        if (!consistent) continue;
        SpinLift lift{base, {}};
        for (int i = 0; i < order; ++i)
            lift.elements.push_back(sign[static_cast<size_t>(i)] > 0 ? pre[static_cast<size_t>(i)]
                                                                       : -pre[static_cast<size_t>(i)]);
        lifts.push_back(std::move(lift));
    }
    return lifts;
}

WeylFixedDimensions weyl_fixed_subspaces(const SpinLift& lift)
{
    if (!lift.base || lift.base->dimension() != 4) throw UnsupportedError("Weyl fixed spaces need n = 4");
    std::vector<CMat> plus{CMat::Zero(2, 2)};
    std::vector<CMat> minus{CMat::Zero(2, 2)};
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    for (const SpinElement& e : lift.elements) {
        plus.emplace_back(e.pair.left.su2() - id);
        minus.emplace_back(e.pair.right.su2() - id);
    }
    return {common_null_dimension(plus, 1e-9), common_null_dimension(minus, 1e-9)};
}

namespace {

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

int parse_int(const std::string& s, const std::string& what)
{
    try {
        size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError("malformed integer '" + s + "' in " + what);
    }
}

FiniteRotationGroup group_from_json(const std::string& path, int dimension)
{
    std::ifstream in(path);
    if (!in) throw UsageError("unknown group spec '" + path + "' (not a keyword and not a readable file)");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw UsageError("group file " + path + " is not valid JSON: " + e.what());
    }
    const nlohmann::json& list = doc.is_object() ? doc.at("elements") : doc;
    std::vector<Mat> mats;
    for (const auto& el : list) {
        std::vector<double> flat;
        if (el.size() > 0 && el[0].is_array()) {
            for (const auto& row : el)
                for (const auto& v : row) flat.push_back(v.get<double>());
        } else {
            for (const auto& v : el) flat.push_back(v.get<double>());
        }
        int n = dimension;
        if (n <= 0) n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(flat.size()))));
        if (static_cast<int>(flat.size()) != n * n) throw DomainError("matrix in " + path + " is not n x n");
        Mat m(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) m(r, c) = flat[static_cast<size_t>(r * n + c)];
        mats.push_back(m);
    }
    if (mats.empty()) throw DomainError("group file " + path + " has no elements");
    const int n = static_cast<int>(mats.front().rows());
    auto g = FiniteRotationGroup::from_matrices(n, std::move(mats));
    g.label = path;
    return g;
}

}  // namespace

FiniteRotationGroup parse_group_spec(const std::string& spec, int dimension)
{
    const auto parts = split(spec, ':');
    if (parts.empty()) throw UsageError("empty group spec");
    const std::string& head = parts[0];
    if (head == "trivial") {
        const int n = dimension > 0 ? dimension : 4;
        auto g = FiniteRotationGroup::from_matrices(n, {Mat::Identity(n, n)});
        g.label = "trivial";
        return g;
    }
    if (head == "cyclic") {
        if (parts.size() < 2 || parts.size() > 3) throw UsageError("expected cyclic:m[:k1,k2]");
        const int m = parse_int(parts[1], spec);
        const int n = dimension > 0 ? dimension : (parts.size() == 3 ? 4 : 2);
        if (parts.size() == 3) {
            const auto ks = split(parts[2], ',');
            if (ks.size() != 2) throw UsageError("expected cyclic:m:k1,k2");
            if (n != 4) throw UsageError("embedding angles k1,k2 only apply to dimension 4");
            return make_cyclic_subgroup(n, m, parse_int(ks[0], spec), parse_int(ks[1], spec));
        }
        return make_cyclic_subgroup(n, m);
    }
    auto require_dim4 = [&]() {
        if (dimension > 0 && dimension != 4) throw UsageError("binary polyhedral groups live in SO(4)");
    };
    if (head == "binary-dihedral") {
        require_dim4();
        if (parts.size() != 2) throw UsageError("expected binary-dihedral:k");
        return make_binary_polyhedral(PolyhedralKind::dihedral, parse_int(parts[1], spec));
    }
    if (head == "binary-tetrahedral") {
        require_dim4();
        return make_binary_polyhedral(PolyhedralKind::tetrahedral);
    }
    if (head == "binary-octahedral") {
        require_dim4();
        return make_binary_polyhedral(PolyhedralKind::octahedral);
    }
    if (head == "binary-icosahedral") {
        require_dim4();
        return make_binary_polyhedral(PolyhedralKind::icosahedral);
    }
    return group_from_json(spec, dimension);
}

}  // namespace tale
