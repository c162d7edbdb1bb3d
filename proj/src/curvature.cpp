#include "tale/curvature.hpp"

#include <cmath>

namespace tale {

std::vector<Mat> christoffel(const MetricJet& jet)
{
    const int n = jet.dimension();
    const Mat ginv = jet.g.inverse();
    // First kind: [ij, l] = (d_i g_jl + d_j g_il - d_l g_ij) / 2
    std::vector<Mat> gamma(static_cast<size_t>(n), Mat::Zero(n, n));
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            Vec first(n);
            for (int l = 0; l < n; ++l) first[l] = 0.5 * (jet.d[i](j, l) + jet.d[j](i, l) - jet.d[l](i, j));
            const Vec second = ginv * first;
            for (int k = 0; k < n; ++k) {
                gamma[k](i, j) = second[k];
                gamma[k](j, i) = second[k];
            }
        }
    }
    return gamma;
}

std::vector<std::vector<Mat>> christoffel_derivatives(const MetricJet& jet)
{
    const int n = jet.dimension();
    const Mat ginv = jet.g.inverse();
    std::vector<std::vector<Mat>> out(static_cast<size_t>(n), std::vector<Mat>(static_cast<size_t>(n), Mat::Zero(n, n)));
    for (int m = 0; m < n; ++m) {
        // d_m g^-1 = -g^-1 (d_m g) g^-1
        const Mat dginv = -ginv * jet.d[m] * ginv;
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                Vec first(n), dfirst(n);
                for (int l = 0; l < n; ++l) {
                    first[l] = 0.5 * (jet.d[i](j, l) + jet.d[j](i, l) - jet.d[l](i, j));
                    dfirst[l] = 0.5 * (jet.second(m, i)(j, l) + jet.second(m, j)(i, l) - jet.second(m, l)(i, j));
                }
                const Vec v = dginv * first + ginv * dfirst;
                for (int k = 0; k < n; ++k) {
                    out[m][k](i, j) = v[k];
                    out[m][k](j, i) = v[k];
                }
            }
        }
    }
    return out;
}

CurvatureBundle curvature_from_jet(const MetricJet& jet)
{
    const int n = jet.dimension();
    CurvatureBundle c;
    c.n = n;
    c.g = jet.g;
    c.gamma = christoffel(jet);
    const auto dgamma = christoffel_derivatives(jet);

    std::vector<double> up(static_cast<size_t>(n * n * n * n), 0.0);
    auto U = [&](int a, int b, int cc, int d) -> double& { return up[static_cast<size_t>(((a * n + b) * n + cc) * n + d)]; };
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int cc = 0; cc < n; ++cc)
                for (int d = 0; d < n; ++d) {
                    double v = dgamma[cc][a](d, b) - dgamma[d][a](cc, b);
                    for (int e = 0; e < n; ++e)
                        v += c.gamma[a](cc, e) * c.gamma[e](d, b) - c.gamma[a](d, e) * c.gamma[e](cc, b);
                    U(a, b, cc, d) = v;
                }
    c.riemann.assign(up.size(), 0.0);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int cc = 0; cc < n; ++cc)
                for (int d = 0; d < n; ++d) {
                    double v = 0;
                    for (int e = 0; e < n; ++e) v += jet.g(a, e) * U(e, b, cc, d);
                    c.riemann[static_cast<size_t>(((a * n + b) * n + cc) * n + d)] = v;
                }
    c.ricci = Mat::Zero(n, n);
    for (int b = 0; b < n; ++b)
        for (int d = 0; d < n; ++d)
            for (int a = 0; a < n; ++a) c.ricci(b, d) += U(a, b, a, d);
    c.ricci = 0.5 * (c.ricci + c.ricci.transpose());
    c.ricci_endomorphism = jet.g.inverse() * c.ricci;
    c.scalar = c.ricci_endomorphism.trace();
    return c;
}

CurvatureBundle curvature_at(const MetricChart& g, const Vec& p) { return curvature_from_jet(g.jet(p, 2)); }

double CurvatureBundle::riemann_norm() const
{
    double m = 0;
    for (double v : riemann) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace tale
