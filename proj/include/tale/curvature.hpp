#pragma once

#include "tale/metric.hpp"

#include <vector>

namespace tale {

/// Christoffel symbols gamma[k](i, j) = Gamma^k_ij from a metric jet of order >= 1.
std::vector<Mat> christoffel(const MetricJet& jet);

/// Derivatives dgamma[l][k](i, j) = d_l Gamma^k_ij from a jet of order 2.
std::vector<std::vector<Mat>> christoffel_derivatives(const MetricJet& jet);

/// Curvature at a point. Conventions: R^a_bcd = d_c Gamma^a_db - d_d Gamma^a_cb + Gamma^a_ce Gamma^e_db
/// - Gamma^a_de Gamma^e_cb, R_abcd = g_ae R^e_bcd, Ric_bd = R^a_bad. The unit sphere has Ric = (n-1) g.
struct CurvatureBundle {
    int n = 0;
    Mat g;
    std::vector<Mat> gamma;
    std::vector<double> riemann;  // lowered, index ((a n + b) n + c) n + d
    Mat ricci;
    Mat ricci_endomorphism;  // g^-1 Ric
    double scalar = 0.0;

    double R(int a, int b, int c, int d) const { return riemann[static_cast<size_t>(((a * n + b) * n + c) * n + d)]; }
    double riemann_norm() const;
    double ricci_norm() const { return ricci.cwiseAbs().maxCoeff(); }
};

CurvatureBundle curvature_at(const MetricChart& g, const Vec& p);
CurvatureBundle curvature_from_jet(const MetricJet& jet);

}  // namespace tale
