#pragma once

#include "tale/spin_bundle.hpp"

#include <functional>
#include <vector>

namespace tale {

/// Spinor field y -> components in the frame of a FrameField at y.
using SpinorField = std::function<CVec(const Vec&)>;

/// x -> phi0 - (1/n) x . psi0, the twistor spinors of flat R^n.
SpinorField flat_twistor_field(const CliffordRep& rep, const CVec& phi0, const CVec& psi0);

struct CovariantDerivatives {
    std::vector<CVec> along_frame;  // nabla_{e_a} phi
    CVec dirac;                     // sum e_a . nabla_{e_a} phi
};

/// Fourth-order central differences of the field plus the spin connection term. h = 0: 1e-3 of the local scale.
CovariantDerivatives covariant_derivatives(const CliffordRep& rep, const FrameField& frame, const SpinorField& field,
                                           const Vec& p, double h = 0.0);

SpinorField dirac_field(const CliffordRep& rep, const FrameField& frame, const SpinorField& field, double h = 0.0);

/// nabla_X phi + (1/n) X . D phi, X in the frame.
CVec twistor_residual(const CliffordRep& rep, const FrameField& frame, const SpinorField& field, const Vec& p,
                      const Vec& x_frame, double h = 0.0);

/// nabla_X (D phi) - (n/2) L(X) . phi, X in the frame.
CVec dirac_derivative_check(const CliffordRep& rep, const FrameField& frame, const SpinorField& field, const Vec& p,
                            const Vec& x_frame, double h = 0.0);

/// y -> u(y)^(1/2) phi(y): a twistor spinor of g becomes one of u^2 g.
SpinorField conformal_twistor_transport(const SpinorField& field, std::function<double(const Vec&)> u);

struct ZeroSearchResult {
    std::vector<Vec> zeros;
    std::vector<double> dirac_norms;  // |D phi| at each zero
    bool all_isolated = true;
    long seeds = 0;
};

/// Gauss-Newton on |phi|^2 from a grid of seeds_per_axis^n seeds, zeros merged within 1e-6.
/// `dirac` may be empty, then D phi is taken by finite differences on flat space.
ZeroSearchResult twistor_zero_locus(const CliffordRep& rep, const SpinorField& field, const SpinorField& dirac,
                                    const Vec& lo, const Vec& hi, int seeds_per_axis = 16);

/// Least-squares exponent of mean |phi| against distance on radii r_j around p.
double growth_exponent(const SpinorField& field, const Vec& p, const std::vector<double>& radii);

struct ExtensionResult {
    TwistorState limit;                 // mean of the per-curve limits
    std::vector<TwistorState> per_curve;
    double spread = 0.0;                // max pairwise distance of the limits
    double max_curve_length = 0.0;
    double stop_radius = 0.0;
    bool certified = false;
};

/// Transports each start state along the straight line to the puncture, stopping at 2 and 1 times stop_radius,
/// and extrapolates the two endpoint values linearly to the puncture.
ExtensionResult extend_to_puncture(const CliffordRep& rep, const FrameField& frame, const Vec& puncture,
                                   const std::vector<std::pair<Vec, TwistorState>>& starts, double stop_radius,
                                   double tolerance, const TransportOptions& opt = {});

/// Value of the parallel spinor with the given basepoint value, by spin transport along a radial-then-angular path.
SpinorField parallel_field(const CliffordRep& rep, const FrameField& frame, const Vec& basepoint, const CVec& value,
                           const TransportOptions& opt = {});

struct EHParallelResult {
    double a = 1.0;
    ParallelSpinorBasis basis;
    std::vector<SpinorField> fields;
    double chirality_plus_weight = 0.0;  // |P+ basis|, 0 or sqrt(2)
};

/// Parallel spinors of the Eguchi-Hanson metric from the joint fixed space of loop holonomies.
EHParallelResult parallel_spinor_on_EH(const FrameField& frame, double a, const Vec& basepoint, double loop_radius);

/// Compactified Eguchi-Hanson data in inverted coordinates z:
/// gbar = pushforward of the metric (= rho^-4 g), g_z = |z|^-4 gbar, phi parallel for g_z, phibar = |z| phi.
struct CompactifiedEH {
    double a = 1.0;
    double R = 1.05;
    MetricChart gbar;
    MetricChart gz;
    ParallelSpinorBasis basis;
    SpinorField phi;
    SpinorField phibar;
};

CompactifiedEH compactified_eguchi_hanson(double a, const TransportOptions& opt = {});

}  // namespace tale
