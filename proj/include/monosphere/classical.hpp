#pragma once

// Magnetic phase space on TS^2: model parameters, angular momentum, Poisson
// brackets of ambient observables, magnetic geodesic flow, and the
// complexifier diffeomorphism onto the complex sphere with its inverse.

#include <functional>
#include <vector>

#include "monosphere/common.hpp"

namespace monosphere::classical {

// Physical constants plus derived field strength and smoothing parameter.
// Single source of truth for units: everything downstream reads B and tau
// from here.  The field derives from the twist via B = -hbar*l/r^2, the
// identification that makes the flux integer -(4 pi r^2 B)/(2 pi hbar)
// equal 2l exactly.
struct ModelParams {
  double r{1.0};
  double m{1.0};
  double alpha{1.0};
  double hbar{1.0};
  int twice_l{0};
  double B{0.0};    // derived
  double tau{1.0};  // derived, dimensionless
};

ModelParams params_from_twist(int twice_l, double r, double m, double alpha,
                              double hbar);

// Raw flux ratio -(4 pi r^2 B)/(2 pi hbar); lands within ulps of the
// integer 2l.
double flux_ratio(const ModelParams& p);
// Flux integer recovered from the ratio; equals twice_l for every valid
// parameter set.
int flux_twice_l(const ModelParams& p);

// Point of TS^2 in ambient coordinates.
struct PhasePoint {
  Vec3 x{0.0, 0.0, 1.0};
  Vec3 p{Vec3::Zero()};

  static PhasePoint make(const Vec3& x, const Vec3& p, double r);  // validates
};

// Point of the complex sphere a.a = r^2 (no absolute values).
struct ComplexSpherePoint {
  CVec3 a{CVec3(0.0, 0.0, 1.0)};

  static ComplexSpherePoint make(const CVec3& a, double r);  // validates
};

// J = x cross p - r B x.
Vec3 angular_momentum(const PhasePoint& pt, const ModelParams& params);

using Observable = std::function<double(const PhasePoint&)>;

// Finite-difference bracket of two ambient observables with respect to the
// magnetic symplectic form, evaluated in a spherical chart.  The frameless
// overload picks a chart whose poles are far from pt; the explicit overload
// uses the given chart frame and throws ChartSingularity within 1e-6 rad of
// its poles (retry with a rotated frame).
double poisson_bracket(const Observable& f, const Observable& g,
                       const PhasePoint& pt, const ModelParams& params);
double poisson_bracket(const Observable& f, const Observable& g,
                       const PhasePoint& pt, const ModelParams& params,
                       const Mat3& frame);
// Chart frame the frameless overload would use.
Mat3 bracket_chart_frame(const PhasePoint& pt, const ModelParams& params);

struct TrajectorySample {
  double t;
  PhasePoint pt;
};

// Classical RK4 with per-step renormalization of x and re-orthogonalization
// of p; throws StepTooLarge if the one-step energy drift exceeds 1e-3
// relative.
std::vector<TrajectorySample> flow(const PhasePoint& pt0, double t_max, double dt,
                                   const ModelParams& params);

double hamiltonian(const PhasePoint& pt, const ModelParams& params);

// Closed form of the complexified exponential map applied to x; satisfies
// a.a = r^2 to machine precision.
ComplexSpherePoint complexifier_map(const PhasePoint& pt, const ModelParams& params);

// Gauss-Newton inversion of complexifier_map; round trip accurate to 1e-9 r.
PhasePoint complexifier_inverse(const ComplexSpherePoint& a, const ModelParams& params);

}  // namespace monosphere::classical
