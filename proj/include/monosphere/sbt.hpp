#pragma once

// Segal-Bargmann machinery: the transform to holomorphic sections of the
// complex sphere, the group radial density, the twisted operator-valued
// density obtained by integrating over the complexified diagonal subgroup,
// the invariant measure on the quadric, and quadrature-based isometry checks.

#include <vector>

#include "monosphere/states.hpp"

namespace monosphere::sbt {

using classical::ComplexSpherePoint;
using quantum::TwistedHilbert;

// Holomorphic section: heat-damped coefficients plus evaluation through the
// continued basis.  Evaluation is independent of the lift used for z.
struct HoloSection {
  VecXc damped;
  const TwistedHilbert* space{nullptr};

  // V_l-valued value at z (descending-m components of V_l).
  VecXc evaluate(const ComplexSpherePoint& z) const;
  VecXc evaluate_with_lift(const Mat2c& g) const;
  // scalar part F(g) with the V_l direction Pi_l(g) v_l factored off
  Complex scalar_part(const Mat2c& g) const;
};

HoloSection sbt_transform(const VecXc& psi, const TwistedHilbert& space);

// Inverse heat factor on coefficients (surjectivity probe support).
VecXc sbt_inverse(const HoloSection& section);

// ---- invariant measure on the quadric ----

// Radial weight of the invariant measure in the polar chart
// z = r(cosh s u + i sinh s v): sinh(s) cosh(s).
double invariant_measure_weight(double s);

// Radial coordinate of z: s = arccosh(|z|^2 / r^2) / 2.
double hyperbolic_radius(const CVec3& z, double r);

// |Omega ^ conj(Omega)| pullback density in the chart
// (rotation angles, s), with Omega = dz_a ^ dz_b / (2 z_c) for the index
// permutation c = perm; throws ChartDegeneracy when |z_perm| < 1e-10.
double invariant_measure_numeric(const Mat3& frame, double s, double r, int perm);

// ---- group radial density ----

// nu_tau radial profile (s/sinh s) e^{-s^2/tau}, normalized so that the j = 0
// sector integral equals 1.
struct RadialDensity {
  double tau{0.0};
  double normalization{1.0};

  double profile(double s) const;
  double raw_profile(double s) const;  // before normalization
};

RadialDensity nu_group(double tau);

// R_j by 1D radial quadrature (frame integrals collapse by Schur
// orthogonality); R_0 = 1 by the nu_group normalization.
double sector_isometry(int twice_j, double tau);

// ---- twisted density ----

struct DCQuadSpec {
  int n_sigma{96};
  int n_theta{8};
  double sigma_pad{14.0};  // multiples of sqrt(tau) beyond 2 s
};

// nu^l at the point with lift g: int over D_C of
// Pi_l(((gh)^-1)* (gh)^-1) nu(gh) dh; Hermitian positive, lift-independent.
MatXc nu_twisted(double tau, int twice_l, const Mat2c& lift_g,
                 const DCQuadSpec& spec = {});

// Scalar reduction used by the isometry integrand at the canonical boosted
// node z0(s): (Pi(b_s) v_l)+ nu^l(z0(s)) (Pi(b_s) v_l).
double nu_twisted_scalar(double tau, int twice_l, double s, const DCQuadSpec& spec = {});

// SL(2,C) lift of the canonical node z0(s) = r(cosh s e3 + i sinh s e1).
Mat2c canonical_boost(double s);

// ---- full isometry ----

struct IsometrySpec {
  int frame_order{-1};   // default 2 j_max + 2
  int n_s{48};
  double s_max{-1.0};    // default max(6, (2 j_max + 1) tau / 2 + 8 sqrt(tau))
  DCQuadSpec dc{};
  int max_refine{3};
  double refine_target{1e-4};
};

struct IsometryResult {
  double ratio;
  double error_estimate;
  double s_max;
  int frame_order;
  int n_s;
  int n_sigma;
  int n_theta;
};

// ||Psi||^2_{nu^l} / ||psi||^2 with the overall normalization pinned by the
// l = 0, j = 0 sector on the same grids (R_0 = 1 convention); refines the
// radial grids until stable, else throws QuadratureNotConverged.
IsometryResult isometry_check(const VecXc& psi, const TwistedHilbert& space,
                              IsometrySpec spec = {});

}  // namespace monosphere::sbt
