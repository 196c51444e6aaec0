#pragma once

// Coherent states as heat-evolved delta sections: the local holomorphic lift
// of the complex sphere into SL(2,C), continued delta-section coefficients,
// eigen-residual diagnostics, overlaps, expectation values, and Husimi-style
// phase-space grids.

#include <array>
#include <vector>

#include "monosphere/classical.hpp"
#include "monosphere/groups.hpp"
#include "monosphere/quantum.hpp"

namespace monosphere::states {

using classical::ComplexSpherePoint;
using quantum::BlockOperator;
using quantum::TwistedHilbert;

// A point of the complex sphere together with a lift g_a satisfying
// R_{g_a} (0,0,r) = a.  The lift is algebraic (eigenvectors of a.E), hence
// holomorphic in a away from the branch set at the antipode of the north
// pole; for real a it reduces to the geodesic rotation taking the north pole
// to a.
struct SectionPoint {
  ComplexSpherePoint a;
  groups::GroupElement g;
};

SectionPoint lift_point(const ComplexSpherePoint& a, double r);

// Lift that retries in a rotated frame on BranchCut; always succeeds.
SectionPoint lift_point_robust(const ComplexSpherePoint& a, double r);

// Continued basis values Y_{jm}(g) = sqrt((2j+1)/(4 pi r^2)) i^m D^j_{m,l}(g)
// as a coefficient-indexed vector.
VecXc basis_column(const TwistedHilbert& space, const Mat2c& g);

// Coefficients of the delta section at sp: the conjugate of the basis values
// for real a, continued holomorphically via D^j(.) at (g_a^{-1})^T.
VecXc delta_section(const SectionPoint& sp, const TwistedHilbert& space);

struct CoherentState {
  VecXc vec;
  ComplexSpherePoint a;
  double tau;
  double tail_mass{0.0};         // top-shell coefficient mass / norm^2
  bool truncation_warning{false};  // tail_mass > 1e-8
};

CoherentState coherent_state(const ComplexSpherePoint& a, const TwistedHilbert& space);

// rho_k = ||A_k v - a_k v|| / ||v|| with the conjugation-route annihilation
// operators; pure truncation diagnostics.
std::array<double, 3> eigen_residual(const CoherentState& cs, const TwistedHilbert& space,
                                     const std::array<BlockOperator, 3>& A);
std::array<double, 3> eigen_residual(const CoherentState& cs, const TwistedHilbert& space);

Complex overlap(const ComplexSpherePoint& a, const ComplexSpherePoint& b,
                const TwistedHilbert& space);

struct Expectations {
  Vec3 x;
  Vec3 j;
};

Expectations expectations(const CoherentState& cs, const TwistedHilbert& space);

// Value of the section with coefficients c at the real point x, as a vector
// in V_l (descending-m components); scalar for l = 0.
VecXc evaluate_section(const VecXc& c, const TwistedHilbert& space, const Vec3& x);

// Block-diagonal unitary implementing the rotation U on coefficients.
BlockOperator rotation_action(const TwistedHilbert& space, const groups::GroupElement& u);

struct HusimiGridSpec {
  int n_s{8};
  int n_theta{16};
  int n_phi{32};
  double s_max{1.0};
};

struct HusimiCell {
  double s;
  double theta;
  double phi;
  double value;
};

// |<chi_a, psi>|^2 / ||chi_a||^2 over the grid a(s, theta, phi) =
// r (cosh s u(theta,phi) + i sinh s e_theta(theta,phi)); row-major in
// (s, theta, phi).
std::vector<HusimiCell> husimi_grid(const VecXc& psi, const HusimiGridSpec& spec,
                                    const TwistedHilbert& space);

// Extended-precision eigen-residual measurement: rebuilds the chain in long
// double so truncation decay below the double roundoff floor stays visible.
std::array<double, 3> eigen_residual_extended(const ComplexSpherePoint& a, int twice_l,
                                              int twice_j_max, double tau, double r);

}  // namespace monosphere::states
