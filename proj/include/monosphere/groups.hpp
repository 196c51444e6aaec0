#pragma once

// SU(2)/SL(2,C) kernel: exponential map, covering map onto SO(3), polar
// decomposition, Wigner D-matrices valid on the complexified group,
// Clebsch-Gordan coefficients, and Haar quadrature.
//
// Conventions (fixed project-wide):
//  - su(2) basis E_1 = [[0,1],[-1,0]]/2, E_2 = [[0,i],[i,0]]/2,
//    E_3 = [[i,0],[0,-i]]/2, so [E_j,E_k] = eps_jkl E_l.
//  - The covering map sends diag(e^{i t/2}, e^{-i t/2}) to the rotation by t
//    about e_3 (counterclockwise).
//  - wigner_d(2j, g) is ordered with row/column index i <-> m = j - i
//    (descending m), so wigner_d(1, g) == g exactly.  Entries are
//    polynomials in the four entries of g and hence holomorphic on SL(2,C).
//  - clebsch_gordan uses the Condon-Shortley phase convention.

#include <array>
#include <utility>
#include <vector>

#include "monosphere/common.hpp"

namespace monosphere::groups {

// 2x2 complex unimodular matrix; `unitary` marks SU(2) members.
struct GroupElement {
  Mat2c m{Mat2c::Identity()};
  bool unitary{true};

  static GroupElement su2(const Mat2c& m);   // validates g+g = I, det = 1
  static GroupElement sl2c(const Mat2c& m);  // validates det = 1
  GroupElement operator*(const GroupElement& o) const {
    return GroupElement{m * o.m, unitary && o.unitary};
  }
  GroupElement inverse() const;
};

// Element c_1 E_1 + c_2 E_2 + c_3 E_3 of su(2).
struct AlgebraElement {
  Vec3 c{Vec3::Zero()};
};

// g = k * p with k in SU(2) and p = exp(-i s (axis.E)) positive;
// eigenvalues of g+g are e^{+-s}.
struct PolarDecomposition {
  GroupElement k;
  double s{0.0};
  Vec3 axis{0.0, 0.0, 1.0};
  Mat2c positive_factor() const;
};

// Irreducible representation data for spin l: generators sigma_j = i*hbar*dPi(E_j)
// carried as dense matrices in the descending-m basis.
struct IrrepData {
  int twice_l{0};
  int dim{1};
  double hbar{1.0};
  std::array<MatXc, 3> sigma;
};

Mat2c algebra_matrix(const AlgebraElement& xi);

// Closed-form exponential of a traceless 2x2 matrix.
Mat2c exp_traceless(const Mat2c& m);

GroupElement exp_su2(const AlgebraElement& xi);

// SU(2) -> SO(3); throws NotUnitary when ||U+U - I|| > 1e-10.
Mat3 covering_map(const GroupElement& u);

// Holomorphic extension of the covering map: SL(2,C) -> SO(3,C).
Mat3c rotation_of(const Mat2c& g);

PolarDecomposition polar_decompose(const GroupElement& g);

// D^j(g) for twice_j >= 0; see header comment for index order.
MatXc wigner_d(int twice_j, const Mat2c& g);

// Row/column position of magnetic label m inside D^j.
inline int wigner_index(int twice_j, int twice_m) { return (twice_j - twice_m) / 2; }

double clebsch_gordan(int twice_j1, int twice_m1, int twice_j2, int twice_m2,
                      int twice_J, int twice_M);

IrrepData irrep(int twice_l, double hbar);

// Product Euler-angle rule (Gauss-Legendre in cos(beta), trapezoid in the two
// torus angles, 4pi period in the angle conjugate to E_3).  Integrates Wigner
// entries exactly for j <= order and |D|^2 for j <= order/2; weights sum to 1.
std::vector<std::pair<GroupElement, double>> haar_quadrature(int order);

// Gauss-Legendre nodes/weights on [a, b].
void gauss_legendre(int n, double a, double b, std::vector<double>& x,
                    std::vector<double>& w);

// log(n!) with table lookup; n <= 512.
double log_factorial(int n);

// Change of basis with wigner_d(2,.) columns (m = 1,0,-1) mapping spherical to
// Cartesian components: rotation_of(g) == sph_to_cart * wigner_d(2,g) * inverse.
Mat3c spherical_to_cartesian();

}  // namespace monosphere::groups
