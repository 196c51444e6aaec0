#pragma once

// Truncated realization of the twisted Hilbert space over S^2 in the group
// picture: basis functions sqrt((2j+1)/(4 pi r^2)) i^m D^j_{m,l} on SU(2)
// with fixed right index l, shells |l| <= j <= j_max.  Position operators are
// assembled from Clebsch-Gordan data, angular momentum acts shell-diagonally
// with the standard ladder matrix elements, and the annihilation operators
// come out of the heat conjugation (with a closed shell-wise form checked
// against it).

#include <array>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "monosphere/classical.hpp"
#include "monosphere/common.hpp"

namespace monosphere::quantum {

using classical::ModelParams;

// Basis index set {(j, m)}: ascending j, then ascending m; coefficients of
// states are stored in this order.
class TwistedHilbert {
 public:
  TwistedHilbert(int twice_l, int twice_j_max, const ModelParams& params);

  int twice_l() const { return twice_l_; }
  int twice_j_max() const { return twice_j_max_; }
  const ModelParams& params() const { return params_; }
  int n_shells() const { return int(shells_.size()); }
  int shell_twice_j(int s) const { return shells_[size_t(s)]; }
  int shell_dim(int s) const { return shells_[size_t(s)] + 1; }
  int shell_offset(int s) const { return offsets_[size_t(s)]; }
  int dim() const { return dim_; }

  // flat index of basis element (j, m), twice-integer labels
  int index(int twice_j, int twice_m) const;
  int shell_of(int twice_j) const { return (twice_j - std::abs(twice_l_)) / 2; }

 private:
  int twice_l_;
  int twice_j_max_;
  ModelParams params_;
  std::vector<int> shells_;   // twice_j per shell, ascending
  std::vector<int> offsets_;  // flat offset of each shell
  int dim_;
};

TwistedHilbert build_space(int twice_l, int twice_j_max, const ModelParams& params);

// Block-banded operator on a TwistedHilbert: dense blocks (s_row, s_col) with
// |s_row - s_col| <= bandwidth.  Products keep only blocks supported by the
// truncated shell set, which is exactly the truncation semantics the
// relation residuals are quoted in.
class BlockOperator {
 public:
  BlockOperator() = default;
  BlockOperator(const TwistedHilbert& space, int bandwidth);

  static BlockOperator identity(const TwistedHilbert& space);
  // diagonal operator f(j) per shell
  static BlockOperator shell_diagonal(const TwistedHilbert& space,
                                      const std::function<Complex(double)>& f);

  int bandwidth() const { return bandwidth_; }
  const TwistedHilbert& space() const { return *space_; }

  MatXc& block(int s_row, int s_col);
  const MatXc& block(int s_row, int s_col) const;
  bool has_block(int s_row, int s_col) const;

  VecXc apply(const VecXc& v) const;
  BlockOperator operator*(const BlockOperator& o) const;
  BlockOperator operator+(const BlockOperator& o) const;
  BlockOperator operator-(const BlockOperator& o) const;
  BlockOperator operator*(Complex c) const;
  BlockOperator adjoint() const;

  // max |entry| over retained blocks; `buffer` drops blocks touching the top
  // `buffer` shells (buffer = 2 is the interior subspace).
  double max_abs(int buffer = 0) const;
  MatXc to_dense() const;

 private:
  const TwistedHilbert* space_{nullptr};
  int bandwidth_{0};
  std::vector<MatXc> blocks_;  // blocks_[s_row * (2bw+1) + (s_col - s_row + bw)]
};

inline BlockOperator operator*(Complex c, const BlockOperator& op) { return op * c; }
BlockOperator commutator(const BlockOperator& a, const BlockOperator& b);

// [J1, J2, J3]: block-diagonal, J3 = hbar m, ladder elements
// hbar sqrt(j(j+1)-m(m+-1)).
std::array<BlockOperator, 3> angular_momentum_operators(const TwistedHilbert& space);

// Multiplication by the Cartesian coordinate functions; Hermitian by
// construction, bandwidth 1.
std::array<BlockOperator, 3> position_operators(const TwistedHilbert& space);

// P = (1/r^2) J x X with (J x X)_i = eps_ijk J_j X_k.
std::array<BlockOperator, 3> linear_momentum(const TwistedHilbert& space,
                                             const std::array<BlockOperator, 3>& J,
                                             const std::array<BlockOperator, 3>& X);
std::array<BlockOperator, 3> linear_momentum(const TwistedHilbert& space);

// e^{-t j(j+1)/2} per shell; throws Overflow when the exponent passes 700.
BlockOperator heat_operator(const TwistedHilbert& space, double t);

// A_k = heat(tau) X_k heat(-tau).
std::array<BlockOperator, 3> annihilation_conjugation(const TwistedHilbert& space);

// Shell-wise closed form: A = F1(J^2) X + i F2(J^2) P/(m alpha) + sgn L(J^2) B J/(m^2 alpha^2 r),
// with the sign of the J term resolved against annihilation_conjugation;
// throws SignMismatch when neither sign matches.
std::array<BlockOperator, 3> annihilation_closed_form(const TwistedHilbert& space);

// Scalar coefficient functions of the closed form at a given shell value of
// L-hat (and the classical limits for comparison).  coeff_x multiplies X,
// coeff_p multiplies P/(m alpha), coeff_j multiplies B J/(m^2 alpha^2 r).
struct AnnihilationCoefficients {
  double coeff_x;
  double coeff_p;
  double coeff_j;
};
AnnihilationCoefficients annihilation_coefficients_quantum(double Lhat, double tau);
AnnihilationCoefficients annihilation_coefficients_classical(double L);

struct RelationResidual {
  std::string relation;
  double norm_full;
  double norm_interior;
  double scale;
  bool identity{true};  // false marks measured diagnostics, not asserted identities
};

struct RelationReport {
  int twice_l;
  int twice_j_max;
  double tau;
  std::vector<RelationResidual> residuals;

  double max_interior_rel() const;
  const RelationResidual& find(const std::string& name) const;
};

// Max-norm residuals of the operator algebra, full-space and interior
// (shells j <= j_max - 2).
RelationReport relation_report(const TwistedHilbert& space);

// V_l-valued evaluation helpers shared by the states/sbt modules: value of
// the basis-coefficient vector as a section, see states.hpp/sbt.hpp.

}  // namespace monosphere::quantum
