#include "monosphere/groups.hpp"

#include <array>
#include <cmath>

#include "monosphere/detail/wigner_core.hpp"

namespace monosphere::groups {

namespace {

Mat2c basis_e(int j) {
  Mat2c m = Mat2c::Zero();
  switch (j) {
    case 0: m << 0, 0.5, -0.5, 0; break;
    case 1: m << 0, 0.5 * I, 0.5 * I, 0; break;
    default: m << 0.5 * I, 0, 0, -0.5 * I; break;
  }
  return m;
}

}  // namespace

double log_factorial(int n) { return detail::log_factorial<double>(n); }

GroupElement GroupElement::su2(const Mat2c& m) {
  Complex det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  if (std::abs(det - 1.0) > 1e-12) throw InvalidParams("GroupElement: det != 1");
  if ((m.adjoint() * m - Mat2c::Identity()).cwiseAbs().maxCoeff() > 1e-12)
    throw NotUnitary("GroupElement::su2: not unitary");
  return GroupElement{m, true};
}

GroupElement GroupElement::sl2c(const Mat2c& m) {
  Complex det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  if (std::abs(det - 1.0) > 1e-12) throw InvalidParams("GroupElement: det != 1");
  bool uni = (m.adjoint() * m - Mat2c::Identity()).cwiseAbs().maxCoeff() <= 1e-12;
  return GroupElement{m, uni};
}

GroupElement GroupElement::inverse() const {
  Mat2c inv;
  inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return GroupElement{inv, unitary};
}

Mat2c algebra_matrix(const AlgebraElement& xi) {
  return xi.c[0] * basis_e(0) + xi.c[1] * basis_e(1) + xi.c[2] * basis_e(2);
}

Mat2c exp_traceless(const Mat2c& m) {
  Complex det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  Complex mu = std::sqrt(-det);
  if (std::abs(mu) < 1e-6) {
    // series for cosh(mu), sinh(mu)/mu; m^2 = mu^2 I
    Complex mu2 = mu * mu;
    Complex c = 1.0 + mu2 / 2.0 + mu2 * mu2 / 24.0;
    Complex s = 1.0 + mu2 / 6.0 + mu2 * mu2 / 120.0;
    return c * Mat2c::Identity() + s * m;
  }
  return std::cosh(mu) * Mat2c::Identity() + (std::sinh(mu) / mu) * m;
}

GroupElement exp_su2(const AlgebraElement& xi) {
  if (!xi.c.allFinite()) throw InvalidParams("exp_su2: non-finite coefficients");
  return GroupElement{exp_traceless(algebra_matrix(xi)), true};
}

Mat3c rotation_of(const Mat2c& g) {
  Mat2c gi;
  gi << g(1, 1), -g(0, 1), -g(1, 0), g(0, 0);
  Mat3c r;
  for (int k = 0; k < 3; ++k) {
    Mat2c left = basis_e(k);
    for (int j = 0; j < 3; ++j) {
      r(k, j) = -2.0 * (left * g * basis_e(j) * gi).trace();
    }
  }
  return r;
}

Mat3 covering_map(const GroupElement& u) {
  if ((u.m.adjoint() * u.m - Mat2c::Identity()).cwiseAbs().maxCoeff() > 1e-10)
    throw NotUnitary("covering_map: input not in SU(2)");
  return rotation_of(u.m).real();
}

Mat2c PolarDecomposition::positive_factor() const {
  AlgebraElement xi{axis * s};
  return exp_traceless(-I * algebra_matrix(xi));
}

PolarDecomposition polar_decompose(const GroupElement& g) {
  Mat2c h = g.m.adjoint() * g.m;  // positive Hermitian, det 1
  Eigen::SelfAdjointEigenSolver<Mat2c> es(h);
  if (es.info() != Eigen::Success) throw Singular("polar_decompose: eigensolver failed");
  double lo = es.eigenvalues()(0), hi = es.eigenvalues()(1);
  if (lo <= 0.0) throw Singular("polar_decompose: g+g not positive");
  PolarDecomposition out;
  out.s = 0.5 * (std::log(hi) - std::log(lo));
  if (out.s < 1e-14) {
    out.s = std::max(out.s, 0.0);
    out.k = GroupElement{g.m, true};
    out.axis = Vec3(0, 0, 1);
    return out;
  }
  // h = cosh(s) I + sinh(s) [[n3, n2 - i n1], [n2 + i n1, -n3]]; read n off
  // the traceless part.
  Mat2c t = h - 0.5 * h.trace() * Mat2c::Identity();
  double scale = std::sinh(out.s);
  Vec3 n;
  n[0] = -t(0, 1).imag() / scale;
  n[1] = t(0, 1).real() / scale;
  n[2] = t(0, 0).real() / scale;
  double nn = n.norm();
  if (nn < 1e-14) throw Singular("polar_decompose: degenerate axis");
  out.axis = n / nn;
  Mat2c p = PolarDecomposition{GroupElement{}, out.s, out.axis}.positive_factor();
  Mat2c pinv;
  pinv << p(1, 1), -p(0, 1), -p(1, 0), p(0, 0);
  out.k = GroupElement{g.m * pinv, true};
  return out;
}

MatXc wigner_d(int twice_j, const Mat2c& g) {
  if (twice_j < 0) throw InvalidParams("wigner_d: twice_j < 0");
  return detail::wigner_core<double>(twice_j, g);
}

double clebsch_gordan(int tj1, int tm1, int tj2, int tm2, int tJ, int tM) {
  return detail::cg_core<double>(tj1, tm1, tj2, tm2, tJ, tM);
}

IrrepData irrep(int twice_l, double hbar) {
  if (twice_l < 0) throw InvalidParams("irrep: twice_l < 0");
  IrrepData out;
  out.twice_l = twice_l;
  out.dim = twice_l + 1;
  out.hbar = hbar;
  // sigma_j = i hbar dPi(E_j); differentiate wigner_d along e^{t E_j} analytically
  // via ladder formulas in the descending-m basis.
  for (auto& s : out.sigma) s = MatXc::Zero(out.dim, out.dim);
  const double j = 0.5 * twice_l;
  for (int tm = -twice_l; tm <= twice_l; tm += 2) {
    const double m = 0.5 * tm;
    const int i = wigner_index(twice_l, tm);
    out.sigma[2](i, i) = -hbar * m;
    if (tm + 2 <= twice_l) {
      const double cp = std::sqrt(j * (j + 1) - m * (m + 1));
      const int ip = wigner_index(twice_l, tm + 2);
      // dPi(E1) = (raise - lower)/2, dPi(E2) = i (raise + lower)/2
      out.sigma[0](ip, i) += I * hbar * 0.5 * cp;
      out.sigma[0](i, ip) += -I * hbar * 0.5 * cp;
      out.sigma[1](ip, i) += -hbar * 0.5 * cp;
      out.sigma[1](i, ip) += -hbar * 0.5 * cp;
    }
  }
  return out;
}

void gauss_legendre(int n, double a, double b, std::vector<double>& x,
                    std::vector<double>& w) {
  x.assign(size_t(n), 0.0);
  w.assign(size_t(n), 0.0);
  // Newton iteration on P_n over [-1,1], then affine map to [a,b].
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    double xm = 0.5 * (b + a), xl = 0.5 * (b - a);
    x[size_t(i)] = xm - xl * z;
    x[size_t(n - 1 - i)] = xm + xl * z;
    w[size_t(i)] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
    w[size_t(n - 1 - i)] = w[size_t(i)];
  }
}

std::vector<std::pair<GroupElement, double>> haar_quadrature(int order) {
  if (order < 2) throw InvalidParams("haar_quadrature: order < 2");
  const int na = 2 * order + 2;
  const int nb = order + 1;
  const int ng = 2 * order + 2;  // over [0, 4pi)
  std::vector<double> xb, wb;
  gauss_legendre(nb, -1.0, 1.0, xb, wb);
  std::vector<std::pair<GroupElement, double>> nodes;
  nodes.reserve(size_t(na) * size_t(nb) * size_t(ng));
  for (int ia = 0; ia < na; ++ia) {
    const double alpha = 2.0 * M_PI * ia / na;
    const Mat2c ua = exp_traceless(algebra_matrix({Vec3(0, 0, alpha)}));
    for (int ib = 0; ib < nb; ++ib) {
      const double beta = std::acos(xb[size_t(ib)]);
      const Mat2c ub = exp_traceless(algebra_matrix({Vec3(0, beta, 0)}));
      const Mat2c uab = ua * ub;
      for (int ig = 0; ig < ng; ++ig) {
        const double gamma = 4.0 * M_PI * ig / ng;
        const Mat2c ug = exp_traceless(algebra_matrix({Vec3(0, 0, gamma)}));
        const double w = (1.0 / na) * (0.5 * wb[size_t(ib)]) * (1.0 / ng);
        nodes.push_back({GroupElement{uab * ug, true}, w});
      }
    }
  }
  long double total = 0.0L;
  for (const auto& n : nodes) total += n.second;
  for (auto& n : nodes) n.second = double(n.second / total);
  return nodes;
}

Mat3c spherical_to_cartesian() {
  Mat3c s;
  const double is2 = 1.0 / std::sqrt(2.0);
  s << -I * is2, 0, -I * is2, -is2, 0, is2, 0, 1, 0;
  return s;
}

}  // namespace monosphere::groups
