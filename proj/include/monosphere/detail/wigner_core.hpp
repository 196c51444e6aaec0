#pragma once

// Precision-templated cores for the Wigner D-matrix and Clebsch-Gordan
// coefficients.  Double is the production instantiation; long double backs
// truncation-decay measurements that sit below the double roundoff floor.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

namespace monosphere::groups::detail {

inline constexpr int kMaxFactorial = 512;

template <typename Real>
const std::array<Real, kMaxFactorial + 1>& log_factorial_table() {
  static const auto table = [] {
    std::array<Real, kMaxFactorial + 1> t{};
    t[0] = Real(0);
    for (int n = 1; n <= kMaxFactorial; ++n) t[n] = t[n - 1] + std::log(Real(n));
    return t;
  }();
  return table;
}

template <typename Real>
Real log_factorial(int n) {
  return log_factorial_table<Real>().at(size_t(n));
}

// z^n for n >= 0 with 0^0 = 1 (std::pow on complex goes through exp/log and
// produces NaN at the origin).
template <typename Real>
std::complex<Real> cpow_int(std::complex<Real> z, int n) {
  std::complex<Real> out{Real(1), Real(0)};
  while (n > 0) {
    if (n & 1) out *= z;
    z *= z;
    n >>= 1;
  }
  return out;
}

// D^j(g), rows/cols ordered m = j..-j (descending); polynomial in the entries
// of g, so defined on all of SL(2,C).
template <typename Real>
Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic> wigner_core(
    int twice_j, const Eigen::Matrix<std::complex<Real>, 2, 2>& g) {
  using C = std::complex<Real>;
  const C a = g(0, 0), b = g(0, 1), c = g(1, 0), d = g(1, 1);
  const int n = twice_j + 1;
  Eigen::Matrix<C, Eigen::Dynamic, Eigen::Dynamic> out(n, n);
  for (int im = 0; im < n; ++im) {
    const int tmp = twice_j - 2 * im;  // row label m'
    const int jpmp = (twice_j + tmp) / 2, jmmp = (twice_j - tmp) / 2;
    for (int ik = 0; ik < n; ++ik) {
      const int tm = twice_j - 2 * ik;  // column label m
      const int jpm = (twice_j + tm) / 2, jmm = (twice_j - tm) / 2;
      const Real pref = Real(0.5) * (log_factorial<Real>(jpmp) + log_factorial<Real>(jmmp) -
                                     log_factorial<Real>(jpm) - log_factorial<Real>(jmm));
      C sum{Real(0), Real(0)};
      const int klo = std::max(0, (tm + tmp) / 2);
      const int khi = std::min(jpm, jpmp);
      for (int k = klo; k <= khi; ++k) {
        const Real lc = log_factorial<Real>(jpm) - log_factorial<Real>(k) -
                        log_factorial<Real>(jpm - k) + log_factorial<Real>(jmm) -
                        log_factorial<Real>(jpmp - k) - log_factorial<Real>(jmm - jpmp + k);
        C term = std::exp(lc + pref) * cpow_int<Real>(a, k) * cpow_int<Real>(c, jpm - k) *
                 cpow_int<Real>(b, jpmp - k) * cpow_int<Real>(d, k - (tm + tmp) / 2);
        sum += term;
      }
      out(im, ik) = sum;
    }
  }
  return out;
}

// Condon-Shortley Clebsch-Gordan coefficient, twice-integer labels; returns 0
// outside the selection rules.
template <typename Real>
Real cg_core(int tj1, int tm1, int tj2, int tm2, int tJ, int tM) {
  if (tM != tm1 + tm2) return Real(0);
  if (std::abs(tm1) > tj1 || std::abs(tm2) > tj2 || std::abs(tM) > tJ) return Real(0);
  if (tJ > tj1 + tj2 || tJ < std::abs(tj1 - tj2)) return Real(0);
  if ((tj1 + tj2 + tJ) % 2 != 0) return Real(0);
  if ((tj1 + tm1) % 2 != 0 || (tj2 + tm2) % 2 != 0 || (tJ + tM) % 2 != 0) return Real(0);
  auto f = [](int t) { return log_factorial<Real>(t / 2); };  // t is an even twice-value
  const Real pref =
      Real(0.5) * (std::log(Real(tJ + 1)) + f(tj1 + tj2 - tJ) + f(tj1 - tj2 + tJ) +
                   f(-tj1 + tj2 + tJ) - f(tj1 + tj2 + tJ + 2) + f(tJ + tM) + f(tJ - tM) +
                   f(tj1 - tm1) + f(tj1 + tm1) + f(tj2 - tm2) + f(tj2 + tm2));
  const int klo = std::max({0, (tj2 - tJ - tm1) / 2, (tj1 + tm2 - tJ) / 2});
  const int khi = std::min({(tj1 + tj2 - tJ) / 2, (tj1 - tm1) / 2, (tj2 + tm2) / 2});
  Real sum = 0;
  for (int k = klo; k <= khi; ++k) {
    const Real lt = f(2 * k) + f(tj1 + tj2 - tJ - 2 * k) + f(tj1 - tm1 - 2 * k) +
                    f(tj2 + tm2 - 2 * k) + f(tJ - tj2 + tm1 + 2 * k) +
                    f(tJ - tj1 - tm2 + 2 * k);
    sum += ((k % 2 == 0) ? Real(1) : Real(-1)) * std::exp(pref - lt);
  }
  return sum;
}

}  // namespace monosphere::groups::detail
