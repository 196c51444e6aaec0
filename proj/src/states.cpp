#include "monosphere/states.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "monosphere/detail/wigner_core.hpp"
#include "monosphere/util.hpp"

namespace monosphere::util {

int worker_threads() {
  if (const char* env = std::getenv("MONOSPHERE_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : int(hc);
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  const int nt = std::min(worker_threads(), n);
  if (nt <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(size_t(nt));
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace monosphere::util

namespace monosphere::states {

namespace {

// i^m for twice-integer 2m, exact for the quarter-turn values.
Complex phase_i_pow(int twice_m) {
  if (twice_m % 2 == 0) {
    switch (((twice_m / 2) % 4 + 4) % 4) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  return std::exp(I * (M_PI * 0.25 * twice_m));
}

Mat2c inverse_transpose(const Mat2c& g) {
  Mat2c out;
  out << g(1, 1), -g(1, 0), -g(0, 1), g(0, 0);
  return out;
}

}  // namespace

SectionPoint lift_point(const ComplexSpherePoint& csp, double r) {
  const CVec3& a = csp.a;
  const Vec3 u = a.real();
  Vec3 uhat = u;
  const double un = uhat.norm();
  if (un < 1e-12 * r) throw BranchCut("lift_point: Re(a) = 0");
  uhat /= un;
  if ((uhat + Vec3(0, 0, 1)).norm() < 1e-8 || std::abs(a[2] + r) < 1e-8 * r)
    throw BranchCut("lift_point: antipodal branch set");
  // Columns are the eigenvectors of a.E; holomorphic in a on this chart.
  Mat2c g;
  g << I * (a[2] + r), -(a[0] + I * a[1]), -a[0] + I * a[1], I * (a[2] + r);
  Complex w = -2.0 * r * (r + a[2]);
  if (w.imag() == 0.0) w = Complex(w.real(), 0.0);  // clear the sign of zero
  const Complex lam = 1.0 / std::sqrt(w);
  return SectionPoint{csp, groups::GroupElement::sl2c(lam * g)};
}

SectionPoint lift_point_robust(const ComplexSpherePoint& csp, double r) {
  try {
    return lift_point(csp, r);
  } catch (const BranchCut&) {
    // quarter turn about e2, recompute, rotate the lift back
    const groups::GroupElement u0 =
        groups::exp_su2(groups::AlgebraElement{Vec3(0.0, M_PI / 2.0, 0.0)});
    const Mat3c rc = groups::rotation_of(u0.m);
    ComplexSpherePoint rotated{rc * csp.a};
    SectionPoint sp = lift_point(rotated, r);
    return SectionPoint{csp, u0.inverse() * sp.g};
  }
}

VecXc basis_column(const TwistedHilbert& space, const Mat2c& g) {
  const double r = space.params().r;
  const int tl = space.twice_l();
  VecXc out(space.dim());
  for (int s = 0; s < space.n_shells(); ++s) {
    const int tj = space.shell_twice_j(s);
    MatXc d = groups::wigner_d(tj, g);
    const double kj = std::sqrt((tj + 1) / (4.0 * M_PI * r * r));
    for (int tm = -tj; tm <= tj; tm += 2) {
      out[space.index(tj, tm)] =
          kj * phase_i_pow(tm) * d(groups::wigner_index(tj, tm), groups::wigner_index(tj, tl));
    }
  }
  return out;
}

VecXc delta_section(const SectionPoint& sp, const TwistedHilbert& space) {
  const double r = space.params().r;
  const int tl = space.twice_l();
  const Mat2c arg = inverse_transpose(sp.g.m);
  VecXc out(space.dim());
  for (int s = 0; s < space.n_shells(); ++s) {
    const int tj = space.shell_twice_j(s);
    MatXc d = groups::wigner_d(tj, arg);
    const double kj = std::sqrt((tj + 1) / (4.0 * M_PI * r * r));
    for (int tm = -tj; tm <= tj; tm += 2) {
      out[space.index(tj, tm)] =
          kj * phase_i_pow(-tm) *
          d(groups::wigner_index(tj, tm), groups::wigner_index(tj, tl));
    }
  }
  return out;
}

CoherentState coherent_state(const ComplexSpherePoint& a, const TwistedHilbert& space) {
  const double tau = space.params().tau;
  SectionPoint sp = lift_point_robust(a, space.params().r);
  VecXc v = delta_section(sp, space);
  for (int s = 0; s < space.n_shells(); ++s) {
    const double j = 0.5 * space.shell_twice_j(s);
    v.segment(space.shell_offset(s), space.shell_dim(s)) *= std::exp(-tau * j * (j + 1) / 2.0);
  }
  CoherentState cs{v, a, tau, 0.0, false};
  const double n2 = v.squaredNorm();
  if (n2 <= 0.0 || !std::isfinite(n2))
    throw Overflow("coherent_state: state norm not finite");
  const int top = space.n_shells() - 1;
  cs.tail_mass = v.segment(space.shell_offset(top), space.shell_dim(top)).squaredNorm() / n2;
  cs.truncation_warning = cs.tail_mass > 1e-8;
  return cs;
}

std::array<double, 3> eigen_residual(const CoherentState& cs, const TwistedHilbert& space,
                                     const std::array<BlockOperator, 3>& A) {
  (void)space;
  std::array<double, 3> out{};
  const double nv = cs.vec.norm();
  for (int k = 0; k < 3; ++k)
    out[size_t(k)] = (A[size_t(k)].apply(cs.vec) - cs.a.a[k] * cs.vec).norm() / nv;
  return out;
}

std::array<double, 3> eigen_residual(const CoherentState& cs, const TwistedHilbert& space) {
  return eigen_residual(cs, space, quantum::annihilation_conjugation(space));
}

Complex overlap(const ComplexSpherePoint& a, const ComplexSpherePoint& b,
                const TwistedHilbert& space) {
  CoherentState ca = coherent_state(a, space);
  CoherentState cb = coherent_state(b, space);
  return ca.vec.dot(cb.vec);  // Eigen dot conjugates the first argument
}

Expectations expectations(const CoherentState& cs, const TwistedHilbert& space) {
  auto X = quantum::position_operators(space);
  auto J = quantum::angular_momentum_operators(space);
  Expectations out;
  const double n2 = cs.vec.squaredNorm();
  for (int k = 0; k < 3; ++k) {
    out.x[k] = cs.vec.dot(X[size_t(k)].apply(cs.vec)).real() / n2;
    out.j[k] = cs.vec.dot(J[size_t(k)].apply(cs.vec)).real() / n2;
  }
  return out;
}

VecXc evaluate_section(const VecXc& c, const TwistedHilbert& space, const Vec3& x) {
  const double r = space.params().r;
  const int tl = space.twice_l();
  const int tla = std::abs(tl);
  SectionPoint sp = lift_point_robust(ComplexSpherePoint{x.cast<Complex>()}, r);
  VecXc basis = basis_column(space, sp.g.m);
  const Complex f = basis.cwiseProduct(c).sum();  // plain sum, no conjugation
  // V_l-valued value: f * Pi_l(g_x) v_l with v_l the weight vector f_{-l}
  MatXc pil = groups::wigner_d(tla, sp.g.m);
  return f * pil.col(groups::wigner_index(tla, -tl));
}

BlockOperator rotation_action(const TwistedHilbert& space, const groups::GroupElement& u) {
  BlockOperator out(space, 0);
  const Mat2c ui = u.inverse().m;
  for (int s = 0; s < space.n_shells(); ++s) {
    const int tj = space.shell_twice_j(s);
    MatXc d = groups::wigner_d(tj, ui);
    MatXc& b = out.block(s, s);
    for (int tk = -tj; tk <= tj; tk += 2)
      for (int tm = -tj; tm <= tj; tm += 2)
        b((tk + tj) / 2, (tm + tj) / 2) =
            phase_i_pow(tm - tk) *
            d(groups::wigner_index(tj, tm), groups::wigner_index(tj, tk));
  }
  return out;
}

std::vector<HusimiCell> husimi_grid(const VecXc& psi, const HusimiGridSpec& spec,
                                    const TwistedHilbert& space) {
  const double r = space.params().r;
  const int n = spec.n_s * spec.n_theta * spec.n_phi;
  std::vector<HusimiCell> out(static_cast<size_t>(n));
  util::parallel_for(n, [&](int idx) {
    const int iphi = idx % spec.n_phi;
    const int itheta = (idx / spec.n_phi) % spec.n_theta;
    const int is = idx / (spec.n_phi * spec.n_theta);
    const double s = spec.s_max * (is + 0.5) / spec.n_s;
    const double theta = M_PI * (itheta + 0.5) / spec.n_theta;
    const double phi = 2.0 * M_PI * iphi / spec.n_phi;
    const Vec3 uhat(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                    std::cos(theta));
    const Vec3 vhat(std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi),
                    -std::sin(theta));
    CVec3 a = r * (std::cosh(s) * uhat.cast<Complex>() +
                   I * std::sinh(s) * vhat.cast<Complex>());
    CoherentState chi = coherent_state(ComplexSpherePoint{a}, space);
    const double val = std::norm(chi.vec.dot(psi)) / chi.vec.squaredNorm();
    out[size_t(idx)] = HusimiCell{s, theta, phi, val};
  });
  return out;
}

// ---- extended-precision truncation-decay measurement ----

namespace {

using LC = std::complex<long double>;
using LMat = Eigen::Matrix<LC, Eigen::Dynamic, Eigen::Dynamic>;
using LVec = Eigen::Matrix<LC, Eigen::Dynamic, 1>;
using LMat2 = Eigen::Matrix<LC, 2, 2>;

LC lphase_i_pow(int twice_m) { return std::exp(LC(0, 1) * LC(M_PIl * 0.25L * twice_m, 0)); }

}  // namespace

std::array<double, 3> eigen_residual_extended(const ComplexSpherePoint& csp, int twice_l,
                                              int twice_j_max, double tau, double r) {
  using groups::detail::cg_core;
  using groups::detail::wigner_core;
  const long double R = r, Tau = tau;
  const int tla = std::abs(twice_l);
  std::vector<int> shells;
  std::vector<int> offsets;
  int dim = 0;
  for (int tj = tla; tj <= twice_j_max; tj += 2) {
    shells.push_back(tj);
    offsets.push_back(dim);
    dim += tj + 1;
  }
  const int ns = int(shells.size());

  // lift in long double
  LC a0(csp.a[0].real(), csp.a[0].imag()), a1(csp.a[1].real(), csp.a[1].imag()),
      a2(csp.a[2].real(), csp.a[2].imag());
  LMat2 g;
  const LC i1(0.0L, 1.0L);
  g << i1 * (a2 + R), -(a0 + i1 * a1), -a0 + i1 * a1, i1 * (a2 + R);
  g *= LC(1.0L, 0.0L) / std::sqrt(LC(-2.0L, 0.0L) * R * (R + a2));
  LMat2 arg;  // (g^{-1})^T
  arg << g(1, 1), -g(1, 0), -g(0, 1), g(0, 0);

  // heat-damped delta coefficients
  LVec v(dim);
  for (int s = 0; s < ns; ++s) {
    const int tj = shells[size_t(s)];
    LMat d = wigner_core<long double>(tj, arg);
    const long double j = 0.5L * tj;
    const long double kj = std::sqrt((tj + 1) / (4.0L * M_PIl * R * R));
    const long double damp = std::exp(-Tau * j * (j + 1) / 2.0L);
    for (int tm = -tj; tm <= tj; tm += 2)
      v[offsets[size_t(s)] + (tm + tj) / 2] =
          kj * damp * lphase_i_pow(-tm) * d((tj - tm) / 2, (tj - tla) / 2);
  }

  // banded annihilation apply: (A_k v) via spherical X with heat conjugation
  std::array<LVec, 3> av;
  for (auto& w : av) w = LVec::Zero(dim);
  for (int sc = 0; sc < ns; ++sc) {
    const int tj = shells[size_t(sc)];
    const long double jc = 0.5L * tj;
    for (int sr = std::max(0, sc - 1); sr <= std::min(ns - 1, sc + 1); ++sr) {
      const int tJ = shells[size_t(sr)];
      const long double jr = 0.5L * tJ;
      const long double conj_factor =
          std::exp(-Tau * (jr * (jr + 1) - jc * (jc + 1)) / 2.0L);
      const long double shell_factor = R * std::sqrt((long double)(tj + 1) / (tJ + 1)) *
                                       cg_core<long double>(tj, twice_l, 2, 0, tJ, twice_l);
      for (int tm = -tj; tm <= tj; tm += 2) {
        const LC vin = v[offsets[size_t(sc)] + (tm + tj) / 2];
        for (int tmu = -2; tmu <= 2; tmu += 2) {
          const int tM = tm + tmu;
          if (std::abs(tM) > tJ) continue;
          const long double el =
              shell_factor * cg_core<long double>(tj, tm, 2, tmu, tJ, tM) * conj_factor;
          // spherical -> Cartesian: x1 = (x_{-1} - x_{+1})/sqrt2, etc.; the
          // i^m basis phases make the spherical elements real.
          const LC xsph = LC(el, 0.0L) * vin;
          const long double is2 = 1.0L / std::sqrt(2.0L);
          LC c1, c2;
          if (tmu == 2) {
            c1 = -is2 * xsph;
            c2 = i1 * is2 * xsph;
          } else if (tmu == -2) {
            c1 = is2 * xsph;
            c2 = i1 * is2 * xsph;
          }
          const int row = offsets[size_t(sr)] + (tM + tJ) / 2;
          if (tmu == 0)
            av[2][row] += xsph;
          else {
            av[0][row] += c1;
            av[1][row] += c2;
          }
        }
      }
    }
  }
  const long double nv = v.norm();
  std::array<double, 3> out{};
  const LC aval[3] = {a0, a1, a2};
  for (int k = 0; k < 3; ++k)
    out[size_t(k)] = double((av[size_t(k)] - aval[k] * v).norm() / nv);
  return out;
}

}  // namespace monosphere::states
