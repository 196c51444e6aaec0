#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "monosphere/states.hpp"
#include "oracles.hpp"

using namespace monosphere;
using namespace monosphere::states;
using quantum::build_space;

namespace {

classical::ModelParams params_for_tau(int twice_l, double tau, double r = 1.0) {
  return classical::params_from_twist(twice_l, r, 1.0, 1.0 / (tau * r * r), 1.0);
}

ComplexSpherePoint boosted_point(const Vec3& uhat, const Vec3& vhat, double s, double r) {
  CVec3 a = r * (std::cosh(s) * uhat.cast<Complex>() + I * std::sinh(s) * vhat.cast<Complex>());
  return ComplexSpherePoint{a};
}

ComplexSpherePoint random_complex_point(std::mt19937_64& rng, double r, double smax) {
  const Vec3 u = oracles::random_unit(rng);
  Vec3 v = oracles::random_unit(rng);
  v -= v.dot(u) * u;
  while (v.norm() < 1e-6) {
    v = oracles::random_unit(rng);
    v -= v.dot(u) * u;
  }
  std::uniform_real_distribution<double> us(0.05, smax);
  return boosted_point(u, v.normalized(), us(rng), r);
}

}  // namespace

TEST_CASE("lift_point pinned cases and reconstruction") {
  const double r = 1.0;
  auto sp_n = lift_point(ComplexSpherePoint{CVec3(0, 0, r)}, r);
  CHECK((sp_n.g.m - Mat2c::Identity()).cwiseAbs().maxCoeff() == 0.0);

  auto sp_x = lift_point(ComplexSpherePoint{CVec3(r, 0, 0)}, r);
  auto rot = groups::exp_su2({Vec3(0, M_PI / 2, 0)});
  CHECK((sp_x.g.m - rot.m).cwiseAbs().maxCoeff() < 1e-15);

  std::mt19937_64 rng(21);
  double rec = 0.0;
  for (int i = 0; i < 300; ++i) {
    auto a = random_complex_point(rng, r, 1.5);
    auto sp = lift_point(a, r);
    CVec3 back = groups::rotation_of(sp.g.m) * CVec3(0, 0, r);
    rec = std::max(rec, (back - a.a).norm());
  }
  CHECK(rec < 1e-10 * r);

  CHECK_THROWS_AS(lift_point(ComplexSpherePoint{CVec3(0, 0, -r)}, r), BranchCut);
  auto sp_s = lift_point_robust(ComplexSpherePoint{CVec3(0, 0, -r)}, r);
  CVec3 back = groups::rotation_of(sp_s.g.m) * CVec3(0, 0, r);
  CHECK((back - CVec3(0, 0, -r)).norm() < 1e-12);
}

TEST_CASE("delta section: north pole support and weak eigenvector property") {
  for (int tl : {0, 1, 2}) {
    auto pm = params_for_tau(tl, 0.2);
    auto space = build_space(tl, std::abs(tl) + 20, pm);
    auto spn = lift_point(ComplexSpherePoint{CVec3(0, 0, 1)}, 1.0);
    VecXc d = delta_section(spn, space);
    // only m = l coefficients survive at the north pole
    for (int s = 0; s < space.n_shells(); ++s) {
      const int tj = space.shell_twice_j(s);
      for (int tm = -tj; tm <= tj; tm += 2)
        if (tm != tl) CHECK(std::abs(d[space.index(tj, tm)]) < 1e-15);
      CHECK(std::abs(d[space.index(tj, tl)]) > 1e-3);
    }
  }

  // weak eigenvector: <delta_a, X_k psi> = a_k <delta_a, psi> for band-limited psi
  std::mt19937_64 rng(22);
  for (int tl : {0, 1}) {
    auto pm = params_for_tau(tl, 0.2);
    auto space = build_space(tl, std::abs(tl) + 24, pm);
    auto X = quantum::position_operators(space);
    const Vec3 u = oracles::random_unit(rng);
    auto sp = lift_point_robust(ComplexSpherePoint{u.cast<Complex>()}, 1.0);
    VecXc d = delta_section(sp, space);
    // band-limited psi: zero out the top shell
    VecXc psi(space.dim());
    std::normal_distribution<double> nd;
    for (int i = 0; i < space.dim(); ++i) psi[i] = Complex(nd(rng), nd(rng));
    const int top = space.n_shells() - 1;
    psi.segment(space.shell_offset(top), space.shell_dim(top)).setZero();
    psi.normalize();
    double err = 0.0;
    for (int k = 0; k < 3; ++k) {
      const Complex lhs = d.dot(X[size_t(k)].apply(psi));
      const Complex rhs = u[k] * d.dot(psi);
      err = std::max(err, std::abs(lhs - rhs) / d.norm());
    }
    CHECK(err < 1e-9);
  }
}

TEST_CASE("delta section equivariance under rotations (real points)") {
  std::mt19937_64 rng(23);
  for (int tl : {0, 1, 2}) {
    auto pm = params_for_tau(tl, 0.2);
    auto space = build_space(tl, std::abs(tl) + 12, pm);
    const Vec3 x = oracles::random_unit(rng);
    auto u = oracles::random_su2(rng);
    const Vec3 rx = groups::covering_map(u) * x;

    VecXc d = delta_section(lift_point_robust(ComplexSpherePoint{x.cast<Complex>()}, 1.0),
                            space);
    VecXc drot = delta_section(
        lift_point_robust(ComplexSpherePoint{rx.cast<Complex>()}, 1.0), space);
    VecXc dact = rotation_action(space, u).apply(d);
    // same state up to a phase: compare |coefficients| and the rotated overlap
    double err = 0.0;
    for (int i = 0; i < space.dim(); ++i)
      err = std::max(err, std::abs(std::abs(drot[i]) - std::abs(dact[i])));
    CHECK(err < 1e-11);
    const double cossim = std::abs(drot.dot(dact)) / (drot.norm() * dact.norm());
    CHECK(cossim == doctest::Approx(1.0).epsilon(1e-11));
  }
}

TEST_CASE("coherent state matches the Legendre heat-kernel series at l = 0") {
  const double tau = 0.2, r = 1.0;
  auto pm = params_for_tau(0, tau, r);
  auto space = build_space(0, 60, pm);
  std::mt19937_64 rng(24);
  const Vec3 ahat = oracles::random_unit(rng);
  auto cs = coherent_state(ComplexSpherePoint{(r * ahat).cast<Complex>()}, space);
  double err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vec3 x = r * oracles::random_unit(rng);
    VecXc val = evaluate_section(cs.vec, space, x);
    const double want = oracles::heat_kernel_series(ahat.dot(x) / r, tau, r, 60);
    err = std::max(err, std::abs(val[0].real() - want) + std::abs(val[0].imag()));
  }
  CHECK(err < 1e-9);

  // heat-kernel positivity on a 500-point sample
  double minval = 1e300;
  for (int i = 0; i < 500; ++i) {
    const Vec3 x = r * oracles::random_unit(rng);
    minval = std::min(minval, evaluate_section(cs.vec, space, x)[0].real());
  }
  CHECK(minval > 0.0);
}

TEST_CASE("coherent state norm grows with s and warns about truncation") {
  auto pm = params_for_tau(0, 0.2);
  auto space = build_space(0, 40, pm);
  std::mt19937_64 rng(25);
  const Vec3 u = oracles::random_unit(rng);
  Vec3 v = oracles::random_unit(rng);
  v -= v.dot(u) * u;
  v.normalize();
  double prev = 0.0;
  for (double s : {0.0, 0.2, 0.4, 0.6, 0.8}) {
    auto cs = coherent_state(boosted_point(u, v, s, 1.0), space);
    const double n = cs.vec.norm();
    CHECK(n > prev);
    prev = n;
    CHECK_FALSE(cs.truncation_warning);
  }
  // far out the top-shell mass becomes visible
  auto far = coherent_state(boosted_point(u, v, 4.4, 1.0), space);
  CHECK(far.truncation_warning);
  CHECK(far.tail_mass > 1e-8);
}

TEST_CASE("coherent coefficients are holomorphic in a (Cauchy-Riemann)") {
  auto pm = params_for_tau(1, 0.2);
  auto space = build_space(1, 21, pm);
  std::mt19937_64 rng(26);
  const double h = 1e-4;
  double crmax = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    // chart: (w1, w2) -> (w1, w2, sqrt(1 - w1^2 - w2^2)), complex wk
    Complex w[2] = {Complex(0.2 + 0.2 * trial / 20.0, 0.1),
                    Complex(-0.25, 0.05 + 0.1 * trial / 20.0)};
    auto coeffs = [&](Complex w1, Complex w2) {
      CVec3 a(w1, w2, std::sqrt(Complex(1.0) - w1 * w1 - w2 * w2));
      return coherent_state(ComplexSpherePoint{a}, space).vec;
    };
    for (int k = 0; k < 2; ++k) {
      Complex w1 = w[0], w2 = w[1];
      auto shift = [&](Complex dw) {
        return k == 0 ? coeffs(w1 + dw, w2) : coeffs(w1, w2 + dw);
      };
      VecXc dre = (shift(h) - shift(-h)) / (2.0 * h);
      VecXc dim = (shift(I * h) - shift(-I * h)) / (2.0 * h);
      crmax = std::max(crmax, (dre + I * dim).cwiseAbs().maxCoeff() /
                                  std::max(1.0, dre.cwiseAbs().maxCoeff()));
    }
  }
  CHECK(crmax < 1e-6);
}

TEST_CASE("eigen residuals: smallness, equivariance, truncation decay") {
  const double tau = 0.2;
  std::mt19937_64 rng(27);

  // north pole, l = 0: all residuals tiny, rho_3 smallest
  {
    auto pm = params_for_tau(0, tau);
    auto space = build_space(0, 80, pm);
    auto cs = coherent_state(ComplexSpherePoint{CVec3(0, 0, 1)}, space);
    auto rho = eigen_residual(cs, space);
    CHECK(rho[0] < 1e-6);
    CHECK(rho[1] < 1e-6);
    CHECK(rho[2] <= rho[0] + 1e-12);
  }

  // invariance under simultaneous rotation of a and frame
  {
    auto pm = params_for_tau(1, tau);
    auto space = build_space(1, 41, pm);
    auto A = quantum::annihilation_conjugation(space);
    auto a = random_complex_point(rng, 1.0, 0.5);
    auto u = oracles::random_su2(rng);
    const Mat3c rc = groups::rotation_of(u.m);
    ComplexSpherePoint ra{rc * a.a};
    auto r1 = eigen_residual(coherent_state(a, space), space, A);
    auto r2 = eigen_residual(coherent_state(ra, space), space, A);
    // the residual vector rotates; compare norms
    const double n1 = std::sqrt(r1[0] * r1[0] + r1[1] * r1[1] + r1[2] * r1[2]);
    const double n2 = std::sqrt(r2[0] * r2[0] + r2[1] * r2[1] + r2[2] * r2[2]);
    CHECK(std::abs(n1 - n2) < 1e-10);
  }

  // truncation decay measured in extended precision: doubling j_max 20 -> 40
  // shrinks every residual by >= 10x
  {
    const Vec3 u(0, 0, 1), v(0, 1, 0);
    auto a = boosted_point(u, v, 0.5, 1.0);
    for (int tl : {0, 1}) {
      auto r20 = eigen_residual_extended(a, tl, 40 + tl % 2, tau, 1.0);
      auto r40 = eigen_residual_extended(a, tl, 80 + tl % 2, tau, 1.0);
      for (int k = 0; k < 3; ++k) {
        CHECK(r40[size_t(k)] <= 0.1 * r20[size_t(k)]);
        CHECK(r40[size_t(k)] < 1e-6);
      }
    }
  }
}

TEST_CASE("overlap properties") {
  const double tau = 0.25, r = 1.0;
  auto pm = params_for_tau(0, tau, r);
  auto space = build_space(0, 40, pm);
  std::mt19937_64 rng(28);

  auto a = random_complex_point(rng, r, 0.6);
  auto b = random_complex_point(rng, r, 0.6);
  const Complex oaa = overlap(a, a, space);
  CHECK(oaa.imag() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(oaa.real() > 0.0);
  const double na2 = coherent_state(a, space).vec.squaredNorm();
  CHECK(oaa.real() == doctest::Approx(na2).epsilon(1e-12));

  // Cauchy-Schwarz with strict deficit away from coincidence
  const double nb2 = coherent_state(b, space).vec.squaredNorm();
  CHECK(std::abs(overlap(a, b, space)) < std::sqrt(na2 * nb2));

  // l = 0 real points: overlap is the heat kernel at doubled time
  const Vec3 xa = oracles::random_unit(rng), xb = oracles::random_unit(rng);
  const Complex o = overlap(ComplexSpherePoint{xa.cast<Complex>()},
                            ComplexSpherePoint{xb.cast<Complex>()}, space);
  const double want = oracles::heat_kernel_series(xa.dot(xb), 2.0 * tau, r, 40);
  CHECK(std::abs(o - want) < 1e-10);

  // modulus is independent of the lift phase
  auto pm1 = params_for_tau(1, tau, r);
  auto space1 = build_space(1, 41, pm1);
  auto ca = coherent_state(a, space1);
  auto cb = coherent_state(b, space1);
  // re-lift b with an extra diagonal phase: coefficients pick up a global phase
  auto spb = lift_point_robust(b, r);
  auto phase = groups::exp_su2({Vec3(0, 0, 1.234)});
  SectionPoint spb2{b, spb.g * phase};
  VecXc db2 = delta_section(spb2, space1);
  for (int s = 0; s < space1.n_shells(); ++s) {
    const double j = 0.5 * space1.shell_twice_j(s);
    db2.segment(space1.shell_offset(s), space1.shell_dim(s)) *=
        std::exp(-tau * j * (j + 1) / 2.0);
  }
  CHECK(std::abs(std::abs(ca.vec.dot(db2)) - std::abs(ca.vec.dot(cb.vec))) < 1e-12);
}

TEST_CASE("expectation values") {
  const double r = 1.0;
  std::mt19937_64 rng(29);

  // north pole, l = 0: <X> = (0, 0, c r), 0 < c < 1, c -> 1 as tau -> 0
  double prev_c = 0.0;
  for (double tau : {0.4, 0.2, 0.1}) {
    auto pm = params_for_tau(0, tau, r);
    auto space = build_space(0, 60, pm);
    auto cs = coherent_state(ComplexSpherePoint{CVec3(0, 0, r)}, space);
    auto ex = expectations(cs, space);
    CHECK(std::abs(ex.x[0]) < 1e-12);
    CHECK(std::abs(ex.x[1]) < 1e-12);
    CHECK(ex.x[2] > prev_c);
    CHECK(ex.x[2] < r);
    prev_c = ex.x[2];
  }

  // <J.X> = r hbar l exactly as an operator identity (Rayleigh quotient route)
  for (int tl : {1, 2}) {
    auto pm = params_for_tau(tl, 0.2, r);
    auto space = build_space(tl, std::abs(tl) + 20, pm);
    auto J = quantum::angular_momentum_operators(space);
    auto X = quantum::position_operators(space);
    auto cs = coherent_state(random_complex_point(rng, r, 0.4), space);
    quantum::BlockOperator jx = J[0] * X[0] + J[1] * X[1] + J[2] * X[2];
    const Complex q = cs.vec.dot(jx.apply(cs.vec)) / cs.vec.squaredNorm();
    CHECK(std::abs(q - r * pm.hbar * 0.5 * tl) < 1e-11);
  }

  // rotation equivariance of <X>
  {
    auto pm = params_for_tau(1, 0.2, r);
    auto space = build_space(1, 31, pm);
    auto a = random_complex_point(rng, r, 0.4);
    auto u = oracles::random_su2(rng);
    const Mat3 ru = groups::covering_map(u);
    ComplexSpherePoint ra{groups::rotation_of(u.m) * a.a};
    auto e1 = expectations(coherent_state(a, space), space);
    auto e2 = expectations(coherent_state(ra, space), space);
    CHECK((e2.x - ru * e1.x).norm() < 1e-10);
    CHECK((e2.j - ru * e1.j).norm() < 1e-10);
  }

  // tau -> 0: <X>, <J> approach the classical point monotonically
  {
    auto a = random_complex_point(rng, r, 0.3);
    double prev_dx = 1e300, prev_dj = 1e300;
    for (double tau : {0.4, 0.2, 0.1}) {
      auto pm = params_for_tau(0, tau, r);
      auto space = build_space(0, 80, pm);
      auto pt = classical::complexifier_inverse(a, pm);
      const Vec3 jcl = classical::angular_momentum(pt, pm);
      auto ex = expectations(coherent_state(a, space), space);
      const double dx = (ex.x - pt.x).norm();
      const double dj = (ex.j - jcl).norm();
      CHECK(dx < prev_dx);
      CHECK(dj < prev_dj);
      prev_dx = dx;
      prev_dj = dj;
    }
  }
}

TEST_CASE("husimi grid peaks at the state's label and refines consistently") {
  auto pm = params_for_tau(0, 0.2);
  auto space = build_space(0, 30, pm);
  const Vec3 u = Vec3(std::sin(1.1) * std::cos(0.7), std::sin(1.1) * std::sin(0.7),
                      std::cos(1.1));
  const Vec3 v = Vec3(std::cos(1.1) * std::cos(0.7), std::cos(1.1) * std::sin(0.7),
                      -std::sin(1.1));
  const double sb = 0.45;
  auto psi = coherent_state(boosted_point(u, v, sb, 1.0), space);

  HusimiGridSpec spec{6, 12, 24, 1.0};
  auto cells = husimi_grid(psi.vec, spec, space);
  double best = -1.0;
  HusimiCell peak{};
  double total1 = 0.0;
  for (const auto& c : cells) {
    total1 += c.value;
    if (c.value > best) {
      best = c.value;
      peak = c;
    }
  }
  total1 /= double(cells.size());
  CHECK(std::abs(peak.s - sb) < 1.0 / 6.0);
  CHECK(std::abs(peak.theta - 1.1) < M_PI / 12.0);
  CHECK(std::abs(peak.phi - 0.7) < 2.0 * M_PI / 24.0);

  // Riemann-sum Cauchy property under refinement
  HusimiGridSpec spec2{12, 24, 48, 1.0};
  auto cells2 = husimi_grid(psi.vec, spec2, space);
  double total2 = 0.0;
  for (const auto& c : cells2) total2 += c.value;
  total2 /= double(cells2.size());
  CHECK(std::abs(total2 - total1) / total1 < 0.01);
}

TEST_CASE("spin-1 realization satisfies the vector-section constraint") {
  // x-hat cross psi = -i l psi for |l| = 1; covers both orientations
  std::mt19937_64 rng(30);
  for (int tl : {2, -2}) {
    auto pm = params_for_tau(tl, 0.2);
    auto space = build_space(tl, 10, pm);
    VecXc c(space.dim());
    std::normal_distribution<double> nd;
    for (int i = 0; i < space.dim(); ++i) c[i] = Complex(nd(rng), nd(rng));
    Mat3c s = groups::spherical_to_cartesian();
    double err = 0.0;
    for (int i = 0; i < 20; ++i) {
      const Vec3 x = oracles::random_unit(rng);
      VecXc val = evaluate_section(c, space, x);  // V_1 components, descending m
      CVec3 psi3 = s * val;
      CVec3 lhs = x.cast<Complex>().cross(psi3);
      CVec3 rhs = -I * (0.5 * tl) * psi3;
      err = std::max(err, (lhs - rhs).norm() / psi3.norm());
    }
    CHECK(err < 1e-10);
  }
}
