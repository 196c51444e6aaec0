#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "monosphere/groups.hpp"
#include "oracles.hpp"

using namespace monosphere;
using namespace monosphere::groups;

TEST_CASE("exp_su2 basics") {
  CHECK((exp_su2({Vec3::Zero()}).m - Mat2c::Identity()).cwiseAbs().maxCoeff() == 0.0);

  const double th = 0.83;
  Mat2c d = exp_su2({Vec3(0, 0, th)}).m;
  CHECK(std::abs(d(0, 0) - std::exp(I * th / 2.0)) < 1e-15);
  CHECK(std::abs(d(1, 1) - std::exp(-I * th / 2.0)) < 1e-15);
  CHECK(std::abs(d(0, 1)) + std::abs(d(1, 0)) == 0.0);

  // against the Taylor oracle
  Mat2c arg = algebra_matrix({Vec3(M_PI, 0, 0)});
  Mat2c viataylor = oracles::taylor_exp(arg, 20);
  CHECK((exp_su2({Vec3(M_PI, 0, 0)}).m - viataylor).cwiseAbs().maxCoeff() < 1e-13);

  CHECK_THROWS_AS(exp_su2({Vec3(std::nan(""), 0, 0)}), InvalidParams);
}

TEST_CASE("covering map convention and homomorphism") {
  CHECK((covering_map(GroupElement{}) - Mat3::Identity()).cwiseAbs().maxCoeff() == 0.0);

  auto u = exp_su2({Vec3(0, 0, M_PI / 2)});
  Mat3 want;
  want << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  CHECK((covering_map(u) - want).cwiseAbs().maxCoeff() < 1e-15);

  std::mt19937_64 rng(11);
  double homo = 0.0, minus = 0.0, orth = 0.0;
  for (int i = 0; i < 1000; ++i) {
    auto a = oracles::random_su2(rng);
    auto b = oracles::random_su2(rng);
    Mat3 ra = covering_map(a), rb = covering_map(b);
    homo = std::max(homo, (covering_map(a * b) - ra * rb).cwiseAbs().maxCoeff());
    minus = std::max(minus,
                     (covering_map(GroupElement{-a.m, true}) - ra).cwiseAbs().maxCoeff());
    orth = std::max(orth, (ra.transpose() * ra - Mat3::Identity()).cwiseAbs().maxCoeff());
    orth = std::max(orth, std::abs(ra.determinant() - 1.0));
  }
  CHECK(homo < 1e-12);
  CHECK(minus < 1e-12);
  CHECK(orth < 1e-12);

  Mat2c g = oracles::random_sl2c(rng, 0.7);
  CHECK_THROWS_AS(covering_map(GroupElement{g, false}), NotUnitary);
}

TEST_CASE("polar decomposition") {
  std::mt19937_64 rng(12);
  auto u = oracles::random_su2(rng);
  auto pu = polar_decompose(u);
  CHECK(pu.s == 0.0);
  CHECK((pu.k.m - u.m).cwiseAbs().maxCoeff() < 1e-14);

  const double s = 1.37;
  Mat2c d = Mat2c::Zero();
  d(0, 0) = std::exp(s / 2);
  d(1, 1) = std::exp(-s / 2);
  auto pd = polar_decompose(GroupElement::sl2c(d));
  CHECK(std::abs(pd.s - s) < 1e-12);
  CHECK((pd.k.m - Mat2c::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((pd.axis - Vec3(0, 0, 1)).norm() < 1e-12);

  double rec = 0.0;
  for (int i = 0; i < 300; ++i) {
    Mat2c g = oracles::random_sl2c(rng, 1.2);
    auto p = polar_decompose(GroupElement::sl2c(g));
    Mat2c back = p.k.m * p.positive_factor();
    rec = std::max(rec, (back - g).cwiseAbs().maxCoeff());
    // eigenvalues of g+g are e^{+-s}
    Eigen::SelfAdjointEigenSolver<Mat2c> es(g.adjoint() * g);
    CHECK(std::abs(std::log(es.eigenvalues()(1)) - p.s) < 1e-10);
  }
  CHECK(rec < 1e-11);
}

TEST_CASE("wigner_d defining representation and identity") {
  std::mt19937_64 rng(13);
  Mat2c g = oracles::random_sl2c(rng);
  CHECK((wigner_d(1, g) - g).cwiseAbs().maxCoeff() < 1e-15);
  for (int tj : {0, 1, 2, 5, 8}) {
    MatXc d = wigner_d(tj, Mat2c::Identity());
    CHECK((d - MatXc::Identity(tj + 1, tj + 1)).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("wigner_d homomorphism on SL(2,C)") {
  std::mt19937_64 rng(14);
  double err = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    Mat2c g1 = oracles::random_sl2c(rng, 0.8);
    Mat2c g2 = oracles::random_sl2c(rng, 0.8);
    for (int tj : {1, 2, 3, 7, 12}) {
      MatXc lhs = wigner_d(tj, Mat2c(g1 * g2));
      MatXc rhs = wigner_d(tj, g1) * wigner_d(tj, g2);
      err = std::max(err, (lhs - rhs).cwiseAbs().maxCoeff() / rhs.cwiseAbs().maxCoeff());
    }
  }
  CHECK(err < 1e-9);
}

TEST_CASE("wigner_d unitary on SU(2) up to 2j = 16") {
  std::mt19937_64 rng(15);
  double err = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    auto u = oracles::random_su2(rng);
    for (int tj = 1; tj <= 16; ++tj) {
      MatXc d = wigner_d(tj, u.m);
      err = std::max(
          err, (d * d.adjoint() - MatXc::Identity(tj + 1, tj + 1)).cwiseAbs().maxCoeff());
    }
  }
  CHECK(err < 1e-11);
}

TEST_CASE("wigner_d transpose compatibility") {
  std::mt19937_64 rng(16);
  Mat2c g = oracles::random_sl2c(rng, 1.0);
  for (int tj : {1, 2, 3, 6})
    CHECK((wigner_d(tj, Mat2c(g.transpose())) - wigner_d(tj, g).transpose())
              .cwiseAbs()
              .maxCoeff() < 1e-12);
}

TEST_CASE("spin-1 consistency with the covering map") {
  std::mt19937_64 rng(17);
  Mat3c s = spherical_to_cartesian();
  Mat3c si = s.inverse();
  double err = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    Mat2c g = oracles::random_sl2c(rng, 0.6);
    Mat3c lhs = rotation_of(g);
    Mat3c rhs = s * wigner_d(2, g) * si;
    err = std::max(err, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  CHECK(err < 1e-11);
}

TEST_CASE("clebsch_gordan pinned values and ladder oracle") {
  CHECK(clebsch_gordan(1, 1, 1, 1, 2, 2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(clebsch_gordan(3, 3, 4, 4, 7, 7) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(clebsch_gordan(1, 1, 1, -1, 2, 0) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  oracles::LadderCg lc(1, 1, 2);
  CHECK(clebsch_gordan(1, 1, 1, -1, 2, 0) == doctest::Approx(lc.coeff(1, -1)).epsilon(1e-13));

  // selection rules return zero
  CHECK(clebsch_gordan(1, 1, 1, 1, 2, 0) == 0.0);
  CHECK(clebsch_gordan(2, 0, 2, 0, 8, 0) == 0.0);
  CHECK(clebsch_gordan(2, 4, 2, 0, 4, 4) == 0.0);

  // full tables against the ladder recursion
  double err = 0.0;
  for (int tj1 : {1, 2, 3, 5}) {
    for (int tj2 : {1, 2, 4}) {
      for (int tJ = std::abs(tj1 - tj2); tJ <= tj1 + tj2; tJ += 2) {
        oracles::LadderCg table(tj1, tj2, tJ);
        for (int tm1 = -tj1; tm1 <= tj1; tm1 += 2)
          for (int tm2 = -tj2; tm2 <= tj2; tm2 += 2)
            err = std::max(err, std::abs(clebsch_gordan(tj1, tm1, tj2, tm2, tJ, tm1 + tm2) -
                                         table.coeff(tm1, tm2)));
      }
    }
  }
  CHECK(err < 1e-13);
}

TEST_CASE("clebsch_gordan orthogonality to 2j = 12") {
  for (int tj1 : {3, 12}) {
    for (int tj2 : {2, 5}) {
      double err = 0.0;
      for (int tJ = std::abs(tj1 - tj2); tJ <= tj1 + tj2; tJ += 2)
        for (int tJp = std::abs(tj1 - tj2); tJp <= tj1 + tj2; tJp += 2)
          for (int tM = -std::min(tJ, tJp); tM <= std::min(tJ, tJp); tM += 2) {
            double sum = 0.0;
            for (int tm1 = -tj1; tm1 <= tj1; tm1 += 2)
              sum += clebsch_gordan(tj1, tm1, tj2, tM - tm1, tJ, tM) *
                     clebsch_gordan(tj1, tm1, tj2, tM - tm1, tJp, tM);
            err = std::max(err, std::abs(sum - (tJ == tJp ? 1.0 : 0.0)));
          }
      for (int tm1 = -tj1; tm1 <= tj1; tm1 += 2)
        for (int tm2 = -tj2; tm2 <= tj2; tm2 += 2)
          for (int tn1 = -tj1; tn1 <= tj1; tn1 += 2) {
            const int tn2 = tm1 + tm2 - tn1;
            if (std::abs(tn2) > tj2) continue;
            double sum = 0.0;
            for (int tJ = std::abs(tj1 - tj2); tJ <= tj1 + tj2; tJ += 2)
              sum += clebsch_gordan(tj1, tm1, tj2, tm2, tJ, tm1 + tm2) *
                     clebsch_gordan(tj1, tn1, tj2, tn2, tJ, tm1 + tm2);
            err = std::max(err, std::abs(sum - (tn1 == tm1 ? 1.0 : 0.0)));
          }
      CHECK(err < 1e-12);
    }
  }
}

TEST_CASE("irrep generators") {
  const double hbar = 0.7;
  for (int tl : {1, 2, 4}) {
    auto rep = irrep(tl, hbar);
    double err = 0.0;
    const int eps[3][3][3] = {{{0, 0, 0}, {0, 0, 1}, {0, -1, 0}},
                              {{0, 0, -1}, {0, 0, 0}, {1, 0, 0}},
                              {{0, 1, 0}, {-1, 0, 0}, {0, 0, 0}}};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        MatXc c = rep.sigma[size_t(a)] * rep.sigma[size_t(b)] -
                  rep.sigma[size_t(b)] * rep.sigma[size_t(a)];
        for (int k = 0; k < 3; ++k)
          if (eps[a][b][k] != 0) c -= I * hbar * double(eps[a][b][k]) * rep.sigma[size_t(k)];
        err = std::max(err, c.cwiseAbs().maxCoeff());
      }
    CHECK(err < 1e-12);
    Eigen::SelfAdjointEigenSolver<MatXc> es(rep.sigma[2]);
    CHECK(std::abs(es.eigenvalues().maxCoeff() - hbar * 0.5 * tl) < 1e-12);
    // sigma_k = i hbar d/dt wigner_d(e^{t E_k}) at t = 0
    const double h = 1e-6;
    for (int k = 0; k < 3; ++k) {
      Vec3 dir = Vec3::Zero();
      dir[k] = 1.0;
      MatXc num = I * hbar *
                  (wigner_d(tl, exp_su2({dir * h}).m) - wigner_d(tl, exp_su2({-dir * h}).m)) /
                  (2.0 * h);
      CHECK((num - rep.sigma[size_t(k)]).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("haar quadrature Peter-Weyl exactness") {
  const int order = 6;
  auto nodes = haar_quadrature(order);
  double total = 0.0, comp = 0.0;  // Kahan
  for (const auto& [g, w] : nodes) {
    const double y = w - comp;
    const double t = total + y;
    comp = (t - total) - y;
    total = t;
  }
  CHECK(std::abs(total - 1.0) < 1e-14);

  // single entries vanish for 0 < j <= order (half-integers included)
  double err0 = 0.0;
  for (int tj = 1; tj <= 2 * order; ++tj) {
    MatXc acc = MatXc::Zero(tj + 1, tj + 1);
    for (const auto& [g, w] : nodes) acc += w * wigner_d(tj, g.m);
    err0 = std::max(err0, acc.cwiseAbs().maxCoeff());
  }
  CHECK(err0 < 1e-12);

  // |D^j_{mn}|^2 integrate to 1/(2j+1) for j <= order/2
  double err1 = 0.0;
  for (int tj = 1; tj <= order; ++tj) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(tj + 1, tj + 1);
    for (const auto& [g, w] : nodes) acc += w * wigner_d(tj, g.m).cwiseAbs2();
    err1 = std::max(err1, (acc.array() - 1.0 / (tj + 1)).abs().maxCoeff());
  }
  CHECK(err1 < 1e-12);

  CHECK_THROWS_AS(haar_quadrature(1), InvalidParams);
}
