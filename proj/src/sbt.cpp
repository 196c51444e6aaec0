#include "monosphere/sbt.hpp"

#include <cmath>
#include <limits>

#include "monosphere/util.hpp"

namespace monosphere::sbt {

namespace {

VecXc heat_damp(const VecXc& c, const TwistedHilbert& space, double t) {
  VecXc out = c;
  for (int s = 0; s < space.n_shells(); ++s) {
    const double j = 0.5 * space.shell_twice_j(s);
    out.segment(space.shell_offset(s), space.shell_dim(s)) *=
        std::exp(-t * j * (j + 1) / 2.0);
  }
  return out;
}

}  // namespace

VecXc HoloSection::evaluate_with_lift(const Mat2c& g) const {
  const int tla = std::abs(space->twice_l());
  const Complex f = scalar_part(g);
  MatXc pil = groups::wigner_d(tla, g);
  return f * pil.col(tla);
}

Complex HoloSection::scalar_part(const Mat2c& g) const {
  VecXc basis = states::basis_column(*space, g);
  return basis.cwiseProduct(damped).sum();
}

VecXc HoloSection::evaluate(const ComplexSpherePoint& z) const {
  states::SectionPoint sp = states::lift_point_robust(z, space->params().r);
  return evaluate_with_lift(sp.g.m);
}

HoloSection sbt_transform(const VecXc& psi, const TwistedHilbert& space) {
  return HoloSection{heat_damp(psi, space, space.params().tau), &space};
}

VecXc sbt_inverse(const HoloSection& section) {
  return heat_damp(section.damped, *section.space, -section.space->params().tau);
}

double invariant_measure_weight(double s) { return std::sinh(s) * std::cosh(s); }

double hyperbolic_radius(const CVec3& z, double r) {
  const double q = z.squaredNorm() / (r * r);
  return 0.5 * std::acosh(std::max(1.0, q));
}

double invariant_measure_numeric(const Mat3& frame, double s, double r, int perm) {
  // chart: (eps1, eps2, eps3, eps4) -> R(frame e^{eps.K}) z0(s + eps4)
  const auto point = [&](const Eigen::Vector4d& e) -> CVec3 {
    Mat3 k = Mat3::Zero();
    k(0, 1) = -e[2]; k(1, 0) = e[2];
    k(0, 2) = e[1];  k(2, 0) = -e[1];
    k(1, 2) = -e[0]; k(2, 1) = e[0];
    Mat3 rot = (frame * (Mat3::Identity() + k + 0.5 * k * k)).eval();  // small eps
    const double ss = s + e[3];
    CVec3 z0(I * r * std::sinh(ss), 0.0, r * std::cosh(ss));
    return rot.cast<Complex>() * z0;
  };
  const CVec3 z = point(Eigen::Vector4d::Zero());
  const int ic = perm % 3, ia = (perm + 1) % 3, ib = (perm + 2) % 3;
  if (std::abs(z[ic]) < 1e-10) throw ChartDegeneracy("invariant_measure_numeric: z_c ~ 0");
  const double h = 1e-5;
  Eigen::Matrix<Complex, 4, 4> jac;  // rows: dz_a, dz_b, conj each; cols: d/d eps_i
  for (int i = 0; i < 4; ++i) {
    Eigen::Vector4d ep = Eigen::Vector4d::Zero(), em = Eigen::Vector4d::Zero();
    ep[i] = h;
    em[i] = -h;
    const CVec3 d = (point(ep) - point(em)) / (2.0 * h);
    jac(0, i) = d[ia];
    jac(1, i) = d[ib];
    jac(2, i) = std::conj(d[ia]);
    jac(3, i) = std::conj(d[ib]);
  }
  return std::abs(jac.determinant()) / (4.0 * std::norm(z[ic]));
}

double RadialDensity::raw_profile(double s) const {
  const double sn = s < 1e-8 ? 1.0 - s * s / 6.0 : s / std::sinh(s);
  return sn * std::exp(-s * s / tau);
}

double RadialDensity::profile(double s) const { return normalization * raw_profile(s); }

namespace {

// int_0^inf sinh(lambda s) sinh(s) nu_raw(s) ds = int_0^inf s sinh(lambda s)
// e^{-s^2/tau} ds, computed against the Gaussian-centered split
// sinh(lambda s) e^{-s^2/tau} = e^{tau lambda^2/4}/2 (e^{-(s-c)^2/tau} - e^{-(s+c)^2/tau}),
// c = lambda tau / 2; the e^{tau lambda^2/4} prefactor is returned separately
// (log) so ratios cancel exactly.
double sector_integral_reduced(int lambda, double tau, int n_nodes) {
  const double c = 0.5 * lambda * tau;
  const double w = 12.0 * std::sqrt(tau) + 2.0 * tau;
  const double lo = 0.0, hi = c + w;
  std::vector<double> x, wt;
  groups::gauss_legendre(n_nodes, lo, hi, x, wt);
  double sum = 0.0;
  for (int i = 0; i < n_nodes; ++i) {
    const double s = x[size_t(i)];
    const double g1 = std::exp(-(s - c) * (s - c) / tau);
    const double g2 = std::exp(-(s + c) * (s + c) / tau);
    sum += wt[size_t(i)] * 0.5 * s * (g1 - g2);
  }
  return sum;
}

}  // namespace

RadialDensity nu_group(double tau) {
  if (!(tau > 0.0)) throw InvalidParams("nu_group: tau must be positive");
  RadialDensity out{tau, 1.0};
  // R_0 = 1: the j = 0 reduced integral with its exp(tau/4) prefactor put back.
  const double n0 = sector_integral_reduced(1, tau, 400) * std::exp(tau / 4.0);
  out.normalization = 1.0 / n0;
  return out;
}

double sector_isometry(int twice_j, double tau) {
  if (twice_j % 2 != 0) throw InvalidParams("sector_isometry: integer j required (l = 0)");
  const int lambda = twice_j + 1;
  const int n = 400;
  const double nj = sector_integral_reduced(lambda, tau, n);
  const double nj2 = sector_integral_reduced(lambda, tau, 2 * n);
  const double n0 = sector_integral_reduced(1, tau, n);
  const double n02 = sector_integral_reduced(1, tau, 2 * n);
  const double r1 = nj / (lambda * n0), r2 = nj2 / (lambda * n02);
  if (std::abs(r2 - r1) > 1e-8)
    throw QuadratureNotConverged("sector_isometry: radial quadrature not converged");
  // exponents: -tau j(j+1) + tau lambda^2/4 - tau/4 = 0 exactly, so the
  // reduced integrals compare directly.
  return r2;
}

Mat2c canonical_boost(double s) {
  Mat2c b;
  const double ch = std::cosh(0.5 * s), sh = std::sinh(0.5 * s);
  b << ch, -sh, -sh, ch;
  return b;
}

MatXc nu_twisted(double tau, int twice_l, const Mat2c& g, const DCQuadSpec& spec) {
  const int tla = std::abs(twice_l);
  RadialDensity nu = nu_group(tau);
  // polar radius of the input lift sets the sigma window
  const Mat2c gg = g.adjoint() * g;
  const double sg = std::acosh(std::max(1.0, 0.5 * gg.trace().real()));
  const double smax = 2.0 * sg + spec.sigma_pad * std::sqrt(tau) + 2.0 + tau * (tla + 1);
  std::vector<double> xs, ws;
  groups::gauss_legendre(spec.n_sigma, -smax, smax, xs, ws);
  MatXc out = MatXc::Zero(tla + 1, tla + 1);
  for (int q = 0; q < spec.n_sigma; ++q) {
    const double sigma = xs[size_t(q)];
    MatXc theta_avg = MatXc::Zero(tla + 1, tla + 1);
    for (int it = 0; it < spec.n_theta; ++it) {
      const double theta = 4.0 * M_PI * it / spec.n_theta;
      Mat2c h;
      h << std::exp(Complex(0.5 * sigma, 0.5 * theta)), 0.0, 0.0,
          std::exp(Complex(-0.5 * sigma, -0.5 * theta));
      const Mat2c gh = g * h;
      Mat2c ghi;
      ghi << gh(1, 1), -gh(0, 1), -gh(1, 0), gh(0, 0);
      const double sgh =
          std::acosh(std::max(1.0, 0.5 * (gh.adjoint() * gh).trace().real()));
      MatXc w = groups::wigner_d(tla, ghi);
      theta_avg += (nu.profile(sgh) / spec.n_theta) * (w.adjoint() * w);
    }
    out += ws[size_t(q)] * theta_avg;
  }
  // exact hermitization (integrand is Hermitian up to roundoff)
  return 0.5 * (out + MatXc(out.adjoint()));
}

double nu_twisted_scalar(double tau, int twice_l, double s, const DCQuadSpec& spec) {
  const int tla = std::abs(twice_l);
  const Mat2c b = canonical_boost(s);
  MatXc nu = nu_twisted(tau, twice_l, b, spec);
  VecXc w = groups::wigner_d(tla, b).col(tla);
  return (w.adjoint() * nu * w)(0, 0).real();
}

namespace {

struct IsometryGrids {
  std::vector<std::pair<groups::GroupElement, double>> frames;
  std::vector<double> s_nodes, s_weights;
  std::vector<double> nu_scalar;  // per radial node
};

// ratio numerator: int |F(U b_s)|^2 nu_scalar(s) sinh(s) cosh(s) dU ds
double isometry_integral(const VecXc& damped, const TwistedHilbert& space,
                         const IsometryGrids& grids) {
  const int n_frames = int(grids.frames.size());
  const int n_s = int(grids.s_nodes.size());
  const int n_shells = space.n_shells();
  // per-shell boosted columns w^j_k(s) = [D^j(b_s)]_{k, l}
  std::vector<std::vector<VecXc>> boosted(static_cast<size_t>(n_s));
  for (int q = 0; q < n_s; ++q) {
    const Mat2c b = canonical_boost(grids.s_nodes[size_t(q)]);
    boosted[size_t(q)].resize(size_t(n_shells));
    for (int sh = 0; sh < n_shells; ++sh) {
      const int tj = space.shell_twice_j(sh);
      boosted[size_t(q)][size_t(sh)] =
          groups::wigner_d(tj, b).col(groups::wigner_index(tj, space.twice_l()));
    }
  }
  const double r = space.params().r;
  std::vector<double> partial(size_t(n_frames), 0.0);
  util::parallel_for(n_frames, [&](int fi) {
    const auto& [u, wu] = grids.frames[size_t(fi)];
    // rows of D^j(U) weighted by coefficients and phases, contracted with the
    // boosted columns per radial node
    double acc = 0.0;
    std::vector<VecXc> row(static_cast<size_t>(n_shells));
    for (int sh = 0; sh < n_shells; ++sh) {
      const int tj = space.shell_twice_j(sh);
      const MatXc d = groups::wigner_d(tj, u.m);
      const double kj = std::sqrt((tj + 1) / (4.0 * M_PI * r * r));
      VecXc acc_row = VecXc::Zero(tj + 1);
      for (int tm = -tj; tm <= tj; tm += 2) {
        const Complex cm = damped[space.index(tj, tm)] * kj *
                           std::exp(I * (M_PI * 0.25 * tm));
        if (cm != Complex(0.0, 0.0))
          acc_row += cm * d.row(groups::wigner_index(tj, tm)).transpose();
      }
      row[size_t(sh)] = acc_row;
    }
    for (int q = 0; q < n_s; ++q) {
      Complex f = 0.0;
      for (int sh = 0; sh < n_shells; ++sh)
        f += row[size_t(sh)].cwiseProduct(boosted[size_t(q)][size_t(sh)]).sum();
      acc += grids.s_weights[size_t(q)] *
             invariant_measure_weight(grids.s_nodes[size_t(q)]) *
             grids.nu_scalar[size_t(q)] * std::norm(f);
    }
    partial[size_t(fi)] = wu * acc;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace

IsometryResult isometry_check(const VecXc& psi, const TwistedHilbert& space,
                              IsometrySpec spec) {
  const double tau = space.params().tau;
  const int tjmax = space.twice_j_max();
  if (spec.frame_order < 0) spec.frame_order = tjmax + 2;
  if (spec.s_max < 0.0)
    spec.s_max = std::max(6.0, 0.5 * (tjmax + 1) * tau + 8.0 * std::sqrt(tau));

  const VecXc damped = heat_damp(psi, space, tau);
  auto frames = groups::haar_quadrature(spec.frame_order);

  auto run = [&](int n_s, const DCQuadSpec& dc) {
    IsometryGrids grids;
    grids.frames = frames;
    groups::gauss_legendre(n_s, 0.0, spec.s_max, grids.s_nodes, grids.s_weights);
    grids.nu_scalar.resize(size_t(n_s));
    std::vector<double> nu0(static_cast<size_t>(n_s));
    util::parallel_for(n_s, [&](int q) {
      grids.nu_scalar[size_t(q)] =
          nu_twisted_scalar(tau, space.twice_l(), grids.s_nodes[size_t(q)], dc);
      nu0[size_t(q)] = space.twice_l() == 0
                           ? grids.nu_scalar[size_t(q)]
                           : nu_twisted_scalar(tau, 0, grids.s_nodes[size_t(q)], dc);
    });
    const double numer = isometry_integral(damped, space, grids);
    // calibration: l = 0, j = 0 unit state on the same radial grid
    double z0 = 0.0;
    for (int q = 0; q < n_s; ++q)
      z0 += grids.s_weights[size_t(q)] * invariant_measure_weight(grids.s_nodes[size_t(q)]) *
            nu0[size_t(q)] / (4.0 * M_PI * space.params().r * space.params().r);
    return numer / (z0 * psi.squaredNorm());
  };

  double ratio = run(spec.n_s, spec.dc);
  double err = std::numeric_limits<double>::infinity();
  int n_s = spec.n_s;
  DCQuadSpec dc = spec.dc;
  for (int it = 0; it < spec.max_refine; ++it) {
    const int n_s2 = 2 * n_s;
    DCQuadSpec dc2 = dc;
    dc2.n_sigma *= 2;
    const double ratio2 = run(n_s2, dc2);
    err = std::abs(ratio2 - ratio);
    ratio = ratio2;
    n_s = n_s2;
    dc = dc2;
    if (err <= spec.refine_target) break;
  }
  if (err > 10.0 * spec.refine_target)
    throw QuadratureNotConverged("isometry_check: refinement did not stabilize");
  return IsometryResult{ratio,      err,       spec.s_max, spec.frame_order,
                        n_s,        dc.n_sigma, dc.n_theta};
}

}  // namespace monosphere::sbt
