#include "monosphere/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace monosphere::classical {

namespace {

// sinh(L)/L and (cosh(L)-1)/L^2 with series branches near zero.
double sinhc(double L) {
  if (std::abs(L) < 1e-4) {
    double L2 = L * L;
    return 1.0 + L2 / 6.0 + L2 * L2 / 120.0;
  }
  return std::sinh(L) / L;
}

double coshm1_over_sq(double L) {
  if (std::abs(L) < 1e-4) {
    double L2 = L * L;
    return 0.5 + L2 / 24.0 + L2 * L2 / 720.0;
  }
  return (std::cosh(L) - 1.0) / (L * L);
}

struct Chart {
  Mat3 frame;  // columns are the chart axes; pole along frame.col(2)
  double r;

  Eigen::Vector4d to_chart(const PhasePoint& pt) const {
    Vec3 x = frame.transpose() * pt.x;
    Vec3 p = frame.transpose() * pt.p;
    double theta = std::acos(std::clamp(x[2] / r, -1.0, 1.0));
    double phi = std::atan2(x[1], x[0]);
    Vec3 xth = r * Vec3(std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi),
                        -std::sin(theta));
    Vec3 xph = r * Vec3(-std::sin(theta) * std::sin(phi), std::sin(theta) * std::cos(phi), 0.0);
    return {theta, phi, p.dot(xth), p.dot(xph)};
  }

  PhasePoint to_ambient(const Eigen::Vector4d& q) const {
    double theta = q[0], phi = q[1], pth = q[2], pph = q[3];
    double st = std::sin(theta), ct = std::cos(theta);
    Vec3 x = r * Vec3(st * std::cos(phi), st * std::sin(phi), ct);
    Vec3 xth = r * Vec3(ct * std::cos(phi), ct * std::sin(phi), -st);
    Vec3 xph = r * Vec3(-st * std::sin(phi), st * std::cos(phi), 0.0);
    Vec3 p = pth * xth / (r * r) + pph * xph / (r * r * st * st);
    PhasePoint out;
    out.x = frame * x;
    out.p = frame * p;
    return out;
  }
};

}  // namespace

ModelParams params_from_twist(int twice_l, double r, double m, double alpha,
                              double hbar) {
  if (!(r > 0.0) || !(m > 0.0) || !(alpha > 0.0) || !(hbar > 0.0))
    throw InvalidParams("params_from_twist: r, m, alpha, hbar must be positive");
  ModelParams p;
  p.r = r;
  p.m = m;
  p.alpha = alpha;
  p.hbar = hbar;
  p.twice_l = twice_l;
  p.B = -hbar * (0.5 * twice_l) / (r * r);
  p.tau = hbar / (m * alpha * r * r);
  return p;
}

double flux_ratio(const ModelParams& p) {
  // -(4 pi r^2 B)/(2 pi hbar), arranged so the pi's cancel symbolically.
  return -2.0 * (p.r * p.r * p.B) / p.hbar;
}

int flux_twice_l(const ModelParams& p) {
  const double raw = flux_ratio(p);
  const int snapped = int(std::lround(raw));
  if (std::abs(raw - snapped) > 1e-9 * std::max(1.0, std::abs(raw)))
    throw NumericalError("flux_twice_l: ratio not near an integer");
  return snapped;
}

PhasePoint PhasePoint::make(const Vec3& x, const Vec3& p, double r) {
  PhasePoint pt{x, p};
  if (std::abs(x.squaredNorm() - r * r) > 1e-10 * r * r)
    throw InvalidParams("PhasePoint: x not on the sphere");
  if (std::abs(x.dot(p)) > 1e-10 * r * std::max(p.norm(), 1e-300))
    throw InvalidParams("PhasePoint: p not tangent");
  return pt;
}

ComplexSpherePoint ComplexSpherePoint::make(const CVec3& a, double r) {
  Complex q = a[0] * a[0] + a[1] * a[1] + a[2] * a[2];
  if (std::abs(q - r * r) > 1e-10 * r * r)
    throw InvalidParams("ComplexSpherePoint: a.a != r^2");
  return ComplexSpherePoint{a};
}

Vec3 angular_momentum(const PhasePoint& pt, const ModelParams& params) {
  return pt.x.cross(pt.p) - params.r * params.B * pt.x;
}

double hamiltonian(const PhasePoint& pt, const ModelParams& params) {
  return pt.p.squaredNorm() / (2.0 * params.m);
}

Mat3 bracket_chart_frame(const PhasePoint& pt, const ModelParams& params) {
  if (std::abs(pt.x[2]) / params.r <= 0.7) return Mat3::Identity();
  Mat3 rot;  // pole moved onto e1
  rot << 0, 0, 1, 0, 1, 0, -1, 0, 0;
  return rot;
}

double poisson_bracket(const Observable& f, const Observable& g,
                       const PhasePoint& pt, const ModelParams& params) {
  return poisson_bracket(f, g, pt, params, bracket_chart_frame(pt, params));
}

double poisson_bracket(const Observable& f, const Observable& g,
                       const PhasePoint& pt, const ModelParams& params,
                       const Mat3& frame) {
  const double r = params.r;
  Chart chart{frame, r};
  Eigen::Vector4d q0 = chart.to_chart(pt);
  if (std::min(q0[0], M_PI - q0[0]) < 1e-6)
    throw ChartSingularity("poisson_bracket: point at chart pole");

  const double pscale = std::max(pt.p.norm(), params.m * params.alpha * r);
  const Eigen::Vector4d h{1e-5, 1e-5, 1e-5 * pscale, 1e-5 * pscale};
  auto grad = [&](const Observable& fn) {
    Eigen::Vector4d out;
    for (int i = 0; i < 4; ++i) {
      Eigen::Vector4d qp = q0, qm = q0;
      qp[i] += h[i];
      qm[i] -= h[i];
      out[i] = (fn(chart.to_ambient(qp)) - fn(chart.to_ambient(qm))) / (2.0 * h[i]);
    }
    return out;
  };
  Eigen::Vector4d gf = grad(f), gg = grad(g);
  // omega^B = dtheta^dp_th + dphi^dp_ph - B r^2 sin(theta) dtheta^dphi,
  // inverted in closed block form.
  const double b = params.B * r * r * std::sin(q0[0]);
  return gf[0] * gg[2] + gf[1] * gg[3] - gf[2] * gg[0] - gf[3] * gg[1] +
         b * (gf[2] * gg[3] - gf[3] * gg[2]);
}

std::vector<TrajectorySample> flow(const PhasePoint& pt0, double t_max, double dt,
                                   const ModelParams& params) {
  if (!(dt > 0.0) || !(t_max >= dt)) throw InvalidParams("flow: need dt > 0, t_max >= dt");
  const double r = params.r, m = params.m, B = params.B;
  auto deriv = [&](const PhasePoint& s) {
    PhasePoint d;
    d.x = s.p / m;
    d.p = (B / (m * r)) * s.p.cross(s.x) - (s.p.squaredNorm() / (m * r * r)) * s.x;
    return d;
  };
  auto project = [&](PhasePoint s) {
    s.x *= r / s.x.norm();
    s.p -= (s.p.dot(s.x) / (r * r)) * s.x;
    return s;
  };
  std::vector<TrajectorySample> out;
  const auto n_steps = static_cast<long>(std::floor(t_max / dt + 0.5));
  out.reserve(size_t(n_steps) + 1);
  PhasePoint s = pt0;
  out.push_back({0.0, s});
  double h0 = hamiltonian(s, params);
  for (long i = 0; i < n_steps; ++i) {
    PhasePoint k1 = deriv(s);
    PhasePoint s2{s.x + 0.5 * dt * k1.x, s.p + 0.5 * dt * k1.p};
    PhasePoint k2 = deriv(s2);
    PhasePoint s3{s.x + 0.5 * dt * k2.x, s.p + 0.5 * dt * k2.p};
    PhasePoint k3 = deriv(s3);
    PhasePoint s4{s.x + dt * k3.x, s.p + dt * k3.p};
    PhasePoint k4 = deriv(s4);
    PhasePoint next{s.x + (dt / 6.0) * (k1.x + 2 * k2.x + 2 * k3.x + k4.x),
                    s.p + (dt / 6.0) * (k1.p + 2 * k2.p + 2 * k3.p + k4.p)};
    next = project(next);
    double h1 = hamiltonian(next, params);
    if (h0 > 0.0 && std::abs(h1 - h0) > 1e-3 * h0)
      throw StepTooLarge("flow: single-step energy drift above 1e-3 relative");
    s = next;
    out.push_back({dt * double(i + 1), s});
  }
  return out;
}

ComplexSpherePoint complexifier_map(const PhasePoint& pt, const ModelParams& params) {
  const double r = params.r, m = params.m, alpha = params.alpha, B = params.B;
  const Vec3 J = angular_momentum(pt, params);
  const double L = J.norm() / (m * alpha * r * r);
  CVec3 a = std::cosh(L) * pt.x.cast<Complex>() +
            I * sinhc(L) / (m * alpha) * pt.p.cast<Complex>() +
            coshm1_over_sq(L) * B / (m * m * alpha * alpha * r) * J.cast<Complex>();
  return ComplexSpherePoint{a};
}

PhasePoint complexifier_inverse(const ComplexSpherePoint& csp, const ModelParams& params) {
  const double r = params.r, m = params.m, alpha = params.alpha;
  const CVec3& a = csp.a;
  Vec3 re = a.real(), im = a.imag();
  if (re.norm() < 1e-12 * r) throw DegenerateStart("complexifier_inverse: Re(a) = 0");
  Vec3 x = r * re.normalized();
  Vec3 p = m * alpha * (im - (im.dot(x) / (r * r)) * x);

  auto residual = [&](const Vec3& xx, const Vec3& pp) {
    PhasePoint pt{xx, pp};
    CVec3 d = complexifier_map(pt, params).a - a;
    Eigen::Matrix<double, 8, 1> f;
    f.segment<3>(0) = d.real();
    f.segment<3>(3) = d.imag();
    f[6] = (xx.squaredNorm() - r * r) / r;
    f[7] = xx.dot(pp) / r;
    return f;
  };

  auto finish = [&](Vec3 xx, Vec3 pp) {
    xx *= r / xx.norm();
    pp -= (pp.dot(xx) / (r * r)) * xx;
    return PhasePoint{xx, pp};
  };

  double best = std::numeric_limits<double>::infinity();
  Vec3 best_x = x, best_p = p;
  for (int iter = 0; iter < 50; ++iter) {
    Eigen::Matrix<double, 8, 1> f0 = residual(x, p);
    double rn = f0.segment<6>(0).norm();
    if (rn < best) {
      best = rn;
      best_x = x;
      best_p = p;
    }
    if (rn < 1e-12 * r) return finish(x, p);
    // Gauss-Newton with a finite-difference Jacobian in the 6 ambient unknowns.
    Eigen::Matrix<double, 8, 6> jac;
    const double hx = 1e-7 * r, hp = 1e-7 * std::max(p.norm(), m * alpha * r);
    for (int i = 0; i < 6; ++i) {
      Vec3 xp = x, pp = p;
      double h = i < 3 ? hx : hp;
      if (i < 3)
        xp[i] += h;
      else
        pp[i - 3] += h;
      jac.col(i) = (residual(xp, pp) - f0) / h;
    }
    Eigen::Matrix<double, 6, 1> step = jac.colPivHouseholderQr().solve(-f0);
    x += step.segment<3>(0);
    p += step.segment<3>(3);
  }
  if (best <= 1e-9 * r) return finish(best_x, best_p);
  throw NoConvergence("complexifier_inverse: no convergence after 50 iterations, residual " +
                      std::to_string(best));
}

}  // namespace monosphere::classical
