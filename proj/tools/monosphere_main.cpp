// Command-line front end: every pipeline stage behind one binary with
// deterministic CSV/JSON artifacts.
//
//   monosphere <command> [--config PATH] [--out DIR] [--strict]
//              [--jmax N] [--tau X] [--grid SxT] [--mode sector|full]
//
// commands: params, trajectory, amap, operators, coherent, husimi, sbt
// exit codes: 0 success, 1 usage/config error, 2 numerical failure,
//             3 tolerance breach under --strict

#include <cmath>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "monosphere/classical.hpp"
#include "monosphere/quantum.hpp"
#include "monosphere/report.hpp"
#include "monosphere/sbt.hpp"
#include "monosphere/states.hpp"

namespace ms = monosphere;
using ms::report::format_double;
using ms::report::Json;
using ms::report::RunConfig;

namespace {

struct Cli {
  std::string command;
  std::string config_path;
  std::string out_dir{"."};
  bool strict{false};
  int jmax_override{-1};  // twice-j
  double tau_override{-1.0};
  std::string grid{"8x16"};
  std::string mode{"sector"};
  std::string command_line;
};

struct BreachTable {
  Json entries = Json::array();
  bool any{false};

  void add(const std::string& name, double value, double tol) {
    Json e = Json::object();
    e["name"] = name;
    e["value"] = value;
    e["tolerance"] = tol;
    const bool b = !(value <= tol);  // NaN counts as a breach
    e["breach"] = b;
    any = any || b;
    entries.push_back(std::move(e));
  }
};

Json meta_block(const Cli& cli, const RunConfig& cfg) {
  Json m = Json::object();
  m["version"] = ms::report::kVersion;
  m["command_line"] = cli.command_line;
  m["config_hash"] = cfg.hash_hex();
  m["config"] = cfg.canonical();
  return m;
}

void emit(const Cli& cli, const std::string& name, const std::string& content) {
  ms::report::write_file_atomic(cli.out_dir + "/" + name, content);
}

std::mt19937_64 rng_for(const RunConfig& cfg) { return std::mt19937_64(cfg.seed); }

ms::Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  ms::Vec3 v;
  do {
    v = ms::Vec3(n(rng), n(rng), n(rng));
  } while (v.norm() < 1e-6);
  return v.normalized();
}

ms::classical::PhasePoint random_phase_point(std::mt19937_64& rng,
                                             const ms::classical::ModelParams& pm,
                                             double momentum_scale) {
  ms::Vec3 x = pm.r * random_unit(rng);
  ms::Vec3 t = random_unit(rng);
  t -= (t.dot(x) / (pm.r * pm.r)) * x;
  while (t.norm() < 1e-6) {
    t = random_unit(rng);
    t -= (t.dot(x) / (pm.r * pm.r)) * x;
  }
  std::uniform_real_distribution<double> u(0.25, 1.0);
  ms::Vec3 p = momentum_scale * u(rng) * t.normalized();
  return ms::classical::PhasePoint{x, p};
}

int run_params(const Cli& cli, const RunConfig& cfg) {
  auto pm = cfg.params();
  BreachTable breaches;
  const double raw = ms::classical::flux_ratio(pm);
  const int flux = ms::classical::flux_twice_l(pm);
  breaches.add("flux_integer_exact", std::abs(double(flux - cfg.twice_l)), 0.0);
  breaches.add("flux_ratio_deviation", std::abs(raw - cfg.twice_l),
               cfg.tolerance("flux_ratio", 1e-12));
  Json j = Json::object();
  j["r"] = pm.r;
  j["mass"] = pm.m;
  j["alpha"] = pm.alpha;
  j["hbar"] = pm.hbar;
  j["twice_l"] = cfg.twice_l;
  j["B"] = pm.B;
  j["tau"] = pm.tau;
  j["tau_overridden"] = cfg.tau_override.has_value();
  j["flux_twice_l"] = flux;
  j["flux_ratio"] = raw;
  j["breaches"] = breaches.entries;
  j["meta"] = meta_block(cli, cfg);
  emit(cli, "params.json", j.dump());
  std::cout << "B = " << format_double(pm.B) << "  tau = " << format_double(pm.tau)
            << "  flux_twice_l = " << flux << "\n";
  return cli.strict && breaches.any ? 3 : 0;
}

int run_trajectory(const Cli& cli, const RunConfig& cfg) {
  auto pm = cfg.params();
  auto rng = rng_for(cfg);
  auto pt0 = random_phase_point(rng, pm, pm.m * pm.alpha * pm.r);
  const double dt = 1e-3 / pm.alpha;
  const double t_max = 20.0 / pm.alpha;
  auto traj = ms::classical::flow(pt0, t_max, dt, pm);

  std::string csv = "t,x1,x2,x3,p1,p2,p3,J1,J2,J3,H\n";
  const ms::Vec3 j0 = ms::classical::angular_momentum(pt0, pm);
  const double h0 = ms::classical::hamiltonian(pt0, pm);
  double jdrift = 0.0, hdrift = 0.0, plane = 0.0;
  for (const auto& s : traj) {
    const ms::Vec3 jv = ms::classical::angular_momentum(s.pt, pm);
    const double h = ms::classical::hamiltonian(s.pt, pm);
    jdrift = std::max(jdrift, (jv - j0).norm() / j0.norm());
    hdrift = std::max(hdrift, std::abs(h - h0) / h0);
    plane = std::max(plane,
                     std::abs(s.pt.x.dot(j0) + std::pow(pm.r, 3) * pm.B) /
                         (pm.r * j0.norm()));
    csv += format_double(s.t);
    for (int k = 0; k < 3; ++k) csv += "," + format_double(s.pt.x[k]);
    for (int k = 0; k < 3; ++k) csv += "," + format_double(s.pt.p[k]);
    for (int k = 0; k < 3; ++k) csv += "," + format_double(jv[k]);
    csv += "," + format_double(h) + "\n";
  }
  emit(cli, "trajectory.csv", csv);

  BreachTable breaches;
  breaches.add("j_drift_rel", jdrift, cfg.tolerance("flow_j_drift", 1e-9));
  breaches.add("h_drift_rel", hdrift, cfg.tolerance("flow_h_drift", 1e-9));
  breaches.add("plane_residual_rel", plane, cfg.tolerance("flow_plane", 1e-8));
  Json j = Json::object();
  j["steps"] = int(traj.size()) - 1;
  j["dt"] = dt;
  j["t_max"] = t_max;
  j["j_drift_rel"] = jdrift;
  j["h_drift_rel"] = hdrift;
  j["plane_residual_rel"] = plane;
  j["breaches"] = breaches.entries;
  j["meta"] = meta_block(cli, cfg);
  emit(cli, "trajectory.json", j.dump());
  std::cout << "trajectory: " << traj.size() - 1 << " steps, J drift " << jdrift
            << ", H drift " << hdrift << "\n";
  return cli.strict && breaches.any ? 3 : 0;
}

int run_amap(const Cli& cli, const RunConfig& cfg) {
  auto pm = cfg.params();
  auto rng = rng_for(cfg);
  const int n = 1000;
  std::string csv =
      "x1,x2,x3,p1,p2,p3,re_a1,im_a1,re_a2,im_a2,re_a3,im_a3,quadric_residual,"
      "roundtrip_error\n";
  double max_quadric = 0.0, max_round = 0.0;
  for (int i = 0; i < n; ++i) {
    auto pt = random_phase_point(rng, pm, pm.m * pm.alpha * pm.r);
    auto a = ms::classical::complexifier_map(pt, pm);
    const ms::Complex q = a.a[0] * a.a[0] + a.a[1] * a.a[1] + a.a[2] * a.a[2];
    const double qr = std::abs(q - pm.r * pm.r) / (pm.r * pm.r);
    auto back = ms::classical::complexifier_inverse(a, pm);
    const double rt =
        std::sqrt((back.x - pt.x).squaredNorm() + (back.p - pt.p).squaredNorm());
    max_quadric = std::max(max_quadric, qr);
    max_round = std::max(max_round, rt);
    for (int k = 0; k < 3; ++k) csv += format_double(pt.x[k]) + ",";
    for (int k = 0; k < 3; ++k) csv += format_double(pt.p[k]) + ",";
    for (int k = 0; k < 3; ++k)
      csv += format_double(a.a[k].real()) + "," + format_double(a.a[k].imag()) + ",";
    csv += format_double(qr) + "," + format_double(rt) + "\n";
  }
  emit(cli, "amap.csv", csv);
  BreachTable breaches;
  breaches.add("quadric_residual_rel", max_quadric, cfg.tolerance("quadric", 1e-12));
  breaches.add("roundtrip_error", max_round, cfg.tolerance("roundtrip", 1e-9 * pm.r));
  Json j = Json::object();
  j["samples"] = n;
  j["max_quadric_residual_rel"] = max_quadric;
  j["max_roundtrip_error"] = max_round;
  j["breaches"] = breaches.entries;
  j["meta"] = meta_block(cli, cfg);
  emit(cli, "amap.json", j.dump());
  std::cout << "amap: quadric " << max_quadric << ", roundtrip " << max_round << "\n";
  return cli.strict && breaches.any ? 3 : 0;
}

int run_operators(const Cli& cli, const RunConfig& cfg) {
  auto pm = cfg.params();
  auto space = ms::quantum::build_space(cfg.twice_l, cfg.twice_j_max, pm);
  auto rep = ms::quantum::relation_report(space);
  BreachTable breaches;
  const double tol = cfg.tolerance("relation", 1e-9);
  Json rel = Json::array();
  for (const auto& r : rep.residuals) {
    Json e = Json::object();
    e["relation"] = r.relation;
    e["norm_full"] = r.norm_full;
    e["norm_interior"] = r.norm_interior;
    e["scale"] = r.scale;
    e["identity"] = r.identity;
    rel.push_back(std::move(e));
    if (r.identity) breaches.add("interior." + r.relation, r.norm_interior / r.scale, tol);
  }
  Json j = Json::object();
  j["j_max"] = 0.5 * rep.twice_j_max;
  j["twice_l"] = rep.twice_l;
  j["tau"] = rep.tau;
  j["relations"] = rel;
  j["breaches"] = breaches.entries;
  j["meta"] = meta_block(cli, cfg);
  emit(cli, "relations.json", j.dump());
  std::cout << "operators: max interior relative residual " << rep.max_interior_rel()
            << "\n";
  return cli.strict && breaches.any ? 3 : 0;
}

ms::classical::ComplexSpherePoint seeded_point(std::mt19937_64& rng, double r,
                                               double s_target) {
  const ms::Vec3 u = random_unit(rng);
  ms::Vec3 v = random_unit(rng);
  v -= v.dot(u) * u;
  while (v.norm() < 1e-6) {
    v = random_unit(rng);
    v -= v.dot(u) * u;
  }
  v.normalize();
  ms::CVec3 a = r * (std::cosh(s_target) * u.cast<ms::Complex>() +
                     ms::I * std::sinh(s_target) * v.cast<ms::Complex>());
  return ms::classical::ComplexSpherePoint{a};
}

int run_coherent(const Cli& cli, const RunConfig& cfg) {
  auto pm = cfg.params();
  auto space = ms::quantum::build_space(cfg.twice_l, cfg.twice_j_max, pm);
  auto rng = rng_for(cfg);
  std::uniform_real_distribution<double> us(0.1, 0.5);
  const double s = us(rng);
  auto a = seeded_point(rng, pm.r, s);
  auto cs = ms::states::coherent_state(a, space);
  auto rho = ms::states::eigen_residual(cs, space);
  auto ex = ms::states::expectations(cs, space);
  auto pt = ms::classical::complexifier_inverse(a, pm);
  const ms::Vec3 jcl = ms::classical::angular_momentum(pt, pm);

  BreachTable breaches;
  breaches.add("tail_mass", cs.tail_mass, cfg.tolerance("tail_mass", 1e-8));
  const double rho_max = std::max({rho[0], rho[1], rho[2]});
  breaches.add("eigen_residual", rho_max, cfg.tolerance("eigen_residual", 1e-6));

  Json j = Json::object();
  j["s"] = s;
  Json av = Json::array();
  for (int k = 0; k < 3; ++k) {
    Json c = Json::object();
    c["re"] = a.a[k].real();
    c["im"] = a.a[k].imag();
    av.push_back(std::move(c));
  }
  j["a"] = av;
  j["norm"] = cs.vec.norm();
  j["tail_mass"] = cs.tail_mass;
  j["truncation_warning"] = cs.truncation_warning;
  Json rr = Json::array();
  for (double v : rho) rr.push_back(v);
  j["eigen_residuals"] = rr;
  Json xs = Json::array(), js = Json::array(), xc = Json::array(), jc = Json::array();
  for (int k = 0; k < 3; ++k) {
    xs.push_back(ex.x[k]);
    js.push_back(ex.j[k]);
    xc.push_back(pt.x[k]);
    jc.push_back(jcl[k]);
  }
  j["expect_x"] = xs;
  j["expect_j"] = js;
  j["classical_x"] = xc;
  j["classical_j"] = jc;
  j["breaches"] = breaches.entries;
  j["meta"] = meta_block(cli, cfg);
  emit(cli, "coherent.json", j.dump());
  std::cout << "coherent: residuals " << rho[0] << " " << rho[1] << " " << rho[2]
            << ", tail " << cs.tail_mass << "\n";
  return cli.strict && breaches.any ? 3 : 0;
}

int run_husimi(const Cli& cli, const RunConfig& cfg) {
  auto pm = cfg.params();
  auto space = ms::quantum::build_space(cfg.twice_l, cfg.twice_j_max, pm);
  auto rng = rng_for(cfg);
  auto b = seeded_point(rng, pm.r, 0.3);
  auto psi = ms::states::coherent_state(b, space);

  ms::states::HusimiGridSpec spec;
  const auto xpos = cli.grid.find('x');
  if (xpos == std::string::npos)
    throw ms::InvalidParams("husimi: --grid must look like SxT");
  spec.n_s = std::stoi(cli.grid.substr(0, xpos));
  spec.n_theta = std::stoi(cli.grid.substr(xpos + 1));
  spec.n_phi = 2 * spec.n_theta;
  spec.s_max = 1.0;
  if (spec.n_s < 1 || spec.n_theta < 1)
    throw ms::InvalidParams("husimi: grid dimensions must be positive");
  auto cells = ms::states::husimi_grid(psi.vec, spec, space);

  std::string csv = "s,theta,phi,value\n";
  double peak = 0.0;
  size_t peak_idx = 0;
  for (size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    if (c.value > peak) {
      peak = c.value;
      peak_idx = i;
    }
    csv += format_double(c.s, 12) + "," + format_double(c.theta, 12) + "," +
           format_double(c.phi, 12) + "," + format_double(c.value, 12) + "\n";
  }
  emit(cli, "husimi.csv", csv);
  Json j = Json::object();
  j["grid_s"] = spec.n_s;
  j["grid_theta"] = spec.n_theta;
  j["grid_phi"] = spec.n_phi;
  j["s_max"] = spec.s_max;
  j["peak_value"] = peak;
  j["peak_s"] = cells[peak_idx].s;
  j["peak_theta"] = cells[peak_idx].theta;
  j["peak_phi"] = cells[peak_idx].phi;
  j["breaches"] = Json::array();
  j["meta"] = meta_block(cli, cfg);
  emit(cli, "husimi.json", j.dump());
  std::cout << "husimi: " << cells.size() << " cells, peak " << peak << "\n";
  return 0;
}

int run_sbt(const Cli& cli, const RunConfig& cfg) {
  auto pm = cfg.params();
  BreachTable breaches;
  if (cli.mode == "sector") {
    const int jmax = std::min(12, cfg.twice_j_max / 2);
    Json table = Json::array();
    double worst = 0.0;
    for (int j = 1; j <= jmax; ++j) {
      const double rj = ms::sbt::sector_isometry(2 * j, pm.tau);
      worst = std::max(worst, std::abs(rj - 1.0));
      Json e = Json::object();
      e["j"] = j;
      e["R_j"] = rj;
      table.push_back(std::move(e));
    }
    breaches.add("sector_max_deviation", worst, cfg.tolerance("sector", 1e-6));
    Json j = Json::object();
    j["tau"] = pm.tau;
    j["mode"] = "sector";
    j["sectors"] = table;
    j["max_deviation"] = worst;
    j["breaches"] = breaches.entries;
    j["meta"] = meta_block(cli, cfg);
    emit(cli, "sector.json", j.dump());
    std::cout << "sbt sector: max |R_j - 1| = " << worst << "\n";
    return cli.strict && breaches.any ? 3 : 0;
  }
  if (cli.mode != "full") throw ms::InvalidParams("sbt: --mode must be sector or full");

  auto space = ms::quantum::build_space(cfg.twice_l, cfg.twice_j_max, pm);
  auto rng = rng_for(cfg);
  ms::VecXc psi(space.dim());
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int i = 0; i < space.dim(); ++i) psi[i] = ms::Complex(nd(rng), nd(rng));
  psi.normalize();
  auto res = ms::sbt::isometry_check(psi, space);
  const double tol =
      cfg.tolerance("isometry", cfg.twice_l == 0 ? 1e-3 : 1e-2);
  breaches.add("isometry_deviation", std::abs(res.ratio - 1.0), tol);
  Json j = Json::object();
  j["twice_l"] = cfg.twice_l;
  j["j_max"] = 0.5 * cfg.twice_j_max;
  j["tau"] = pm.tau;
  j["ratio"] = res.ratio;
  j["error_estimate"] = res.error_estimate;
  j["s_max"] = res.s_max;
  Json nodes = Json::object();
  nodes["frame_order"] = res.frame_order;
  nodes["n_s"] = res.n_s;
  nodes["n_sigma"] = res.n_sigma;
  nodes["n_theta"] = res.n_theta;
  j["nodes"] = nodes;
  j["breaches"] = breaches.entries;
  j["meta"] = meta_block(cli, cfg);
  emit(cli, "isometry.json", j.dump());
  std::cout << "sbt full: ratio " << format_double(res.ratio) << " (err est "
            << res.error_estimate << ")\n";
  return cli.strict && breaches.any ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  Cli cli;
  for (int i = 0; i < argc; ++i) {
    if (i) cli.command_line += ' ';
    cli.command_line += argv[i];
  }

  CLI::App app{"charged particle on the 2-sphere: classical complex coordinates, "
               "twisted operators, coherent states, Segal-Bargmann checks"};
  app.require_subcommand(1);
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", cli.config_path, "key=value config file");
    sub->add_option("--out", cli.out_dir, "output directory");
    sub->add_flag("--strict", cli.strict, "exit 3 on any tolerance breach");
    sub->add_option("--jmax", cli.jmax_override, "twice_j_max override");
    sub->add_option("--tau", cli.tau_override, "tau override");
    sub->add_option("--grid", cli.grid, "husimi grid SxT");
    sub->add_option("--mode", cli.mode, "sbt mode: sector|full");
  };
  for (const char* name : {"params", "trajectory", "amap", "operators", "coherent",
                           "husimi", "sbt"})
    add_common(app.add_subcommand(name));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 1 : 0;
  }
  cli.command = app.get_subcommands().front()->get_name();

  try {
    RunConfig cfg;
    if (!cli.config_path.empty()) cfg = RunConfig::parse_file(cli.config_path);
    if (cli.jmax_override >= 0) cfg.twice_j_max = cli.jmax_override;
    if (cli.tau_override > 0.0) cfg.tau_override = cli.tau_override;
    (void)cfg.params();  // validate after overrides

    if (cli.command == "params") return run_params(cli, cfg);
    if (cli.command == "trajectory") return run_trajectory(cli, cfg);
    if (cli.command == "amap") return run_amap(cli, cfg);
    if (cli.command == "operators") return run_operators(cli, cfg);
    if (cli.command == "coherent") return run_coherent(cli, cfg);
    if (cli.command == "husimi") return run_husimi(cli, cfg);
    if (cli.command == "sbt") return run_sbt(cli, cfg);
    std::cerr << "unknown command: " << cli.command << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ms::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
