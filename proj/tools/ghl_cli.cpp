// ghl: experiment runner for the equivariant index laboratory.
//
// One subcommand per experiment; JSON config in, JSON verdict on stdout,
// CSV artifacts written atomically. Exit codes: 0 pass, 1 check failure,
// 2 config/IO error, 3 numerical ambiguity.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "CLI11.hpp"

#include "ghl/clifford.hpp"
#include "ghl/covering.hpp"
#include "ghl/cylinder.hpp"
#include "ghl/eta.hpp"
#include "ghl/heat.hpp"
#include "ghl/serialize.hpp"

namespace fs = std::filesystem;
using ghl::json;

namespace {

struct Check {
  std::string label;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct Verdict {
  std::string experiment;
  std::string config_hash;
  std::vector<Check> checks;
  std::vector<std::string> artifacts;

  void add(const std::string& label, double measured, double bound) {
    checks.push_back({label, measured, bound,
                      std::isfinite(measured) && measured <= bound});
  }
  void add_flag(const std::string& label, bool ok) {
    checks.push_back({label, ok ? 1.0 : 0.0, 1.0, ok});
  }
  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return !checks.empty();
  }
};

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct Options {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool force = false;
};

json load_config(const Options& opt) {
  if (opt.config_path.empty()) return json::object();
  std::ifstream in(opt.config_path);
  if (!in) throw ghl::ConfigError("cannot open config: " + opt.config_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ghl::ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw ghl::ConfigError("config root must be an object");
  return j;
}

void write_atomic(const fs::path& path, const std::string& data, bool force) {
  if (fs::exists(path) && !force)
    throw ghl::ConfigError("refusing to overwrite " + path.string() +
                           " (pass --force)");
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ghl::ConfigError("cannot write " + tmp.string());
    out << data;
  }
  fs::rename(tmp, path);
}

std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double require_positive(const json& cfg, const char* key, double defval) {
  double v = cfg.value(key, defval);
  if (!(v > 0.0))
    throw ghl::ConfigError(std::string("\"") + key + "\" must be positive");
  return v;
}

void reject_unknown(const json& cfg, std::initializer_list<const char*> known) {
  ghl::detail::reject_unknown_keys(cfg, known, "config");
}

// ---------------------------------------------------------------- clifford

void run_clifford_selftest(const json& cfg, const Options& opt, Verdict& v) {
  reject_unknown(cfg, {"max_l", "random_elements"});
  const int max_l = cfg.value("max_l", 4);
  const int n_random = cfg.value("random_elements", 50);
  if (max_l < 1 || max_l > 6) throw ghl::ConfigError("\"max_l\" must be in 1..6");
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int l = 1; l <= max_l; ++l) {
    const int k = 2 * l;
    auto tab = ghl::graded_trace(ghl::volume_element(k));
    v.add("str(tau_" + std::to_string(k) + ") = 2^" + std::to_string(l),
          std::abs(tab.str - std::pow(2.0, l)), 1e-14);
    auto rep = ghl::spinor_representation(k);
    double relres = 0.0;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        ghl::Matrix anti = rep.c[i] * rep.c[j] + rep.c[j] * rep.c[i];
        if (i == j) anti += 2.0 * ghl::Matrix::Identity(anti.rows(), anti.cols());
        relres = std::max(relres, anti.cwiseAbs().maxCoeff());
      }
    v.add("anticommutation relations k=" + std::to_string(k), relres, 1e-14);
    double mono = 0.0;
    for (std::uint32_t mask = 0; mask + 1 < (1u << k); ++mask)
      mono = std::max(mono,
                      std::abs(ghl::graded_trace(
                                   ghl::CliffordElement::monomial(k, mask))
                                   .str));
    v.add("non-volume monomials traceless k=" + std::to_string(k), mono, 1e-14);
    // odd algebra inside: tr+-(1) = 2^{l-1}
    const int ko = 2 * l - 1;
    auto tabo = ghl::graded_trace(ghl::CliffordElement::scalar(ko, 1.0));
    v.add("tr+(1) = 2^" + std::to_string(l - 1) + " (k=" + std::to_string(ko) + ")",
          std::abs(*tabo.tr_plus - std::pow(2.0, l - 1)), 1e-14);
    v.add("tr-(1) = 2^" + std::to_string(l - 1) + " (k=" + std::to_string(ko) + ")",
          std::abs(*tabo.tr_minus - std::pow(2.0, l - 1)), 1e-14);
  }
  // graded trace vs representation trace on random elements (k = 4 and 3)
  double rres = 0.0;
  auto rep4 = ghl::spinor_representation(4);
  auto rep3 = ghl::spinor_representation(3);
  for (int trial = 0; trial < n_random; ++trial) {
    ghl::CliffordElement x(4);
    for (std::uint32_t mask = 0; mask < 16; ++mask)
      x.add(mask, {coef(rng), coef(rng)});
    rres = std::max(rres, std::abs(ghl::graded_trace(x).str -
                                   rep4.signed_trace(rep4.ambient(x))));
    ghl::CliffordElement y(3);
    for (std::uint32_t mask = 0; mask < 8; ++mask)
      y.add(mask, {coef(rng), coef(rng)});
    auto ty = ghl::graded_trace(y);
    rres = std::max(rres, std::abs(*ty.tr_plus - rep3.plus(y).trace()));
    rres = std::max(rres, std::abs(*ty.tr_minus - rep3.minus(y).trace()));
  }
  v.add("graded trace matches representation trace", rres, 1e-12);
  // cylinder trace identity on a random phi
  ghl::Matrix phi(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) phi(i, j) = ghl::Complex(coef(rng), coef(rng));
  v.add("half-cylinder trace identity", ghl::cylinder_trace_identity_check(phi),
        1e-12);
}

// ------------------------------------------------------------ graph inputs

ghl::VoltageGraph graph_from_config(const json& cfg, const char* key) {
  if (!cfg.contains(key))
    throw ghl::ConfigError(std::string("missing \"") + key + "\"");
  return ghl::graph_from_json(cfg.at(key), key);
}

ghl::Quotient quotient_from_config(const ghl::DeckGroup& g, const json& cfg) {
  if (!cfg.contains("quotient")) {
    if (!g.is_finite())
      throw ghl::ConfigError("\"quotient\" required for infinite deck groups");
    return ghl::Quotient::identity_on(g);
  }
  const json& q = cfg.at("quotient");
  if (q.is_string() && q.get<std::string>() == "identity")
    return ghl::Quotient::identity_on(g);
  if (!q.is_array())
    throw ghl::ConfigError("\"quotient\" must be \"identity\" or an order array");
  return ghl::Quotient(g, q.get<std::vector<std::int64_t>>());
}

void run_atiyah(const json& cfg, const Options&, Verdict& v) {
  reject_unknown(cfg, {"graph", "quotient", "tolerance"});
  const double tol = require_positive(cfg, "tolerance", 1e-9);
  ghl::VoltageGraph g = graph_from_config(cfg, "graph");
  ghl::Quotient q = quotient_from_config(g.group, cfg);
  auto rep = ghl::atiyah_check(g, q, tol);
  v.add("gamma index of lift equals base index",
        std::abs(rep.base_index - rep.gamma_index_lift), tol);
  v.add("base index equals Euler characteristic",
        std::abs(rep.base_index - rep.euler_characteristic), tol);
  v.add("cover index multiplicative",
        std::abs(rep.cover_index - rep.quotient_order * rep.base_index), tol);
}

void run_mckean_singer(const json& cfg, const Options& opt, Verdict& v) {
  reject_unknown(cfg, {"graph", "quotient", "times", "tolerance", "csv"});
  const double tol = require_positive(cfg, "tolerance", 1e-9);
  std::vector<double> times = cfg.value("times", std::vector<double>{0.1, 1.0, 10.0});
  ghl::VoltageGraph g = graph_from_config(cfg, "graph");
  ghl::Quotient q = quotient_from_config(g.group, cfg);
  ghl::GradedGraphDirac d = ghl::graph_dirac(g);
  ghl::GradedGraphDirac dq{d.op.at_quotient(q), d.base_vertices, d.base_edges};
  ghl::HeatCurve curve = ghl::supertrace_curve(dq, times);
  double value_res = 0.0;
  for (const auto& val : curve.values)
    value_res = std::max(value_res,
                         std::abs(val - ghl::Complex(d.euler_characteristic())));
  v.add("supertrace equals Euler characteristic", value_res, tol);
  v.add("supertrace flat in t", curve.spread(), tol);
  if (cfg.contains("csv")) {
    std::string csv = "t,value_re,value_im\n";
    for (std::size_t i = 0; i < times.size(); ++i)
      csv += csv_num(times[i]) + "," + csv_num(curve.values[i].real()) + "," +
             csv_num(curve.values[i].imag()) + "\n";
    fs::path p = fs::path(opt.out_dir) / cfg.at("csv").get<std::string>();
    write_atomic(p, csv, opt.force);
    v.artifacts.push_back(p.string());
  }
}

void run_unfolding(const json& cfg, const Options&, Verdict& v) {
  reject_unknown(cfg, {"graph", "quotient", "times", "powers", "tolerance"});
  const double tol = require_positive(cfg, "tolerance", 1e-10);
  std::vector<double> times = cfg.value("times", std::vector<double>{0.5, 2.0});
  std::vector<int> powers = cfg.value("powers", std::vector<int>{0, 1});
  ghl::VoltageGraph g = graph_from_config(cfg, "graph");
  ghl::Quotient q = quotient_from_config(g.group, cfg);
  for (double t : times)
    for (int l : powers)
      v.add("unfolding residual t=" + csv_num(t) + " l=" + std::to_string(l),
            ghl::unfolding_check(g, q, t, l), tol);
}

void run_decay(const json& cfg, const Options& opt, Verdict& v) {
  reject_unknown(cfg, {"graph", "times", "c", "csv"});
  std::vector<double> times = cfg.value("times", std::vector<double>{2.0, 10.0});
  ghl::VoltageGraph g = graph_from_config(cfg, "graph");
  auto rep = ghl::gaussian_decay_check(g, times, cfg.value("c", 0.0));
  v.add_flag("gaussian envelope holds for d <= c t", rep.in_regime_bound_holds);
  if (cfg.contains("csv")) {
    std::string csv = "x,y,d,t,k,bound\n";
    for (const auto& r : rep.rows)
      csv += std::to_string(r.x) + "," + std::to_string(r.y) + "," +
             std::to_string(r.dist) + "," + csv_num(r.t) + "," +
             csv_num(r.magnitude) + "," + csv_num(r.bound) + "\n";
    fs::path p = fs::path(opt.out_dir) / cfg.at("csv").get<std::string>();
    write_atomic(p, csv, opt.force);
    v.artifacts.push_back(p.string());
  }
}

void run_relative_decay(const json& cfg, const Options&, Verdict& v) {
  reject_unknown(cfg, {"graph", "graph2", "site", "radius", "time", "tolerance"});
  ghl::VoltageGraph g1 = graph_from_config(cfg, "graph");
  ghl::VoltageGraph g2 = graph_from_config(cfg, "graph2");
  const int x = cfg.value("site", 0);
  const int rho = cfg.value("radius", 10);
  const double t = require_positive(cfg, "time", 3.0);
  auto rep = ghl::relative_decay_check(g1, g2, x, rho, t);
  v.add("diagonal kernel difference", rep.difference,
        require_positive(cfg, "tolerance", 1e-6));
  v.add_flag("bound holds in regime", rep.bound_holds);
}

void run_duhamel(const json& cfg, const Options&, Verdict& v) {
  reject_unknown(cfg, {"operator", "perturbation", "time", "step", "tolerance"});
  if (!cfg.contains("operator")) throw ghl::ConfigError("missing \"operator\"");
  ghl::EquivariantOperator t0 = ghl::operator_from_json(cfg.at("operator"));
  ghl::EquivariantOperator k =
      cfg.contains("perturbation")
          ? ghl::operator_from_json(cfg.at("perturbation"), "perturbation")
          : ghl::EquivariantOperator::identity(t0.group(), t0.fiber_plus(),
                                               t0.fiber_minus());
  const double time = require_positive(cfg, "time", 1.0);
  const double step = require_positive(cfg, "step", 1e-3);
  const double tol =
      cfg.contains("tolerance") ? require_positive(cfg, "tolerance", 0)
                                : std::max(1e-6, step * step * 10.0);
  auto family = [&](double u) { return t0.plus(k.scaled(u)); };
  v.add("Duhamel derivative residual", ghl::duhamel_check(family, 0.0, time, step),
        tol);
}

// ----------------------------------------------------------------- eta

void run_eta_oracle(const json& cfg, const Options&, Verdict& v) {
  reject_unknown(cfg, {"operator", "kappa", "tolerance", "floquet_nodes"});
  if (!cfg.contains("operator")) throw ghl::ConfigError("missing \"operator\"");
  ghl::EquivariantOperator t = ghl::operator_from_json(cfg.at("operator"));
  auto r = ghl::eta_heat_integral(t, cfg.value("kappa", 0.0), 1e-10,
                                  cfg.value("floquet_nodes", 0));
  v.add("heat-integral eta vs sign-sum oracle", std::abs(r.value - r.oracle),
        require_positive(cfg, "tolerance", 1e-6));
  v.add("kappa robustness (recompute at 2 kappa)", r.kappa_residual, 1e-7);
  v.add_flag("no regularization needed at finite dimension", !r.regularized);
}

void run_eta_jump(const json& cfg, const Options&, Verdict& v) {
  reject_unknown(cfg, {"operator", "eps", "u", "tolerance"});
  if (!cfg.contains("operator")) throw ghl::ConfigError("missing \"operator\"");
  ghl::EquivariantOperator d = ghl::operator_from_json(cfg.at("operator"));
  const double eps = require_positive(cfg, "eps", 0.5);
  const double u = cfg.value("u", 0.25);
  auto rep = ghl::eta_jump_check(d, eps, u);
  v.add("jump equals sgn(u) tr(Pi)", rep.jump_residual,
        require_positive(cfg, "tolerance", 1e-8));
  v.add("symmetrization identity", rep.symmetrization_residual, 1e-10);
  v.add_flag("modification bound", ghl::eta_modification_bound_check(d, eps));
}

void run_eta_tower(const json& cfg, const Options& opt, Verdict& v) {
  reject_unknown(cfg, {"operator", "orders", "probe_time", "tolerance", "csv"});
  if (!cfg.contains("operator")) throw ghl::ConfigError("missing \"operator\"");
  ghl::EquivariantOperator a = ghl::operator_from_json(cfg.at("operator"));
  if (!cfg.contains("orders")) throw ghl::ConfigError("missing \"orders\"");
  ghl::DeckTower tw =
      ghl::tower(a.group(), cfg.at("orders").get<std::vector<std::int64_t>>());
  auto rep = ghl::tower_eta_convergence(tw, a, cfg.value("probe_time", 1.0));
  const double tol = require_positive(cfg, "tolerance", 1e-3);
  v.add("top-level eta ratio vs Gamma-eta", rep.levels.back().gap_to_target, tol);
  bool mono = true;
  for (std::size_t i = rep.levels.size() >= 3 ? rep.levels.size() - 2 : 1;
       i < rep.levels.size(); ++i)
    if (rep.levels[i].gap_to_target > rep.levels[i - 1].gap_to_target + 1e-9)
      mono = false;
  v.add_flag("gaps nonincreasing over last levels", mono);
  double knorm = 0.0;
  for (const auto& lv : rep.levels)
    knorm = std::max(knorm, lv.kernel_ratio - rep.target_kernel);
  v.add("kernel ratio below Gamma-kernel", knorm, 1e-9);
  if (cfg.contains("csv")) {
    std::string csv = "level,d_i,eta_i,ratio,target,gap,b_i\n";
    for (std::size_t i = 0; i < rep.levels.size(); ++i) {
      const auto& lv = rep.levels[i];
      csv += std::to_string(i) + "," + std::to_string(lv.d) + "," +
             csv_num(lv.eta) + "," + csv_num(lv.ratio) + "," +
             csv_num(rep.target) + "," + csv_num(lv.gap_to_target) + "," +
             csv_num(lv.kernel_dim) + "\n";
    }
    fs::path p = fs::path(opt.out_dir) / cfg.at("csv").get<std::string>();
    write_atomic(p, csv, opt.force);
    v.artifacts.push_back(p.string());
  }
}

// --------------------------------------------------------------- cylinder

ghl::CylinderModel cylinder_from_config(const json& cfg) {
  if (!cfg.contains("cylinder")) throw ghl::ConfigError("missing \"cylinder\"");
  const json& c = cfg.at("cylinder");
  ghl::detail::reject_unknown_keys(
      c, {"boundary", "interior", "R", "h", "theta"}, "cylinder");
  if (!c.contains("boundary"))
    throw ghl::ConfigError("missing \"cylinder.boundary\"");
  ghl::EquivariantOperator boundary =
      ghl::operator_from_json(c.at("boundary"), "cylinder.boundary");
  ghl::CylinderModel m{boundary, std::nullopt, {},
                       c.value("R", 40.0), c.value("h", 0.2)};
  if (c.contains("interior")) {
    const json& itr = c.at("interior");
    ghl::detail::reject_unknown_keys(itr, {"graph", "gluing"}, "cylinder.interior");
    m.interior = ghl::graph_from_json(
        ghl::detail::require_key(itr, "graph", "cylinder.interior"),
        "cylinder.interior.graph");
    m.gluing = ghl::detail::require_key(itr, "gluing", "cylinder.interior")
                   .get<std::vector<int>>();
  }
  if (c.contains("theta")) {
    ghl::detail::reject_unknown_keys(c.at("theta"), {"default"}, "cylinder.theta");
    if (!c.at("theta").value("default", true))
      throw ghl::ConfigError("only the default theta profile is supported");
  }
  m.validate();
  return m;
}

void run_cylinder_kernels(const json& cfg, const Options&, Verdict& v) {
  reject_unknown(cfg, {"cylinder", "eps", "u", "deltas"});
  ghl::CylinderModel m = cylinder_from_config(cfg);
  const double eps = require_positive(cfg, "eps", 1.0);
  const double u = cfg.value("u", 0.0);
  std::vector<double> deltas =
      cfg.value("deltas", std::vector<double>{0.3 * eps, 0.35 * eps, 0.4 * eps});
  auto mo = ghl::spectral_modification(m, eps, u);
  auto ek = ghl::extended_kernel_report({m, eps, 0.0, mo.floquet_nodes}, deltas);
  if (!m.interior) {
    auto oracle =
        ghl::model_solution_counts(ghl::spectral_measure(m.boundary), eps, 0.0);
    v.add("L2+ count vs closed form", std::abs(ek.l2_plus - oracle.l2_plus), 0.0);
    v.add("Ext+ count vs closed form", std::abs(ek.ext_plus - oracle.ext_plus), 0.0);
    v.add("L2- count vs closed form", std::abs(ek.l2_minus - oracle.l2_minus), 0.0);
    v.add("Ext- count vs closed form", std::abs(ek.ext_minus - oracle.ext_minus), 0.0);
    v.add("h+ vs closed form", std::abs(ek.h_plus - oracle.h_plus), 0.0);
    v.add("h- vs closed form", std::abs(ek.h_minus - oracle.h_minus), 0.0);
    if (u != 0.0) {
      auto cu = ghl::weighted_kernel(mo, 0.0);
      auto ou = ghl::model_solution_counts(ghl::spectral_measure(m.boundary), eps, u);
      v.add("modified plus kernel vs closed form", std::abs(cu.plus - ou.l2_plus), 0.0);
      v.add("modified minus kernel vs closed form", std::abs(cu.minus - ou.l2_minus), 0.0);
    }
  } else {
    v.add_flag("counts stable across delta grid", ek.stable);
  }
  // R-stability
  ghl::CylinderModel m2 = m;
  m2.R = 2.0 * m.R;
  auto ek2 = ghl::extended_kernel_report({m2, eps, 0.0, mo.floquet_nodes}, deltas);
  v.add_flag("counts stable under R -> 2R",
             ek.l2_plus == ek2.l2_plus && ek.ext_plus == ek2.ext_plus &&
                 ek.l2_minus == ek2.l2_minus && ek.ext_minus == ek2.ext_minus);
}

void run_cylinder_aps(const json& cfg, const Options& opt, Verdict& v) {
  reject_unknown(cfg, {"cylinder", "eps", "u_grid", "csv"});
  ghl::CylinderModel m = cylinder_from_config(cfg);
  const double eps = require_positive(cfg, "eps", 1.0);
  std::vector<double> u_grid =
      cfg.value("u_grid", std::vector<double>{0.4 * eps, 0.2 * eps, 0.1 * eps});
  auto mo = ghl::spectral_modification(m, eps, u_grid.front());
  auto rep = ghl::aps_consistency(mo, u_grid);
  v.add_flag("symmetrization identity exact", rep.symmetrization_exact);
  v.add_flag("|g(u)| nonincreasing toward 0", rep.g_nonincreasing);
  if (cfg.contains("csv")) {
    std::string csv = "eps,u,R,ind,eta,h_plus,h_minus,g\n";
    for (const auto& r : rep.rows)
      csv += csv_num(eps) + "," + csv_num(r.u) + "," + csv_num(m.R) + "," +
             csv_num(r.index) + "," + csv_num(r.eta) + "," +
             csv_num(rep.h_plus) + "," + csv_num(rep.h_minus) + "," +
             csv_num(r.g) + "\n";
    fs::path p = fs::path(opt.out_dir) / cfg.at("csv").get<std::string>();
    write_atomic(p, csv, opt.force);
    v.artifacts.push_back(p.string());
  }
}

void run_spectrum_bottom(const json& cfg, const Options&, Verdict& v) {
  reject_unknown(cfg, {"cylinder", "eps", "u", "R_grid", "window"});
  ghl::CylinderModel m = cylinder_from_config(cfg);
  const double eps = cfg.value("eps", 0.0);
  const double u = cfg.value("u", 0.0);
  std::vector<double> r_grid =
      cfg.value("R_grid", std::vector<double>{m.R, 2.0 * m.R});
  auto mo = ghl::spectral_modification(m, eps, u);
  auto rep = ghl::spectrum_bottom_check(mo, r_grid, cfg.value("window", 0.0));
  v.add_flag("below-bottom count R-stable", rep.below_stable);
  v.add_flag("window count grows with R", rep.window_grows);
}

// ------------------------------------------------------------- dispatcher

int dispatch(const std::string& name, const json& cfg, const Options& opt) {
  Verdict v;
  v.experiment = name;
  v.config_hash = fnv1a_hex(cfg.dump() + "|seed=" + std::to_string(opt.seed));
  const auto t0 = std::chrono::steady_clock::now();
  if (name == "clifford-selftest") run_clifford_selftest(cfg, opt, v);
  else if (name == "atiyah") run_atiyah(cfg, opt, v);
  else if (name == "mckean-singer") run_mckean_singer(cfg, opt, v);
  else if (name == "unfolding") run_unfolding(cfg, opt, v);
  else if (name == "decay") run_decay(cfg, opt, v);
  else if (name == "relative-decay") run_relative_decay(cfg, opt, v);
  else if (name == "duhamel") run_duhamel(cfg, opt, v);
  else if (name == "eta-oracle") run_eta_oracle(cfg, opt, v);
  else if (name == "eta-jump") run_eta_jump(cfg, opt, v);
  else if (name == "eta-tower") run_eta_tower(cfg, opt, v);
  else if (name == "cylinder-kernels") run_cylinder_kernels(cfg, opt, v);
  else if (name == "cylinder-aps") run_cylinder_aps(cfg, opt, v);
  else if (name == "spectrum-bottom") run_spectrum_bottom(cfg, opt, v);
  else throw ghl::ConfigError("unknown experiment: " + name);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json out;
  out["experiment"] = v.experiment;
  out["config_hash"] = v.config_hash;
  json checks = json::array();
  for (const auto& c : v.checks)
    checks.push_back({{"label", c.label},
                      {"measured", c.measured},
                      {"bound", c.bound},
                      {"pass", c.pass}});
  out["checks"] = std::move(checks);
  out["pass"] = v.pass();
  out["wall_time_s"] = wall;
  out["artifacts"] = v.artifacts;
  std::cout << out.dump(2) << std::endl;
  return v.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("GHL_THREADS")) {
    const int n = std::atoi(threads);
    if (n > 0) Eigen::setNbThreads(n);
  }
  CLI::App app{"equivariant index laboratory"};
  app.require_subcommand(1);
  Options opt;
  static const std::vector<std::string> experiments = {
      "clifford-selftest", "atiyah",        "mckean-singer", "unfolding",
      "decay",             "relative-decay", "duhamel",       "eta-oracle",
      "eta-jump",          "eta-tower",      "cylinder-kernels",
      "cylinder-aps",      "spectrum-bottom"};
  for (const auto& name : experiments) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", opt.config_path, "JSON config path");
    sub->add_option("--out", opt.out_dir, "artifact output directory");
    sub->add_option("--seed", opt.seed, "RNG seed");
    sub->add_flag("--force", opt.force, "overwrite existing artifacts");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  try {
    return dispatch(name, load_config(opt), opt);
  } catch (const ghl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 2;
  } catch (const ghl::AmbiguousRankError& e) {
    std::cerr << "numerical ambiguity: " << e.what() << std::endl;
    return 3;
  } catch (const std::exception& e) {
    const std::string msg = e.what();
    if (msg.find("did not converge") != std::string::npos ||
        msg.find("kappa-independent") != std::string::npos) {
      std::cerr << "numerical ambiguity: " << msg << std::endl;
      return 3;
    }
    std::cerr << "error: " << msg << std::endl;
    return 2;
  }
}
