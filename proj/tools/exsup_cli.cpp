// Command-line front end: problem configs in, solved boundaries,
// representation-function tabulations, verification reports, and extremal-law
// tables out.  Exit codes: 0 success, 1 verification failure, 2 config error,
// 3 numeric failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "exsup/config.hpp"
#include "exsup/numerics.hpp"
#include "exsup/one_sided.hpp"
#include "exsup/two_sided.hpp"

namespace {

using nlohmann::json;
using namespace exsup;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Options {
  std::string config_path;
  std::string out_path;
  std::string format;  // empty: take from config
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

void write_text(const Options& opt, const std::string& text) {
  if (opt.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(opt.out_path);
  if (!out) throw ConfigError("cannot open output path: " + opt.out_path);
  out << text;
}

ProblemConfig load(const Options& opt) {
  if (opt.config_path.empty()) throw ConfigError("--config is required");
  ProblemConfig cfg = load_config(opt.config_path);
  if (opt.seed) cfg.simulation.seed = *opt.seed;
  if (opt.threads) cfg.simulation.threads = *opt.threads;
  if (!opt.format.empty()) {
    if (opt.format != "csv" && opt.format != "json")
      throw ConfigError("--format must be csv or json");
    cfg.output.format = opt.format;
  }
  return cfg;
}

std::vector<double> output_grid(const ProblemConfig& cfg, double lo_default,
                                double hi_default) {
  double lo = std::isnan(cfg.output.grid_lo) ? lo_default : cfg.output.grid_lo;
  double hi = std::isnan(cfg.output.grid_hi) ? hi_default : cfg.output.grid_hi;
  return lo > 0.0 ? num::geomspace(lo, hi, cfg.output.grid_nodes)
                  : num::linspace(lo, hi, cfg.output.grid_nodes);
}

int cmd_solve(const Options& opt) {
  ProblemConfig cfg = load(opt);
  Model model = build_model(cfg);
  Payoff payoff = build_payoff(cfg, model);
  std::ostringstream os;

  if (cfg.solver.mode == "one_sided") {
    OneSidedConfig sc;
    sc.x_lo = cfg.solver.x_lo;
    sc.x_hi = cfg.solver.x_hi;
    sc.grid_nodes = cfg.solver.grid_nodes;
    sc.bisect_tol = cfg.solver.root_tol;
    auto rep = solve_one_sided(payoff, model, sc);
    double ref = std::max(1.0, rep.y_star);
    auto grid = output_grid(cfg, ref / 10.0, 3.0 * ref);
    json summary = {{"mode", "one_sided"},
                    {"y_star", rep.y_star},
                    {"smooth_fit", rep.smooth_fit},
                    {"jump_at_boundary", rep.jump_at_boundary},
                    {"monotone_on_stop_region", rep.monotone_on_stop_region}};
    if (cfg.output.format == "json") {
      json rows = json::array();
      for (double x : grid)
        rows.push_back({{"x", x},
                        {"V", rep.value(x)},
                        {"f_hat", rep.f_hat(x)},
                        {"region", x >= rep.y_star ? 1 : 0}});
      os << json{{"summary", summary}, {"rows", rows}}.dump(2) << "\n";
    } else {
      for (auto& [k, v] : summary.items()) os << "# " << k << "=" << v << "\n";
      os << "x,V,f_hat,region\n";
      for (double x : grid)
        os << fmt17(x) << "," << fmt17(rep.value(x)) << ","
           << fmt17(rep.f_hat(x)) << "," << (x >= rep.y_star ? 1 : 0) << "\n";
    }
  } else {
    TwoSidedConfig sc;
    sc.z_lo = cfg.solver.z_lo;
    sc.y_hi = cfg.solver.y_hi;
    sc.a_trunc = cfg.solver.a_trunc;
    sc.beta_nodes = cfg.solver.beta_nodes;
    sc.check_dual_formulas = cfg.solver.check_dual_formulas;
    auto rep = solve_two_sided(payoff, model, sc);
    auto grid = output_grid(cfg, rep.z_star / 4.0, 1.5 * rep.zeta);
    json summary = {{"mode", "two_sided"},
                    {"z_star", rep.z_star},
                    {"y_star", rep.y_star},
                    {"zeta", rep.zeta},
                    {"smooth_fit_lower", rep.smooth_fit_lower},
                    {"smooth_fit_upper", rep.smooth_fit_upper},
                    {"warnings", rep.warnings}};
    auto region = [&](double x) {
      return x <= rep.z_star || x >= rep.y_star ? 1 : 0;
    };
    if (cfg.output.format == "json") {
      json rows = json::array();
      for (double x : grid)
        rows.push_back({{"x", x},
                        {"V", rep.value(x)},
                        {"f1", x <= rep.z_star ? rep.f1_at(x) : num::kNaN},
                        {"f2", x >= rep.y_star ? rep.f2_at(x) : num::kNaN},
                        {"beta", x <= rep.z_star ? rep.beta_of(x) : num::kNaN},
                        {"alpha", x >= rep.y_star ? rep.alpha_of(x) : num::kNaN},
                        {"region", region(x)}});
      os << json{{"summary", summary}, {"rows", rows}}.dump(2) << "\n";
    } else {
      for (auto& [k, v] : summary.items()) os << "# " << k << "=" << v << "\n";
      os << "x,V,f1,f2,beta,alpha,region\n";
      for (double x : grid) {
        os << fmt17(x) << "," << fmt17(rep.value(x)) << ","
           << fmt17(x <= rep.z_star ? rep.f1_at(x) : num::kNaN) << ","
           << fmt17(x >= rep.y_star ? rep.f2_at(x) : num::kNaN) << ","
           << fmt17(x <= rep.z_star ? rep.beta_of(x) : num::kNaN) << ","
           << fmt17(x >= rep.y_star ? rep.alpha_of(x) : num::kNaN) << ","
           << region(x) << "\n";
      }
    }
  }
  write_text(opt, os.str());
  return 0;
}

int cmd_verify(const Options& opt) {
  ProblemConfig cfg = load(opt);
  Model model = build_model(cfg);
  Payoff payoff = build_payoff(cfg, model);
  json checks = json::array();
  bool all_pass = true;
  auto record = [&](const std::string& name, const std::string& status,
                    double observed, double bound) {
    checks.push_back({{"check", name},
                      {"status", status},
                      {"observed", observed},
                      {"bound", bound}});
    if (status == "fail") all_pass = false;
  };

  if (cfg.solver.mode == "one_sided") {
    OneSidedConfig sc;
    sc.x_lo = cfg.solver.x_lo;
    sc.x_hi = cfg.solver.x_hi;
    auto rep = solve_one_sided(payoff, model, sc);
    // expected-supremum quadrature vs threshold value on a grid
    double worst = 0.0;
    for (double x : num::geomspace(std::max(rep.y_star / 10.0, 1e-6),
                                   std::min(3.0 * rep.y_star, rep.x_hi), 50)) {
      double v = rep.value(x), jq = j_value(rep, x);
      worst = std::max(worst, std::abs(jq - v) / std::max(1e-12, std::abs(v)));
    }
    record("quadrature_identity", worst <= 1e-5 ? "pass" : "fail", worst, 1e-5);
    // Monte Carlo expected supremum vs the solved value at x0
    PathSimConfig pc = build_sim_config(cfg);
    double ys = rep.y_star;
    auto fh = rep.f_hat;
    auto est = simulate_expected_sup(
        fh, [ys](double s) { return s >= ys; }, model, cfg.x0, pc, nullptr,
        &fh);
    double v0 = rep.value(cfg.x0);
    double dev = std::abs(est.estimate - v0);
    if (3.0 * est.std_error > 0.2 * std::max(std::abs(v0), 0.1))
      record("monte_carlo_value", "inconclusive (s.e. too large)", dev,
             3.0 * est.std_error);
    else
      record("monte_carlo_value", dev <= 3.0 * est.std_error ? "pass" : "fail",
             dev, 3.0 * est.std_error);
    // monotone representation diagnostic
    record("representation_monotone",
           rep.monotone_on_stop_region ? "pass" : "fail",
           rep.monotone_on_stop_region ? 1.0 : 0.0, 1.0);
  } else {
    TwoSidedConfig sc;
    sc.z_lo = cfg.solver.z_lo;
    sc.y_hi = cfg.solver.y_hi;
    sc.a_trunc = cfg.solver.a_trunc;
    sc.beta_nodes = cfg.solver.beta_nodes;
    sc.check_dual_formulas = cfg.solver.check_dual_formulas;
    auto rep = solve_two_sided(payoff, model, sc);
    record("dual_formula_agreement",
           cfg.solver.check_dual_formulas && rep.smooth_fit_upper
               ? "pass"
               : "skipped",
           0.0, 1e-6);
    double worst = 0.0;
    for (double x :
         num::geomspace(std::max(rep.z_star / 4.0, 1e-6), 1.2 * rep.zeta, 50)) {
      double v = rep.value(x), jq = j_value_two_sided(rep, x);
      worst = std::max(worst, std::abs(jq - v) / std::max(1e-12, std::abs(v)));
    }
    record("quadrature_identity", worst <= 1e-5 ? "pass" : "fail", worst, 1e-5);
    PathSimConfig pc = build_sim_config(cfg);
    double zs = rep.z_star, ys = rep.y_star;
    auto in_region = [zs, ys](double s) { return s <= zs || s >= ys; };
    auto fsig = [&rep, zs](double s) {
      return s <= zs ? rep.f1_at(s) : rep.f2_at(s);
    };
    std::function<double(double)> flo = [&rep](double s) { return rep.f1_at(s); };
    std::function<double(double)> fup = [&rep](double s) { return rep.f2_at(s); };
    auto est = simulate_expected_sup(fsig, in_region, model, cfg.x0, pc, &flo,
                                     &fup);
    double v0 = rep.value(cfg.x0);
    double dev = std::abs(est.estimate - v0);
    if (3.0 * est.std_error > 0.2 * std::max(std::abs(v0), 0.1))
      record("monte_carlo_value", "inconclusive (s.e. too large)", dev,
             3.0 * est.std_error);
    else
      record("monte_carlo_value", dev <= 3.0 * est.std_error ? "pass" : "fail",
             dev, 3.0 * est.std_error);
    // stopping signal equals the representation function on the stop region
    if (rep.smooth_fit_upper) {
      double worst_sig = 0.0;
      TwoSidedConfig scs = sc;
      for (double x : num::linspace(rep.y_star * 1.02, rep.zeta * 1.3, 5)) {
        double gamma = stopping_signal(payoff, model, x, scs);
        double f = rep.f2_at(x);
        worst_sig = std::max(worst_sig,
                             std::abs(gamma - f) / std::max(1.0, std::abs(f)));
      }
      record("stopping_signal", worst_sig <= 1e-4 ? "pass" : "fail", worst_sig,
             1e-4);
    }
  }

  // extremal-law validation when exact paths are available
  if (cfg.simulation.scheme == "exact_gbm" && !cfg.probes.empty()) {
    PathSimConfig pc = build_sim_config(cfg);
    auto law = empirical_law_check(model, cfg.x0, cfg.probes, pc);
    record("extremal_laws", law.all_within_bounds ? "pass" : "fail",
           law.all_within_bounds ? 1.0 : 0.0, 1.0);
  }

  json out = {{"all_pass", all_pass}, {"checks", checks}};
  write_text(opt, out.dump(2) + "\n");
  return all_pass ? 0 : 1;
}

int cmd_laws(const Options& opt) {
  ProblemConfig cfg = load(opt);
  Model model = build_model(cfg);
  PathSimConfig pc = build_sim_config(cfg);
  LawReport rep = empirical_law_check(model, cfg.x0, cfg.probes, pc);
  std::ostringstream os;
  if (cfg.output.format == "json") {
    json rows = json::array();
    for (const auto& p : rep.probes) {
      json row = {{"i", p.probe.i}, {"m", p.probe.m}, {"valid", p.valid}};
      if (!p.valid) {
        row["reason"] = p.reason;
      } else {
        row["joint"] = p.model_joint;
        row["sup"] = p.model_sup;
        row["inf"] = p.model_inf;
        row["empirical_joint"] = p.empirical_joint;
        row["empirical_sup"] = p.empirical_sup;
        row["empirical_inf"] = p.empirical_inf;
        row["se_joint"] = p.se_joint;
        row["se_sup"] = p.se_sup;
        row["se_inf"] = p.se_inf;
        row["within_bounds"] = p.within_bounds;
      }
      rows.push_back(row);
    }
    os << json{{"n_paths", rep.n_paths},
               {"all_within_bounds", rep.all_within_bounds},
               {"rows", rows}}
              .dump(2)
       << "\n";
  } else {
    os << "i,m,valid,joint,sup,inf,empirical_joint,empirical_sup,"
          "empirical_inf,se_joint,se_sup,se_inf,within_bounds,reason\n";
    for (const auto& p : rep.probes) {
      os << fmt17(p.probe.i) << "," << fmt17(p.probe.m) << ","
         << (p.valid ? 1 : 0) << ",";
      if (p.valid)
        os << fmt17(p.model_joint) << "," << fmt17(p.model_sup) << ","
           << fmt17(p.model_inf) << "," << fmt17(p.empirical_joint) << ","
           << fmt17(p.empirical_sup) << "," << fmt17(p.empirical_inf) << ","
           << fmt17(p.se_joint) << "," << fmt17(p.se_sup) << ","
           << fmt17(p.se_inf) << "," << (p.within_bounds ? 1 : 0) << ",\n";
      else
        os << ",,,,,,,,,," << p.reason << "\n";
    }
  }
  write_text(opt, os.str());
  return 0;
}

int cmd_emit_default(const Options& opt) {
  write_text(opt, to_json(default_problem_config()).dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"expected-supremum representations of optimal stopping values"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* c = cmd->add_option("--config", opt.config_path, "config file path");
    if (needs_config) c->required();
    cmd->add_option("--out", opt.out_path, "output path (default stdout)");
    cmd->add_option("--format", opt.format, "csv or json");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& v) { opt.seed = v; },
        "override simulation seed");
    cmd->add_option_function<int>(
        "--threads", [&](const int& v) { opt.threads = v; },
        "override thread count");
  };

  auto* solve = app.add_subcommand("solve", "solve and tabulate");
  auto* verify = app.add_subcommand("verify", "run the verification battery");
  auto* laws = app.add_subcommand("laws", "tabulate extremal laws at probes");
  auto* emit =
      app.add_subcommand("emit-default-config", "print a default config");
  add_common(solve, true);
  add_common(verify, true);
  add_common(laws, true);
  add_common(emit, false);

  CLI11_PARSE(app, argc, argv);
  try {
    if (solve->parsed()) return cmd_solve(opt);
    if (verify->parsed()) return cmd_verify(opt);
    if (laws->parsed()) return cmd_laws(opt);
    return cmd_emit_default(opt);
  } catch (const ConfigError& e) {
    std::cerr << nlohmann::json{{"error", "config"}, {"what", e.what()}}.dump()
              << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", "numeric"}, {"what", e.what()}}.dump()
              << "\n";
    return 3;
  }
}
