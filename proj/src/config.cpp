#include "exsup/config.hpp"

#include <cmath>
#include <fstream>

#include "exsup/functionals.hpp"

namespace exsup {
namespace {

using nlohmann::json;

void require_keys(const json& j, const char* section,
                  std::initializer_list<const char*> allowed) {
  if (!j.is_object())
    throw ConfigError(std::string(section) + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok)
      throw ConfigError("unknown key '" + it.key() + "' in " + section);
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for '" + std::string(key) + "': " + e.what());
  }
}

void read_maybe_nan(const json& j, const char* key, double& out) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    out = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  read(j, key, out);
}

json nan_to_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace

ProblemConfig parse_config(const json& j) {
  require_keys(j, "config root",
               {"diffusion", "payoff", "solver", "simulation", "output", "x0",
                "probes"});
  ProblemConfig cfg;
  if (j.contains("diffusion")) {
    const json& d = j.at("diffusion");
    require_keys(d, "diffusion", {"kind", "mu", "sigma", "r", "gamma", "anchor"});
    read(d, "kind", cfg.diffusion.kind);
    read(d, "mu", cfg.diffusion.mu);
    read(d, "sigma", cfg.diffusion.sigma);
    read(d, "r", cfg.diffusion.r);
    read(d, "gamma", cfg.diffusion.gamma);
    read(d, "anchor", cfg.diffusion.anchor);
    if (cfg.diffusion.kind != "gbm" && cfg.diffusion.kind != "logistic")
      throw ConfigError("unknown diffusion kind '" + cfg.diffusion.kind + "'");
  }
  if (j.contains("payoff")) {
    const json& p = j.at("payoff");
    require_keys(p, "payoff",
                 {"kind", "strike", "cap", "cap_lower", "cap_upper",
                  "floor_level", "poly", "exp_rate", "constant"});
    read(p, "kind", cfg.payoff.kind);
    read(p, "strike", cfg.payoff.strike);
    read(p, "cap", cfg.payoff.cap);
    read(p, "cap_lower", cfg.payoff.cap_lower);
    read(p, "cap_upper", cfg.payoff.cap_upper);
    read(p, "floor_level", cfg.payoff.floor_level);
    read(p, "poly", cfg.payoff.poly);
    read(p, "exp_rate", cfg.payoff.exp_rate);
    read(p, "constant", cfg.payoff.constant);
    static const char* kinds[] = {"call",          "capped_call",
                                  "straddle",      "capped_straddle",
                                  "asym_capped_straddle", "max_with_floor",
                                  "resolvent"};
    bool ok = false;
    for (const char* k : kinds) ok = ok || cfg.payoff.kind == k;
    if (!ok) throw ConfigError("unknown payoff kind '" + cfg.payoff.kind + "'");
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    require_keys(s, "solver",
                 {"mode", "x_lo", "x_hi", "z_lo", "y_hi", "a_trunc",
                  "grid_nodes", "beta_nodes", "root_tol",
                  "check_dual_formulas"});
    read(s, "mode", cfg.solver.mode);
    read_maybe_nan(s, "x_lo", cfg.solver.x_lo);
    read_maybe_nan(s, "x_hi", cfg.solver.x_hi);
    read_maybe_nan(s, "z_lo", cfg.solver.z_lo);
    read_maybe_nan(s, "y_hi", cfg.solver.y_hi);
    read_maybe_nan(s, "a_trunc", cfg.solver.a_trunc);
    read(s, "grid_nodes", cfg.solver.grid_nodes);
    read(s, "beta_nodes", cfg.solver.beta_nodes);
    read(s, "root_tol", cfg.solver.root_tol);
    read(s, "check_dual_formulas", cfg.solver.check_dual_formulas);
    if (cfg.solver.mode != "one_sided" && cfg.solver.mode != "two_sided")
      throw ConfigError("unknown solver mode '" + cfg.solver.mode + "'");
  }
  if (j.contains("simulation")) {
    const json& s = j.at("simulation");
    require_keys(s, "simulation",
                 {"scheme", "dt", "n_paths", "seed", "antithetic", "threads"});
    read(s, "scheme", cfg.simulation.scheme);
    read(s, "dt", cfg.simulation.dt);
    read(s, "n_paths", cfg.simulation.n_paths);
    read(s, "seed", cfg.simulation.seed);
    read(s, "antithetic", cfg.simulation.antithetic);
    read(s, "threads", cfg.simulation.threads);
    if (cfg.simulation.scheme != "exact_gbm" && cfg.simulation.scheme != "euler")
      throw ConfigError("unknown scheme '" + cfg.simulation.scheme + "'");
    if (!(cfg.simulation.dt > 0.0)) throw ConfigError("dt must be positive");
    if (cfg.simulation.n_paths < 1) throw ConfigError("n_paths must be >= 1");
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    require_keys(o, "output", {"format", "grid_lo", "grid_hi", "grid_nodes"});
    read(o, "format", cfg.output.format);
    read_maybe_nan(o, "grid_lo", cfg.output.grid_lo);
    read_maybe_nan(o, "grid_hi", cfg.output.grid_hi);
    read(o, "grid_nodes", cfg.output.grid_nodes);
    if (cfg.output.format != "csv" && cfg.output.format != "json")
      throw ConfigError("output format must be csv or json");
    if (cfg.output.grid_nodes < 2) throw ConfigError("grid_nodes must be >= 2");
  }
  read(j, "x0", cfg.x0);
  if (j.contains("probes")) {
    const json& ps = j.at("probes");
    if (!ps.is_array()) throw ConfigError("probes must be an array");
    for (const json& p : ps) {
      require_keys(p, "probe", {"i", "m"});
      LawProbe probe;
      read(p, "i", probe.i);
      read(p, "m", probe.m);
      cfg.probes.push_back(probe);
    }
  }
  return cfg;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(j);
}

json to_json(const ProblemConfig& cfg) {
  json j;
  j["diffusion"] = {{"kind", cfg.diffusion.kind},   {"mu", cfg.diffusion.mu},
                    {"sigma", cfg.diffusion.sigma}, {"r", cfg.diffusion.r},
                    {"gamma", cfg.diffusion.gamma},
                    {"anchor", cfg.diffusion.anchor}};
  j["payoff"] = {{"kind", cfg.payoff.kind},
                 {"strike", cfg.payoff.strike},
                 {"cap", cfg.payoff.cap},
                 {"cap_lower", cfg.payoff.cap_lower},
                 {"cap_upper", cfg.payoff.cap_upper},
                 {"floor_level", cfg.payoff.floor_level},
                 {"poly", cfg.payoff.poly},
                 {"exp_rate", cfg.payoff.exp_rate},
                 {"constant", cfg.payoff.constant}};
  j["solver"] = {{"mode", cfg.solver.mode},
                 {"x_lo", nan_to_null(cfg.solver.x_lo)},
                 {"x_hi", nan_to_null(cfg.solver.x_hi)},
                 {"z_lo", nan_to_null(cfg.solver.z_lo)},
                 {"y_hi", nan_to_null(cfg.solver.y_hi)},
                 {"a_trunc", nan_to_null(cfg.solver.a_trunc)},
                 {"grid_nodes", cfg.solver.grid_nodes},
                 {"beta_nodes", cfg.solver.beta_nodes},
                 {"root_tol", cfg.solver.root_tol},
                 {"check_dual_formulas", cfg.solver.check_dual_formulas}};
  j["simulation"] = {{"scheme", cfg.simulation.scheme},
                     {"dt", cfg.simulation.dt},
                     {"n_paths", cfg.simulation.n_paths},
                     {"seed", cfg.simulation.seed},
                     {"antithetic", cfg.simulation.antithetic},
                     {"threads", cfg.simulation.threads}};
  j["output"] = {{"format", cfg.output.format},
                 {"grid_lo", nan_to_null(cfg.output.grid_lo)},
                 {"grid_hi", nan_to_null(cfg.output.grid_hi)},
                 {"grid_nodes", cfg.output.grid_nodes}};
  j["x0"] = cfg.x0;
  json probes = json::array();
  for (const LawProbe& p : cfg.probes) probes.push_back({{"i", p.i}, {"m", p.m}});
  j["probes"] = probes;
  return j;
}

ProblemConfig default_problem_config() {
  ProblemConfig cfg;
  cfg.x0 = 4.0;
  cfg.probes = {{1.0, 4.0}, {1.5, 3.0}};
  return cfg;
}

Model build_model(const ProblemConfig& cfg) {
  const DiffusionConfig& d = cfg.diffusion;
  if (d.kind == "gbm") return make_gbm_model(d.mu, d.sigma, d.r, d.anchor);
  return make_logistic_model(d.mu, d.gamma, d.sigma, d.r, d.anchor);
}

Payoff build_payoff(const ProblemConfig& cfg, const Model& model) {
  const PayoffConfig& p = cfg.payoff;
  if (p.kind == "call") return make_call(p.strike);
  if (p.kind == "capped_call") return make_capped_call(p.strike, p.cap);
  if (p.kind == "straddle") return make_straddle(p.strike);
  if (p.kind == "capped_straddle")
    return make_capped_straddle(p.strike, p.cap);
  if (p.kind == "asym_capped_straddle")
    return make_asym_capped_straddle(p.strike, p.cap_lower, p.cap_upper);
  if (p.kind == "max_with_floor") return make_max_with_floor(p.floor_level);
  // resolvent
  std::vector<double> poly = p.poly;
  double lam = p.exp_rate, c0 = p.constant;
  auto pi = [poly, lam, c0](double x) {
    double s = 0.0;
    for (std::size_t k = poly.size(); k-- > 0;) s = s * x + poly[k];
    return s * std::exp(-lam * x) + c0;
  };
  return make_resolvent_payoff(pi, model);
}

PathSimConfig build_sim_config(const ProblemConfig& cfg) {
  PathSimConfig sc;
  sc.scheme = cfg.simulation.scheme == "exact_gbm" ? Scheme::ExactGBM
                                                   : Scheme::EulerMaruyama;
  sc.dt = cfg.simulation.dt;
  sc.n_paths = cfg.simulation.n_paths;
  sc.seed = cfg.simulation.seed;
  sc.antithetic = cfg.simulation.antithetic;
  sc.n_threads = cfg.simulation.threads;
  return sc;
}

}  // namespace exsup
