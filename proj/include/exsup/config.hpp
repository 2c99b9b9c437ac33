#pragma once

// Problem configuration: strict JSON schema (unknown keys rejected) mapping
// onto model, payoff, solver, simulation, and output settings.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "exsup/law_sim.hpp"
#include "exsup/payoff.hpp"

namespace exsup {

struct DiffusionConfig {
  std::string kind = "gbm";  // gbm | logistic
  double mu = 0.0;
  double sigma = 1.0;
  double r = 2.0;
  double gamma = 1.0;  // logistic only
  double anchor = 1.0;
};

struct PayoffConfig {
  std::string kind = "capped_call";
  double strike = 3.0;
  double cap = 2.0;        // capped_call / capped_straddle
  double cap_lower = 1.0;  // asym_capped_straddle
  double cap_upper = 3.0;
  double floor_level = 1.0;  // max_with_floor
  // resolvent of pi(x) = (sum_k poly[k] x^k) exp(-exp_rate x) + constant
  std::vector<double> poly;
  double exp_rate = 1.0;
  double constant = 0.0;
};

struct SolverConfig {
  std::string mode = "one_sided";  // one_sided | two_sided
  double x_lo = std::numeric_limits<double>::quiet_NaN();
  double x_hi = std::numeric_limits<double>::quiet_NaN();
  double z_lo = std::numeric_limits<double>::quiet_NaN();
  double y_hi = std::numeric_limits<double>::quiet_NaN();
  double a_trunc = std::numeric_limits<double>::quiet_NaN();
  int grid_nodes = 400;
  int beta_nodes = 200;
  double root_tol = 1e-12;
  bool check_dual_formulas = true;
};

struct SimulationConfig {
  std::string scheme = "exact_gbm";  // exact_gbm | euler
  double dt = 1e-3;
  std::int64_t n_paths = 100000;
  std::uint64_t seed = 1;
  bool antithetic = false;
  int threads = 1;
};

struct OutputConfig {
  std::string format = "csv";  // csv | json
  double grid_lo = std::numeric_limits<double>::quiet_NaN();
  double grid_hi = std::numeric_limits<double>::quiet_NaN();
  int grid_nodes = 50;
};

struct ProblemConfig {
  DiffusionConfig diffusion;
  PayoffConfig payoff;
  SolverConfig solver;
  SimulationConfig simulation;
  OutputConfig output;
  double x0 = 1.0;                 // evaluation point for verify / simulate
  std::vector<LawProbe> probes;    // for the laws command
};

// Strict parsing: any key outside the schema raises ConfigError.
ProblemConfig parse_config(const nlohmann::json& j);
ProblemConfig load_config(const std::string& path);
nlohmann::json to_json(const ProblemConfig& cfg);
ProblemConfig default_problem_config();

Model build_model(const ProblemConfig& cfg);
Payoff build_payoff(const ProblemConfig& cfg, const Model& model);
PathSimConfig build_sim_config(const ProblemConfig& cfg);

}  // namespace exsup
