#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "exsup/config.hpp"

using namespace exsup;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

// run the CLI, capture exit code and stdout
int run_cli(const std::string& args, std::string* out = nullptr) {
  std::string out_path = "/tmp/exsup_cli_test_out.txt";
  std::string cmd = std::string(EXSUP_CLI_PATH) + " " + args + " > " +
                    out_path + " 2>/dev/null";
  int rc = std::system(cmd.c_str());
  if (out) *out = slurp(out_path);
  return WEXITSTATUS(rc);
}

json testbed_config() {
  ProblemConfig cfg = default_problem_config();
  cfg.diffusion.mu = 0.15;
  cfg.diffusion.sigma = std::sqrt(0.1);
  cfg.diffusion.r = 0.4;
  cfg.simulation.n_paths = 20000;
  cfg.simulation.dt = 0.1;
  return to_json(cfg);
}

}  // namespace

TEST_CASE("config: default round-trips through JSON") {
  ProblemConfig cfg = default_problem_config();
  json j = to_json(cfg);
  ProblemConfig back = parse_config(j);
  CHECK(to_json(back) == j);
}

TEST_CASE("config: unknown keys are rejected everywhere") {
  json j = testbed_config();
  j["extra"] = 1;
  CHECK_THROWS_AS((void)parse_config(j), ConfigError);
  j.erase("extra");
  j["solver"]["tolerence"] = 1e-9;  // typo must not pass silently
  CHECK_THROWS_AS((void)parse_config(j), ConfigError);
}

TEST_CASE("config: invalid enumerations and values") {
  json j = testbed_config();
  j["payoff"]["kind"] = "lookback";
  CHECK_THROWS_AS((void)parse_config(j), ConfigError);
  j = testbed_config();
  j["diffusion"]["kind"] = "heston";
  CHECK_THROWS_AS((void)parse_config(j), ConfigError);
  j = testbed_config();
  j["simulation"]["dt"] = -1.0;
  CHECK_THROWS_AS((void)parse_config(j), ConfigError);
  j = testbed_config();
  j["solver"]["mode"] = "three_sided";
  CHECK_THROWS_AS((void)parse_config(j), ConfigError);
}

TEST_CASE("config: null means automatic for truncation fields") {
  json j = testbed_config();
  j["solver"]["x_hi"] = nullptr;
  ProblemConfig cfg = parse_config(j);
  CHECK(std::isnan(cfg.solver.x_hi));
  j["solver"]["x_hi"] = 25.0;
  cfg = parse_config(j);
  CHECK(cfg.solver.x_hi == 25.0);
}

TEST_CASE("config: builders produce working objects") {
  ProblemConfig cfg = parse_config(testbed_config());
  Model m = build_model(cfg);
  CHECK(m.pair.psi(2.0) == doctest::Approx(4.0).epsilon(1e-12));
  Payoff p = build_payoff(cfg, m);
  CHECK(p.g(4.0) == doctest::Approx(1.0));  // capped call, K=3, C=2
  PathSimConfig sc = build_sim_config(cfg);
  CHECK(sc.n_paths == 20000);
}

TEST_CASE("cli: emit-default-config round-trips") {
  std::string out;
  CHECK(run_cli("emit-default-config", &out) == 0);
  ProblemConfig cfg = parse_config(json::parse(out));
  CHECK(cfg.payoff.kind == "capped_call");
}

TEST_CASE("cli: solve writes the corner summary and tabulation") {
  spit("/tmp/exsup_cfg_solve.json", testbed_config().dump());
  std::string out;
  CHECK(run_cli("solve --config /tmp/exsup_cfg_solve.json --format csv",
                &out) == 0);
  CHECK(out.find("# y_star=5") != std::string::npos);
  CHECK(out.find("# smooth_fit=false") != std::string::npos);
  CHECK(out.find("x,V,f_hat,region") != std::string::npos);
}

TEST_CASE("cli: malformed config exits 2 and writes nothing") {
  json j = testbed_config();
  j["payoff"]["kind"] = "lookback";
  spit("/tmp/exsup_cfg_bad.json", j.dump());
  std::string out;
  CHECK(run_cli("solve --config /tmp/exsup_cfg_bad.json --out /tmp/exsup_should_not_exist.csv",
                &out) == 2);
  std::ifstream probe("/tmp/exsup_should_not_exist.csv");
  CHECK_FALSE(probe.good());
  CHECK(run_cli("solve --config /tmp/no_such_file.json", &out) == 2);
}

TEST_CASE("cli: laws command tabulates the closed-form CDFs") {
  json j = testbed_config();
  j["x0"] = 1.0;
  j["probes"] = json::array({{{"i", 0.5}, {"m", 2.0}},
                             {{"i", 3.0}, {"m", 4.0}}});  // second invalid
  j["simulation"]["n_paths"] = 5000;
  spit("/tmp/exsup_cfg_laws.json", j.dump());
  std::string out;
  CHECK(run_cli("laws --config /tmp/exsup_cfg_laws.json --format json",
                &out) == 0);
  json rep = json::parse(out);
  REQUIRE(rep["rows"].size() == 2);
  CHECK(rep["rows"][0]["sup"].get<double>() == doctest::Approx(0.75));
  CHECK_FALSE(rep["rows"][1]["valid"].get<bool>());
}

TEST_CASE("cli: verify passes on the capped call") {
  json j = testbed_config();
  j["x0"] = 4.0;
  spit("/tmp/exsup_cfg_verify.json", j.dump());
  std::string out;
  CHECK(run_cli("verify --config /tmp/exsup_cfg_verify.json --seed 12",
                &out) == 0);
  json rep = json::parse(out);
  CHECK(rep["all_pass"].get<bool>());
}

TEST_CASE("cli: tiny sample sizes report inconclusive, not failure") {
  json j = testbed_config();
  j["x0"] = 4.0;
  j["simulation"]["n_paths"] = 100;
  spit("/tmp/exsup_cfg_small.json", j.dump());
  std::string out;
  CHECK(run_cli("verify --config /tmp/exsup_cfg_small.json", &out) == 0);
  CHECK(out.find("inconclusive") != std::string::npos);
}
