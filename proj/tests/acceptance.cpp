// Acceptance battery: one line per criterion, pinned tolerances.
// Exit code = number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "exsup/law_sim.hpp"
#include "exsup/numerics.hpp"
#include "exsup/one_sided.hpp"
#include "exsup/tabulated_curve.hpp"
#include "exsup/two_sided.hpp"

using namespace exsup;

namespace {

int failures = 0;

void report(int n, bool ok, const std::string& what) {
  std::printf("[%s] criterion %2d: %s\n", ok ? "PASS" : "FAIL", n, what.c_str());
  if (!ok) ++failures;
}

std::string fmtnum(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

Model testbed() { return make_gbm_model(0.15, std::sqrt(0.1), 0.4); }

bool j_equals_v_two_sided(const RepresentationTwoSided& rep, double* worst) {
  *worst = 0.0;
  for (double x :
       num::geomspace(rep.z_star / 4.0, 1.3 * rep.zeta, 50)) {
    double v = rep.value(x);
    double rel = std::abs(j_value_two_sided(rep, x) - v) /
                 std::max(1e-12, std::abs(v));
    *worst = std::max(*worst, rel);
  }
  return *worst <= 1e-5;
}

bool j_equals_v_one_sided(const RepresentationOneSided& rep, double* worst) {
  *worst = 0.0;
  for (double x : num::geomspace(rep.y_star / 10.0, 3.0 * rep.y_star, 50)) {
    double v = rep.value(x);
    double rel =
        std::abs(j_value(rep, x) - v) / std::max(1e-12, std::abs(v));
    *worst = std::max(*worst, rel);
  }
  return *worst <= 1e-5;
}

// explicit optimum for g = x v c from the power-pair exponents
void floor_payoff_closed_form(double kp, double km, double c, double* z,
                              double* y) {
  double ly = (km * std::log(c * km / (km - 1.0)) -
               kp * std::log(c * kp / (kp - 1.0))) /
              (km - kp);
  *y = std::exp(ly);
  *z = std::pow(c * kp / ((kp - 1.0) * std::pow(*y, 1.0 - km)), 1.0 / km);
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;

  // ---- 1: logistic two-sided thresholds -------------------------------
  RepresentationTwoSided logi_rep;
  Model logi = make_logistic_model(0.07, 0.5, 0.1, 0.035);
  Payoff logi_pay = make_max_with_floor(1.0);
  {
    auto t0 = clock::now();
    bool ok = false;
    std::string what = "logistic floor payoff thresholds";
    try {
      logi_rep = solve_two_sided(logi_pay, logi);
      double secs = std::chrono::duration<double>(clock::now() - t0).count();
      ok = std::abs(logi_rep.z_star - 0.8889) <= 1e-3 &&
           std::abs(logi_rep.y_star - 1.2242) <= 1e-3 &&
           std::abs(logi_rep.zeta - 1.9444) <= 1e-3 && secs < 60.0;
      what += ": (z*, y*, zeta) = (" + fmtnum(logi_rep.z_star) + ", " +
              fmtnum(logi_rep.y_star) + ", " + fmtnum(logi_rep.zeta) + ") in " +
              fmtnum(secs) + " s";
    } catch (const std::exception& e) {
      what += std::string(": threw ") + e.what();
    }
    report(1, ok, what);
  }

  // ---- 2: GBM floor payoff closed forms --------------------------------
  RepresentationTwoSided floor_rep;  // kept for later criteria
  {
    bool ok = true;
    std::string what = "floor payoff matches the explicit power-pair solution";
    try {
      struct Case {
        Model model;
        double kp, km;
      };
      std::vector<Case> cases;
      cases.push_back({testbed(), 2.0, -4.0});
      cases.push_back({make_gbm_model(1.25, 1.0, 0.5 * 1.6085 * 3.1085),
                       1.6085, -3.1085});
      Payoff pay = make_max_with_floor(1.0);
      for (std::size_t k = 0; k < cases.size(); ++k) {
        auto rep = solve_two_sided(pay, cases[k].model);
        if (k == 0) floor_rep = rep;
        double z_ref, y_ref;
        floor_payoff_closed_form(cases[k].kp, cases[k].km, 1.0, &z_ref, &y_ref);
        double ez = std::abs(rep.z_star - z_ref) / z_ref;
        double ey = std::abs(rep.y_star - y_ref) / y_ref;
        ok = ok && ez <= 1e-8 && ey <= 1e-8;
        what += " | (" + fmtnum(cases[k].kp) + "," + fmtnum(cases[k].km) +
                "): rel err (" + fmtnum(ez) + ", " + fmtnum(ey) + ")";
      }
    } catch (const std::exception& e) {
      ok = false;
      what += std::string(": threw ") + e.what();
    }
    report(2, ok, what);
  }

  // ---- 3: asymmetric capped straddle ------------------------------------
  RepresentationTwoSided asym_rep;
  {
    bool ok = false;
    std::string what = "asymmetric capped straddle";
    try {
      asym_rep = solve_two_sided(make_asym_capped_straddle(5.0, 1.0, 3.0),
                                 testbed());
      double worst_f1 = 0.0;
      for (double x : num::geomspace(0.05, asym_rep.z_star, 40)) {
        double x6 = std::pow(x, 6.0);
        double ref = (x6 / 2048.0 - 18.0 * x * x + 256.0) /
                     (x6 / 2048.0 - 6.0 * x * x + 256.0);
        worst_f1 = std::max(worst_f1, std::abs(asym_rep.f1_at(x) - ref) /
                                          std::max(1e-3, std::abs(ref)));
      }
      double worst_f2 = 0.0;
      for (double m : num::geomspace(8.0, 30.0, 20))
        worst_f2 = std::max(worst_f2, std::abs(asym_rep.f2_at(m) - 3.0));
      ok = worst_f1 <= 1e-5 && worst_f2 <= 1e-9 &&
           std::abs(asym_rep.z_star - 3.78) <= 0.01 && asym_rep.y_star == 8.0;
      what += ": z* = " + fmtnum(asym_rep.z_star) + ", corner y* = " +
              fmtnum(asym_rep.y_star) + ", f1 rel err " + fmtnum(worst_f1) +
              ", |f2 - 3| " + fmtnum(worst_f2);
    } catch (const std::exception& e) {
      what += std::string(": threw ") + e.what();
    }
    report(3, ok, what);
  }

  // ---- 4: symmetric capped straddle -------------------------------------
  RepresentationTwoSided sym_rep;
  {
    bool ok = false;
    std::string what = "symmetric capped straddle";
    try {
      sym_rep = solve_two_sided(make_capped_straddle(5.0, 2.0), testbed());
      ok = std::abs(sym_rep.z_star - 3.33) <= 0.01 && sym_rep.y_star == 7.0;
      what += ": z* = " + fmtnum(sym_rep.z_star) + " (target 3.33 +- 0.01), y* = " +
              fmtnum(sym_rep.y_star);
    } catch (const std::exception& e) {
      what += std::string(": threw ") + e.what();
    }
    report(4, ok, what);
  }

  // ---- 5: capped call corner + Monte Carlo ------------------------------
  RepresentationOneSided capped_rep;
  {
    bool ok = false;
    std::string what = "capped call corner threshold";
    try {
      Model m = testbed();
      Payoff p = make_capped_call(3.0, 2.0);
      capped_rep = solve_one_sided(p, m);
      PathSimConfig cfg;
      cfg.n_paths = 100000;
      cfg.dt = 0.1;
      cfg.seed = 2026;
      cfg.n_threads = 4;
      auto fh = capped_rep.f_hat;
      auto est = simulate_expected_sup(
          fh, [](double s) { return s >= 5.0; }, m, 4.0, cfg);
      double mc_dev = std::abs(est.estimate - 1.28);
      ok = capped_rep.y_star == 5.0 && !capped_rep.smooth_fit &&
           capped_rep.jump_at_boundary == 2.0 &&
           std::abs(capped_rep.value(4.0) - 1.28) < 1e-12 &&
           mc_dev <= 3.0 * est.std_error;
      what += ": y* = " + fmtnum(capped_rep.y_star) + ", jump " +
              fmtnum(capped_rep.jump_at_boundary) + ", V(4) = " +
              fmtnum(capped_rep.value(4.0)) + ", MC " + fmtnum(est.estimate) +
              " +- " + fmtnum(est.std_error);
    } catch (const std::exception& e) {
      what += std::string(": threw ") + e.what();
    }
    report(5, ok, what);
  }

  // ---- 6: expected-supremum quadrature equals the value everywhere ------
  RepresentationOneSided resolvent_rep;
  Model resolvent_model = testbed();
  Payoff resolvent_pay = make_resolvent_payoff(
      [](double x) { return (std::pow(x, 5.0) - 2.0) * std::exp(-x) + 1.0; },
      resolvent_model);
  {
    bool ok = true;
    std::string what = "quadrature identity on every solved example, worst rel:";
    try {
      double w;
      ok = j_equals_v_two_sided(logi_rep, &w) && ok;
      what += " logistic " + fmtnum(w);
      ok = j_equals_v_two_sided(floor_rep, &w) && ok;
      what += ", floor " + fmtnum(w);
      ok = j_equals_v_two_sided(asym_rep, &w) && ok;
      what += ", asym " + fmtnum(w);
      ok = j_equals_v_two_sided(sym_rep, &w) && ok;
      what += ", sym " + fmtnum(w);
      ok = j_equals_v_one_sided(capped_rep, &w) && ok;
      what += ", capped call " + fmtnum(w);
      resolvent_rep = solve_one_sided(resolvent_pay, resolvent_model);
      ok = j_equals_v_one_sided(resolvent_rep, &w) && ok;
      what += ", resolvent " + fmtnum(w);
    } catch (const std::exception& e) {
      ok = false;
      what += std::string(" threw ") + e.what();
    }
    report(6, ok, what);
  }

  // ---- 7: extremal laws vs bridge-corrected paths ------------------------
  {
    bool ok = false;
    std::string what = "extremal-law validation at 7 probes";
    try {
      PathSimConfig cfg;
      cfg.n_paths = 100000;
      cfg.dt = 0.1;
      cfg.seed = 515;
      cfg.n_threads = 4;
      std::vector<LawProbe> probes{{1.0, 4.0}, {1.5, 3.0}, {1.2, 2.5},
                                   {0.8, 5.0}, {1.8, 2.2}, {0.5, 3.5},
                                   {1.6, 6.0}};
      auto rep = empirical_law_check(testbed(), 2.0, probes, cfg);
      ok = rep.all_within_bounds;
      int n_ok = 0;
      for (const auto& p : rep.probes) n_ok += p.valid && p.within_bounds;
      what += ": " + std::to_string(n_ok) + "/" +
              std::to_string(rep.probes.size()) + " within 3 s.e.";
    } catch (const std::exception& e) {
      what += std::string(": threw ") + e.what();
    }
    report(7, ok, what);
  }

  // ---- 8: smooth-fit invariants ------------------------------------------
  {
    bool ok = false;
    std::string what = "smooth fit";
    try {
      Model m = testbed();
      auto call_rep = solve_one_sided(make_call(3.0), m);
      double a1 = std::abs(logi_rep.f1_at(logi_rep.z_star));
      double a2 = std::abs(logi_rep.f2_at(logi_rep.y_star));
      double b1 = std::abs(floor_rep.f1_at(floor_rep.z_star));
      double b2 = std::abs(floor_rep.f2_at(floor_rep.y_star));
      double c1 = std::abs(call_rep.f_hat(call_rep.y_star));
      ok = a1 < 1e-6 && a2 < 1e-6 && b1 < 1e-6 && b2 < 1e-6 && c1 < 1e-6;
      what += ": |f1(z*)|,|f2(y*)| logistic (" + fmtnum(a1) + ", " + fmtnum(a2) +
              "), floor (" + fmtnum(b1) + ", " + fmtnum(b2) + "), |f_hat(y*)| call " +
              fmtnum(c1);
    } catch (const std::exception& e) {
      what += std::string(": threw ") + e.what();
    }
    report(8, ok, what);
  }

  // ---- 9: stopping signal equals f on the stopping region ----------------
  {
    bool ok = false;
    std::string what = "stopping signal on the floor-payoff stop region";
    try {
      Model m = testbed();
      Payoff p = make_max_with_floor(1.0);
      double worst = 0.0;
      for (double x : num::geomspace(0.3, floor_rep.z_star * 0.999, 5)) {
        double g = stopping_signal(p, m, x);
        worst = std::max(worst, std::abs(g - floor_rep.f1_at(x)));
      }
      for (double x :
           num::linspace(floor_rep.y_star * 1.001, 1.9 * floor_rep.zeta, 5)) {
        double g = stopping_signal(p, m, x);
        worst = std::max(worst, std::abs(g - floor_rep.f2_at(x)));
      }
      ok = worst <= 1e-4;
      what += ": worst |gamma - f| = " + fmtnum(worst) + " at 10 points";
    } catch (const std::exception& e) {
      what += std::string(": threw ") + e.what();
    }
    report(9, ok, what);
  }

  // ---- 10: negative result for the non-monotone resolvent ---------------
  {
    bool ok = false;
    std::string what = "non-monotone resolvent counterexample";
    try {
      auto diag = diagnose_monotonicity(resolvent_pay, resolvent_model,
                                        resolvent_rep.y_star,
                                        resolvent_rep.x_hi);
      bool decreases = !diag.f_hat_nondecreasing &&
                       !resolvent_rep.monotone_on_stop_region;
      // cheap interpolant of f_hat on the stop region for the path sampler
      double ys = resolvent_rep.y_star;
      auto nodes = num::geomspace(ys, 40.0, 800);
      std::vector<double> vals;
      for (double t : nodes) vals.push_back(resolvent_rep.f_hat(t));
      TabulatedCurve fh(nodes, vals);
      auto f = [&fh, &nodes](double s) {
        return fh(std::min(std::max(s, nodes.front()), nodes.back()));
      };
      PathSimConfig cfg;
      cfg.n_paths = 100000;
      cfg.dt = 0.02;
      cfg.seed = 99;
      cfg.n_threads = 4;
      bool exceeds = false;
      double best_gap = -num::kInf;
      for (double x : {0.6 * ys, ys, 1.3 * ys}) {
        auto est = simulate_expected_sup(
            f, [ys](double s) { return s >= ys; }, resolvent_model, x, cfg);
        double gap = est.estimate - resolvent_rep.value(x) -
                     3.0 * est.std_error;
        best_gap = std::max(best_gap, gap);
        exceeds = exceeds || gap > 0.0;
      }
      double wq;
      bool jv = j_equals_v_one_sided(resolvent_rep, &wq);
      ok = decreases && exceeds && jv;
      what += ": diagnostic decrease " + std::string(decreases ? "yes" : "no") +
              ", MC excess beyond 3 s.e. " + fmtnum(best_gap) +
              ", quadrature identity rel " + fmtnum(wq);
    } catch (const std::exception& e) {
      what += std::string(": threw ") + e.what();
    }
    report(10, ok, what);
  }

  // ---- 11: property suites ------------------------------------------------
  {
    bool ok = false;
    std::string what = "property spot checks (full suites run under ctest)";
    try {
      Model m = testbed();
      bool wronskian = true;
      for (double x : {0.5, 1.0, 3.0}) {
        double B = (m.pair.psi_prime(x) * m.pair.phi(x) -
                    m.pair.phi_prime(x) * m.pair.psi(x)) /
                   m.scale.scale_density(x);
        wronskian = wronskian && std::abs(B - 6.0) < 1e-9;
      }
      Payoff p = make_capped_call(3.0, 2.0);
      bool increment =
          std::abs(l_increment(1.0, 0.0, p, m, 2.0, 6.0) + 5184.0) < 1e-6;
      // the z->y limit of the ratio is -(G_r g)(y)/r = -0.5 at y=4, and is
      // the same whichever harmonic function weights the increments
      double rz = 4.0, ry = 4.0 * (1.0 + 1e-6);
      double r_psi = ratio_r(p, m, rz, ry);
      auto l1_phi = [&](double x) {
        return m.pair.phi_prime(x) / m.scale.scale_density(x);
      };
      double r_phi = (l_functional(0.0, 1.0, p, m, rz, Side::Right) -
                      l_functional(0.0, 1.0, p, m, ry, Side::Right)) /
                     (l1_phi(rz) - l1_phi(ry));
      bool ratio = std::abs(r_psi + 0.5) < 1e-3 &&
                   std::abs(r_phi + 0.5) < 1e-3 &&
                   std::abs(r_psi - r_phi) < 1e-4;
      double i = 1.0, v = 4.0;
      auto psih = [&](double y) {
        return m.pair.psi(y) * m.pair.phi(i) - m.pair.psi(i) * m.pair.phi(y);
      };
      double lhs = m.r() * num::integrate(
                               [&](double y) {
                                 return psih(y) * m.scale.speed_density(y);
                               },
                               i, v);
      double rhs = (m.pair.psi_prime(v) * m.pair.phi(i) -
                    m.pair.psi(i) * m.pair.phi_prime(v)) /
                       m.scale.scale_density(v) -
                   m.pair.wronskian_B;
      bool lemma2 = std::abs(lhs - rhs) < 1e-8 * std::abs(rhs);
      auto scaled = solve_two_sided(make_max_with_floor(2.0), m);
      bool covariance =
          std::abs(scaled.z_star - 2.0 * floor_rep.z_star) < 1e-7 &&
          std::abs(scaled.y_star - 2.0 * floor_rep.y_star) < 1e-7;
      PathSimConfig cfg;
      cfg.n_paths = 2000;
      cfg.dt = 0.1;
      cfg.seed = 1;
      auto f2 = [](double) { return 2.0; };
      auto reg = [](double s) { return s >= 5.0; };
      auto e1 = simulate_expected_sup(f2, reg, m, 4.0, cfg);
      auto e2 = simulate_expected_sup(f2, reg, m, 4.0, cfg);
      bool seeds = e1.estimate == e2.estimate;
      ok = wronskian && increment && ratio && lemma2 && covariance && seeds;
      what += std::string(": wronskian ") + (wronskian ? "ok" : "BAD") +
              ", L-increment " + (increment ? "ok" : "BAD") + ", ratio " +
              (ratio ? "ok" : "BAD") + ", normalization " +
              (lemma2 ? "ok" : "BAD") + ", scaling " +
              (covariance ? "ok" : "BAD") + ", seeds " + (seeds ? "ok" : "BAD");
    } catch (const std::exception& e) {
      what += std::string(": threw ") + e.what();
    }
    report(11, ok, what);
  }

  std::printf("%d of 11 criteria passed\n", 11 - failures);
  return failures;
}
