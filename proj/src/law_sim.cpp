#include "exsup/law_sim.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "exsup/numerics.hpp"

namespace exsup {
namespace {

double psi_hat(const Model& m, double z, double x) {
  return m.pair.psi(x) * m.pair.phi(z) - m.pair.psi(z) * m.pair.phi(x);
}
double phi_hat(const Model& m, double y, double x) {
  return m.pair.phi(x) * m.pair.psi(y) - m.pair.phi(y) * m.pair.psi(x);
}
double psi_hat_dx(const Model& m, double z, double x) {
  return m.pair.psi_prime(x) * m.pair.phi(z) - m.pair.psi(z) * m.pair.phi_prime(x);
}
double phi_hat_dx(const Model& m, double y, double x) {
  return m.pair.phi_prime(x) * m.pair.psi(y) - m.pair.phi(y) * m.pair.psi_prime(x);
}

}  // namespace

double sup_cdf(const Model& model, double x, double m) {
  if (!(model.spec.a < x && x < m && m < model.spec.b))
    throw DomainError("sup_cdf: need a < x < m < b");
  return 1.0 - model.pair.psi(x) / model.pair.psi(m);
}

double inf_cdf(const Model& model, double x, double i) {
  if (!(model.spec.a < i && i < x && x < model.spec.b))
    throw DomainError("inf_cdf: need a < i < x < b");
  return model.pair.phi(x) / model.pair.phi(i);
}

double joint_cdf(const Model& model, double x, double i, double m) {
  if (!(model.spec.a < i && i < x && x < m && m < model.spec.b))
    throw DomainError("joint_cdf: need a < i < x < m < b");
  return -model.pair.psi(x) / model.pair.psi(m) +
         phi_hat(model, m, x) / phi_hat(model, m, i) +
         psi_hat(model, i, x) / psi_hat(model, i, m);
}

double interior_sup_prob(const Model& model, double x, double i, double m) {
  if (!(model.spec.a < i && i < x && x < m && m < model.spec.b))
    throw DomainError("interior_sup_prob: need a < i < x < m < b");
  return 1.0 - psi_hat(model, i, x) / psi_hat(model, i, m) -
         phi_hat(model, m, x) / phi_hat(model, m, i);
}

double density_inf_given_cap(const Model& model, double x, double i, double y) {
  if (!(model.spec.a < i && i < x && x < y && y < model.spec.b))
    throw DomainError("density_inf_given_cap: need a < i < x < y < b");
  double B = model.pair.wronskian_B;
  double ph = phi_hat(model, y, i);
  return (-B * model.scale.scale_density(i) - phi_hat_dx(model, y, i)) *
         phi_hat(model, y, x) / (ph * ph);
}

double density_sup_given_floor(const Model& model, double x, double m,
                               double z) {
  if (!(model.spec.a < z && z < x && x < m && m < model.spec.b))
    throw DomainError("density_sup_given_floor: need a < z < x < m < b");
  double B = model.pair.wronskian_B;
  double ps = psi_hat(model, z, m);
  return (-B * model.scale.scale_density(m) + psi_hat_dx(model, z, m)) *
         psi_hat(model, z, x) / (ps * ps);
}

double conditional_density_given_sup(const Model& model, double i, double v,
                                     double y) {
  if (!(model.spec.a < i && i < y && y < v && v < model.spec.b))
    throw DomainError("conditional_density_given_sup: need a < i < y < v < b");
  double den = psi_hat_dx(model, i, v) / model.scale.scale_density(v) -
               model.pair.wronskian_B;
  return model.r() * psi_hat(model, i, y) * model.scale.speed_density(y) / den;
}

double conditional_density_given_inf(const Model& model, double v, double i,
                                     double y) {
  if (!(model.spec.a < i && i < y && y < v && v < model.spec.b))
    throw DomainError("conditional_density_given_inf: need a < i < y < v < b");
  double den = -model.pair.wronskian_B -
               phi_hat_dx(model, v, i) / model.scale.scale_density(i);
  return model.r() * phi_hat(model, v, y) * model.scale.speed_density(y) / den;
}

double conditional_expectation_given_sup(
    const Model& model, double i, double v,
    const std::function<double(double)>& h) {
  auto w = [&](double y) {
    return psi_hat(model, i, y) * model.scale.speed_density(y);
  };
  double num_ = num::integrate([&](double y) { return h(y) * w(y); }, i, v);
  double den = num::integrate(w, i, v);
  return num_ / den;
}

namespace {

// splitmix64-based per-path substream; normals by Box-Muller so results are
// identical across standard libraries
struct PathRng {
  std::uint64_t state;
  bool have_cached = false;
  double cached = 0.0;

  PathRng(std::uint64_t seed, std::uint64_t path) {
    state = seed ^ (path * 0x9e3779b97f4a7c15ULL + 0xd1b54a32d192ed03ULL);
    next();  // decorrelate nearby keys
    next();
  }
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() {  // in (0, 1)
    return (double(next() >> 11) + 0.5) * 0x1.0p-53;
  }
  double normal() {
    if (have_cached) {
      have_cached = false;
      return cached;
    }
    double u = uniform(), v = uniform();
    double rad = std::sqrt(-2.0 * std::log(u)), ang = 6.283185307179586477 * v;
    cached = rad * std::sin(ang);
    have_cached = true;
    return rad * std::cos(ang);
  }
};

struct PathExtrema {
  double running = 0.0;  // sup of f * indicator along the path
  double inf_t = 0.0, sup_t = 0.0;
  bool discarded = false;
};

// One killed-GBM path in log space with per-step Brownian-bridge extrema.
template <class Visit>
PathExtrema gbm_path(const Model& model, double x, double T, double dt,
                     double sign, PathRng& rng, Visit&& visit) {
  double mu = model.gbm->mu, sigma = model.gbm->sigma;
  double drift = mu - 0.5 * sigma * sigma;
  PathExtrema out;
  double l = std::log(x);
  out.inf_t = out.sup_t = x;
  visit(x, out);
  double t = 0.0;
  while (t < T) {
    double h = std::min(dt, T - t);
    double z = sign * rng.normal();
    double ln = l + drift * h + sigma * std::sqrt(h) * z;
    // bridge max / min of the log between l and ln over duration h
    double u1 = rng.uniform(), u2 = rng.uniform();
    double d = ln - l;
    double bmax =
        0.5 * (l + ln + std::sqrt(d * d - 2.0 * sigma * sigma * h * std::log(u1)));
    double bmin =
        0.5 * (l + ln - std::sqrt(d * d - 2.0 * sigma * sigma * h * std::log(u2)));
    double xmax = std::exp(bmax), xmin = std::exp(bmin), xn = std::exp(ln);
    out.sup_t = std::max(out.sup_t, xmax);
    out.inf_t = std::min(out.inf_t, xmin);
    visit(xmax, out);
    visit(xmin, out);
    visit(xn, out);
    l = ln;
    t += h;
  }
  return out;
}

template <class Visit>
PathExtrema euler_path(const Model& model, double x, double T, double dt,
                       double sign, PathRng& rng, Visit&& visit) {
  PathExtrema out;
  double s = x;
  out.inf_t = out.sup_t = x;
  visit(x, out);
  double t = 0.0;
  const auto& spec = model.spec;
  while (t < T) {
    double h = std::min(dt, T - t);
    double z = sign * rng.normal();
    s += spec.mu(s) * h + spec.sigma(s) * std::sqrt(h) * z;
    if (s <= spec.a || s >= spec.b) {
      bool low = s <= spec.a;
      Boundary bk = low ? spec.boundary_a : spec.boundary_b;
      if (bk == Boundary::RegularKilled) return out;  // absorbed: sup frozen
      if (bk == Boundary::RegularReflected) {
        s = 2.0 * (low ? spec.a : spec.b) - s;
      } else {
        out.discarded = true;  // unattainable boundary overshot by the scheme
        return out;
      }
    }
    out.sup_t = std::max(out.sup_t, s);
    out.inf_t = std::min(out.inf_t, s);
    visit(s, out);
    t += h;
  }
  return out;
}

struct MeanSe {
  double mean, se;
};

MeanSe reduce(const std::vector<double>& v) {
  double mean = num::pairwise_sum(v) / double(v.size());
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double d = v[i] - mean;
    sq[i] = d * d;
  }
  double var = num::pairwise_sum(sq) / double(v.size());
  double se = v.size() > 1 ? std::sqrt(var / double(v.size() - 1)) : 0.0;
  return {mean, se};
}

// run fn(path_index) for every path, split across threads by contiguous
// blocks; per-path substreams make the result independent of the split
template <class Fn>
void for_each_path(std::int64_t n, int n_threads, Fn&& fn) {
  if (n_threads <= 1) {
    for (std::int64_t p = 0; p < n; ++p) fn(p);
    return;
  }
  std::vector<std::thread> pool;
  std::int64_t chunk = (n + n_threads - 1) / n_threads;
  for (int t = 0; t < n_threads; ++t) {
    std::int64_t lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::int64_t p = lo; p < hi; ++p) fn(p);
    });
  }
  for (auto& th : pool) th.join();
}

void validate_cfg(const PathSimConfig& cfg, const Model& model) {
  if (!(cfg.dt > 0.0)) throw SimulationError("dt must be positive");
  if (cfg.n_paths < 1) throw SimulationError("n_paths must be >= 1");
  if (cfg.scheme == Scheme::ExactGBM && !model.gbm)
    throw SchemeError("ExactGBM requires geometric Brownian coefficients");
}

}  // namespace

SimEstimate simulate_expected_sup(const std::function<double(double)>& f,
                                  const std::function<bool(double)>& in_region,
                                  const Model& model, double x,
                                  const PathSimConfig& cfg,
                                  const std::function<double(double)>* f_lower,
                                  const std::function<double(double)>* f_upper) {
  validate_cfg(cfg, model);
  double r = model.r();
  bool shortcut = f_lower != nullptr || f_upper != nullptr;

  std::vector<double> vals(cfg.n_paths, 0.0);
  std::vector<double> svals(shortcut ? cfg.n_paths : 0, 0.0);
  std::vector<char> dropped(cfg.n_paths, 0);

  for_each_path(cfg.n_paths, cfg.n_threads, [&](std::int64_t p) {
    std::uint64_t key = cfg.antithetic ? std::uint64_t(p / 2) : std::uint64_t(p);
    double sign = cfg.antithetic && (p % 2 == 1) ? -1.0 : 1.0;
    PathRng rng(cfg.seed, key);
    double T = -std::log(rng.uniform()) / r;
    auto visit = [&](double s, PathExtrema& pe) {
      if (in_region(s)) pe.running = std::max(pe.running, f(s));
    };
    PathExtrema pe = cfg.scheme == Scheme::ExactGBM
                         ? gbm_path(model, x, T, cfg.dt, sign, rng, visit)
                         : euler_path(model, x, T, cfg.dt, sign, rng, visit);
    if (pe.discarded) {
      dropped[p] = 1;
      return;
    }
    vals[p] = pe.running;
    if (shortcut) {
      double v = 0.0;
      if (f_lower && in_region(pe.inf_t)) v = std::max(v, (*f_lower)(pe.inf_t));
      if (f_upper && in_region(pe.sup_t)) v = std::max(v, (*f_upper)(pe.sup_t));
      svals[p] = v;
    }
  });

  std::int64_t n_drop = 0;
  for (char c : dropped) n_drop += c;
  if (n_drop > 0) {
    std::vector<double> keep;
    keep.reserve(cfg.n_paths - n_drop);
    std::vector<double> skeep;
    for (std::int64_t p = 0; p < cfg.n_paths; ++p)
      if (!dropped[p]) {
        keep.push_back(vals[p]);
        if (shortcut) skeep.push_back(svals[p]);
      }
    vals = std::move(keep);
    svals = std::move(skeep);
  }
  if (vals.empty()) throw SimulationError("every path was discarded");

  SimEstimate est;
  auto [mean, se] = reduce(vals);
  est.estimate = mean;
  est.std_error = se;
  est.n_paths = std::int64_t(vals.size());
  est.n_discarded = n_drop;
  if (shortcut) {
    auto [smean, sse] = reduce(svals);
    est.shortcut_estimate = smean;
    est.shortcut_std_error = sse;
  }
  return est;
}

LawReport empirical_law_check(const Model& model, double x,
                              const std::vector<LawProbe>& probes,
                              const PathSimConfig& cfg, double allowance) {
  validate_cfg(cfg, model);
  double r = model.r();

  std::vector<double> sup_t(cfg.n_paths), inf_t(cfg.n_paths);
  std::vector<char> dropped(cfg.n_paths, 0);
  for_each_path(cfg.n_paths, cfg.n_threads, [&](std::int64_t p) {
    std::uint64_t key = cfg.antithetic ? std::uint64_t(p / 2) : std::uint64_t(p);
    double sign = cfg.antithetic && (p % 2 == 1) ? -1.0 : 1.0;
    PathRng rng(cfg.seed, key);
    double T = -std::log(rng.uniform()) / r;
    auto visit = [](double, PathExtrema&) {};
    PathExtrema pe = cfg.scheme == Scheme::ExactGBM
                         ? gbm_path(model, x, T, cfg.dt, sign, rng, visit)
                         : euler_path(model, x, T, cfg.dt, sign, rng, visit);
    dropped[p] = pe.discarded ? 1 : 0;
    sup_t[p] = pe.sup_t;
    inf_t[p] = pe.inf_t;
  });

  LawReport report;
  std::int64_t n = 0;
  for (std::int64_t p = 0; p < cfg.n_paths; ++p) n += dropped[p] ? 0 : 1;
  report.n_paths = n;
  report.n_discarded = cfg.n_paths - n;
  if (n == 0) throw SimulationError("every path was discarded");

  auto freq = [&](auto&& pred) -> std::pair<double, double> {
    std::int64_t hits = 0;
    for (std::int64_t p = 0; p < cfg.n_paths; ++p)
      if (!dropped[p] && pred(p)) ++hits;
    double ph = double(hits) / double(n);
    return {ph, std::sqrt(std::max(ph * (1.0 - ph), 1e-300) / double(n))};
  };

  for (const LawProbe& pr : probes) {
    LawProbeResult res;
    res.probe = pr;
    if (!(model.spec.a < pr.i && pr.i < x && x < pr.m && pr.m < model.spec.b)) {
      res.valid = false;
      res.reason = "probe violates a < i < x < m < b";
      report.probes.push_back(res);
      continue;
    }
    res.valid = true;
    res.model_joint = joint_cdf(model, x, pr.i, pr.m);
    res.model_sup = sup_cdf(model, x, pr.m);
    res.model_inf = inf_cdf(model, x, pr.i);
    std::tie(res.empirical_joint, res.se_joint) = freq(
        [&](std::int64_t p) { return inf_t[p] <= pr.i && sup_t[p] <= pr.m; });
    std::tie(res.empirical_sup, res.se_sup) =
        freq([&](std::int64_t p) { return sup_t[p] <= pr.m; });
    std::tie(res.empirical_inf, res.se_inf) =
        freq([&](std::int64_t p) { return inf_t[p] <= pr.i; });
    auto ok = [&](double emp, double mod, double se) {
      return std::abs(emp - mod) <= 3.0 * se + allowance;
    };
    res.within_bounds = ok(res.empirical_joint, res.model_joint, res.se_joint) &&
                        ok(res.empirical_sup, res.model_sup, res.se_sup) &&
                        ok(res.empirical_inf, res.model_inf, res.se_inf);
    report.all_within_bounds = report.all_within_bounds && res.within_bounds;
    report.probes.push_back(res);
  }
  return report;
}

}  // namespace exsup
