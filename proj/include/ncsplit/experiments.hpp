#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ncsplit/admm.hpp"
#include "ncsplit/linear_operator.hpp"
#include "ncsplit/pg.hpp"
#include "ncsplit/prox.hpp"
#include "ncsplit/rng.hpp"
#include "ncsplit/smooth.hpp"
#include "ncsplit/vec.hpp"

namespace ncsplit {

inline constexpr double kMetricTol = 1e-4;

// ---------------------------------------------------------------------------
// Instances
// ---------------------------------------------------------------------------

// Closest point to x_hat violating at most r of the m equations M x = b.
struct CpvInstance {
  LinearOperator m;
  Vector b;
  Vector x_hat;
  Vector x_orig;
  std::size_t r = 0;
};

// Piecewise-constant fit: x_orig has exactly r constant pieces,
// x_hat = x_orig + tau * noise.
struct PcfInstance {
  std::size_t n = 0;
  std::size_t r = 0;
  double tau = 0.0;
  Vector x_orig;
  Vector x_hat;
};

enum class BallKind { l1, linf };

// Concave minimization of -0.5||Ax - b||^2 over a unit norm ball.
struct ConcaveInstance {
  LinearOperator a;
  Vector b;
  BallKind ball = BallKind::l1;
};

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

inline std::size_t metric_vio(const LinearOperator& m, const Vector& b, const Vector& x) {
  const Vector r = sub(m.apply(x), b);
  std::size_t count = 0;
  for (double v : r)
    if (std::fabs(v) > kMetricTol) ++count;
  return count;
}

inline std::size_t metric_card(const Vector& v) {
  std::size_t count = 0;
  for (double e : v)
    if (std::fabs(e) > kMetricTol) ++count;
  return count;
}

inline double metric_err(const Vector& x, const Vector& x_orig) {
  const double denom = norm2(x_orig);
  if (denom == 0.0) return norm2(x);
  return dist2(x, x_orig) / denom;
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

inline CpvInstance gen_cpv(std::size_t m, std::size_t n, std::size_t r, std::uint64_t seed) {
  if (!(n >= m && m >= r)) throw contract_error("gen_cpv: need n >= m >= r");
  RngStream rng(seed);
  Vector entries = randn_vector(rng, m * n);
  CpvInstance inst;
  inst.m = LinearOperator::dense(m, n, std::move(entries));
  inst.x_orig = randn_vector(rng, n);
  const auto j = randperm(rng, m);
  inst.b = randn_vector(rng, m);
  const Vector mx = inst.m.apply(inst.x_orig);
  for (std::size_t k = 0; k < m - r; ++k) inst.b[j[k]] = mx[j[k]];
  inst.x_hat = randn_vector(rng, n);
  inst.r = r;

  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < m; ++i)
    if (inst.b[i] != mx[i]) ++mismatches;
  if (mismatches > r) throw contract_error("gen_cpv: construction produced too many free rows");
  return inst;
}

inline PcfInstance gen_pcf(std::size_t n, std::size_t r, double tau, std::uint64_t seed) {
  if (!(r >= 2 && r <= n - 1)) throw contract_error("gen_pcf: need 2 <= r <= n-1");
  if (tau < 0.0) throw contract_error("gen_pcf: tau must be nonnegative");
  RngStream rng(seed);
  auto j = randperm(rng, n - 2);  // candidate piece starts 1..n-2 (0-based)
  std::vector<std::size_t> breaks(j.begin(), j.begin() + static_cast<std::ptrdiff_t>(r - 1));
  for (auto& v : breaks) v += 1;
  std::sort(breaks.begin(), breaks.end());

  PcfInstance inst;
  inst.n = n;
  inst.r = r;
  inst.tau = tau;
  inst.x_orig.assign(n, 0.0);
  std::size_t start = 0;
  for (std::size_t piece = 0; piece < r; ++piece) {
    const std::size_t end = piece + 1 < r ? breaks[piece] : n;
    const double level = rng.normal();
    for (std::size_t i = start; i < end; ++i) inst.x_orig[i] = level;
    start = end;
  }
  const Vector noise = randn_vector(rng, n);
  inst.x_hat = inst.x_orig;
  axpy(tau, noise, inst.x_hat);

  std::size_t jumps = 0;
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (inst.x_orig[i + 1] != inst.x_orig[i]) ++jumps;
  if (jumps != r - 1) throw contract_error("gen_pcf: piece count invariant failed");
  return inst;
}

inline ConcaveInstance gen_concave(std::size_t m, std::size_t n, std::uint64_t seed, BallKind ball) {
  if (m == 0 || n == 0) throw contract_error("gen_concave: dimensions must be positive");
  RngStream rng(seed);
  Vector entries = randn_vector(rng, m * n);
  ConcaveInstance inst;
  inst.a = LinearOperator::dense(m, n, std::move(entries));
  inst.b = randn_vector(rng, m);
  inst.ball = ball;
  return inst;
}

// ---------------------------------------------------------------------------
// cpv driver
// ---------------------------------------------------------------------------

enum class CpvMode { l0_cold, l1_baseline, l0_warm };

struct CpvRow {
  std::size_t iter = 0;
  double cpu_s = 0.0;
  std::size_t vio = 0;
  double dist = 0.0;
};

inline SmoothModel cpv_smooth(const CpvInstance& inst) { return SmoothModel::proximity(inst.x_hat); }

inline ProxOperator cpv_prox(const CpvInstance& inst) {
  return ProxOperator::indicator_l0_ball(inst.b, inst.r);
}

// beta = 1.01 * 2/sigma, gamma at the midpoint of its feasible interval.
inline AdmmConfig cpv_config(const CpvInstance& inst, double tol = 1e-8) {
  AdmmConfig cfg;
  const double sigma = cached_sigma(inst.m);
  if (sigma <= kSurjectivityTol) throw not_surjective_error("cpv_config: M is not surjective");
  cfg.beta = 1.01 * 2.0 / sigma;
  cfg.tol = tol;
  return cfg;
}

struct CpvBaselineResult {
  AdmmReport report;
  double lambda = 0.0;
  std::size_t vio = 0;
};

// Convex relaxation 0.5||x - x_hat||^2 + lambda ||Mx - b||_1, with lambda
// swept over a log grid; keeps the run with vio <= r that is closest to
// x_hat, falling back to the smallest vio.
inline CpvBaselineResult cpv_l1_baseline(const CpvInstance& inst, double tol = 1e-8) {
  const SmoothModel h = cpv_smooth(inst);
  const AdmmInit init{zeros(inst.m.cols()), zeros(inst.m.rows()), zeros(inst.m.rows())};
  std::optional<CpvBaselineResult> best_feasible;
  std::optional<CpvBaselineResult> best_any;
  double best_dist = 0.0;
  for (double lambda : {1e-2, 1e-1, 1.0, 1e1, 1e2}) {
    const ProxOperator p = ProxOperator::l1_penalty(lambda, inst.b);
    AdmmConfig cfg = cpv_config(inst, tol);
    AdmmReport rep = admm_solve(h, p, inst.m, cfg, init);
    const std::size_t vio = metric_vio(inst.m, inst.b, rep.x_final);
    const double dist = dist2(rep.x_final, inst.x_hat);
    if (vio <= inst.r && (!best_feasible || dist < best_dist)) {
      best_feasible = CpvBaselineResult{rep, lambda, vio};
      best_dist = dist;
    }
    if (!best_any || vio < best_any->vio) best_any = CpvBaselineResult{std::move(rep), lambda, vio};
  }
  return best_feasible ? *best_feasible : *best_any;
}

struct CpvRunResult {
  CpvRow row;
  AdmmReport report;
  AdmmInit init;
};

inline CpvRunResult run_cpv(const CpvInstance& inst, CpvMode mode, double tol = 1e-8) {
  const auto t0 = std::chrono::steady_clock::now();
  const SmoothModel h = cpv_smooth(inst);
  CpvRunResult out;
  switch (mode) {
    case CpvMode::l1_baseline: {
      CpvBaselineResult base = cpv_l1_baseline(inst, tol);
      out.report = std::move(base.report);
      out.init = AdmmInit{zeros(inst.m.cols()), zeros(inst.m.rows()), zeros(inst.m.rows())};
      break;
    }
    case CpvMode::l0_cold: {
      out.init = AdmmInit{zeros(inst.m.cols()), zeros(inst.m.rows()), zeros(inst.m.rows())};
      out.report = admm_solve(h, cpv_prox(inst), inst.m, cpv_config(inst, tol), out.init);
      break;
    }
    case CpvMode::l0_warm: {
      CpvBaselineResult base = cpv_l1_baseline(inst, tol);
      out.init = warm_start_from_l1(h, inst.m, base.report);
      out.report = admm_solve(h, cpv_prox(inst), inst.m, cpv_config(inst, tol), out.init);
      break;
    }
  }
  const auto t1 = std::chrono::steady_clock::now();
  out.row.iter = out.report.iters;
  out.row.cpu_s = std::chrono::duration<double>(t1 - t0).count();
  out.row.vio = metric_vio(inst.m, inst.b, out.report.x_final);
  out.row.dist = dist2(out.report.x_final, inst.x_hat);
  return out;
}

// ---------------------------------------------------------------------------
// pcf driver
// ---------------------------------------------------------------------------

struct PcfRow {
  std::size_t iter = 0;
  double cpu_s = 0.0;
  std::size_t card = 0;
  double err = 0.0;
};

struct PcfRunResult {
  PcfRow row;
  AdmmReport report;
};

// Growth heuristic from beta0 = 1/(5 n sigma), sigma = 2(1 + cos(pi - pi/n)).
inline AdmmConfig pcf_config(const PcfInstance& inst, double tol = 1e-8) {
  const double n = static_cast<double>(inst.n);
  const double sigma = 2.0 * (1.0 + std::cos(std::numbers::pi - std::numbers::pi / n));
  AdmmConfig cfg;
  cfg.tol = tol;
  BetaHeuristic heur;
  heur.beta0 = 1.0 / (5.0 * n * sigma);
  cfg.beta_heuristic = heur;
  cfg.beta = heur.beta0;
  return cfg;
}

inline PcfRunResult run_pcf(const PcfInstance& inst, double tol = 1e-8) {
  const auto t0 = std::chrono::steady_clock::now();
  const LinearOperator d = LinearOperator::first_difference(inst.n);
  const SmoothModel h = SmoothModel::proximity(inst.x_hat);
  const ProxOperator p = ProxOperator::indicator_card(inst.r - 1);
  const AdmmInit init{zeros(inst.n), zeros(inst.n - 1), zeros(inst.n - 1)};
  PcfRunResult out;
  out.report = admm_solve(h, p, d, pcf_config(inst, tol), init);
  const auto t1 = std::chrono::steady_clock::now();
  out.row.iter = out.report.iters;
  out.row.cpu_s = std::chrono::duration<double>(t1 - t0).count();
  out.row.card = metric_card(d.apply(out.report.x_final));
  out.row.err = metric_err(out.report.x_final, inst.x_orig);
  return out;
}

// ---------------------------------------------------------------------------
// concave driver
// ---------------------------------------------------------------------------

struct ConcaveRow {
  double beta_mult = 0.0;
  std::size_t iter = 0;
  double fval = 0.0;
};

struct ConcaveRunResult {
  double lambda_max = 0.0;
  std::vector<ConcaveRow> rows;
  std::vector<PgReport> reports;
};

inline ProxOperator concave_prox(const ConcaveInstance& inst) {
  return inst.ball == BallKind::l1 ? ProxOperator::indicator_l1_ball(1.0)
                                   : ProxOperator::indicator_linf_ball(1.0);
}

// One proximal-gradient run per multiplier k, with beta = k / lambda_max(A*A)
// and the run certified by ell = 1/(2 beta).
inline ConcaveRunResult run_concave(const ConcaveInstance& inst,
                                    const std::vector<double>& multipliers = {1.0, 2.0, 10.0, 50.0},
                                    double tol = 1e-8) {
  const SmoothModel h = SmoothModel::negated_least_squares(inst.a, inst.b);
  const ProxOperator p = concave_prox(inst);
  ConcaveRunResult out;
  out.lambda_max = lambda_max_gram(inst.a, 1e-12);
  for (double k : multipliers) {
    if (!(k > 0.0)) throw contract_error("run_concave: multipliers must be positive");
    PgConfig cfg;
    cfg.beta = k / out.lambda_max;
    cfg.ell = estimate_ell(h, 1.0 / (2.0 * cfg.beta)).ell;
    cfg.tol = tol;
    PgReport rep = pg_solve(h, p, cfg, zeros(inst.a.cols()));
    out.rows.push_back({k, rep.iters, rep.objective});
    out.reports.push_back(std::move(rep));
  }
  return out;
}

}  // namespace ncsplit
