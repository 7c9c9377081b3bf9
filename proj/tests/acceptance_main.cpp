// Acceptance suite: runs every project-level criterion at its stated
// tolerance and prints one pass/fail line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ncsplit/ncsplit.hpp"
#include "oracles.hpp"

using namespace ncsplit;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

LinearOperator random_dense(RngStream& rng, std::size_t rows, std::size_t cols) {
  return LinearOperator::dense(rows, cols, randn_vector(rng, rows * cols));
}

double prox_objective(const ProxOperator& p, const Vector& w, const Vector& u, double tau) {
  const Vector d = sub(w, u);
  return tau * p.eval(w) + 0.5 * dot(d, d);
}

// --- criterion 1: divergence-cycle exactness --------------------------------

Outcome criterion_cycle() {
  int ok = 0, total = 0;
  std::string first_fail;
  for (double eta : {0.25, 0.5, 1.0}) {
    for (double beta : {0.5, 1.0, 3.0}) {
      ++total;
      const CycleVerdict v = cycle_check(cycle_run(eta, beta, 80), 1e-12);
      if (v.pass)
        ++ok;
      else if (first_fail.empty())
        first_fail = "eta=" + std::to_string(eta) + " beta=" + std::to_string(beta) + ": " + v.message;
    }
  }
  Outcome out;
  out.pass = ok == total;
  out.detail = std::to_string(ok) + "/" + std::to_string(total) + " parameter grid points";
  if (!out.pass) out.detail += "; " + first_fail;
  return out;
}

// --- criterion 2: prox oracle suite -----------------------------------------

Outcome criterion_prox_oracles() {
  RngStream rng(1001);
  int bad_enum = 0, bad_grid = 0, bad_proj = 0;

  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t dim = 2 + rng.bounded(11);
    const std::size_t budget = rng.bounded(std::min<std::size_t>(dim, 4) + 1);
    const Vector u = randn_vector(rng, dim);
    const Vector center = randn_vector(rng, dim);
    {
      const auto p = ProxOperator::indicator_card(budget);
      const double got = prox_objective(p, p.prox(u, 1.0), u, 1.0);
      if (std::fabs(got - oracles::enumerate_support_objective(u, {}, budget)) > 1e-10) ++bad_enum;
    }
    {
      const auto p = ProxOperator::indicator_l0_ball(center, budget);
      const double got = prox_objective(p, p.prox(u, 1.0), u, 1.0);
      if (std::fabs(got - oracles::enumerate_support_objective(u, center, budget)) > 1e-10)
        ++bad_enum;
    }
  }

  for (int rep = 0; rep < 1000; ++rep) {
    const double u = 4.0 * rng.normal();
    const double tau = 0.05 + 2.0 * rng.uniform01();
    const double lambda = 0.05 + 2.0 * rng.uniform01();
    const double lo = -std::fabs(u) - 1.0, hi = std::fabs(u) + 1.0;
    const auto check = [&](const ProxOperator& p, auto penalty_of) {
      const Vector w = p.prox({u}, tau);
      const double got = prox_objective(p, w, {u}, tau);
      auto g = [&](double v) { return tau * lambda * penalty_of(v) + 0.5 * (v - u) * (v - u); };
      if (std::fabs(got - oracles::grid_min_1d(g, lo, hi, {0.0, u, w[0]})) > 1e-5) ++bad_grid;
    };
    check(ProxOperator::l0_penalty(lambda), [](double v) { return v != 0.0 ? 1.0 : 0.0; });
    check(ProxOperator::l1_penalty(lambda), [](double v) { return std::fabs(v); });
    check(ProxOperator::l_half_penalty(lambda), [](double v) { return std::sqrt(std::fabs(v)); });
  }

  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t dim = 1 + rng.bounded(12);
    const ProxOperator p = (rep % 2 == 0) ? ProxOperator::indicator_l1_ball(1.0)
                                          : ProxOperator::indicator_linf_ball(1.0);
    const Vector u = scaled(randn_vector(rng, dim), 2.5);
    const Vector v = scaled(randn_vector(rng, dim), 2.5);
    const Vector pu = p.prox(u, 1.0);
    const Vector pv = p.prox(v, 1.0);
    if (dist2(p.prox(pu, 1.0), pu) > 1e-10) ++bad_proj;
    if (dist2(pu, pv) > dist2(u, v) + 1e-10) ++bad_proj;
  }

  Outcome out;
  out.pass = bad_enum == 0 && bad_grid == 0 && bad_proj == 0;
  out.detail = "enumeration fails " + std::to_string(bad_enum) + ", grid fails " +
               std::to_string(bad_grid) + ", projection fails " + std::to_string(bad_proj);
  return out;
}

// --- criterion 3: parameter rules -------------------------------------------

Outcome criterion_parameter_rules() {
  RngStream rng(1002);
  int bad_suggest = 0, bad_boundary = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t rows = 4 + rng.bounded(6);
    const std::size_t n = rows + 2 + rng.bounded(8);
    const SmoothModel ls = SmoothModel::least_squares(random_dense(rng, rows, n), randn_vector(rng, rows));
    const double l = ls.hessian_bounds().lipschitz;
    const auto id = LinearOperator::identity(n);

    {  // linearized x-update over the identity map; Hessian lower bound -L
      const std::size_t d = 3 + rng.bounded(6);
      const auto r = random_dense(rng, d, d);
      DenseMatrix q = oracles::gram_in(r);
      for (double& v : q.data) v = -v;
      const SmoothModel hq = SmoothModel::indefinite_quadratic(q, zeros(d));
      const double lq = hq.hessian_bounds().lipschitz;
      const auto idq = LinearOperator::identity(d);
      const auto phi = ProximalTermSpec::l_smoothing(lq, hq);
      const auto s = suggest_beta(hq, idq, phi);
      if (!check_assumption(hq, idq, phi, s.beta, s.gamma).assumption_ok) ++bad_suggest;
      if (check_assumption(hq, idq, phi, 5.0 * lq, 0.5).margin > 1e-9 * (1.0 + lq))
        ++bad_boundary;
    }
    {  // plain least squares over the identity map
      const auto phi = ProximalTermSpec::zero(ls);
      const auto s = suggest_beta(ls, id, phi);
      if (!check_assumption(ls, id, phi, s.beta, s.gamma).assumption_ok) ++bad_suggest;
      if (check_assumption(ls, id, phi, std::sqrt(2.0) * l).margin > 1e-9 * (1.0 + l))
        ++bad_boundary;
    }
    {  // strongly convex objective over a random surjective map
      const std::size_t m = 4 + rng.bounded(6);
      const std::size_t cols = 3 * m;
      const auto op = random_dense(rng, m, cols);
      const SmoothModel h = SmoothModel::proximity(randn_vector(rng, cols));
      const auto phi = ProximalTermSpec::zero(h);
      const auto s = suggest_beta(h, op, phi);
      if (!check_assumption(h, op, phi, s.beta, s.gamma).assumption_ok) ++bad_suggest;
      if (check_assumption(h, op, phi, 2.0 / cached_sigma(op)).margin > 1e-9) ++bad_boundary;
    }
  }
  Outcome out;
  out.pass = bad_suggest == 0 && bad_boundary == 0;
  out.detail = "300 suggestions (" + std::to_string(bad_suggest) + " failed check), 300 boundary values (" +
               std::to_string(bad_boundary) + " not rejected)";
  return out;
}

// --- criterion 4: merit monotonicity and the dual-step bound ----------------

Outcome criterion_merit_and_dual_bound() {
  int converged = 0, merit_bad = 0, dual_bad = 0, vio_bad = 0, res_bad = 0;
  std::size_t total_iterations = 0;
  const int n_instances = 50;
  for (int seed = 1; seed <= n_instances; ++seed) {
    const CpvInstance inst = gen_cpv(50, 200, 10, static_cast<std::uint64_t>(seed));
    const SmoothModel h = cpv_smooth(inst);
    const ProxOperator p = cpv_prox(inst);
    AdmmConfig cfg = cpv_config(inst, 1e-10);
    cfg.max_iter = 20000;
    const double sigma = cached_sigma(inst.m);
    const double gamma = check_assumption(h, inst.m, cfg.phi, cfg.beta).gamma_used;

    double prev_merit = std::numeric_limits<double>::quiet_NaN();
    cfg.observer = [&](const AdmmIterationView& v) {
      ++total_iterations;
      if (std::isfinite(prev_merit) && v.merit > prev_merit + 1e-8 * (1.0 + std::fabs(prev_merit)))
        ++merit_bad;
      prev_merit = v.merit;
      const double lhs = sigma * v.step_z * v.step_z;
      const double rhs = (1.0 / gamma) * v.step_x * v.step_x;  // q3 = 1 for the proximity objective
      if (lhs > rhs + 1e-8 * (1.0 + std::max(lhs, rhs))) ++dual_bad;
    };

    const AdmmReport rep =
        admm_solve(h, p, inst.m, cfg, {zeros(200), zeros(50), zeros(50)});
    if (rep.termination == AdmmTermination::converged && rep.iters <= 20000) ++converged;
    if (metric_vio(inst.m, inst.b, rep.x_final) > 10) ++vio_bad;
    const double zscale = 1e-6 * (1.0 + norm2(rep.z_final));
    if (rep.residuals.grad > zscale || rep.residuals.feas > zscale ||
        rep.residuals.prox_fixed_point > zscale)
      ++res_bad;
  }
  Outcome out;
  out.pass = converged == n_instances && merit_bad == 0 && dual_bad == 0 && vio_bad == 0 &&
             res_bad == 0 && total_iterations > 1000;  // checks actually exercised
  out.detail = std::to_string(converged) + "/" + std::to_string(n_instances) + " converged over " +
               std::to_string(total_iterations) + " iterations, " + std::to_string(merit_bad) +
               " merit increases, " + std::to_string(dual_bad) + " dual-bound violations, " +
               std::to_string(vio_bad) + " budget misses, " + std::to_string(res_bad) +
               " residual misses";
  return out;
}

// --- criterion 5: strict improvement from warm starts ------------------------

Outcome criterion_strict_improvement() {
  int improved = 0, applicable = 0, stationary_starts = 0, failed = 0;
  const int n_instances = 20;
  for (int seed = 1; seed <= n_instances; ++seed) {
    const CpvInstance inst = gen_cpv(50, 200, 10, static_cast<std::uint64_t>(seed));
    const SmoothModel h = cpv_smooth(inst);
    const ProxOperator p = cpv_prox(inst);
    const AdmmConfig cfg = cpv_config(inst, 1e-9);

    const CpvBaselineResult base = cpv_l1_baseline(inst, 1e-9);
    const AdmmInit init = warm_start_from_l1(h, inst.m, base.report);
    const auto start_res = stationarity_residuals(h, p, inst.m, cfg.beta, init.x, init.y, init.z);
    if (start_res.prox_fixed_point <= 1e-6) {
      ++stationary_starts;
      continue;
    }
    const AdmmReport rep = admm_solve(h, p, inst.m, cfg, init);
    const bool init_feasible = metric_vio(inst.m, inst.b, init.x) <= inst.r;
    const bool final_feasible = metric_vio(inst.m, inst.b, rep.x_final) <= inst.r;
    if (!init_feasible) continue;  // infinite starting objective: nothing to compare
    ++applicable;
    if (final_feasible && h.value(rep.x_final) < h.value(init.x) - 1e-12)
      ++improved;
    else
      ++failed;
  }
  Outcome out;
  out.pass = failed == 0 && applicable > 0;
  out.detail = std::to_string(improved) + "/" + std::to_string(applicable) +
               " non-stationary feasible starts improved (" + std::to_string(stationary_starts) +
               " already stationary)";
  return out;
}

// --- criterion 6: piecewise-constant recovery --------------------------------

Outcome criterion_pcf_recovery() {
  const int n_seeds = 20;
  int card_ok = 0, err_ok = 0;
  for (int seed = 1; seed <= n_seeds; ++seed) {
    const PcfInstance inst = gen_pcf(1000, 20, 0.0, static_cast<std::uint64_t>(seed));
    const PcfRunResult res = run_pcf(inst, 1e-8);
    if (res.row.card <= 19) ++card_ok;
    if (res.row.err <= 1e-4) ++err_ok;
  }
  int denoise_ok = 0;
  for (int seed = 1; seed <= n_seeds; ++seed) {
    const PcfInstance inst = gen_pcf(1000, 20, 0.05, static_cast<std::uint64_t>(seed));
    const PcfRunResult res = run_pcf(inst, 1e-8);
    if (res.row.err < metric_err(inst.x_hat, inst.x_orig)) ++denoise_ok;
  }
  Outcome out;
  out.pass = card_ok == n_seeds && err_ok >= 16 && denoise_ok >= 18;
  out.detail = "noiseless: card within budget " + std::to_string(card_ok) + "/20, exact recovery " +
               std::to_string(err_ok) + "/20 (need 16); noisy: denoised " +
               std::to_string(denoise_ok) + "/20 (need 18)";
  return out;
}

// --- criterion 7: proximal-gradient descent and the step-size trend ----------

Outcome criterion_pg_trend() {
  const std::vector<double> multipliers{1.0, 2.0, 10.0, 50.0};
  int descent_bad = 0, trend_bad = 0, infeasible = 0;
  int l1_agree = 0;
  for (const BallKind ball : {BallKind::l1, BallKind::linf}) {
    for (int seed = 1; seed <= 4; ++seed) {
      const ConcaveInstance inst = gen_concave(100, 300, static_cast<std::uint64_t>(seed), ball);
      const SmoothModel h = SmoothModel::negated_least_squares(inst.a, inst.b);
      const ProxOperator p = concave_prox(inst);
      const double lmax = lambda_max_gram(inst.a, 1e-12);

      std::vector<std::size_t> iters;
      std::vector<double> fvals;
      for (double k : multipliers) {
        PgConfig cfg;
        cfg.beta = k / lmax;
        cfg.ell = 1.0 / (2.0 * cfg.beta);
        const double coeff = 1.0 / (2.0 * cfg.beta) - cfg.ell / 2.0;
        cfg.observer = [&](const PgIterationView& v) {
          if (std::isfinite(v.objective_prev) &&
              v.objective > v.objective_prev - coeff * v.step * v.step +
                                1e-8 * (1.0 + std::fabs(v.objective_prev)))
            ++descent_bad;
        };
        const PgReport rep = pg_solve(h, p, cfg, zeros(300));
        if (p.eval(rep.x_final) != 0.0) ++infeasible;
        iters.push_back(rep.iters);
        fvals.push_back(rep.objective);
      }
      if (ball == BallKind::l1) {
        if (iters.back() > iters.front()) ++trend_bad;
        const double lo = *std::min_element(fvals.begin(), fvals.end());
        const double hi = *std::max_element(fvals.begin(), fvals.end());
        if (hi - lo <= 1e-6 * (1.0 + std::fabs(lo))) ++l1_agree;
      }
    }
  }
  Outcome out;
  out.pass = descent_bad == 0 && trend_bad == 0 && infeasible == 0 && l1_agree >= 3;
  out.detail = std::to_string(descent_bad) + " descent violations, " + std::to_string(trend_bad) +
               " trend misses, fval agreement on " + std::to_string(l1_agree) +
               "/4 l1 instances (need 3)";
  return out;
}

// --- criterion 8: numerics bedrock -------------------------------------------

Outcome criterion_numerics() {
  RngStream rng(1008);
  int pairing_bad = 0, spectral_bad = 0, solve_bad = 0, grad_bad = 0;

  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t rows = 2 + rng.bounded(10);
    const std::size_t cols = 2 + rng.bounded(10);
    for (int kind = 0; kind < 3; ++kind) {
      LinearOperator m;
      if (kind == 0) m = LinearOperator::identity(cols);
      else if (kind == 1) m = LinearOperator::first_difference(cols + 1);
      else m = random_dense(rng, rows, cols);
      const Vector x = randn_vector(rng, m.cols());
      const Vector y = randn_vector(rng, m.rows());
      const double lhs = dot(m.apply(x), y);
      const double rhs = dot(x, m.adjoint_apply(y));
      if (std::fabs(lhs - rhs) > 1e-10 * (1.0 + std::fabs(lhs))) ++pairing_bad;
    }
  }

  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t rows = 3 + rng.bounded(20);
    const std::size_t cols = rows + rng.bounded(50 - rows);
    const auto m = random_dense(rng, rows, cols);
    const auto in_eig = oracles::jacobi_eigenvalues(oracles::gram_in(m));
    const auto out_eig = oracles::jacobi_eigenvalues(oracles::gram_out(m));
    if (std::fabs(lambda_max_gram(m, 1e-12) - in_eig.back()) > 1e-6 * in_eig.back()) ++spectral_bad;
    if (std::fabs(lambda_min_gram_out(m, 1e-12) - out_eig.front()) >
        1e-6 * std::max(out_eig.front(), 1e-12))
      ++spectral_bad;
  }

  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rng.bounded(15);
    const double c = 0.1 + 5.0 * rng.uniform01();
    const double beta = 4.0 * rng.uniform01();
    LinearOperator m;
    switch (rep % 3) {
      case 0: m = LinearOperator::identity(n); break;
      case 1: m = LinearOperator::first_difference(n); break;
      default: m = random_dense(rng, 1 + rng.bounded(8), n); break;
    }
    const SpdSolver solver(c, beta, m);
    const Vector rhs = randn_vector(rng, n);
    const Vector x = solver.solve(rhs);
    if (norm2(sub(rhs, solver.apply(x))) > 1e-10 * norm2(rhs)) ++solve_bad;
  }

  {
    const auto a = random_dense(rng, 6, 9);
    const Vector b = randn_vector(rng, 6);
    DenseMatrix q(9, 9);
    for (std::size_t i = 0; i < 9; ++i)
      for (std::size_t j = i; j < 9; ++j) q(i, j) = q(j, i) = rng.normal();
    const std::vector<SmoothModel> models = {
        SmoothModel::least_squares(a, b), SmoothModel::negated_least_squares(a, b),
        SmoothModel::proximity(randn_vector(rng, 9)),
        SmoothModel::indefinite_quadratic(q, randn_vector(rng, 9))};
    for (int rep = 0; rep < 25; ++rep) {
      const Vector x = randn_vector(rng, 9);
      for (const auto& h : models) {
        const Vector g = h.gradient(x);
        const Vector fd =
            oracles::finite_diff_gradient([&h](const Vector& v) { return h.value(v); }, x);
        if (dist2(g, fd) > 1e-5 * (norm2(g) + 1.0)) ++grad_bad;
      }
    }
  }

  Outcome out;
  out.pass = pairing_bad == 0 && spectral_bad == 0 && solve_bad == 0 && grad_bad == 0;
  out.detail = "pairing " + std::to_string(pairing_bad) + ", spectral " + std::to_string(spectral_bad) +
               ", solve " + std::to_string(solve_bad) + ", gradient " + std::to_string(grad_bad) +
               " failures";
  return out;
}

// --- criterion 9: determinism of emitted tables ------------------------------

std::string emit_suite_csv() {
  std::ostringstream out;
  out << cpv_all_csv_header() << "\n";
  for (std::uint64_t seed = 1; seed <= 2; ++seed) {
    const CpvInstance inst = gen_cpv(20, 60, 4, seed);
    const CpvRow l0 = run_cpv(inst, CpvMode::l0_cold, 1e-9).row;
    const CpvRow l1 = run_cpv(inst, CpvMode::l1_baseline, 1e-9).row;
    const CpvRow warm = run_cpv(inst, CpvMode::l0_warm, 1e-9).row;
    out << cpv_all_csv_row(4, 60, l0, l1, warm) << "\n";
  }
  out << pcf_csv_header() << "\n";
  for (std::uint64_t seed = 1; seed <= 2; ++seed) {
    const PcfInstance inst = gen_pcf(300, 8, 0.05, seed);
    out << pcf_csv_row(0.05, 8, 300, run_pcf(inst, 1e-8).row) << "\n";
  }
  out << concave_csv_header() << "\n";
  const ConcaveInstance inst = gen_concave(40, 120, 1, BallKind::l1);
  const ConcaveRunResult res = run_concave(inst);
  for (const auto& row : res.rows) out << concave_csv_row(120, res.lambda_max, row) << "\n";
  return out.str();
}

Outcome criterion_determinism() {
  const std::string first = emit_suite_csv();
  const std::string second = emit_suite_csv();
  Outcome out;
  out.pass = first == second;
  out.detail = out.pass ? std::to_string(first.size()) + " bytes, identical across two runs"
                        : "outputs differ";
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"divergence cycle exactness", criterion_cycle},
      {"prox oracle suite", criterion_prox_oracles},
      {"parameter rules", criterion_parameter_rules},
      {"merit monotonicity and dual-step bound", criterion_merit_and_dual_bound},
      {"strict improvement from warm starts", criterion_strict_improvement},
      {"piecewise-constant recovery", criterion_pcf_recovery},
      {"proximal-gradient descent and step trend", criterion_pg_trend},
      {"numerics bedrock", criterion_numerics},
      {"deterministic table emission", criterion_determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %zu: %s: %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), out.detail.c_str(), secs);
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
