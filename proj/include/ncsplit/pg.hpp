#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ncsplit/prox.hpp"
#include "ncsplit/smooth.hpp"
#include "ncsplit/vec.hpp"

namespace ncsplit {

enum class PgTermination { converged, max_iter, descent_violation };

struct EllEstimate {
  double ell;
  std::string certificate;  // which convex q makes -ell I <= hess(h+q) <= ell I
};

// Step-size certificate for the forward-backward update. Concave kinds admit
// any positive ell (the quadratic q absorbs all curvature), so the caller
// chooses; mixed-sign spectra use the averaged bound when the concave side
// dominates.
inline EllEstimate estimate_ell(const SmoothModel& h,
                                std::optional<double> concave_ell = std::nullopt) {
  if (concave_ell && !(*concave_ell > 0.0))
    throw contract_error("estimate_ell: requested ell must be positive");
  const HessianBounds b = h.hessian_bounds();
  switch (h.kind()) {
    case SmoothKind::negated_least_squares:
      return {concave_ell.value_or(1.0), "q = 0.5||Ax||^2 absorbs all curvature; any ell > 0"};
    case SmoothKind::least_squares:
    case SmoothKind::proximity:
      return {b.q1, "q = 0 (convex h)"};
    case SmoothKind::indefinite_quadratic: {
      if (b.q2 >= 0.0) return {b.q1, "q = 0 (convex h)"};
      if (b.q1 <= 0.0)
        return {concave_ell.value_or(1.0), "q = -0.5<x,Qx> absorbs all curvature; any ell > 0"};
      const double l1 = b.q1;
      const double l2 = -b.q2;
      if (l1 < l2)
        return {0.5 * (l1 + l2), "q = ((lambda2-lambda1)/4)||x||^2"};
      return {l1, "q = -0.5<x,Q_- x> (negative spectral part)"};
    }
    case SmoothKind::custom:
      return {b.lipschitz, "q = 0 with caller-supplied bounds"};
  }
  throw contract_error("estimate_ell: bad kind");
}

struct PgHistoryEntry {
  std::size_t iter;
  double objective;
  double step;
};

struct PgIterationView {
  std::size_t iter;
  const Vector& x_prev;
  const Vector& x;
  double objective_prev;
  double objective;
  double step;
};

struct PgConfig {
  double beta = 0.0;
  double ell = 0.0;
  double tol = 1e-8;
  std::size_t max_iter = 100000;
  bool record_history = false;
  std::function<void(const PgIterationView&)> observer;

  void validate() const {
    if (!(beta > 0.0)) throw contract_error("PgConfig: beta must be positive");
    if (!(ell > 0.0)) throw contract_error("PgConfig: ell must be positive");
    if (!(beta * ell < 1.0 - 1e-15))
      throw contract_error("PgConfig: need beta < 1/ell (strict)");
    if (!(tol > 0.0)) throw contract_error("PgConfig: tol must be positive");
    if (max_iter == 0) throw contract_error("PgConfig: max_iter must be positive");
  }
};

struct PgReport {
  PgTermination termination = PgTermination::max_iter;
  std::size_t iters = 0;
  Vector x_final;
  double objective = 0.0;
  double residual = 0.0;  // ||x - prox(P, x - beta grad h(x), beta)||
  std::vector<PgHistoryEntry> history;
};

// x <- prox_{beta P}(x - beta grad h(x)), with the per-iteration descent
// inequality F(x+) <= F(x) - (1/(2 beta) - ell/2) ||x+ - x||^2 asserted up
// to relative slack; a violation falsifies the ell certificate and ends the
// run with descent_violation.
inline PgReport pg_solve(const SmoothModel& h, const ProxOperator& p, const PgConfig& config,
                         const Vector& x0) {
  config.validate();
  if (x0.size() != h.dim()) throw dimension_error("pg_solve: dim(x0) != dim(h)");
  require_finite(x0, "pg init");

  const double descent_coeff = 1.0 / (2.0 * config.beta) - config.ell / 2.0;

  Vector x = x0;
  double fx = h.value(x) + p.eval(x);

  std::deque<PgHistoryEntry> history;
  constexpr std::size_t kHistoryCap = 10000;

  PgTermination termination = PgTermination::max_iter;
  std::size_t iters = 0;

  for (std::size_t t = 1; t <= config.max_iter; ++t) {
    iters = t;
    const Vector g = h.gradient(x);
    Vector u(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) u[i] = x[i] - config.beta * g[i];
    Vector x_new = p.prox(u, config.beta, &x);
    if (!all_finite(x_new)) throw divergence_error("pg_solve: non-finite iterate");

    const double f_new = h.value(x_new) + p.eval(x_new);
    if (!std::isfinite(f_new) && std::isfinite(fx))
      throw divergence_error("pg_solve: objective left the domain");
    const double dx = dist2(x_new, x);

    if (config.record_history) {
      if (history.size() == kHistoryCap) history.pop_front();
      history.push_back({t, f_new, dx});
    }
    if (config.observer) config.observer({t, x, x_new, fx, f_new, dx});

    const bool descent_ok = !std::isfinite(fx) ||
                            f_new <= fx - descent_coeff * dx * dx + 1e-8 * (1.0 + std::fabs(fx));
    const double rel = dx / (norm2(x_new) + 1.0);
    x = std::move(x_new);
    fx = f_new;

    if (!descent_ok) {
      termination = PgTermination::descent_violation;
      break;
    }
    if (rel < config.tol) {
      termination = PgTermination::converged;
      break;
    }
  }

  PgReport rep;
  rep.termination = termination;
  rep.iters = iters;
  rep.x_final = x;
  rep.objective = fx;
  {
    const Vector g = h.gradient(x);
    Vector u(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) u[i] = x[i] - config.beta * g[i];
    rep.residual = norm2(sub(x, p.prox(u, config.beta, &x)));
  }
  rep.history.assign(history.begin(), history.end());
  return rep;
}

}  // namespace ncsplit
