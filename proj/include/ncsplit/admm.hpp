#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ncsplit/linear_operator.hpp"
#include "ncsplit/prox.hpp"
#include "ncsplit/smooth.hpp"
#include "ncsplit/spd_solve.hpp"
#include "ncsplit/spectral.hpp"
#include "ncsplit/vec.hpp"

namespace ncsplit {

enum class AdmmTermination { converged, max_iter, merit_violation };

enum class BetaRule {
  identity_linearized,
  identity_least_squares,
  surjective_strongly_convex,
  generic_search,
  none
};

inline const char* to_string(BetaRule r) {
  switch (r) {
    case BetaRule::identity_linearized: return "identity_linearized";
    case BetaRule::identity_least_squares: return "identity_least_squares";
    case BetaRule::surjective_strongly_convex: return "surjective_strongly_convex";
    case BetaRule::generic_search: return "generic_search";
    case BetaRule::none: return "none";
  }
  return "none";
}

struct StationarityResiduals {
  double grad = 0.0;              // ||grad h(x) - M* z||
  double feas = 0.0;              // ||M x - y||
  double prox_fixed_point = 0.0;  // ||y - prox(P, y - z/beta, 1/beta)||
};

struct AssumptionReport {
  double sigma = 0.0;       // lambda_min(M M*)
  double delta = 0.0;       // q2 + t2 + beta lambda_min(M* M)
  double gamma_used = 0.0;
  double margin = 0.0;      // delta + t2 - (2/(sigma beta)) (q3/gamma + t1^2/(1-gamma))
  bool assumption_ok = false;
  double suggested_beta = std::numeric_limits<double>::quiet_NaN();
  BetaRule rule = BetaRule::none;
  bool bounded_ok = false;
  std::string bounded_reason;
};

struct BetaSuggestion {
  double beta;
  double gamma;
  BetaRule rule;
};

struct BoundednessVerdict {
  bool ok;
  std::string reason;
};

struct BetaHeuristic {
  double beta0 = 1.0;
  double growth = 2.0;
  double cap_factor = 1.0001;
  double blowup_norm = 1e10;
  double step_slack = 1000.0;
};

struct AdmmHistoryEntry {
  std::size_t iter;
  double merit;
  double step_x, step_y, step_z;
  double beta;
};

// Snapshot handed to the per-iteration observer; references are valid only
// during the call.
struct AdmmIterationView {
  std::size_t iter;
  double beta;
  const Vector& x_prev;
  const Vector& y_prev;
  const Vector& z_prev;
  const Vector& x;
  const Vector& y;
  const Vector& z;
  const Vector& prox_input;  // M x_prev - z_prev / beta
  double lagrangian;
  double merit;
  double step_x, step_y, step_z;
};

struct AdmmConfig {
  double beta = 1.0;
  std::optional<double> gamma;  // auto-picked when absent
  ProximalTermSpec phi;
  double tol = 1e-8;
  std::size_t max_iter = 200000;
  std::optional<BetaHeuristic> beta_heuristic;
  bool record_history = false;
  std::function<void(const AdmmIterationView&)> observer;

  void validate() const {
    if (beta_heuristic) {
      const auto& h = *beta_heuristic;
      if (!(h.beta0 > 0.0) || !(h.growth > 1.0) || !(h.cap_factor >= 1.0) ||
          !(h.blowup_norm > 0.0) || !(h.step_slack > 0.0))
        throw contract_error("AdmmConfig: bad heuristic parameters");
    } else if (!(beta > 0.0)) {
      throw contract_error("AdmmConfig: beta must be positive");
    }
    if (gamma && !(*gamma > 0.0 && *gamma < 1.0))
      throw contract_error("AdmmConfig: gamma must lie in (0,1)");
    if (!(tol > 0.0)) throw contract_error("AdmmConfig: tol must be positive");
    if (max_iter == 0) throw contract_error("AdmmConfig: max_iter must be positive");
  }
};

struct AdmmInit {
  Vector x, y, z;
};

struct AdmmState {
  Vector x, y, z;
  Vector x_prev, y_prev, z_prev;
  std::size_t t = 0;
  double merit = std::numeric_limits<double>::quiet_NaN();
};

struct AdmmReport {
  AdmmTermination termination = AdmmTermination::max_iter;
  std::size_t iters = 0;
  Vector x_final, y_final, z_final;
  StationarityResiduals residuals;
  double objective = 0.0;  // h(x_final) + P(y_final)
  double final_beta = 0.0;
  std::vector<AdmmHistoryEntry> history;
};

namespace detail {

// Rebuild scalar bounds from (mode, h) so hand-assembled specs cannot carry
// stale t1/t2/q3 values into the monitoring constants.
inline ProximalTermSpec normalize_phi(const ProximalTermSpec& phi, const SmoothModel& h) {
  if (phi.mode == ProximalTermMode::zero) return ProximalTermSpec::zero(h);
  return ProximalTermSpec::l_smoothing(phi.smoothing_l, h);
}

// Feasible open interval of gamma for
//   lhs > factor * (q3/gamma + t1^2/(1-gamma)),   gamma in (0,1).
// Empty optional when no gamma qualifies.
inline std::optional<std::pair<double, double>> gamma_interval(double lhs, double factor, double q3,
                                                               double t1) {
  if (!(lhs > 0.0)) return std::nullopt;
  const double thr = lhs / factor;
  auto g = [&](double gamma) { return q3 / gamma + (t1 * t1) / (1.0 - gamma); };
  if (q3 <= 0.0 && t1 <= 0.0) return std::make_pair(0.0, 1.0);
  if (t1 <= 0.0) {
    const double lo = q3 / thr;
    if (lo >= 1.0) return std::nullopt;
    return std::make_pair(lo, 1.0);
  }
  if (q3 <= 0.0) {
    const double hi = 1.0 - (t1 * t1) / thr;
    if (hi <= 0.0) return std::nullopt;
    return std::make_pair(0.0, hi);
  }
  const double sq = std::sqrt(q3);
  const double gstar = sq / (sq + t1);
  if (g(gstar) >= thr) return std::nullopt;
  auto bisect = [&](double a, double b, bool decreasing) {
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (a + b);
      const bool below = g(mid) < thr;
      if (below == decreasing)
        b = mid;
      else
        a = mid;
    }
    return 0.5 * (a + b);
  };
  const double lo = bisect(1e-16, gstar, true);    // g decreasing left of gstar
  const double hi = bisect(gstar, 1.0 - 1e-16, false);
  return std::make_pair(lo, hi);
}

inline BetaRule classify_pattern(const SmoothModel& h, const LinearOperator& m,
                                 const ProximalTermSpec& phi) {
  if (phi.mode == ProximalTermMode::l_smoothing && m.kind() == OperatorKind::identity &&
      phi.smoothing_l > 0.0)
    return BetaRule::identity_linearized;
  if (phi.mode == ProximalTermMode::zero && m.kind() == OperatorKind::identity &&
      h.kind() == SmoothKind::least_squares)
    return BetaRule::identity_least_squares;
  if (phi.mode == ProximalTermMode::zero && h.kind() == SmoothKind::proximity)
    return BetaRule::surjective_strongly_convex;
  return BetaRule::generic_search;
}

}  // namespace detail

// Verifies the convergence conditions at the given beta. gamma defaults to
// 1/2 for the linearized-identity pattern and to the midpoint of the
// feasible interval otherwise.
inline AssumptionReport check_assumption(const SmoothModel& h, const LinearOperator& m,
                                         const ProximalTermSpec& phi_in, double beta,
                                         std::optional<double> gamma = std::nullopt) {
  if (!(beta > 0.0)) throw contract_error("check_assumption: beta must be positive");
  if (gamma && !(*gamma > 0.0 && *gamma < 1.0))
    throw contract_error("check_assumption: gamma must lie in (0,1)");
  if (h.dim() != m.cols()) throw dimension_error("check_assumption: dim(h) != cols(M)");

  const ProximalTermSpec phi = detail::normalize_phi(phi_in, h);
  AssumptionReport rep;
  rep.sigma = cached_sigma(m);
  if (rep.sigma <= kSurjectivityTol)
    throw not_surjective_error("check_assumption: M is not surjective (lambda_min(MM*) ~ 0)");

  const HessianBounds hb = h.hessian_bounds();
  const double lam_min_in = m.rows() < m.cols() ? 0.0 : rep.sigma;  // square: same spectrum
  rep.delta = hb.q2 + phi.t2 + beta * lam_min_in;

  const double lhs = rep.delta + phi.t2;
  const double factor = 2.0 / (rep.sigma * beta);
  if (gamma) {
    rep.gamma_used = *gamma;
  } else if (detail::classify_pattern(h, m, phi) == BetaRule::identity_linearized) {
    rep.gamma_used = 0.5;
  } else {
    const auto ival = detail::gamma_interval(lhs, factor, phi.q3, phi.t1);
    rep.gamma_used = ival ? 0.5 * (ival->first + ival->second) : 0.5;
  }
  rep.margin =
      lhs - factor * (phi.q3 / rep.gamma_used + phi.t1 * phi.t1 / (1.0 - rep.gamma_used));
  rep.assumption_ok = rep.sigma > 0.0 && rep.delta > 0.0 && rep.margin > 0.0;
  return rep;
}

// Penalty parameter from the pattern rules, with a doubling search fallback.
inline BetaSuggestion suggest_beta(const SmoothModel& h, const LinearOperator& m,
                                   const ProximalTermSpec& phi_in) {
  const ProximalTermSpec phi = detail::normalize_phi(phi_in, h);
  const HessianBounds hb = h.hessian_bounds();
  BetaRule rule = detail::classify_pattern(h, m, phi);

  const auto midpoint = [](double lo, double hi) { return 0.5 * (lo + hi); };
  switch (rule) {
    case BetaRule::identity_linearized: {
      const double l = phi.smoothing_l;
      return {1.01 * 5.0 * l, 0.5, rule};
    }
    case BetaRule::identity_least_squares: {
      const double l = hb.lipschitz;
      if (l > 0.0) {
        const double beta = 1.01 * std::sqrt(2.0) * l;
        return {beta, midpoint(std::sqrt(2.0) * l / beta, 1.0), rule};
      }
      rule = BetaRule::generic_search;
      break;
    }
    case BetaRule::surjective_strongly_convex: {
      const double sigma = cached_sigma(m);
      if (sigma <= kSurjectivityTol)
        throw not_surjective_error("suggest_beta: M is not surjective");
      const double beta = 1.01 * 2.0 / sigma;
      return {beta, midpoint(2.0 / (sigma * beta), 1.0), rule};
    }
    default:
      break;
  }

  double beta = std::max(1.0, hb.lipschitz);
  for (int k = 0; k <= 60; ++k) {
    const AssumptionReport rep = check_assumption(h, m, phi, beta);
    if (rep.assumption_ok) return {beta, rep.gamma_used, BetaRule::generic_search};
    beta *= 2.0;
  }
  throw no_valid_beta_error("suggest_beta: doubling search exhausted (cap 2^60)");
}

// Sufficient conditions for bounded iterate sequences. Combines the
// per-pattern zeta certificate for the gradient lower bound with either
// (invertible M, coercive P) or (coercive h, P bounded below).
inline BoundednessVerdict check_boundedness(const SmoothModel& h, const ProxOperator& p,
                                            const LinearOperator& m, double beta, double gamma) {
  if (!(beta > 0.0) || !(gamma > 0.0 && gamma < 1.0))
    throw contract_error("check_boundedness: need beta > 0 and gamma in (0,1)");
  if (!h.bounded_below()) return {false, "h_unbounded_below"};

  const double sigma = cached_sigma(m);
  if (sigma <= kSurjectivityTol) return {false, "M_not_surjective"};

  double zeta;
  switch (h.kind()) {
    case SmoothKind::least_squares:
      zeta = 2.0 * std::sqrt(2.0) * h.hessian_bounds().lipschitz / sigma;
      break;
    case SmoothKind::proximity:
      zeta = 4.0 / sigma;
      break;
    default:
      return {false, "unknown"};  // no zeta rule for this smooth kind
  }
  if (!(zeta < 2.0 * beta * gamma)) return {false, "zeta_condition_fails"};

  if (m.is_square() && p.coercive()) return {true, "invertible_M_coercive_P"};
  if (h.coercive() && p.bounded_below()) return {true, "coercive_h_bounded_P"};
  return {false, "no_sufficient_condition"};
}

// h(x) + P(y) - <z, Mx - y> + (beta/2) ||Mx - y||^2; +infinity when P(y) is.
inline double augmented_lagrangian(const SmoothModel& h, const ProxOperator& p,
                                   const LinearOperator& m, double beta, const Vector& x,
                                   const Vector& y, const Vector& z) {
  const double py = p.eval(y);
  if (!std::isfinite(py)) return std::numeric_limits<double>::infinity();
  const Vector r = sub(m.apply(x), y);
  return h.value(x) + py - dot(z, r) + 0.5 * beta * dot(r, r);
}

inline StationarityResiduals stationarity_residuals(const SmoothModel& h, const ProxOperator& p,
                                                    const LinearOperator& m, double beta,
                                                    const Vector& x, const Vector& y,
                                                    const Vector& z) {
  if (!(beta > 0.0)) throw contract_error("stationarity_residuals: beta must be positive");
  StationarityResiduals r;
  r.grad = norm2(sub(h.gradient(x), m.adjoint_apply(z)));
  r.feas = norm2(sub(m.apply(x), y));
  Vector u(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) u[i] = y[i] - z[i] / beta;
  r.prox_fixed_point = norm2(sub(y, p.prox(u, 1.0 / beta, &y)));
  return r;
}

// Proximal alternating-direction iteration:
//   y <- prox_{P/beta}(M x - z/beta)            (nearest-previous tie rule)
//   x <- argmin of the quadratic x-subproblem   (one SPD solve)
//   z <- z - beta (M x - y)
// terminating when the summed relative step change drops below tol. With the
// growth heuristic enabled, beta starts at beta0 and is doubled (capped at
// cap_factor * 2/sigma) whenever the iterates look divergent. The monitored
// merit is L_beta plus the smoothing correction; an increase while the
// verified-parameter regime is active ends the run with merit_violation.
inline AdmmReport admm_solve(const SmoothModel& h, const ProxOperator& p, const LinearOperator& m,
                             const AdmmConfig& config, const AdmmInit& init) {
  config.validate();
  if (h.dim() != m.cols()) throw dimension_error("admm_solve: dim(h) != cols(M)");
  if (init.x.size() != m.cols() || init.y.size() != m.rows() || init.z.size() != m.rows())
    throw dimension_error("admm_solve: init dimensions inconsistent with M");
  require_finite(init.x, "admm init x");
  require_finite(init.y, "admm init y");
  require_finite(init.z, "admm init z");

  const ProximalTermSpec phi = detail::normalize_phi(config.phi, h);
  const double sigma = cached_sigma(m);
  const bool surjective = sigma > kSurjectivityTol;
  if (config.beta_heuristic && !surjective)
    throw contract_error("admm_solve: the beta heuristic needs a surjective M");

  double beta = config.beta_heuristic ? config.beta_heuristic->beta0 : config.beta;

  // Monitoring constants at the current beta.
  double gamma = 0.5;
  bool monitor = false;
  auto refresh_monitor = [&]() {
    monitor = false;
    if (!surjective) return;
    AssumptionReport rep;
    try {
      rep = check_assumption(h, m, phi, beta, config.gamma);
    } catch (const not_surjective_error&) {
      return;
    }
    gamma = rep.gamma_used;
    monitor = rep.assumption_ok;
  };
  refresh_monitor();

  // x-subproblem solver; rebuilt whenever beta changes.
  std::optional<DenseMatrix> h_dense;
  double h_scale = 0.0;
  bool scalar_h = false;
  if (phi.mode == ProximalTermMode::zero) {
    if (!h.has_constant_hessian())
      throw unsupported_configuration_error(
          "admm_solve: x-update with phi = 0 requires a quadratic h; use the l_smoothing mode");
    if (auto s = h.hessian_scale()) {
      scalar_h = true;
      h_scale = *s;
    } else {
      h_dense = h.hessian_matrix();
    }
  } else {
    scalar_h = true;
    h_scale = phi.smoothing_l;
  }
  auto make_solver = [&](double b) {
    return scalar_h ? SpdSolver(h_scale, b, m) : SpdSolver(*h_dense, b, m);
  };
  SpdSolver solver = make_solver(beta);

  const Vector g0 = phi.mode == ProximalTermMode::zero ? h.gradient_at_zero() : Vector();

  AdmmState st;
  st.x = init.x;
  st.y = init.y;
  st.z = init.z;
  Vector mx = m.apply(st.x);

  std::deque<AdmmHistoryEntry> history;
  constexpr std::size_t kHistoryCap = 10000;

  double merit_prev = std::numeric_limits<double>::quiet_NaN();
  AdmmTermination termination = AdmmTermination::max_iter;
  std::size_t iters = 0;

  for (std::size_t t = 1; t <= config.max_iter; ++t) {
    iters = t;
    st.x_prev = st.x;
    st.y_prev = st.y;
    st.z_prev = st.z;

    Vector u(m.rows());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = mx[i] - st.z_prev[i] / beta;
    st.y = p.prox(u, 1.0 / beta, &st.y_prev);

    Vector zby(m.rows());
    for (std::size_t i = 0; i < zby.size(); ++i) zby[i] = st.z_prev[i] + beta * st.y[i];
    Vector rhs = m.adjoint_apply(zby);
    if (phi.mode == ProximalTermMode::zero) {
      axpy(-1.0, g0, rhs);
    } else {
      axpy(phi.smoothing_l, st.x_prev, rhs);
      axpy(-1.0, h.gradient(st.x_prev), rhs);
    }
    st.x = solver.solve(rhs);
    if (!all_finite(st.x)) throw divergence_error("admm_solve: non-finite x iterate");

    mx = m.apply(st.x);
    Vector resid = sub(mx, st.y);
    st.z = st.z_prev;
    axpy(-beta, resid, st.z);

    const double dx = dist2(st.x, st.x_prev);
    const double dy = dist2(st.y, st.y_prev);
    const double dz = beta * norm2(resid);
    st.t = t;

    const double lag = h.value(st.x) + p.eval(st.y) - dot(st.z, resid) + 0.5 * beta * dot(resid, resid);
    double merit = lag;
    if (phi.t1 > 0.0 && surjective)
      merit += phi.t1 * phi.t1 / (sigma * beta * (1.0 - gamma)) * dx * dx;
    st.merit = merit;

    if (config.record_history) {
      if (history.size() == kHistoryCap) history.pop_front();
      history.push_back({t, merit, dx, dy, dz, beta});
    }
    if (config.observer)
      config.observer(
          {t, beta, st.x_prev, st.y_prev, st.z_prev, st.x, st.y, st.z, u, lag, merit, dx, dy, dz});

    const double rel = (dx + dy + dz) / (norm2(st.x) + norm2(st.y) + norm2(st.z) + 1.0);
    if (rel < config.tol) {
      termination = AdmmTermination::converged;
      break;
    }

    if (monitor && std::isfinite(merit_prev) &&
        merit > merit_prev + 1e-8 * (1.0 + std::fabs(merit_prev))) {
      termination = AdmmTermination::merit_violation;
      break;
    }
    merit_prev = merit;

    if (config.beta_heuristic && beta < 2.0 / sigma &&
        (norm2(st.x) > config.beta_heuristic->blowup_norm ||
         dx > config.beta_heuristic->step_slack / static_cast<double>(t))) {
      beta = std::min(config.beta_heuristic->cap_factor * 2.0 / sigma,
                      config.beta_heuristic->growth * beta);
      solver = make_solver(beta);
      merit_prev = std::numeric_limits<double>::quiet_NaN();
      refresh_monitor();
    }
  }

  AdmmReport rep;
  rep.termination = termination;
  rep.iters = iters;
  rep.x_final = st.x;
  rep.y_final = st.y;
  rep.z_final = st.z;
  rep.residuals = stationarity_residuals(h, p, m, beta, st.x, st.y, st.z);
  rep.objective = h.value(st.x) + p.eval(st.y);
  rep.final_beta = beta;
  rep.history.assign(history.begin(), history.end());
  return rep;
}

// Initialization from a converged run on a convex relaxation: x0 is the
// relaxed solution, y0 = M x0, and z0 solves MM* z0 = M grad h(x0), so that
// M* z0 = grad h(x0) when the gradient lies in range(M*).
inline AdmmInit warm_start_from_l1(const SmoothModel& h, const LinearOperator& m,
                                   const AdmmReport& relaxation_report) {
  if (relaxation_report.termination != AdmmTermination::converged)
    throw contract_error("warm_start_from_l1: relaxation run did not converge");
  const Vector& x0 = relaxation_report.x_final;
  if (x0.size() != m.cols()) throw dimension_error("warm_start_from_l1: dim mismatch");

  AdmmInit init;
  init.x = x0;
  init.y = m.apply(x0);
  const Vector g = h.gradient(x0);
  if (m.kind() == OperatorKind::identity) {
    init.z = g;
    return init;
  }
  if (cached_sigma(m) <= kSurjectivityTol)
    throw not_surjective_error("warm_start_from_l1: MM* is singular");

  const std::size_t rows = m.rows();
  DenseMatrix gram(rows, rows);
  for (std::size_t k = 0; k < rows; ++k) {
    Vector e(rows, 0.0);
    e[k] = 1.0;
    const Vector col = m.apply(m.adjoint_apply(e));
    for (std::size_t i = 0; i < rows; ++i) gram(i, k) = col[i];
  }
  const Vector rhs = m.apply(g);
  DenseMatrix chol;
  try {
    chol = detail::cholesky(gram);
  } catch (const factorization_error&) {
    throw not_surjective_error("warm_start_from_l1: MM* is singular");
  }
  init.z = detail::cholesky_solve(chol, rhs);
  return init;
}

}  // namespace ncsplit
