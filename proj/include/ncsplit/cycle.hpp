#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ncsplit/prox.hpp"
#include "ncsplit/vec.hpp"

namespace ncsplit {

// Two-block splitting on the plane feasibility problem with
// C = { x : x_2 = 0 } and D = { (0,0), (2,eta), (2,-eta) }. With the
// canonical start x0 = (2, 0), z1_0 = (0, -beta eta), z2_0 = (0, beta eta)
// the iteration falls into a period-8 limit cycle for every beta > 0: the
// map into D is injective but not surjective, so the convergence guarantees
// do not apply.
struct CycleState {
  Vector y1, y2, x, z1, z2;
};

struct CycleTrace {
  double eta = 0.0;
  double beta = 0.0;
  std::vector<CycleState> iterates;  // t = 1, 2, ...
};

struct CycleVerdict {
  bool pass = false;
  std::size_t period = 0;  // 8 when the cycle is confirmed
  std::string message;
};

inline CycleTrace cycle_run(double eta, double beta, std::size_t steps) {
  if (!(eta > 0.0 && eta <= 1.0)) throw contract_error("cycle_run: eta must lie in (0, 1]");
  if (!(beta > 0.0)) throw contract_error("cycle_run: beta must be positive");
  if (steps == 0) throw contract_error("cycle_run: need at least one step");

  const ProxOperator d_set = ProxOperator::indicator_finite_set(
      {Vector{0.0, 0.0}, Vector{2.0, eta}, Vector{2.0, -eta}});

  CycleTrace trace;
  trace.eta = eta;
  trace.beta = beta;
  trace.iterates.reserve(steps);

  Vector x{2.0, 0.0};
  Vector z1{0.0, -beta * eta};
  Vector z2{0.0, beta * eta};
  Vector y2;

  for (std::size_t t = 1; t <= steps; ++t) {
    const Vector u1{x[0] - z1[0] / beta, x[1] - z1[1] / beta};
    const Vector u2{x[0] - z2[0] / beta, x[1] - z2[1] / beta};
    const Vector y1{u1[0], 0.0};  // projection onto C
    y2 = d_set.prox(u2, 1.0, y2.empty() ? nullptr : &y2);
    x = {0.5 * (y1[0] + z1[0] / beta + y2[0] + z2[0] / beta),
         0.5 * (y1[1] + z1[1] / beta + y2[1] + z2[1] / beta)};
    for (std::size_t i = 0; i < 2; ++i) {
      z1[i] -= beta * (x[i] - y1[i]);
      z2[i] -= beta * (x[i] - y2[i]);
    }
    trace.iterates.push_back({y1, y2, x, z1, z2});
  }
  return trace;
}

namespace detail {

inline bool close_state(const CycleState& a, const CycleState& b, double tol) {
  auto ok = [tol](const Vector& u, const Vector& v) {
    for (std::size_t i = 0; i < u.size(); ++i)
      if (std::fabs(u[i] - v[i]) > tol) return false;
    return true;
  };
  return ok(a.y1, b.y1) && ok(a.y2, b.y2) && ok(a.x, b.x) && ok(a.z1, b.z1) && ok(a.z2, b.z2);
}

}  // namespace detail

// Confirms period 8 over the whole trace and the closed-form first cycle:
//   y1^t = (2, 0),  y2^t = (2, -eta) then (2, eta),
//   x^t  = (2, -eta/2) then (2, eta/2),
//   z1^t = (0, (2 - |t-4|) beta eta / 2),  z2^t = -z1^t.
inline CycleVerdict cycle_check(const CycleTrace& trace, double tol = 1e-12) {
  const double eta = trace.eta;
  const double beta = trace.beta;
  const auto& it = trace.iterates;
  if (it.size() < 9) return {false, 0, "trace too short to confirm a period"};

  for (std::size_t t = 0; t + 8 < it.size(); ++t) {
    if (!detail::close_state(it[t], it[t + 8], tol))
      return {false, 0, "period-8 recurrence fails at t = " + std::to_string(t + 1)};
  }

  for (std::size_t t = 1; t <= 8; ++t) {
    const CycleState& s = it[t - 1];
    const double sign = t <= 4 ? -1.0 : 1.0;
    const double z1y = (2.0 - std::fabs(static_cast<double>(t) - 4.0)) * beta * eta / 2.0;
    const CycleState want{{2.0, 0.0},
                          {2.0, sign * eta},
                          {2.0, sign * eta / 2.0},
                          {0.0, z1y},
                          {0.0, -z1y}};
    if (!detail::close_state(s, want, tol))
      return {false, 0, "closed-form table fails at t = " + std::to_string(t)};
  }
  return {true, 8, "period-8 limit cycle confirmed"};
}

}  // namespace ncsplit
