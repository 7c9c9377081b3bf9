#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>

#include "ncsplit/dense.hpp"
#include "ncsplit/linear_operator.hpp"
#include "ncsplit/vec.hpp"

namespace ncsplit {

inline constexpr std::size_t kPowerIterationCap = 100000;
inline constexpr double kSurjectivityTol = 1e-12;

namespace detail {

// Power iteration for a symmetric PSD map given as v -> Av. Deterministic
// start: normalized all-ones, falling back to e_0 if that lies in the null
// space. Returns the Rayleigh quotient once the relative residual
// ||Av - lambda v|| <= tol * max(lambda, tiny) holds.
inline double power_iteration(const std::function<Vector(const Vector&)>& apply_sym, std::size_t dim,
                              double tol) {
  if (tol <= 0.0) throw contract_error("power_iteration: tol must be positive");
  if (dim == 0) throw contract_error("power_iteration: empty space");

  Vector v(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
  Vector av = apply_sym(v);
  if (norm2(av) <= 1e-300) {
    v.assign(dim, 0.0);
    v[0] = 1.0;
    av = apply_sym(v);
    if (norm2(av) <= 1e-300) return 0.0;
  }

  double lambda = dot(v, av);
  for (std::size_t it = 0; it < kPowerIterationCap; ++it) {
    const double nav = norm2(av);
    if (nav <= 1e-300) return 0.0;
    for (std::size_t i = 0; i < dim; ++i) v[i] = av[i] / nav;
    av = apply_sym(v);
    lambda = dot(v, av);
    double res = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double r = av[i] - lambda * v[i];
      res += r * r;
    }
    res = std::sqrt(res);
    if (res <= tol * std::max(std::fabs(lambda), 1e-30)) return lambda;
  }
  throw estimation_error("power_iteration: no convergence within cap", lambda);
}

}  // namespace detail

// lambda_max(M* M) by power iteration on the Gram map.
inline double lambda_max_gram(const LinearOperator& op, double tol) {
  if (!(tol > 0.0)) throw contract_error("lambda_max_gram: tol must be positive");
  if (op.kind() == OperatorKind::identity) return 1.0;
  auto gram = [&op](const Vector& v) { return op.adjoint_apply(op.apply(v)); };
  return detail::power_iteration(gram, op.cols(), tol);
}

// lambda_min(M M*) by power iteration on (lbar I - M M*) with
// lbar = lambda_max(M M*) (1 + 1e-6). The difference map has the closed form
// 2 (1 + cos(pi - pi/n)).
inline double lambda_min_gram_out(const LinearOperator& op, double tol) {
  if (!(tol > 0.0)) throw contract_error("lambda_min_gram_out: tol must be positive");
  if (op.kind() == OperatorKind::identity) return 1.0;
  if (op.kind() == OperatorKind::first_difference) {
    const double n = static_cast<double>(op.cols());
    return 2.0 * (1.0 + std::cos(std::numbers::pi - std::numbers::pi / n));
  }
  const double lmax = lambda_max_gram(op, tol);  // = lambda_max(M M*)
  if (lmax <= 0.0) return 0.0;
  const double lbar = lmax * (1.0 + 1e-6);
  auto shifted = [&op, lbar](const Vector& w) {
    Vector out = op.apply(op.adjoint_apply(w));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = lbar * w[i] - out[i];
    return out;
  };
  const double nu = detail::power_iteration(shifted, op.rows(), tol);
  return lbar - nu;
}

inline double opnorm(const LinearOperator& op, double tol = 1e-12) {
  return std::sqrt(std::max(0.0, lambda_max_gram(op, tol)));
}

// Cached spectral summaries (computed once per operator at a fixed tolerance).
inline double cached_sigma(const LinearOperator& op) {
  return cached_sigma_slot(op, [](const LinearOperator& m) { return lambda_min_gram_out(m, 1e-12); });
}

inline double cached_opnorm(const LinearOperator& op) {
  return cached_opnorm_slot(op, [](const LinearOperator& m) { return opnorm(m); });
}

// Extreme eigenvalues of a symmetric dense matrix via shifted power
// iterations (Gershgorin bound supplies the shift).
inline std::pair<double, double> eigen_extremes_sym(const DenseMatrix& q, double tol = 1e-12) {
  if (q.rows != q.cols) throw dimension_error("eigen_extremes_sym: square required");
  const std::size_t n = q.rows;
  double shift = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += std::fabs(q(i, j));
    shift = std::max(shift, row);
  }
  if (shift == 0.0) return {0.0, 0.0};
  // Q + shift I is PSD; so is shift I - Q.
  auto up = [&](const Vector& v) {
    Vector out = q.matvec(v);
    for (std::size_t i = 0; i < n; ++i) out[i] += shift * v[i];
    return out;
  };
  auto down = [&](const Vector& v) {
    Vector out = q.matvec(v);
    for (std::size_t i = 0; i < n; ++i) out[i] = shift * v[i] - out[i];
    return out;
  };
  const double lmax = detail::power_iteration(up, n, tol) - shift;
  const double lmin = shift - detail::power_iteration(down, n, tol);
  return {lmax, lmin};
}

}  // namespace ncsplit
