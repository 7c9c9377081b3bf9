#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>

#include "ncsplit/dense.hpp"
#include "ncsplit/linear_operator.hpp"
#include "ncsplit/spectral.hpp"
#include "ncsplit/vec.hpp"

namespace ncsplit {

enum class SmoothKind {
  least_squares,          // 0.5 ||Ax - b||^2
  proximity,              // 0.5 ||x - xhat||^2
  negated_least_squares,  // -0.5 ||Ax - b||^2
  indefinite_quadratic,   // 0.5 <x, Qx> + <c, x>
  custom                  // caller-supplied value/gradient and bounds
};

struct HessianBounds {
  double q1;  // upper scalar bound, Q1 = q1 I
  double q2;  // lower scalar bound, Q2 = q2 I
  double lipschitz;
};

// Smooth term h with closed-form value/gradient and scalar Hessian bounds.
class SmoothModel {
 public:
  static SmoothModel least_squares(LinearOperator a, Vector b) {
    if (b.size() != a.rows()) throw dimension_error("least_squares: dim(b) != rows(A)");
    require_finite(b, "least_squares b");
    SmoothModel h(SmoothKind::least_squares, a.cols());
    h.a_ = std::move(a);
    h.b_ = std::move(b);
    return h;
  }

  static SmoothModel proximity(Vector x_hat) {
    require_finite(x_hat, "proximity anchor");
    SmoothModel h(SmoothKind::proximity, x_hat.size());
    h.x_hat_ = std::move(x_hat);
    return h;
  }

  static SmoothModel negated_least_squares(LinearOperator a, Vector b) {
    if (b.size() != a.rows()) throw dimension_error("negated_least_squares: dim(b) != rows(A)");
    require_finite(b, "negated_least_squares b");
    SmoothModel h(SmoothKind::negated_least_squares, a.cols());
    h.a_ = std::move(a);
    h.b_ = std::move(b);
    return h;
  }

  static SmoothModel indefinite_quadratic(DenseMatrix q, Vector c) {
    if (q.rows != q.cols || q.rows != c.size())
      throw dimension_error("indefinite_quadratic: Q must be square, dim(c) = dim(Q)");
    require_finite(c, "quadratic linear term");
    SmoothModel h(SmoothKind::indefinite_quadratic, c.size());
    h.q_ = std::move(q);
    h.c_ = std::move(c);
    return h;
  }

  static SmoothModel custom(std::size_t dim, std::function<double(const Vector&)> value,
                            std::function<Vector(const Vector&)> gradient, HessianBounds bounds) {
    SmoothModel h(SmoothKind::custom, dim);
    h.custom_value_ = std::move(value);
    h.custom_gradient_ = std::move(gradient);
    h.bounds_cache_->value = bounds;
    return h;
  }

  SmoothKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  const LinearOperator& a() const { return *a_; }
  const Vector& b() const { return b_; }
  const Vector& x_hat() const { return x_hat_; }
  const DenseMatrix& q() const { return q_; }
  const Vector& c() const { return c_; }

  double value(const Vector& x) const {
    check_dim(x);
    switch (kind_) {
      case SmoothKind::least_squares: {
        const Vector r = sub(a_->apply(x), b_);
        return 0.5 * dot(r, r);
      }
      case SmoothKind::proximity: {
        const Vector r = sub(x, x_hat_);
        return 0.5 * dot(r, r);
      }
      case SmoothKind::negated_least_squares: {
        const Vector r = sub(a_->apply(x), b_);
        return -0.5 * dot(r, r);
      }
      case SmoothKind::indefinite_quadratic:
        return 0.5 * dot(x, q_.matvec(x)) + dot(c_, x);
      case SmoothKind::custom:
        return custom_value_(x);
    }
    throw contract_error("value: bad kind");
  }

  Vector gradient(const Vector& x) const {
    check_dim(x);
    switch (kind_) {
      case SmoothKind::least_squares:
        return a_->adjoint_apply(sub(a_->apply(x), b_));
      case SmoothKind::proximity:
        return sub(x, x_hat_);
      case SmoothKind::negated_least_squares: {
        Vector g = a_->adjoint_apply(sub(a_->apply(x), b_));
        scale_inplace(g, -1.0);
        return g;
      }
      case SmoothKind::indefinite_quadratic:
        return add(q_.matvec(x), c_);
      case SmoothKind::custom:
        return custom_gradient_(x);
    }
    throw contract_error("gradient: bad kind");
  }

  // (q1, q2, L) with q2 I <= hessian <= q1 I and ||hessian|| <= L.
  HessianBounds hessian_bounds() const {
    std::lock_guard<std::mutex> lock(bounds_cache_->mu);
    if (bounds_cache_->value) return *bounds_cache_->value;
    HessianBounds b{};
    switch (kind_) {
      case SmoothKind::least_squares: {
        const double l = lambda_max_gram(*a_, 1e-12);
        b = {l, 0.0, l};
        break;
      }
      case SmoothKind::proximity:
        b = {1.0, 1.0, 1.0};
        break;
      case SmoothKind::negated_least_squares: {
        const double l = lambda_max_gram(*a_, 1e-12);
        b = {0.0, -l, l};
        break;
      }
      case SmoothKind::indefinite_quadratic: {
        const auto [lmax, lmin] = eigen_extremes_sym(q_);
        b = {lmax, lmin, std::max(std::fabs(lmax), std::fabs(lmin))};
        break;
      }
      case SmoothKind::custom:
        throw contract_error("custom smooth model must carry caller bounds");
    }
    bounds_cache_->value = b;
    return b;
  }

  bool has_constant_hessian() const { return kind_ != SmoothKind::custom; }

  // Hessian as a scalar multiple of the identity, when it is one.
  std::optional<double> hessian_scale() const {
    if (kind_ == SmoothKind::proximity) return 1.0;
    return std::nullopt;
  }

  // Dense Hessian for the quadratic kinds that need one.
  DenseMatrix hessian_matrix() const {
    switch (kind_) {
      case SmoothKind::least_squares:
      case SmoothKind::negated_least_squares: {
        const double sign = kind_ == SmoothKind::least_squares ? 1.0 : -1.0;
        const std::size_t n = dim_;
        DenseMatrix g(n, n);
        for (std::size_t i = 0; i < n; ++i) {
          Vector e(n, 0.0);
          e[i] = 1.0;
          const Vector col = a_->adjoint_apply(a_->apply(e));
          for (std::size_t j = 0; j < n; ++j) g(j, i) = sign * col[j];
        }
        return g;
      }
      case SmoothKind::proximity:
        return identity_matrix(dim_);
      case SmoothKind::indefinite_quadratic:
        return q_;
      case SmoothKind::custom:
        throw contract_error("custom smooth model has no materialized hessian");
    }
    throw contract_error("hessian_matrix: bad kind");
  }

  Vector gradient_at_zero() const { return gradient(zeros(dim_)); }

  bool coercive() const {
    switch (kind_) {
      case SmoothKind::proximity:
        return true;
      case SmoothKind::least_squares: {
        // coercive iff A is injective
        const LinearOperator at = transposed(*a_);
        return lambda_min_gram_out(at, 1e-10) > 1e-12;
      }
      case SmoothKind::indefinite_quadratic:
        return hessian_bounds().q2 > 0.0;
      default:
        return false;
    }
  }

  bool bounded_below() const {
    switch (kind_) {
      case SmoothKind::proximity:
      case SmoothKind::least_squares:
        return true;
      case SmoothKind::indefinite_quadratic:
        return hessian_bounds().q2 > 0.0;
      default:
        return false;
    }
  }

 private:
  SmoothModel(SmoothKind k, std::size_t dim) : kind_(k), dim_(dim) {}

  static LinearOperator transposed(const LinearOperator& op) {
    if (op.kind() == OperatorKind::identity) return op;
    const std::size_t r = op.rows(), c = op.cols();
    Vector entries(r * c, 0.0);
    for (std::size_t j = 0; j < c; ++j) {
      Vector e(c, 0.0);
      e[j] = 1.0;
      const Vector col = op.apply(e);  // column j of op = row j of op^T
      for (std::size_t i = 0; i < r; ++i) entries[j * r + i] = col[i];
    }
    return LinearOperator::dense(c, r, std::move(entries));
  }

  void check_dim(const Vector& x) const {
    if (x.size() != dim_) throw dimension_error("smooth model: dim mismatch");
  }

  SmoothKind kind_;
  std::size_t dim_;
  std::optional<LinearOperator> a_;
  Vector b_, x_hat_, c_;
  DenseMatrix q_;
  std::function<double(const Vector&)> custom_value_;
  std::function<Vector(const Vector&)> custom_gradient_;

  struct BoundsCache {
    std::mutex mu;
    std::optional<HessianBounds> value;
  };
  std::shared_ptr<BoundsCache> bounds_cache_ = std::make_shared<BoundsCache>();
};

enum class ProximalTermMode { zero, l_smoothing };

// Bregman proximal term phi in the x-subproblem, carried as scalar operator
// bounds: T1 = t1 I, T2 = t2 I, and Q3 = q3 I with [hessian(h + phi)]^2 <= Q3.
struct ProximalTermSpec {
  ProximalTermMode mode = ProximalTermMode::zero;
  double smoothing_l = 0.0;  // the L of phi = (L/2)||x||^2 - h
  double t1 = 0.0;
  double t2 = 0.0;
  double q3 = 0.0;

  static ProximalTermSpec zero(const SmoothModel& h) {
    const HessianBounds b = h.hessian_bounds();
    ProximalTermSpec s;
    s.mode = ProximalTermMode::zero;
    s.q3 = std::max(b.q1 * b.q1, b.q2 * b.q2);
    return s;
  }

  static ProximalTermSpec l_smoothing(double l, const SmoothModel& h) {
    const HessianBounds b = h.hessian_bounds();
    if (l < b.lipschitz * (1.0 - 1e-12))
      throw contract_error("l_smoothing: L must dominate the gradient Lipschitz bound");
    ProximalTermSpec s;
    s.mode = ProximalTermMode::l_smoothing;
    s.smoothing_l = l;
    s.t1 = 2.0 * l;
    s.t2 = 0.0;
    s.q3 = l * l;
    return s;
  }
};

// D_phi(x1, x2). Zero mode: 0. Smoothing mode:
// (L/2)||x1-x2||^2 - h(x1) + h(x2) + <grad h(x2), x1-x2>, always >= 0.
inline double bregman_value(const ProximalTermSpec& spec, const SmoothModel& h, const Vector& x1,
                            const Vector& x2) {
  if (spec.mode == ProximalTermMode::zero) return 0.0;
  const Vector d = sub(x1, x2);
  const double v =
      0.5 * spec.smoothing_l * dot(d, d) - h.value(x1) + h.value(x2) + dot(h.gradient(x2), d);
  if (v < -1e-10)
    throw contract_error("bregman_value: negative distance, smoothing L is too small");
  return v;
}

}  // namespace ncsplit
