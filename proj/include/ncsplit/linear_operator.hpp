#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <vector>

#include "ncsplit/vec.hpp"

namespace ncsplit {

enum class OperatorKind { dense, identity, first_difference };

// Immutable linear map M : R^n -> R^m with apply/adjoint and lazily cached
// spectral summaries (sigma = lambda_min(M M*), opnorm = ||M||).
class LinearOperator {
 public:
  LinearOperator() = default;  // 0 x 0 identity; reassign before use

  static LinearOperator identity(std::size_t n) {
    LinearOperator op;
    op.kind_ = OperatorKind::identity;
    op.rows_ = op.cols_ = n;
    return op;
  }

  // (Dx)_i = x_{i+1} - x_i, i = 0..n-2.
  static LinearOperator first_difference(std::size_t n) {
    if (n < 2) throw contract_error("first_difference: need n >= 2");
    LinearOperator op;
    op.kind_ = OperatorKind::first_difference;
    op.rows_ = n - 1;
    op.cols_ = n;
    return op;
  }

  // Row-major m x n entries.
  static LinearOperator dense(std::size_t rows, std::size_t cols, Vector entries) {
    if (entries.size() != rows * cols) throw dimension_error("dense: entry count mismatch");
    require_finite(entries, "dense operator entries");
    LinearOperator op;
    op.kind_ = OperatorKind::dense;
    op.rows_ = rows;
    op.cols_ = cols;
    op.entries_ = std::make_shared<Vector>(std::move(entries));
    return op;
  }

  OperatorKind kind() const { return kind_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const Vector& entries() const { return *entries_; }
  double entry(std::size_t i, std::size_t j) const { return (*entries_)[i * cols_ + j]; }

  Vector apply(const Vector& x) const {
    if (x.size() != cols_) throw dimension_error("apply: dim(x) != cols");
    switch (kind_) {
      case OperatorKind::identity:
        return x;
      case OperatorKind::first_difference: {
        Vector y(rows_);
        for (std::size_t i = 0; i < rows_; ++i) y[i] = x[i + 1] - x[i];
        return y;
      }
      case OperatorKind::dense: {
        Vector y(rows_, 0.0);
        const Vector& a = *entries_;
        for (std::size_t i = 0; i < rows_; ++i) {
          double s = 0.0;
          const double* row = a.data() + i * cols_;
          for (std::size_t j = 0; j < cols_; ++j) s += row[j] * x[j];
          y[i] = s;
        }
        return y;
      }
    }
    throw contract_error("apply: bad kind");
  }

  Vector adjoint_apply(const Vector& y) const {
    if (y.size() != rows_) throw dimension_error("adjoint_apply: dim(y) != rows");
    switch (kind_) {
      case OperatorKind::identity:
        return y;
      case OperatorKind::first_difference: {
        Vector x(cols_, 0.0);
        x[0] = -y[0];
        for (std::size_t i = 1; i + 1 < cols_; ++i) x[i] = y[i - 1] - y[i];
        x[cols_ - 1] = y[rows_ - 1];
        return x;
      }
      case OperatorKind::dense: {
        Vector x(cols_, 0.0);
        const Vector& a = *entries_;
        for (std::size_t i = 0; i < rows_; ++i) {
          const double yi = y[i];
          const double* row = a.data() + i * cols_;
          for (std::size_t j = 0; j < cols_; ++j) x[j] += row[j] * yi;
        }
        return x;
      }
    }
    throw contract_error("adjoint_apply: bad kind");
  }

  bool is_square() const { return rows_ == cols_; }

 private:
  struct Cache {
    std::mutex mu;
    std::optional<double> sigma;
    std::optional<double> opnorm;
  };

  OperatorKind kind_ = OperatorKind::identity;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::shared_ptr<Vector> entries_;  // dense only
  mutable std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();  // shared across copies

  friend double cached_sigma_slot(const LinearOperator&, double (*)(const LinearOperator&));
  friend double cached_opnorm_slot(const LinearOperator&, double (*)(const LinearOperator&));
};

inline double cached_sigma_slot(const LinearOperator& op, double (*compute)(const LinearOperator&)) {
  auto& c = *op.cache_;
  std::lock_guard<std::mutex> lock(c.mu);
  if (!c.sigma) c.sigma = compute(op);
  return *c.sigma;
}

inline double cached_opnorm_slot(const LinearOperator& op, double (*compute)(const LinearOperator&)) {
  auto& c = *op.cache_;
  std::lock_guard<std::mutex> lock(c.mu);
  if (!c.opnorm) c.opnorm = compute(op);
  return *c.opnorm;
}

}  // namespace ncsplit
