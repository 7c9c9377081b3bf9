#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "ncsplit/dense.hpp"
#include "ncsplit/linear_operator.hpp"
#include "ncsplit/vec.hpp"

namespace ncsplit {

namespace detail {

// In-place lower Cholesky. Throws on a non-positive pivot.
inline DenseMatrix cholesky(const DenseMatrix& a) {
  if (a.rows != a.cols) throw dimension_error("cholesky: square required");
  const std::size_t n = a.rows;
  DenseMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) throw factorization_error("cholesky: matrix not positive definite");
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

inline Vector cholesky_solve(const DenseMatrix& l, const Vector& b) {
  const std::size_t n = l.rows;
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i);
  }
  Vector x(n);
  for (std::size_t ii = n; ii > 0; --ii) {
    const std::size_t i = ii - 1;
    double s = y[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
    x[i] = s / l(i, i);
  }
  return x;
}

}  // namespace detail

// Factors H + beta M*M once and solves repeatedly. H is either a scalar
// multiple of the identity or a dense symmetric matrix. Three paths:
// pure-diagonal, tridiagonal (c I + beta D*D with D = first_difference,
// solved by the Thomas algorithm), and dense Cholesky. Solutions are
// refined until the relative residual is at most 1e-10.
class SpdSolver {
 public:
  SpdSolver(double h_scale, double beta, const LinearOperator& m) : beta_(beta), m_(m) {
    h_scale_ = h_scale;
    setup();
  }

  SpdSolver(DenseMatrix h_dense, double beta, const LinearOperator& m)
      : beta_(beta), m_(m), h_dense_(std::move(h_dense)) {
    if (h_dense_->rows != m.cols() || h_dense_->cols != m.cols())
      throw dimension_error("SpdSolver: H must be cols x cols");
    setup();
  }

  std::size_t dim() const { return m_.cols(); }

  // (H + beta M*M) x
  Vector apply(const Vector& x) const {
    if (x.size() != dim()) throw dimension_error("SpdSolver::apply: size mismatch");
    Vector out;
    if (h_dense_) {
      out = h_dense_->matvec(x);
    } else {
      out = scaled(x, *h_scale_);
    }
    if (beta_ != 0.0) axpy(beta_, m_.adjoint_apply(m_.apply(x)), out);
    return out;
  }

  Vector solve(const Vector& rhs) const {
    if (rhs.size() != dim()) throw dimension_error("SpdSolver::solve: size mismatch");
    Vector x = solve_once(rhs);
    const double nb = norm2(rhs);
    if (nb == 0.0) return x;
    for (int pass = 0; pass < 3; ++pass) {
      Vector r = sub(rhs, apply(x));
      if (norm2(r) <= 1e-10 * nb) break;
      axpy(1.0, solve_once(r), x);
    }
    return x;
  }

 private:
  enum class Path { diagonal, tridiagonal, dense };

  void setup() {
    const std::size_t n = m_.cols();
    if (!h_dense_ && m_.kind() == OperatorKind::identity) {
      path_ = Path::diagonal;
      diag_value_ = *h_scale_ + beta_;
      if (!(diag_value_ > 0.0)) throw factorization_error("SpdSolver: diagonal not positive");
      return;
    }
    if (!h_dense_ && m_.kind() == OperatorKind::first_difference) {
      path_ = Path::tridiagonal;
      diag_.assign(n, *h_scale_ + 2.0 * beta_);
      diag_.front() = *h_scale_ + beta_;
      diag_.back() = *h_scale_ + beta_;
      off_ = -beta_;
      // cache the forward-elimination multipliers
      cprime_.assign(n, 0.0);
      double piv = diag_[0];
      if (!(piv > 0.0)) throw factorization_error("SpdSolver: tridiagonal not positive definite");
      cprime_[0] = off_ / piv;
      pivots_.assign(n, piv);
      for (std::size_t i = 1; i < n; ++i) {
        piv = diag_[i] - off_ * cprime_[i - 1];
        if (!(piv > 0.0)) throw factorization_error("SpdSolver: tridiagonal not positive definite");
        pivots_[i] = piv;
        if (i + 1 < n) cprime_[i] = off_ / piv;
      }
      return;
    }
    path_ = Path::dense;
    DenseMatrix a(n, n);
    if (h_dense_) {
      a = *h_dense_;
    } else {
      for (std::size_t i = 0; i < n; ++i) a(i, i) = *h_scale_;
    }
    if (beta_ != 0.0) add_gram(a);
    chol_ = detail::cholesky(a);
  }

  void add_gram(DenseMatrix& a) const {
    const std::size_t n = m_.cols();
    switch (m_.kind()) {
      case OperatorKind::identity:
        for (std::size_t i = 0; i < n; ++i) a(i, i) += beta_;
        return;
      case OperatorKind::first_difference:
        for (std::size_t i = 0; i < n; ++i) {
          const double d = (i == 0 || i + 1 == n) ? 1.0 : 2.0;
          a(i, i) += beta_ * d;
          if (i + 1 < n) {
            a(i, i + 1) -= beta_;
            a(i + 1, i) -= beta_;
          }
        }
        return;
      case OperatorKind::dense: {
        const std::size_t m = m_.rows();
        for (std::size_t k = 0; k < m; ++k) {
          const double* row = m_.entries().data() + k * n;
          for (std::size_t i = 0; i < n; ++i) {
            const double bi = beta_ * row[i];
            if (bi == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) a(i, j) += bi * row[j];
          }
        }
        return;
      }
    }
  }

  Vector solve_once(const Vector& rhs) const {
    const std::size_t n = dim();
    switch (path_) {
      case Path::diagonal: {
        Vector x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = rhs[i] / diag_value_;
        return x;
      }
      case Path::tridiagonal: {
        Vector d(n);
        d[0] = rhs[0] / pivots_[0];
        for (std::size_t i = 1; i < n; ++i) d[i] = (rhs[i] - off_ * d[i - 1]) / pivots_[i];
        Vector x(n);
        x[n - 1] = d[n - 1];
        for (std::size_t ii = n - 1; ii > 0; --ii) {
          const std::size_t i = ii - 1;
          x[i] = d[i] - cprime_[i] * x[i + 1];
        }
        return x;
      }
      case Path::dense:
        return detail::cholesky_solve(chol_, rhs);
    }
    throw factorization_error("SpdSolver: bad path");
  }

  double beta_;
  LinearOperator m_;
  std::optional<double> h_scale_;
  std::optional<DenseMatrix> h_dense_;

  Path path_ = Path::dense;
  double diag_value_ = 0.0;           // diagonal path
  Vector diag_, cprime_, pivots_;     // tridiagonal path
  double off_ = 0.0;
  DenseMatrix chol_;                  // dense path
};

// One-shot convenience for c I + beta M*M systems.
inline Vector spd_solve(double h_scale, double beta, const LinearOperator& m, const Vector& rhs) {
  return SpdSolver(h_scale, beta, m).solve(rhs);
}

inline Vector spd_solve(const DenseMatrix& h, double beta, const LinearOperator& m, const Vector& rhs) {
  return SpdSolver(h, beta, m).solve(rhs);
}

}  // namespace ncsplit
