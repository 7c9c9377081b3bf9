#pragma once

#include <cstddef>
#include <vector>

#include "ncsplit/vec.hpp"

namespace ncsplit {

// Row-major dense matrix, just enough surface for the solvers here.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vector data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  Vector matvec(const Vector& x) const {
    if (x.size() != cols) throw dimension_error("matvec: size mismatch");
    Vector y(rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
      double s = 0.0;
      const double* row = data.data() + i * cols;
      for (std::size_t j = 0; j < cols; ++j) s += row[j] * x[j];
      y[i] = s;
    }
    return y;
  }
};

inline DenseMatrix identity_matrix(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

}  // namespace ncsplit
