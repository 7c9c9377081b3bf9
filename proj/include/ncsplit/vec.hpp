#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "ncsplit/errors.hpp"

namespace ncsplit {

using Vector = std::vector<double>;

inline double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw dimension_error("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(const Vector& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::fabs(v));
  return m;
}

inline double norm1(const Vector& a) {
  double s = 0.0;
  for (double v : a) s += std::fabs(v);
  return s;
}

// y += alpha * x
inline void axpy(double alpha, const Vector& x, Vector& y) {
  if (x.size() != y.size()) throw dimension_error("axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline Vector add(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw dimension_error("add: size mismatch");
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vector sub(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw dimension_error("sub: size mismatch");
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vector scaled(const Vector& a, double alpha) {
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = alpha * a[i];
  return r;
}

inline void scale_inplace(Vector& a, double alpha) {
  for (double& v : a) v *= alpha;
}

inline double dist2(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw dimension_error("dist2: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline bool all_finite(const Vector& a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

inline Vector zeros(std::size_t n) { return Vector(n, 0.0); }

inline void require_finite(const Vector& a, const char* what) {
  if (!all_finite(a)) throw contract_error(std::string(what) + ": non-finite entries");
}

}  // namespace ncsplit
