#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "ncsplit/vec.hpp"

namespace ncsplit {

enum class ProxKind {
  indicator_l0_ball,   // { y : ||y - b||_0 <= r }
  indicator_card,      // { y : ||y||_0 <= s }
  l0_penalty,          // lambda ||y||_0
  l1_penalty,          // lambda ||y - c||_1
  l_half_penalty,      // lambda sum_i |y_i - c_i|^(1/2)
  indicator_l1_ball,   // { y : ||y||_1 <= rho }
  indicator_linf_ball, // { y : ||y||_inf <= rho }
  indicator_finite_set
};

namespace detail {

// Indices of the k largest-magnitude entries; magnitude ties keep the
// lowest index. Deterministic.
inline std::vector<std::size_t> top_k_by_magnitude(const Vector& v, std::size_t k) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  k = std::min(k, v.size());
  auto cmp = [&v](std::size_t a, std::size_t b) {
    const double ma = std::fabs(v[a]);
    const double mb = std::fabs(v[b]);
    if (ma != mb) return ma > mb;
    return a < b;
  };
  std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), cmp);
  idx.resize(k);
  return idx;
}

// Scalar prox of w -> a sqrt(|w|) + (w-u)^2/2. Cardano/trig closed form for
// the positive stationary branch, then an explicit comparison against w = 0.
inline double half_threshold_scalar(double u, double a) {
  if (a <= 0.0) return u;
  if (u == 0.0) return 0.0;
  const double sgn = u < 0.0 ? -1.0 : 1.0;
  const double au = std::fabs(u);
  // stationary points of a sqrt(w) + (w-u)^2/2 solve s^3 - u s + a/2 = 0, s = sqrt(w)
  const double c = -(3.0 * std::sqrt(3.0) * a) / (4.0 * std::pow(au, 1.5));
  if (c < -1.0) return 0.0;  // no positive stationary point; 0 is the minimizer
  const double angle = std::acos(std::clamp(c, -1.0, 1.0)) / 3.0;
  const double s = 2.0 * std::sqrt(au / 3.0) * std::cos(angle);
  const double w = s * s;
  const double g_branch = a * std::sqrt(w) + 0.5 * (w - au) * (w - au);
  const double g_zero = 0.5 * au * au;
  return g_branch < g_zero ? sgn * w : 0.0;
}

// Euclidean projection onto the l1 ball by sort and threshold. The output is
// scaled down by at most a few ulps when rounding leaves its norm above the
// radius, so the exact feasibility test always accepts prox outputs.
inline Vector project_l1_ball(const Vector& u, double rho) {
  if (norm1(u) <= rho) return u;
  Vector mags(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) mags[i] = std::fabs(u[i]);
  std::sort(mags.begin(), mags.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < mags.size(); ++k) {
    cum += mags[k];
    const double t = (cum - rho) / static_cast<double>(k + 1);
    if (k + 1 == mags.size() || mags[k + 1] <= t) {
      theta = t;
      break;
    }
  }
  Vector w(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double m = std::fabs(u[i]) - theta;
    w[i] = m > 0.0 ? (u[i] < 0.0 ? -m : m) : 0.0;
  }
  const double shrink =
      1.0 - (2.0 * static_cast<double>(u.size()) + 8.0) * std::numeric_limits<double>::epsilon();
  for (int guard = 0; guard < 100; ++guard) {
    const double s = norm1(w);
    if (s <= rho) break;
    scale_inplace(w, rho / s * shrink);
  }
  return w;
}

}  // namespace detail

// Nonsmooth term P with value evaluation and one deterministic element of
// prox_{tau P}. Magnitude ties keep the lowest index; finite-set distance
// ties go to the candidate nearest a caller-supplied previous point, then
// to the lowest index.
class ProxOperator {
 public:
  static ProxOperator indicator_l0_ball(Vector center, std::size_t budget) {
    ProxOperator p(ProxKind::indicator_l0_ball);
    require_finite(center, "l0 ball center");
    p.center_ = std::move(center);
    p.budget_ = budget;
    return p;
  }

  static ProxOperator indicator_card(std::size_t budget) {
    ProxOperator p(ProxKind::indicator_card);
    p.budget_ = budget;
    return p;
  }

  static ProxOperator l0_penalty(double lambda) {
    ProxOperator p(ProxKind::l0_penalty);
    p.lambda_ = check_lambda(lambda);
    return p;
  }

  static ProxOperator l1_penalty(double lambda, Vector center = {}) {
    ProxOperator p(ProxKind::l1_penalty);
    p.lambda_ = check_lambda(lambda);
    p.center_ = std::move(center);
    return p;
  }

  static ProxOperator l_half_penalty(double lambda, Vector center = {}) {
    ProxOperator p(ProxKind::l_half_penalty);
    p.lambda_ = check_lambda(lambda);
    p.center_ = std::move(center);
    return p;
  }

  static ProxOperator indicator_l1_ball(double radius) {
    ProxOperator p(ProxKind::indicator_l1_ball);
    if (!(radius > 0.0)) throw contract_error("l1 ball: radius must be positive");
    p.radius_ = radius;
    return p;
  }

  static ProxOperator indicator_linf_ball(double radius) {
    ProxOperator p(ProxKind::indicator_linf_ball);
    if (!(radius > 0.0)) throw contract_error("linf ball: radius must be positive");
    p.radius_ = radius;
    return p;
  }

  static ProxOperator indicator_finite_set(std::vector<Vector> points) {
    if (points.empty()) throw contract_error("finite set: at least one point required");
    for (const auto& pt : points) {
      require_finite(pt, "finite set point");
      if (pt.size() != points.front().size()) throw dimension_error("finite set: mixed dimensions");
    }
    ProxOperator p(ProxKind::indicator_finite_set);
    p.points_ = std::move(points);
    return p;
  }

  ProxKind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  double radius() const { return radius_; }
  std::size_t budget() const { return budget_; }
  const Vector& center() const { return center_; }
  const std::vector<Vector>& points() const { return points_; }

  double eval(const Vector& y) const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (kind_) {
      case ProxKind::indicator_l0_ball: {
        check_dim(y.size());
        std::size_t nz = 0;
        for (std::size_t i = 0; i < y.size(); ++i)
          if (y[i] != center_[i]) ++nz;
        return nz <= budget_ ? 0.0 : inf;
      }
      case ProxKind::indicator_card: {
        std::size_t nz = 0;
        for (double v : y)
          if (v != 0.0) ++nz;
        return nz <= budget_ ? 0.0 : inf;
      }
      case ProxKind::l0_penalty: {
        std::size_t nz = 0;
        for (double v : y)
          if (v != 0.0) ++nz;
        return lambda_ * static_cast<double>(nz);
      }
      case ProxKind::l1_penalty: {
        check_dim(y.size());
        double s = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) s += std::fabs(y[i] - center_at(i));
        return lambda_ * s;
      }
      case ProxKind::l_half_penalty: {
        check_dim(y.size());
        double s = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) s += std::sqrt(std::fabs(y[i] - center_at(i)));
        return lambda_ * s;
      }
      case ProxKind::indicator_l1_ball:
        return norm1(y) <= radius_ ? 0.0 : inf;
      case ProxKind::indicator_linf_ball:
        return norm_inf(y) <= radius_ ? 0.0 : inf;
      case ProxKind::indicator_finite_set: {
        for (const auto& pt : points_)
          if (pt == y) return 0.0;
        return inf;
      }
    }
    throw contract_error("eval: bad kind");
  }

  Vector prox(const Vector& u, double tau, const Vector* prev = nullptr) const {
    if (!(tau > 0.0)) throw contract_error("prox: tau must be positive");
    require_finite(u, "prox input");
    switch (kind_) {
      case ProxKind::indicator_l0_ball: {
        check_dim(u.size());
        Vector shifted = sub(u, center_);
        const auto keep = detail::top_k_by_magnitude(shifted, budget_);
        Vector w = center_;
        for (std::size_t i : keep) w[i] = u[i];
        return w;
      }
      case ProxKind::indicator_card: {
        const auto keep = detail::top_k_by_magnitude(u, budget_);
        Vector w(u.size(), 0.0);
        for (std::size_t i : keep) w[i] = u[i];
        return w;
      }
      case ProxKind::l0_penalty: {
        const double thresh = std::sqrt(2.0 * tau * lambda_);
        Vector w(u.size(), 0.0);
        for (std::size_t i = 0; i < u.size(); ++i)
          if (std::fabs(u[i]) > thresh) w[i] = u[i];
        return w;
      }
      case ProxKind::l1_penalty: {
        check_dim(u.size());
        const double t = tau * lambda_;
        Vector w(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) {
          const double v = u[i] - center_at(i);
          const double m = std::fabs(v) - t;
          w[i] = center_at(i) + (m > 0.0 ? (v < 0.0 ? -m : m) : 0.0);
        }
        return w;
      }
      case ProxKind::l_half_penalty: {
        check_dim(u.size());
        Vector w(u.size());
        for (std::size_t i = 0; i < u.size(); ++i)
          w[i] = center_at(i) + detail::half_threshold_scalar(u[i] - center_at(i), tau * lambda_);
        return w;
      }
      case ProxKind::indicator_l1_ball:
        return detail::project_l1_ball(u, radius_);
      case ProxKind::indicator_linf_ball: {
        Vector w(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) w[i] = std::clamp(u[i], -radius_, radius_);
        return w;
      }
      case ProxKind::indicator_finite_set: {
        if (u.size() != points_.front().size()) throw dimension_error("prox: dim mismatch with set");
        std::size_t best = 0;
        double best_d = dist_sq(points_[0], u);
        for (std::size_t k = 1; k < points_.size(); ++k) {
          const double d = dist_sq(points_[k], u);
          if (d < best_d) {
            best = k;
            best_d = d;
          } else if (d == best_d && prev != nullptr) {
            if (dist_sq(points_[k], *prev) < dist_sq(points_[best], *prev)) best = k;
          }
        }
        return points_[best];
      }
    }
    throw contract_error("prox: bad kind");
  }

  // Whether P(y) -> infinity as ||y|| -> infinity. The l0 penalty and the
  // l0-type indicator sets are not coercive (the penalty is bounded by
  // lambda * dim, the sets are unbounded).
  bool coercive() const {
    switch (kind_) {
      case ProxKind::l1_penalty:
      case ProxKind::l_half_penalty:
        return lambda_ > 0.0;
      case ProxKind::indicator_l1_ball:
      case ProxKind::indicator_linf_ball:
      case ProxKind::indicator_finite_set:
        return true;
      case ProxKind::indicator_l0_ball:
      case ProxKind::indicator_card:
      case ProxKind::l0_penalty:
        return false;
    }
    return false;
  }

  bool bounded_below() const { return true; }  // every kind is >= 0

  bool convex() const {
    switch (kind_) {
      case ProxKind::l1_penalty:
      case ProxKind::indicator_l1_ball:
      case ProxKind::indicator_linf_ball:
        return true;
      default:
        return false;
    }
  }

 private:
  explicit ProxOperator(ProxKind k) : kind_(k) {}

  static double check_lambda(double lambda) {
    if (!(lambda >= 0.0)) throw contract_error("penalty weight must be nonnegative");
    return lambda;
  }

  double center_at(std::size_t i) const { return center_.empty() ? 0.0 : center_[i]; }

  void check_dim(std::size_t n) const {
    if (!center_.empty() && center_.size() != n) throw dimension_error("prox operator: dim mismatch");
  }

  static double dist_sq(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a[i] - b[i];
      s += d * d;
    }
    return s;
  }

  ProxKind kind_;
  double lambda_ = 0.0;
  double radius_ = 0.0;
  std::size_t budget_ = 0;
  Vector center_;
  std::vector<Vector> points_;
};

}  // namespace ncsplit
