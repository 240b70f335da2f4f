#ifndef OCO_FEASIBLE_SET_HPP
#define OCO_FEASIBLE_SET_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <variant>

#include "oco/common.hpp"
#include "oco/vector.hpp"

namespace oco {

// Lagrange multiplier for projecting onto an origin-centered Euclidean ball
// of the given radius under the diagonal metric a: the projection is
// x_i = a_i z_i / (a_i + lambda) and lambda >= 0 solves
// sum_i (a_i z_i / (a_i + lambda))^2 = radius^2.
// Root found by bracket doubling plus bisection; the residual target is
// 1e-12 relative to radius^2 and the iteration cap is 200.
inline double ball_multiplier(const DiagonalMetric& a, const Vec& z, double radius) {
  if (z.size() != a.dim()) throw DimensionMismatch("ball_multiplier", z.size(), a.dim());
  if (!(radius > 0.0)) throw Error("ball_multiplier: radius must be > 0");
  double r2 = radius * radius;
  auto excess = [&](double lambda) {
    double s = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      double ai = a.diag()[i];
      double xi = ai * z[i] / (ai + lambda);
      s += xi * xi;
    }
    return s - r2;
  };
  if (excess(0.0) <= 0.0)
    throw Error("ball_multiplier: point is not strictly outside the ball");
  double lo = 0.0;
  double hi = 1.0;
  int expansions = 0;
  while (excess(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++expansions > 200)
      throw Error("ball_multiplier: failed to bracket the root (pathological metric)");
  }
  double tol = 1e-12 * r2;
  for (int iter = 0; iter < 200; ++iter) {
    double mid = 0.5 * (lo + hi);
    double e = excess(mid);
    if (std::abs(e) <= tol) return mid;
    if (e > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

struct Unconstrained {};

struct Box {
  Vec lower;
  Vec upper;
};

struct L2Ball {
  Vec center;
  double radius;
};

// Closed convex feasible region. project() is the weighted projection
// argmin_{x in set} ||x - z||_A for diagonal A; the box case is a plain
// clamp (independent of A), the ball case solves the scalar dual problem.
class FeasibleSet {
 public:
  static FeasibleSet unconstrained() { return FeasibleSet(Unconstrained{}); }

  static FeasibleSet box(Vec lower, Vec upper) {
    require_same_dim("FeasibleSet::box", lower, upper);
    require_nonempty("FeasibleSet::box", lower);
    require_finite("FeasibleSet::box lower", lower);
    require_finite("FeasibleSet::box upper", upper);
    for (std::size_t i = 0; i < lower.size(); ++i) {
      if (lower[i] > upper[i])
        throw Error("FeasibleSet::box: lower > upper at coordinate " + std::to_string(i));
    }
    return FeasibleSet(Box{std::move(lower), std::move(upper)});
  }

  static FeasibleSet ball(Vec center, double radius) {
    require_nonempty("FeasibleSet::ball", center);
    require_finite("FeasibleSet::ball center", center);
    if (!(radius > 0.0) || !std::isfinite(radius))
      throw Error("FeasibleSet::ball: radius must be finite and > 0");
    return FeasibleSet(L2Ball{std::move(center), radius});
  }

  Vec project(const DiagonalMetric& a, const Vec& z) const {
    require_finite("FeasibleSet::project", z);
    if (std::holds_alternative<Unconstrained>(body_)) return z;
    if (const Box* b = std::get_if<Box>(&body_)) {
      require_same_dim("FeasibleSet::project", z, b->lower);
      if (z.size() != a.dim()) throw DimensionMismatch("FeasibleSet::project metric", z.size(), a.dim());
      Vec out(z.size());
      for (std::size_t i = 0; i < z.size(); ++i)
        out[i] = std::min(std::max(z[i], b->lower[i]), b->upper[i]);
      return out;
    }
    const L2Ball& ball = std::get<L2Ball>(body_);
    require_same_dim("FeasibleSet::project", z, ball.center);
    if (z.size() != a.dim()) throw DimensionMismatch("FeasibleSet::project metric", z.size(), a.dim());
    Vec shifted = sub(z, ball.center);
    // Interior and boundary points are already optimal; no tolerance band.
    // The containment test reuses the dual solver's lambda = 0 arithmetic so
    // the two stages cannot disagree by a rounding on knife-edge points.
    double d2 = 0.0;
    for (std::size_t i = 0; i < shifted.size(); ++i) {
      double xi = a.diag()[i] * shifted[i] / a.diag()[i];
      d2 += xi * xi;
    }
    if (d2 <= ball.radius * ball.radius) return z;
    double lambda = ball_multiplier(a, shifted, ball.radius);
    Vec offset(z.size());
    double p2 = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      double ai = a.diag()[i];
      offset[i] = ai * shifted[i] / (ai + lambda);
      p2 += offset[i] * offset[i];
    }
    // The multiplier solve is accurate to a relative tolerance, which can
    // leave the point a few ulps outside the sphere; snap it radially inward
    // so the membership postcondition holds exactly (up to one rounding).
    double scale = p2 > ball.radius * ball.radius ? ball.radius / std::sqrt(p2) : 1.0;
    Vec out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = ball.center[i] + scale * offset[i];
    return out;
  }

  bool contains(const Vec& x, double tol = 1e-12) const {
    if (std::holds_alternative<Unconstrained>(body_)) return true;
    if (const Box* b = std::get_if<Box>(&body_)) {
      if (x.size() != b->lower.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < b->lower[i] - tol || x[i] > b->upper[i] + tol) return false;
      }
      return true;
    }
    const L2Ball& ball = std::get<L2Ball>(body_);
    if (x.size() != ball.center.size()) return false;
    return norm2(sub(x, ball.center)) <= ball.radius + tol;
  }

  // Sup-norm diameter; nullopt means unbounded.
  std::optional<double> diameter_inf() const {
    if (std::holds_alternative<Unconstrained>(body_)) return std::nullopt;
    if (const Box* b = std::get_if<Box>(&body_)) {
      double m = 0.0;
      for (std::size_t i = 0; i < b->lower.size(); ++i)
        m = std::max(m, b->upper[i] - b->lower[i]);
      return m;
    }
    return 2.0 * std::get<L2Ball>(body_).radius;
  }

  bool is_unconstrained() const { return std::holds_alternative<Unconstrained>(body_); }
  const Box* as_box() const { return std::get_if<Box>(&body_); }
  const L2Ball* as_ball() const { return std::get_if<L2Ball>(&body_); }

 private:
  template <typename T>
  explicit FeasibleSet(T body) : body_(std::move(body)) {}

  std::variant<Unconstrained, Box, L2Ball> body_;
};

}  // namespace oco

#endif  // OCO_FEASIBLE_SET_HPP
