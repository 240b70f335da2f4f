#ifndef OCO_VECTOR_HPP
#define OCO_VECTOR_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>

#include "oco/common.hpp"

namespace oco {

// Positive diagonal weight matrix. Kept as a strong type so projections and
// weighted norms cannot silently receive an arbitrary vector.
class DiagonalMetric {
 public:
  explicit DiagonalMetric(Vec diag) : diag_(std::move(diag)) {
    require_nonempty("DiagonalMetric", diag_);
    for (double d : diag_) {
      if (!std::isfinite(d) || d <= 0.0)
        throw Error("DiagonalMetric: entries must be finite and > 0, got " + str(d));
    }
  }

  static DiagonalMetric identity(std::size_t dim) {
    return DiagonalMetric(Vec(dim, 1.0));
  }

  const Vec& diag() const { return diag_; }
  std::size_t dim() const { return diag_.size(); }

 private:
  Vec diag_;
};

inline Vec elementwise_product(const Vec& x, const Vec& y) {
  require_same_dim("elementwise_product", x, y);
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * y[i];
  return out;
}

// sum_i a_i x_i y_i
inline double weighted_inner(const Vec& x, const Vec& y, const DiagonalMetric& a) {
  require_same_dim("weighted_inner", x, y);
  if (x.size() != a.dim()) throw DimensionMismatch("weighted_inner metric", x.size(), a.dim());
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += a.diag()[i] * x[i] * y[i];
  return s;
}

inline double weighted_norm(const Vec& x, const DiagonalMetric& a) {
  return std::sqrt(weighted_inner(x, x, a));
}

inline double inner(const Vec& x, const Vec& y) {
  require_same_dim("inner", x, y);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double norm2(const Vec& x) { return std::sqrt(inner(x, x)); }

inline double inf_norm(const Vec& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

inline Vec add(const Vec& x, const Vec& y) {
  require_same_dim("add", x, y);
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
  return out;
}

inline Vec sub(const Vec& x, const Vec& y) {
  require_same_dim("sub", x, y);
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
  return out;
}

inline Vec scale(double c, const Vec& x) {
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = c * x[i];
  return out;
}

}  // namespace oco

#endif  // OCO_VECTOR_HPP
