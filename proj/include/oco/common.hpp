#ifndef OCO_COMMON_HPP
#define OCO_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace oco {

using Vec = std::vector<double>;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(const std::string& where, std::size_t lhs, std::size_t rhs)
      : Error(where + ": dimension mismatch (" + std::to_string(lhs) + " vs " +
              std::to_string(rhs) + ")"),
        lhs_dim(lhs),
        rhs_dim(rhs) {}
  std::size_t lhs_dim;
  std::size_t rhs_dim;
};

// Raised when a gradient or loss stops being finite; carries the round index
// so divergence can be reported without guessing.
class NonFiniteError : public Error {
 public:
  NonFiniteError(const std::string& what, std::int64_t round)
      : Error(what + " at round " + std::to_string(round)), round(round) {}
  std::int64_t round;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"),
        residual(residual) {}
  double residual;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line(line) {}
  std::size_t line;
};

inline bool all_finite(const Vec& x) {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

inline void require_same_dim(const std::string& where, const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionMismatch(where, a.size(), b.size());
}

inline void require_nonempty(const std::string& where, const Vec& a) {
  if (a.empty()) throw Error(where + ": empty vector");
}

inline void require_finite(const std::string& where, const Vec& a) {
  if (!all_finite(a)) throw Error(where + ": non-finite entry");
}

template <typename T>
std::string str(const T& v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace oco

#endif  // OCO_COMMON_HPP
