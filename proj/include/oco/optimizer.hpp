#ifndef OCO_OPTIMIZER_HPP
#define OCO_OPTIMIZER_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "oco/common.hpp"
#include "oco/feasible_set.hpp"
#include "oco/vector.hpp"

namespace oco {

enum class Algorithm {
  adagrad,
  sc_adagrad,
  rmsprop_ours,
  sc_rmsprop,
  sgd,
  adam,
  rmsprop_classic,
};

enum class StepsizeMode { constant, inv_sqrt_t, inv_t };

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::adagrad: return "adagrad";
    case Algorithm::sc_adagrad: return "sc-adagrad";
    case Algorithm::rmsprop_ours: return "rmsprop-ours";
    case Algorithm::sc_rmsprop: return "sc-rmsprop";
    case Algorithm::sgd: return "sgd";
    case Algorithm::adam: return "adam";
    case Algorithm::rmsprop_classic: return "rmsprop-classic";
  }
  throw Error("unknown algorithm");
}

inline Algorithm algorithm_from_string(const std::string& name) {
  if (name == "adagrad") return Algorithm::adagrad;
  if (name == "sc-adagrad") return Algorithm::sc_adagrad;
  if (name == "rmsprop-ours") return Algorithm::rmsprop_ours;
  if (name == "sc-rmsprop") return Algorithm::sc_rmsprop;
  if (name == "sgd") return Algorithm::sgd;
  if (name == "adam") return Algorithm::adam;
  if (name == "rmsprop-classic") return Algorithm::rmsprop_classic;
  throw Error("unknown algorithm '" + name + "'");
}

inline std::string to_string(StepsizeMode m) {
  switch (m) {
    case StepsizeMode::constant: return "constant";
    case StepsizeMode::inv_sqrt_t: return "inv_sqrt_t";
    case StepsizeMode::inv_t: return "inv_t";
  }
  throw Error("unknown stepsize mode");
}

inline StepsizeMode stepsize_mode_from_string(const std::string& name) {
  if (name == "constant") return StepsizeMode::constant;
  if (name == "inv_sqrt_t") return StepsizeMode::inv_sqrt_t;
  if (name == "inv_t") return StepsizeMode::inv_t;
  throw Error("unknown stepsize mode '" + name + "'");
}

struct OptimizerConfig {
  Algorithm algorithm = Algorithm::adagrad;
  double alpha = 0.1;
  double gamma = 0.9;         // exponential-average window control
  double xi1 = 0.1;           // damping decay rate
  double xi2 = 1.0;           // damping scale
  double delta = 1e-8;        // static damping
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double classic_beta = 0.9;  // fixed smoothing of classic rmsprop
  // Defaults to the schedule the algorithm's analysis assumes; see
  // resolved_stepsize_mode.
  std::optional<StepsizeMode> stepsize_mode;
};

inline StepsizeMode default_stepsize_mode(Algorithm a) {
  switch (a) {
    case Algorithm::adagrad: return StepsizeMode::constant;
    case Algorithm::sc_adagrad: return StepsizeMode::constant;
    case Algorithm::rmsprop_ours: return StepsizeMode::inv_sqrt_t;
    case Algorithm::sc_rmsprop: return StepsizeMode::inv_t;
    case Algorithm::sgd: return StepsizeMode::inv_t;
    case Algorithm::adam: return StepsizeMode::inv_sqrt_t;
    case Algorithm::rmsprop_classic: return StepsizeMode::constant;
  }
  throw Error("unknown algorithm");
}

inline StepsizeMode resolved_stepsize_mode(const OptimizerConfig& cfg) {
  return cfg.stepsize_mode.value_or(default_stepsize_mode(cfg.algorithm));
}

// The adaptive algorithms derive their guarantees for one specific schedule,
// so only sgd and adam accept an alternative (constant) mode.
inline void validate(const OptimizerConfig& cfg) {
  if (!(cfg.alpha > 0.0) || !std::isfinite(cfg.alpha))
    throw Error("OptimizerConfig: alpha must be finite and > 0");
  if (!(cfg.delta > 0.0) || !std::isfinite(cfg.delta))
    throw Error("OptimizerConfig: delta must be finite and > 0");
  if (!(cfg.gamma > 0.0) || cfg.gamma > 1.0)
    throw Error("OptimizerConfig: gamma must lie in (0, 1]");
  if (cfg.xi1 < 0.0 || !std::isfinite(cfg.xi1))
    throw Error("OptimizerConfig: xi1 must be finite and >= 0");
  if (!(cfg.xi2 > 0.0) || !std::isfinite(cfg.xi2))
    throw Error("OptimizerConfig: xi2 must be finite and > 0");
  if (!(cfg.adam_beta1 >= 0.0 && cfg.adam_beta1 < 1.0))
    throw Error("OptimizerConfig: adam_beta1 must lie in [0, 1)");
  if (!(cfg.adam_beta2 >= 0.0 && cfg.adam_beta2 < 1.0))
    throw Error("OptimizerConfig: adam_beta2 must lie in [0, 1)");
  if (!(cfg.classic_beta > 0.0 && cfg.classic_beta < 1.0))
    throw Error("OptimizerConfig: classic_beta must lie in (0, 1)");
  if (cfg.stepsize_mode) {
    StepsizeMode m = *cfg.stepsize_mode;
    StepsizeMode def = default_stepsize_mode(cfg.algorithm);
    bool ok = (m == def) ||
              ((cfg.algorithm == Algorithm::sgd || cfg.algorithm == Algorithm::adam) &&
               m == StepsizeMode::constant);
    if (!ok)
      throw Error("OptimizerConfig: stepsize mode " + to_string(m) +
                  " conflicts with " + to_string(cfg.algorithm));
  }
}

// t=1 window: beta_1 = 1-gamma, so gamma=1 forgets the (zero) initial
// accumulator entirely.
inline double beta_schedule(double gamma, std::int64_t t) {
  if (t < 1) throw Error("beta_schedule: t must be >= 1");
  return 1.0 - gamma / static_cast<double>(t);
}

// Elementwise xi2 * exp(-xi1 * v); non-increasing in each v entry.
inline Vec damping_schedule(double xi1, double xi2, const Vec& v) {
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = xi2 * std::exp(-xi1 * v[i]);
  return out;
}

struct OptimizerState {
  std::int64_t t = 1;  // index of the upcoming step
  Vec iterate;
  Vec accum;     // running squared-gradient statistic
  Vec damping;   // current per-coordinate damping (sc variants)
  Vec momentum;  // adam first moment
};

inline OptimizerState init_state(const OptimizerConfig& cfg, const FeasibleSet& set,
                                 const Vec& start) {
  validate(cfg);
  require_nonempty("init_state", start);
  require_finite("init_state", start);
  OptimizerState s;
  s.iterate = set.project(DiagonalMetric::identity(start.size()), start);
  s.accum = Vec(start.size(), 0.0);
  if (cfg.algorithm == Algorithm::sc_adagrad || cfg.algorithm == Algorithm::sc_rmsprop)
    s.damping = Vec(start.size(), cfg.xi2);
  if (cfg.algorithm == Algorithm::adam) s.momentum = Vec(start.size(), 0.0);
  return s;
}

inline double stepsize_at(const OptimizerConfig& cfg, std::int64_t t) {
  switch (resolved_stepsize_mode(cfg)) {
    case StepsizeMode::constant: return cfg.alpha;
    case StepsizeMode::inv_sqrt_t: return cfg.alpha / std::sqrt(static_cast<double>(t));
    case StepsizeMode::inv_t: return cfg.alpha / static_cast<double>(t);
  }
  throw Error("unknown stepsize mode");
}

namespace detail {

// The damping schedules are non-increasing in exact arithmetic; the slack
// only absorbs last-ulp rounding of the accumulator and of exp.
inline void assert_damping_non_increasing(const Vec& next, const Vec& prev, std::int64_t t) {
  for (std::size_t i = 0; i < next.size(); ++i) {
    if (next[i] > prev[i] * (1.0 + 1e-10))
      throw Error("damping increased at round " + std::to_string(t) + ", coordinate " +
                  std::to_string(i));
  }
}

inline Vec metric_step(const Vec& iterate, const Vec& grad, const Vec& denom, double stepsize) {
  Vec out(iterate.size());
  for (std::size_t i = 0; i < iterate.size(); ++i)
    out[i] = iterate[i] - stepsize * grad[i] / denom[i];
  return out;
}

}  // namespace detail

// One online round: consumes the round-t gradient, updates the statistics,
// and projects the new iterate back onto the feasible set under the metric
// the algorithm prescribes. Advances state.t.
inline void step(OptimizerState& state, const Vec& grad, const FeasibleSet& set,
                 const OptimizerConfig& cfg) {
  require_same_dim("step", grad, state.iterate);
  const std::int64_t t = state.t;
  if (!all_finite(grad)) throw NonFiniteError("non-finite gradient", t);
  const std::size_t d = grad.size();
  const double alpha_t = stepsize_at(cfg, t);

  switch (cfg.algorithm) {
    case Algorithm::adagrad: {
      for (std::size_t i = 0; i < d; ++i) state.accum[i] += grad[i] * grad[i];
      Vec denom(d);
      for (std::size_t i = 0; i < d; ++i) denom[i] = std::sqrt(state.accum[i]) + cfg.delta;
      state.iterate = set.project(DiagonalMetric(denom),
                                  detail::metric_step(state.iterate, grad, denom, alpha_t));
      break;
    }
    case Algorithm::sc_adagrad: {
      for (std::size_t i = 0; i < d; ++i) state.accum[i] += grad[i] * grad[i];
      Vec next_damping = damping_schedule(cfg.xi1, cfg.xi2, state.accum);
      detail::assert_damping_non_increasing(next_damping, state.damping, t);
      state.damping = std::move(next_damping);
      Vec denom(d);
      for (std::size_t i = 0; i < d; ++i) denom[i] = state.accum[i] + state.damping[i];
      state.iterate = set.project(DiagonalMetric(denom),
                                  detail::metric_step(state.iterate, grad, denom, alpha_t));
      break;
    }
    case Algorithm::rmsprop_ours: {
      double beta = beta_schedule(cfg.gamma, t);
      for (std::size_t i = 0; i < d; ++i)
        state.accum[i] = beta * state.accum[i] + (1.0 - beta) * grad[i] * grad[i];
      double eps_t = cfg.delta / std::sqrt(static_cast<double>(t));
      Vec denom(d);
      for (std::size_t i = 0; i < d; ++i) denom[i] = std::sqrt(state.accum[i]) + eps_t;
      state.iterate = set.project(DiagonalMetric(denom),
                                  detail::metric_step(state.iterate, grad, denom, alpha_t));
      break;
    }
    case Algorithm::sc_rmsprop: {
      double beta = beta_schedule(cfg.gamma, t);
      for (std::size_t i = 0; i < d; ++i)
        state.accum[i] = beta * state.accum[i] + (1.0 - beta) * grad[i] * grad[i];
      Vec scaled(d);
      for (std::size_t i = 0; i < d; ++i) scaled[i] = static_cast<double>(t) * state.accum[i];
      Vec next_damping = damping_schedule(cfg.xi1, cfg.xi2, scaled);
      detail::assert_damping_non_increasing(next_damping, state.damping, t);
      state.damping = std::move(next_damping);
      Vec denom(d);
      for (std::size_t i = 0; i < d; ++i)
        denom[i] = state.accum[i] + state.damping[i] / static_cast<double>(t);
      state.iterate = set.project(DiagonalMetric(denom),
                                  detail::metric_step(state.iterate, grad, denom, alpha_t));
      break;
    }
    case Algorithm::sgd: {
      Vec moved(d);
      for (std::size_t i = 0; i < d; ++i) moved[i] = state.iterate[i] - alpha_t * grad[i];
      state.iterate = set.project(DiagonalMetric::identity(d), moved);
      break;
    }
    case Algorithm::adam: {
      for (std::size_t i = 0; i < d; ++i) {
        state.momentum[i] = cfg.adam_beta1 * state.momentum[i] + (1.0 - cfg.adam_beta1) * grad[i];
        state.accum[i] = cfg.adam_beta2 * state.accum[i] + (1.0 - cfg.adam_beta2) * grad[i] * grad[i];
      }
      double c1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(t));
      double c2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(t));
      Vec denom(d), corrected(d);
      for (std::size_t i = 0; i < d; ++i) {
        denom[i] = std::sqrt(state.accum[i] / c2) + cfg.delta;
        corrected[i] = state.momentum[i] / c1;
      }
      state.iterate = set.project(DiagonalMetric(denom),
                                  detail::metric_step(state.iterate, corrected, denom, alpha_t));
      break;
    }
    case Algorithm::rmsprop_classic: {
      for (std::size_t i = 0; i < d; ++i)
        state.accum[i] = cfg.classic_beta * state.accum[i] +
                         (1.0 - cfg.classic_beta) * grad[i] * grad[i];
      Vec denom(d);
      for (std::size_t i = 0; i < d; ++i) denom[i] = std::sqrt(state.accum[i]) + cfg.delta;
      state.iterate = set.project(DiagonalMetric(denom),
                                  detail::metric_step(state.iterate, grad, denom, alpha_t));
      break;
    }
  }
  state.t = t + 1;
}

}  // namespace oco

#endif  // OCO_OPTIMIZER_HPP
