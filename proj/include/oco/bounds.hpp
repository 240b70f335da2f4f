#ifndef OCO_BOUNDS_HPP
#define OCO_BOUNDS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oco/common.hpp"
#include "oco/trace.hpp"
#include "oco/vector.hpp"

namespace oco {

// Constants the regret guarantees are stated in terms of. A nullopt D_inf or
// G_inf means "use the trace-observed prefix maximum at each checkpoint";
// label tells report readers which convention produced the numbers.
struct BoundConstants {
  std::optional<double> D_inf;
  std::optional<double> G_inf;
  std::optional<Vec> mu;
  std::string label = "observed";
};

struct BoundCheckpoint {
  std::int64_t T = 0;
  double regret = 0.0;
  double bound = 0.0;
  double slack = 0.0;  // bound - regret
  bool satisfied = false;
};

struct BoundReport {
  std::string name;
  std::string constants;
  std::vector<BoundCheckpoint> checkpoints;
  std::vector<std::string> flags;

  bool all_satisfied() const {
    for (const BoundCheckpoint& c : checkpoints) {
      if (!c.satisfied) return false;
    }
    return true;
  }
};

namespace detail {

inline bool bound_satisfied(double regret, double bound) {
  return regret <= bound + 1e-8 * std::max(1.0, std::abs(bound));
}

inline void push_checkpoint(BoundReport& report, std::int64_t T, double regret, double bound) {
  report.checkpoints.push_back({T, regret, bound, bound - regret, bound_satisfied(regret, bound)});
}

inline void require_algorithm(const RunTrace& trace, Algorithm expected,
                              const std::string& evaluator) {
  if (trace.config.algorithm != expected)
    throw Error(evaluator + ": trace was produced by " + to_string(trace.config.algorithm) +
                ", expected " + to_string(expected));
}

// Walks rounds 1..T_max once, accumulating the prefix statistics every bound
// formula consumes. Snapshot-dependent quantities (iterate distances, the
// per-coordinate minima of damping brackets) advance on the trace's snapshot
// grid; gradient statistics advance every round.
struct PrefixWalk {
  const RunTrace& trace;
  const Vec& theta_star;
  double alpha;
  double gamma_scale;  // divisor inside the damping bracket (1 for cumulative)

  Vec cum_sq;
  Vec min_bracket;      // min_t ((theta_t,i - theta*_i)^2/alpha - alpha/(den_t,i))
  Vec min_scaled_stat;  // min_t (t*v_t,i + delta_t,i)
  Vec last_damping;
  Vec last_accum;
  std::int64_t last_snapshot_round = 0;
  double observed_d = 0.0;
  double observed_g = 0.0;
  std::size_t snap = 0;

  PrefixWalk(const RunTrace& tr, const Vec& star, double a, double gscale)
      : trace(tr),
        theta_star(star),
        alpha(a),
        gamma_scale(gscale),
        cum_sq(star.size(), 0.0),
        min_bracket(star.size(), std::numeric_limits<double>::infinity()),
        min_scaled_stat(star.size(), std::numeric_limits<double>::infinity()) {}

  // Damping-aware statistic at a snapshot: cumulative algorithms use
  // cum_sq + damping, averaged algorithms use t*v_t + damping.
  void advance(std::int64_t t, bool averaged) {
    const Vec& g = trace.gradients[static_cast<std::size_t>(t - 1)];
    for (std::size_t i = 0; i < cum_sq.size(); ++i) cum_sq[i] += g[i] * g[i];
    observed_g = std::max(observed_g, inf_norm(g));
    if (snap < trace.snapshot_rounds.size() && trace.snapshot_rounds[snap] == t) {
      const Vec& it = trace.iterates[snap];
      observed_d = std::max(observed_d, inf_norm(sub(it, theta_star)));
      last_accum = trace.accums[snap];
      if (!trace.dampings.empty()) {
        last_damping = trace.dampings[snap];
        for (std::size_t i = 0; i < cum_sq.size(); ++i) {
          double stat = averaged ? static_cast<double>(t) * last_accum[i] + last_damping[i]
                                 : cum_sq[i] + last_damping[i];
          double diff = it[i] - theta_star[i];
          double bracket = diff * diff / alpha - alpha / (gamma_scale * stat);
          min_bracket[i] = std::min(min_bracket[i], bracket);
          min_scaled_stat[i] = std::min(min_scaled_stat[i], stat);
        }
      }
      last_snapshot_round = t;
      ++snap;
    }
  }
};

inline double resolve(const std::optional<double>& user, double observed) {
  return user ? *user : observed;
}

inline void alpha_condition_flags(BoundReport& report, const BoundConstants& constants,
                                  double alpha, double g_inf, double factor) {
  if (!constants.mu) {
    report.flags.push_back("alpha_condition_unchecked_mu_unknown");
    return;
  }
  const Vec& mu = *constants.mu;
  double min_all = *std::min_element(mu.begin(), mu.end());
  double min_pos = std::numeric_limits<double>::infinity();
  for (double m : mu) {
    if (m > 0.0) min_pos = std::min(min_pos, m);
  }
  if (min_all > 0.0) {
    if (alpha < factor * g_inf * g_inf / (2.0 * min_all))
      report.flags.push_back("alpha_condition_violated");
  } else {
    report.flags.push_back("mu_zero_on_some_coordinates");
    if (std::isfinite(min_pos) && alpha < factor * g_inf * g_inf / (2.0 * min_pos))
      report.flags.push_back("alpha_condition_violated_on_positive_mu_block");
  }
}

inline void thinning_flag(BoundReport& report, const RunTrace& trace) {
  if (trace.snapshot_stride > 1)
    report.flags.push_back("thinned_snapshots_inf_terms_approximate");
}

}  // namespace detail

// Worst-case regret certificate for the cumulative square-root method:
//   (D^2/(2 alpha) + alpha) * sum_i ||g_{1:T,i}||_2
inline BoundReport bound_adagrad(const RunTrace& trace, const Vec& theta_star,
                                 const std::vector<RegretPoint>& regret,
                                 const BoundConstants& constants) {
  detail::require_algorithm(trace, Algorithm::adagrad, "bound_adagrad");
  const double alpha = trace.config.alpha;
  BoundReport report{"adagrad", constants.label, {}, {}};
  detail::PrefixWalk walk(trace, theta_star, alpha, 1.0);
  std::size_t next = 0;
  for (std::int64_t t = 1; t <= regret.back().T; ++t) {
    walk.advance(t, false);
    if (t == regret[next].T) {
      double d = detail::resolve(constants.D_inf, walk.observed_d);
      double sum = 0.0;
      for (double c : walk.cum_sq) sum += std::sqrt(c);
      double bound = (d * d / (2.0 * alpha) + alpha) * sum;
      detail::push_checkpoint(report, t, regret[next].regret, bound);
      ++next;
    }
  }
  return report;
}

// Regret certificates for the strongly convex cumulative method. Always
// produces the general data-dependent form; adds the constant-damping form
// when xi1 == 0 and the decaying-damping closed form when xi1 > 0.
inline std::vector<BoundReport> bound_sc_adagrad(const RunTrace& trace, const Vec& theta_star,
                                                 const std::vector<RegretPoint>& regret,
                                                 const BoundConstants& constants) {
  detail::require_algorithm(trace, Algorithm::sc_adagrad, "bound_sc_adagrad");
  if (trace.dampings.empty()) throw Error("bound_sc_adagrad: trace has no damping history");
  const double alpha = trace.config.alpha;
  const double xi1 = trace.config.xi1;
  const double xi2 = trace.config.xi2;
  const std::size_t dim = theta_star.size();

  BoundReport general{"sc-adagrad-general", constants.label, {}, {}};
  BoundReport special{xi1 == 0.0 ? "sc-adagrad-constant" : "sc-adagrad-corollary",
                      constants.label,
                      {},
                      {}};
  detail::thinning_flag(general, trace);
  const Vec& first_damping = trace.dampings.front();

  detail::PrefixWalk walk(trace, theta_star, alpha, 1.0);
  std::size_t next = 0;
  for (std::int64_t t = 1; t <= regret.back().T; ++t) {
    walk.advance(t, false);
    if (t != regret[next].T) continue;
    const double d = detail::resolve(constants.D_inf, walk.observed_d);
    const double g = detail::resolve(constants.G_inf, walk.observed_g);
    const Vec& damping_now = walk.last_damping;

    double sum_first = 0.0, log_term = 0.0, inf_term = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      sum_first += first_damping[i];
      log_term += std::log((walk.cum_sq[i] + damping_now[i]) / first_damping[i]);
      inf_term += walk.min_bracket[i] * (damping_now[i] - first_damping[i]);
    }
    double bound = d * d * sum_first / (2.0 * alpha) + 0.5 * alpha * log_term + 0.5 * inf_term;
    detail::push_checkpoint(general, t, regret[next].regret, bound);

    if (xi1 == 0.0) {
      double logs = 0.0;
      for (std::size_t i = 0; i < dim; ++i) logs += std::log((walk.cum_sq[i] + xi2) / xi2);
      double constant_bound =
          d * d * static_cast<double>(dim) * xi2 / (2.0 * alpha) + 0.5 * alpha * logs;
      detail::push_checkpoint(special, t, regret[next].regret, constant_bound);
    } else {
      // log(xi2 * exp(-xi1 G^2)) expanded analytically so huge G^2 cannot
      // underflow the argument.
      double logs = 0.0, tails = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        logs += std::log(walk.cum_sq[i] + xi2 * std::exp(-xi1 * walk.cum_sq[i]));
        tails += 1.0 - std::exp(-xi1 * walk.cum_sq[i]);
      }
      double closed = static_cast<double>(dim) * d * d * xi2 / (2.0 * alpha) -
                      0.5 * alpha * (std::log(xi2) - xi1 * g * g) + 0.5 * alpha * logs +
                      alpha * xi1 * xi2 / (2.0 * (std::log(xi1 * xi2) + 1.0)) * tails;
      detail::push_checkpoint(special, t, regret[next].regret, closed);
    }
    ++next;
  }
  detail::alpha_condition_flags(general, constants, alpha,
                                detail::resolve(constants.G_inf, walk.observed_g), 1.0);
  special.flags = general.flags;
  if (xi1 > 0.0 && xi1 * xi2 < 1.0)
    special.flags.push_back("corollary_min_formula_out_of_range");
  return {std::move(general), std::move(special)};
}

// Regret certificate for the square-root exponential-average method:
//   (D^2/(2 alpha) + alpha (2-gamma)/gamma) * sum_i (sqrt(T v_{T,i}) + delta)
// (the schedule makes sqrt(T) * eps_T identically delta).
inline BoundReport bound_rmsprop(const RunTrace& trace, const Vec& theta_star,
                                 const std::vector<RegretPoint>& regret,
                                 const BoundConstants& constants) {
  detail::require_algorithm(trace, Algorithm::rmsprop_ours, "bound_rmsprop");
  const double alpha = trace.config.alpha;
  const double gamma = trace.config.gamma;
  const double delta = trace.config.delta;
  BoundReport report{"rmsprop", constants.label, {}, {}};
  detail::PrefixWalk walk(trace, theta_star, alpha, gamma);
  std::size_t next = 0;
  for (std::int64_t t = 1; t <= regret.back().T; ++t) {
    walk.advance(t, true);
    if (t != regret[next].T) continue;
    if (walk.last_snapshot_round != t)
      report.flags.push_back("checkpoint_off_snapshot_grid");
    double d = detail::resolve(constants.D_inf, walk.observed_d);
    double sum = 0.0;
    bool mismatch = false;
    for (std::size_t i = 0; i < walk.last_accum.size(); ++i) {
      double scaled = static_cast<double>(t) * walk.last_accum[i];
      sum += std::sqrt(scaled) + delta;
      if (gamma == 1.0 &&
          std::abs(std::sqrt(scaled) - std::sqrt(walk.cum_sq[i])) >
              1e-9 * std::max(1.0, std::sqrt(walk.cum_sq[i])))
        mismatch = true;
    }
    if (mismatch) report.flags.push_back("gamma_one_cumulative_mismatch");
    double bound = (d * d / (2.0 * alpha) + alpha * (2.0 - gamma) / gamma) * sum;
    detail::push_checkpoint(report, t, regret[next].regret, bound);
    ++next;
  }
  return report;
}

// Regret certificate for the strongly convex exponential-average method.
inline BoundReport bound_sc_rmsprop(const RunTrace& trace, const Vec& theta_star,
                                    const std::vector<RegretPoint>& regret,
                                    const BoundConstants& constants) {
  detail::require_algorithm(trace, Algorithm::sc_rmsprop, "bound_sc_rmsprop");
  if (trace.dampings.empty()) throw Error("bound_sc_rmsprop: trace has no damping history");
  const double alpha = trace.config.alpha;
  const double gamma = trace.config.gamma;
  const std::size_t dim = theta_star.size();
  BoundReport report{"sc-rmsprop", constants.label, {}, {}};
  detail::thinning_flag(report, trace);
  const Vec& first_damping = trace.dampings.front();

  detail::PrefixWalk walk(trace, theta_star, alpha, gamma);
  std::size_t next = 0;
  double max_damping = 0.0;
  for (std::int64_t t = 1; t <= regret.back().T; ++t) {
    walk.advance(t, true);
    if (!walk.last_damping.empty())
      max_damping = std::max(max_damping, inf_norm(walk.last_damping));
    if (t != regret[next].T) continue;
    const double d = detail::resolve(constants.D_inf, walk.observed_d);
    double sum_first = 0.0, log_term = 0.0, inf_term = 0.0, floor_term = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      double scaled = static_cast<double>(t) * walk.last_accum[i];
      sum_first += first_damping[i];
      log_term += std::log((scaled + walk.last_damping[i]) / first_damping[i]);
      inf_term += walk.min_bracket[i] * (walk.last_damping[i] - first_damping[i]);
      floor_term += 1.0 / walk.min_scaled_stat[i];
    }
    double bound = d * d * sum_first / (2.0 * alpha) +
                   alpha / (2.0 * gamma) * log_term + 0.5 * inf_term +
                   alpha / (2.0 * gamma) * (1.0 - gamma) *
                       (1.0 + std::log(static_cast<double>(t))) * floor_term;
    detail::push_checkpoint(report, t, regret[next].regret, bound);
    ++next;
  }
  detail::alpha_condition_flags(report, constants, alpha,
                                detail::resolve(constants.G_inf, walk.observed_g),
                                2.0 - gamma);
  if (trace.config.xi2 > 1.0 || max_damping > 1.0 + 1e-12)
    report.flags.push_back("damping_above_one_outside_theory");
  return report;
}

// Inequality diagnostics for the telescoping lemmas the regret proofs rest
// on, evaluated on a raw gradient stream.
struct LemmaReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  bool holds = false;
  std::optional<double> worst_coordinate_slack;
  std::vector<std::string> flags;
};

namespace detail {

inline void check_stream(const std::vector<Vec>& grads, const std::string& where) {
  if (grads.empty()) throw Error(where + ": empty gradient stream");
  for (const Vec& g : grads) {
    if (g.size() != grads.front().size())
      throw DimensionMismatch(where, g.size(), grads.front().size());
    require_finite(where, g);
  }
}

inline LemmaReport finish(std::string name, double lhs, double rhs,
                          std::optional<double> worst = std::nullopt) {
  LemmaReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.holds = r.slack >= -1e-9;
  if (worst) {
    r.worst_coordinate_slack = worst;
    r.holds = r.holds && *worst >= -1e-9;
  }
  return r;
}

}  // namespace detail

// sum_t <g_t, (diag(cum_t) + diag(delta_t))^{-1} g_t>
//   <= sum_i log((cum_{T,i} + delta_{T,i}) / delta_{1,i})
//      - sum_{t>=2} sum_i (delta_{t,i} - delta_{t-1,i}) / (cum_{t,i} + delta_{t,i})
inline LemmaReport check_lemma_sc(const std::vector<Vec>& grads, double xi1, double xi2) {
  detail::check_stream(grads, "check_lemma_sc");
  const std::size_t dim = grads.front().size();
  Vec cum(dim, 0.0), damping(dim, 0.0), first(dim, 0.0);
  double lhs = 0.0, correction = 0.0;
  for (std::size_t t = 0; t < grads.size(); ++t) {
    Vec prev = damping;
    for (std::size_t i = 0; i < dim; ++i) {
      cum[i] += grads[t][i] * grads[t][i];
      damping[i] = xi2 * std::exp(-xi1 * cum[i]);
      lhs += grads[t][i] * grads[t][i] / (cum[i] + damping[i]);
      if (t > 0) correction += (damping[i] - prev[i]) / (cum[i] + damping[i]);
    }
    if (t == 0) first = damping;
  }
  double rhs = -correction;
  for (std::size_t i = 0; i < dim; ++i) rhs += std::log((cum[i] + damping[i]) / first[i]);
  return detail::finish("lemma-sc", lhs, rhs);
}

// Per coordinate: sum_t g_{t,i}^2 / (sqrt(t v_{t,i}) + delta)
//   <= (2(2-gamma)/gamma) (sqrt(T v_{T,i}) + delta),
// plus the aggregated stepsize-weighted corollary at alpha = 1.
inline LemmaReport check_lemma_rms(const std::vector<Vec>& grads, double gamma, double delta) {
  detail::check_stream(grads, "check_lemma_rms");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw Error("check_lemma_rms: gamma must lie in (0, 1]");
  if (!(delta > 0.0)) throw Error("check_lemma_rms: delta must be > 0");
  const std::size_t dim = grads.front().size();
  Vec avg(dim, 0.0), lhs_coord(dim, 0.0);
  double lhs_agg = 0.0;
  for (std::size_t t = 0; t < grads.size(); ++t) {
    double tt = static_cast<double>(t + 1);
    double beta = 1.0 - gamma / tt;
    double eps = delta / std::sqrt(tt);
    double round_sum = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      avg[i] = beta * avg[i] + (1.0 - beta) * grads[t][i] * grads[t][i];
      lhs_coord[i] += grads[t][i] * grads[t][i] / (std::sqrt(tt * avg[i]) + delta);
      round_sum += grads[t][i] * grads[t][i] / (std::sqrt(avg[i]) + eps);
    }
    lhs_agg += 0.5 / std::sqrt(tt) * round_sum;
  }
  double tfinal = static_cast<double>(grads.size());
  double scale = 2.0 * (2.0 - gamma) / gamma;
  double worst = std::numeric_limits<double>::infinity();
  double rhs_agg = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    double tail = std::sqrt(tfinal * avg[i]) + delta;
    worst = std::min(worst, scale * tail - lhs_coord[i]);
    rhs_agg += (2.0 - gamma) / gamma * tail;
  }
  return detail::finish("lemma-rms", lhs_agg, rhs_agg, worst);
}

// sum_t (alpha_t / 2) <g_t, diag(v_t + eps_t)^{-1} g_t> with alpha_t = alpha/t
// against the three-part telescoping estimate. Damping outside (0, 1] is
// evaluated anyway and flagged.
inline LemmaReport check_lemma_sc_rms(const std::vector<Vec>& grads, double gamma, double xi1,
                                      double xi2, double alpha) {
  detail::check_stream(grads, "check_lemma_sc_rms");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw Error("check_lemma_sc_rms: gamma must lie in (0, 1]");
  const std::size_t dim = grads.front().size();
  Vec avg(dim, 0.0), eps(dim, 0.0), eps_prev(dim, 0.0), eps_first(dim, 0.0);
  Vec min_stat(dim, std::numeric_limits<double>::infinity());
  double lhs = 0.0, correction = 0.0;
  for (std::size_t t = 0; t < grads.size(); ++t) {
    double tt = static_cast<double>(t + 1);
    double beta = 1.0 - gamma / tt;
    eps_prev = eps;
    for (std::size_t i = 0; i < dim; ++i) {
      avg[i] = beta * avg[i] + (1.0 - beta) * grads[t][i] * grads[t][i];
      double damping = xi2 * std::exp(-xi1 * tt * avg[i]);
      eps[i] = damping / tt;
      lhs += alpha / (2.0 * tt) * grads[t][i] * grads[t][i] / (avg[i] + eps[i]);
      double stat = tt * avg[i] + tt * eps[i];
      if (t > 0) correction += (-tt * eps[i] + (tt - 1.0) * eps_prev[i]) / stat;
      min_stat[i] = std::min(min_stat[i], stat);
    }
    if (t == 0) eps_first = eps;
  }
  double tfinal = static_cast<double>(grads.size());
  double logs = 0.0, floor_sum = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    logs += std::log(tfinal * (avg[i] + eps[i]) / eps_first[i]);
    floor_sum += 1.0 / min_stat[i];
  }
  double rhs = alpha / (2.0 * gamma) *
               (logs + correction + (1.0 - gamma) * (1.0 + std::log(tfinal)) * floor_sum);
  LemmaReport report = detail::finish("lemma-sc-rms", lhs, rhs);
  if (xi2 > 1.0) report.flags.push_back("xi2_above_one_outside_theory");
  return report;
}

}  // namespace oco

#endif  // OCO_BOUNDS_HPP
