#ifndef OCO_TRACE_HPP
#define OCO_TRACE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "oco/common.hpp"
#include "oco/feasible_set.hpp"
#include "oco/optimizer.hpp"
#include "oco/problems.hpp"
#include "oco/vector.hpp"

namespace oco {

// Everything a run leaves behind. Gradients and losses are kept for every
// round (the bound and lemma evaluations need exact prefix statistics);
// iterate/accumulator/damping snapshots honor snapshot_stride, with round 1
// and the final round always present. snapshot_rounds lists the rounds the
// snapshots belong to.
struct RunTrace {
  OptimizerConfig config;
  std::int64_t rounds = 0;
  std::int64_t snapshot_stride = 1;
  std::vector<double> losses;
  std::vector<Vec> gradients;
  std::vector<std::int64_t> snapshot_rounds;
  std::vector<Vec> iterates;  // theta_t, the point round t's loss was paid at
  std::vector<Vec> accums;    // squared-gradient statistic after round t
  std::vector<Vec> dampings;  // damping after round t (sc variants only)
  Vec final_iterate;          // theta_{T+1}
  double observed_grad_inf = 0.0;
};

struct TraceOptions {
  std::int64_t snapshot_stride = 1;
};

inline bool has_damping(Algorithm a) {
  return a == Algorithm::sc_adagrad || a == Algorithm::sc_rmsprop;
}

// Plays the first `rounds` objectives against the configured optimizer,
// starting from the projection of the origin. Throws NonFiniteError if the
// loss or gradient stops being finite (the caller decides whether that is
// divergence or a bug).
inline RunTrace run_online(const OnlineProblem& problem, const OptimizerConfig& cfg,
                           const FeasibleSet& set, std::int64_t rounds,
                           const TraceOptions& options = {}) {
  validate(cfg);
  if (rounds < 1 || rounds > problem.rounds())
    throw Error("run_online: rounds " + std::to_string(rounds) + " outside [1, " +
                std::to_string(problem.rounds()) + "]");
  if (options.snapshot_stride < 1) throw Error("run_online: snapshot stride must be >= 1");

  RunTrace trace;
  trace.config = cfg;
  trace.rounds = rounds;
  trace.snapshot_stride = options.snapshot_stride;
  trace.losses.reserve(static_cast<std::size_t>(rounds));
  trace.gradients.reserve(static_cast<std::size_t>(rounds));

  OptimizerState state = init_state(cfg, set, Vec(problem.dim(), 0.0));
  for (std::int64_t t = 1; t <= rounds; ++t) {
    auto [loss, grad] = problem.loss_grad(state.iterate, t);
    if (!std::isfinite(loss)) throw NonFiniteError("non-finite loss", t);
    bool snapshot = ((t - 1) % options.snapshot_stride == 0) || t == rounds;
    if (snapshot) {
      trace.snapshot_rounds.push_back(t);
      trace.iterates.push_back(state.iterate);
    }
    trace.losses.push_back(loss);
    trace.observed_grad_inf = std::max(trace.observed_grad_inf, inf_norm(grad));
    trace.gradients.push_back(grad);
    step(state, trace.gradients.back(), set, cfg);
    if (snapshot) {
      trace.accums.push_back(state.accum);
      if (has_damping(cfg.algorithm)) trace.dampings.push_back(state.damping);
    }
  }
  trace.final_iterate = state.iterate;
  return trace;
}

struct SolverReport {
  std::int64_t iterations = 0;
  double residual = 0.0;
  bool closed_form = false;
};

// Minimizer of the cumulative objective sum_{t<=T} f_t over the feasible set.
// cumulative_value is that sum at theta_star; mean_value divides by T (the
// batch objective scale used by relative suboptimality).
struct HindsightSolution {
  Vec theta_star;
  double cumulative_value = 0.0;
  double mean_value = 0.0;
  SolverReport report;
};

namespace detail {

inline std::pair<double, Vec> mean_loss_grad(const OnlineProblem& problem, const Vec& point,
                                             std::int64_t upto) {
  double loss = 0.0;
  Vec grad(problem.dim(), 0.0);
  for (std::int64_t t = 1; t <= upto; ++t) {
    auto [l, g] = problem.loss_grad(point, t);
    loss += l;
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += g[i];
  }
  double inv = 1.0 / static_cast<double>(upto);
  loss *= inv;
  for (double& g : grad) g *= inv;
  return {loss, grad};
}

// Optimality measure: distance moved by one unit projected-gradient step of
// the mean objective. Equals the gradient norm when unconstrained.
inline double projected_gradient_residual(const FeasibleSet& set, const Vec& point,
                                          const Vec& grad) {
  DiagonalMetric eye = DiagonalMetric::identity(point.size());
  Vec moved = set.project(eye, sub(point, grad));
  return norm2(sub(point, moved));
}

}  // namespace detail

// Projected gradient descent with Barzilai-Borwein trial steps and a
// sufficient-decrease backtracking line search on the mean objective.
// Terminates when the projected-gradient residual is <= tol.
inline HindsightSolution hindsight_numeric(const OnlineProblem& problem, const FeasibleSet& set,
                                           std::int64_t upto, double tol = 1e-10,
                                           std::int64_t max_iterations = 1000000) {
  DiagonalMetric eye = DiagonalMetric::identity(problem.dim());
  Vec point = set.project(eye, Vec(problem.dim(), 0.0));
  auto [value, grad] = detail::mean_loss_grad(problem, point, upto);
  double stepsize = 1.0;
  double residual = detail::projected_gradient_residual(set, point, grad);
  std::int64_t iter = 0;
  while (residual > tol) {
    if (++iter > max_iterations)
      throw SolverError("hindsight solver hit the iteration cap", residual);
    Vec cand;
    double next_value = 0.0;
    Vec next_grad;
    while (true) {
      cand = set.project(eye, sub(point, scale(stepsize, grad)));
      std::tie(next_value, next_grad) = detail::mean_loss_grad(problem, cand, upto);
      Vec delta = sub(cand, point);
      double decrease = inner(grad, delta) + inner(delta, delta) / (2.0 * stepsize);
      if (next_value <= value + decrease + 1e-15 * std::abs(value)) break;
      stepsize *= 0.5;
      if (stepsize < 1e-18) throw SolverError("hindsight line search collapsed", residual);
    }
    Vec dx = sub(cand, point);
    Vec dg = sub(next_grad, grad);
    double num = inner(dx, dx);
    double den = inner(dx, dg);
    stepsize = den > 0.0 ? std::clamp(num / den, 1e-12, 1e12) : stepsize * 2.0;
    point = std::move(cand);
    value = next_value;
    grad = std::move(next_grad);
    residual = detail::projected_gradient_residual(set, point, grad);
  }
  HindsightSolution sol;
  sol.theta_star = std::move(point);
  sol.mean_value = value;
  sol.cumulative_value = value * static_cast<double>(upto);
  sol.report = {iter, residual, false};
  return sol;
}

// Uses the problem's closed form when it has one, otherwise the numeric
// solver. The returned residual is always measured, closed form or not.
inline HindsightSolution hindsight_optimum(const OnlineProblem& problem, const FeasibleSet& set,
                                           std::int64_t upto) {
  if (upto < 1 || upto > problem.rounds())
    throw Error("hindsight_optimum: rounds out of range");
  if (auto closed = problem.hindsight_closed_form(set, upto)) {
    auto [value, grad] = detail::mean_loss_grad(problem, closed->first, upto);
    (void)value;
    HindsightSolution sol;
    sol.theta_star = std::move(closed->first);
    sol.cumulative_value = closed->second;
    sol.mean_value = closed->second / static_cast<double>(upto);
    sol.report = {0, detail::projected_gradient_residual(set, sol.theta_star, grad), true};
    return sol;
  }
  return hindsight_numeric(problem, set, upto);
}

struct RegretPoint {
  std::int64_t T = 0;
  double regret = 0.0;
};

// Default evaluation grid: powers of 10 up to T, plus T itself.
inline std::vector<std::int64_t> default_checkpoints(std::int64_t rounds) {
  std::vector<std::int64_t> out;
  for (std::int64_t c = 10; c < rounds; c *= 10) out.push_back(c);
  out.push_back(rounds);
  return out;
}

// Exact partial sums of f_t(theta_t) - f_t(theta_star) at the checkpoints.
// Losses at theta_t come from the trace; losses at theta_star are replayed.
inline std::vector<RegretPoint> compute_regret(const RunTrace& trace,
                                               const HindsightSolution& solution,
                                               const OnlineProblem& problem,
                                               const std::vector<std::int64_t>& checkpoints) {
  if (trace.rounds > problem.rounds())
    throw DimensionMismatch("compute_regret rounds", static_cast<std::size_t>(trace.rounds),
                            static_cast<std::size_t>(problem.rounds()));
  if (checkpoints.empty()) throw Error("compute_regret: no checkpoints");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || checkpoints[i] > trace.rounds)
      throw Error("compute_regret: checkpoint " + std::to_string(checkpoints[i]) +
                  " outside [1, " + std::to_string(trace.rounds) + "]");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
      throw Error("compute_regret: checkpoints must be strictly increasing");
  }
  std::vector<RegretPoint> out;
  out.reserve(checkpoints.size());
  double cumulative = 0.0;
  std::size_t next = 0;
  for (std::int64_t t = 1; t <= checkpoints.back(); ++t) {
    cumulative += trace.losses[static_cast<std::size_t>(t - 1)] -
                  problem.loss(solution.theta_star, t);
    if (t == checkpoints[next]) {
      out.push_back({t, cumulative});
      ++next;
    }
  }
  return out;
}

// Largest sup-norm distance between any recorded iterate and theta_star.
inline double observed_distance_inf(const RunTrace& trace, const Vec& theta_star) {
  double m = 0.0;
  for (const Vec& it : trace.iterates) m = std::max(m, inf_norm(sub(it, theta_star)));
  return m;
}

struct RelativeSuboptimality {
  std::vector<double> log10_gap;
  std::vector<bool> clamped;
};

// log10((f - p_star) / p_star) for each objective value. Requires p_star > 0;
// ratios below 1e-16 (including f <= p_star, which only happens through
// solver slack) are clamped there and flagged.
inline RelativeSuboptimality relative_suboptimality(const std::vector<double>& objectives,
                                                    double p_star) {
  if (!(p_star > 0.0) || !std::isfinite(p_star))
    throw Error("relative_suboptimality: p_star must be finite and > 0");
  RelativeSuboptimality out;
  out.log10_gap.reserve(objectives.size());
  out.clamped.reserve(objectives.size());
  constexpr double floor = 1e-16;
  for (double f : objectives) {
    double ratio = (f - p_star) / p_star;
    bool clamp = !(ratio > floor);
    out.log10_gap.push_back(std::log10(clamp ? floor : ratio));
    out.clamped.push_back(clamp);
  }
  return out;
}

enum class GrowthModel { log_t, sqrt_t };

struct GrowthFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r2 = 0.0;
};

// Least-squares fit of regret against a + b * ln(T) or a + b * sqrt(T).
inline GrowthFit fit_growth(const std::vector<RegretPoint>& points, GrowthModel model) {
  if (points.size() < 4) throw Error("fit_growth: need at least 4 checkpoints");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].T <= points[i - 1].T) throw Error("fit_growth: T must be strictly increasing");
  }
  const std::size_t n = points.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const RegretPoint& p : points) {
    double x = model == GrowthModel::log_t ? std::log(static_cast<double>(p.T))
                                           : std::sqrt(static_cast<double>(p.T));
    sx += x;
    sy += p.regret;
    sxx += x * x;
    sxy += x * p.regret;
    syy += p.regret * p.regret;
  }
  double nx = static_cast<double>(n);
  double ss_tot = syy - sy * sy / nx;
  if (ss_tot <= 0.0) throw Error("fit_growth: degenerate (constant) regret series");
  double denom = sxx - sx * sx / nx;
  if (denom <= 0.0) throw Error("fit_growth: degenerate abscissa");
  GrowthFit fit;
  fit.slope = (sxy - sx * sy / nx) / denom;
  fit.intercept = (sy - fit.slope * sx) / nx;
  double ss_res = 0.0;
  for (const RegretPoint& p : points) {
    double x = model == GrowthModel::log_t ? std::log(static_cast<double>(p.T))
                                           : std::sqrt(static_cast<double>(p.T));
    double r = p.regret - (fit.intercept + fit.slope * x);
    ss_res += r * r;
  }
  fit.r2 = 1.0 - ss_res / ss_tot;
  return fit;
}

}  // namespace oco

#endif  // OCO_TRACE_HPP
