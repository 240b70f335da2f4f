#ifndef OCO_VERIFY_HPP
#define OCO_VERIFY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "oco/bounds.hpp"
#include "oco/common.hpp"
#include "oco/experiment.hpp"
#include "oco/feasible_set.hpp"
#include "oco/optimizer.hpp"
#include "oco/problems.hpp"
#include "oco/rng.hpp"
#include "oco/trace.hpp"
#include "oco/vector.hpp"

namespace oco {

struct CheckResult {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct VerifyOptions {
  std::string only;             // empty = run everything; otherwise exact check name
  std::int64_t trials = 100;    // randomized-stream count per configuration
  std::uint64_t seed = 20240817;
};

namespace verify_detail {

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

inline double rel_diff_vec(const Vec& a, const Vec& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, rel_diff(a[i], b[i]));
  return worst;
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

inline std::vector<Vec> random_stream(std::uint64_t seed, std::size_t rounds, std::size_t dim,
                                      double lo, double hi) {
  Rng rng(seed);
  std::vector<Vec> grads(rounds, Vec(dim));
  for (Vec& g : grads)
    for (double& x : g) x = rng.uniform(lo, hi);
  return grads;
}

// The two exponential-average methods with gamma = 1 must replay their
// cumulative counterparts step for step: iterates within 1e-10 relative and
// the scaled statistic t*v_t within 1e-12 relative of the cumulative sum.
inline CheckResult check_reduction(bool strongly_convex, std::uint64_t seed) {
  CheckResult result{strongly_convex ? "reduction-sc" : "reduction-adagrad", true, ""};
  const std::int64_t rounds = 400;
  const std::size_t dim = 5;
  Rng curv(rng_at(seed, 11));
  Vec h(dim);
  for (double& x : h) x = curv.uniform(0.5, 2.0);
  QuadraticStream problem(h, rounds, -1.0, 1.0, seed);
  FeasibleSet set = FeasibleSet::box(Vec(dim, -1.0), Vec(dim, 1.0));

  OptimizerConfig cumulative;
  cumulative.algorithm = strongly_convex ? Algorithm::sc_adagrad : Algorithm::adagrad;
  cumulative.alpha = 0.5;
  OptimizerConfig averaged = cumulative;
  averaged.algorithm = strongly_convex ? Algorithm::sc_rmsprop : Algorithm::rmsprop_ours;
  averaged.gamma = 1.0;

  RunTrace a = run_online(problem, cumulative, set, rounds);
  RunTrace b = run_online(problem, averaged, set, rounds);

  double worst_iterate = 0.0, worst_stat = 0.0;
  Vec cum(dim, 0.0);
  for (std::int64_t t = 1; t <= rounds; ++t) {
    const std::size_t k = static_cast<std::size_t>(t - 1);
    worst_iterate = std::max(worst_iterate, rel_diff_vec(a.iterates[k], b.iterates[k]));
    for (std::size_t i = 0; i < dim; ++i) {
      cum[i] += a.gradients[k][i] * a.gradients[k][i];
      double scaled = static_cast<double>(t) * b.accums[k][i];
      worst_stat = std::max(worst_stat,
                            std::abs(scaled - cum[i]) / std::max(1.0, std::abs(cum[i])));
    }
  }
  worst_iterate = std::max(worst_iterate, rel_diff_vec(a.final_iterate, b.final_iterate));
  result.passed = worst_iterate <= 1e-10 && worst_stat <= 1e-12;
  result.detail = "max iterate rel diff " + fmt(worst_iterate) + " (tol 1e-10), max statistic rel diff " +
                  fmt(worst_stat) + " (tol 1e-12) over " + str(rounds) + " rounds";
  return result;
}

inline CheckResult check_closed_form(std::uint64_t seed) {
  CheckResult result{"closed-form", true, ""};
  const std::int64_t rounds = 64;
  const std::size_t dim = 4;
  Rng curv(rng_at(seed, 12));
  Vec h(dim);
  for (double& x : h) x = curv.uniform(0.5, 2.0);
  QuadraticStream problem(h, rounds, -1.0, 1.0, seed);
  FeasibleSet set = FeasibleSet::box(Vec(dim, -0.25), Vec(dim, 0.25));
  HindsightSolution closed = hindsight_optimum(problem, set, rounds);
  HindsightSolution numeric = hindsight_numeric(problem, set, rounds);
  double dt = rel_diff_vec(closed.theta_star, numeric.theta_star);
  double dv = rel_diff(closed.cumulative_value, numeric.cumulative_value);
  result.passed = closed.report.closed_form && dt <= 1e-8 && dv <= 1e-10 &&
                  closed.report.residual <= 1e-10;
  result.detail = "theta rel diff " + fmt(dt) + " (tol 1e-8), value rel diff " + fmt(dv) +
                  " (tol 1e-10), closed-form residual " + fmt(closed.report.residual);
  return result;
}

inline CheckResult check_lemma_sc_battery(std::int64_t trials, std::uint64_t seed) {
  CheckResult result{"lemma-sc", true, ""};
  const std::vector<std::pair<double, double>> xis{{0.0, 1.0}, {0.1, 1.0}, {1.0, 0.1},
                                                   {0.01, 10.0}, {0.5, 0.5}};
  double min_slack = std::numeric_limits<double>::infinity();
  std::int64_t count = 0;
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    std::vector<Vec> grads = random_stream(rng_at(seed, 100 + trial), 200, 5, -10.0, 10.0);
    for (const auto& [xi1, xi2] : xis) {
      LemmaReport report = check_lemma_sc(grads, xi1, xi2);
      min_slack = std::min(min_slack, report.slack);
      result.passed = result.passed && report.holds;
      ++count;
    }
  }
  result.detail = "min slack " + fmt(min_slack) + " over " + str(count) +
                  " stream/parameter combinations (tol -1e-9)";
  return result;
}

inline CheckResult check_lemma_rms_battery(std::int64_t trials, std::uint64_t seed) {
  CheckResult result{"lemma-rms", true, ""};
  const std::vector<double> gammas{1.0, 0.9, 0.5};
  const std::vector<double> deltas{1e-8, 1e-2, 1.0};
  double min_slack = std::numeric_limits<double>::infinity();
  std::int64_t count = 0;
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    std::vector<Vec> grads = random_stream(rng_at(seed, 5000 + trial), 200, 5, -10.0, 10.0);
    for (double gamma : gammas) {
      for (double delta : deltas) {
        LemmaReport report = check_lemma_rms(grads, gamma, delta);
        min_slack = std::min({min_slack, report.slack,
                              report.worst_coordinate_slack.value_or(min_slack)});
        result.passed = result.passed && report.holds;
        ++count;
      }
    }
  }
  result.detail = "min slack " + fmt(min_slack) + " over " + str(count) +
                  " stream/parameter combinations, aggregate and per-coordinate (tol -1e-9)";
  return result;
}

inline CheckResult check_lemma_sc_rms_battery(std::int64_t trials, std::uint64_t seed) {
  CheckResult result{"lemma-sc-rms", true, ""};
  const std::vector<double> gammas{1.0, 0.9, 0.5};
  const std::vector<std::pair<double, double>> xis{{0.0, 1.0}, {0.1, 1.0}, {0.1, 0.5},
                                                   {1.0, 0.1}};
  double min_slack = std::numeric_limits<double>::infinity();
  double worst_pair = 0.0;
  std::int64_t count = 0;
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    std::vector<Vec> grads = random_stream(rng_at(seed, 9000 + trial), 200, 5, -10.0, 10.0);
    for (double gamma : gammas) {
      for (const auto& [xi1, xi2] : xis) {
        LemmaReport report = check_lemma_sc_rms(grads, gamma, xi1, xi2, 1.0);
        min_slack = std::min(min_slack, report.slack);
        result.passed = result.passed && report.holds;
        ++count;
      }
    }
    // gamma = 1 must agree with the cumulative lemma at alpha/2 scale.
    LemmaReport reduced = check_lemma_sc_rms(grads, 1.0, 0.1, 1.0, 1.0);
    LemmaReport base = check_lemma_sc(grads, 0.1, 1.0);
    worst_pair = std::max({worst_pair, rel_diff(reduced.lhs, 0.5 * base.lhs),
                           rel_diff(reduced.rhs, 0.5 * base.rhs)});
  }
  result.passed = result.passed && worst_pair <= 1e-10;
  result.detail = "min slack " + fmt(min_slack) + " over " + str(count) +
                  " combinations (tol -1e-9); gamma=1 agreement with cumulative lemma " +
                  fmt(worst_pair) + " (tol 1e-10)";
  return result;
}

// Compliant quadratic runs on a box, one per algorithm with a certificate:
// every bound form must be satisfied at every checkpoint under both constant
// conventions, with no assumption flags raised.
inline CheckResult check_bounds_battery(std::uint64_t seed) {
  CheckResult result{"bounds", true, ""};
  struct Cell {
    const char* optimizer;
    double alpha;
  };
  // Box [-1,1]^5 with curvature in [0.5,2] gives G_inf = 4 and min mu = 0.25,
  // so the strongly convex stepsize conditions are alpha >= 32 (cumulative)
  // and alpha >= (2-gamma)*32 (exponential average, gamma = 0.9 -> 35.2).
  const std::vector<Cell> cells{{"adagrad", 1.0},
                                {"sc-adagrad", 32.0},
                                {"rmsprop-ours", 1.0},
                                {"sc-rmsprop", 36.0}};
  double min_slack = std::numeric_limits<double>::infinity();
  std::string worst;
  for (const Cell& cell : cells) {
    RunSpec spec;
    spec.problem = "quadratic";
    spec.dim = 5;
    spec.curvature_lo = 0.5;
    spec.curvature_hi = 2.0;
    spec.set = "box:-1:1";
    spec.rounds = 500;
    spec.seed = seed;
    spec.optimizer = cell.optimizer;
    spec.alpha = cell.alpha;
    ExecutedRun run = execute_run(resolve_run(spec));
    if (run.bounds.empty()) {
      result.passed = false;
      worst = std::string(cell.optimizer) + ": no bound report";
      continue;
    }
    for (const BoundReport& report : run.bounds) {
      for (const BoundCheckpoint& c : report.checkpoints) {
        if (c.slack < min_slack) {
          min_slack = c.slack;
          worst = report.name + "/" + report.constants + " at T=" + str(c.T);
        }
        result.passed = result.passed && c.satisfied;
      }
      for (const std::string& flag : report.flags) {
        if (flag.rfind("alpha_condition", 0) == 0 || flag == "damping_above_one_outside_theory") {
          result.passed = false;
          worst = report.name + " raised " + flag;
        }
      }
    }
  }
  result.detail = "min bound slack " + fmt(min_slack) + " (tightest: " + worst +
                  "); all certificates satisfied at all checkpoints under known and observed constants";
  return result;
}

// Weighted projections against first-principles oracles: box projection is
// coordinatewise clamping; ball projection must be feasible, no worse than
// random feasible comparison points in the weighted norm, invariant to
// scaling the metric, and the identity for interior points.
inline CheckResult check_projections(std::int64_t trials, std::uint64_t seed) {
  CheckResult result{"projections", true, ""};
  double worst_gap = 0.0, worst_scale = 0.0, worst_box = 0.0, worst_feas = 0.0;
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    Rng rng(rng_at(seed, 40000 + trial));
    const std::size_t dim = 2 + static_cast<std::size_t>(rng.next_u64() % 6);
    Vec a(dim), z(dim), lo(dim), hi(dim), center(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      a[i] = rng.uniform(0.05, 20.0);
      z[i] = rng.uniform(-5.0, 5.0);
      double u = rng.uniform(-2.0, 2.0), v = rng.uniform(-2.0, 2.0);
      lo[i] = std::min(u, v);
      hi[i] = std::max(u, v);
      center[i] = rng.uniform(-1.0, 1.0);
    }
    DiagonalMetric metric(a);

    FeasibleSet box = FeasibleSet::box(lo, hi);
    Vec pb = box.project(metric, z);
    for (std::size_t i = 0; i < dim; ++i)
      worst_box = std::max(worst_box, std::abs(pb[i] - std::min(hi[i], std::max(lo[i], z[i]))));

    const double radius = rng.uniform(0.2, 3.0);
    FeasibleSet ball = FeasibleSet::ball(center, radius);
    Vec pball = ball.project(metric, z);
    double dist = norm2(sub(pball, center));
    worst_feas = std::max(worst_feas, dist - radius * (1.0 + 1e-12));
    // Optimality: no random feasible point may be closer in the weighted norm.
    double px = weighted_norm(sub(pball, z), metric);
    for (int probe = 0; probe < 32; ++probe) {
      Vec y(dim);
      double norm_sq = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        y[i] = rng.uniform(-1.0, 1.0);
        norm_sq += y[i] * y[i];
      }
      double shrink = rng.uniform(0.0, 1.0) * radius / std::max(1e-12, std::sqrt(norm_sq));
      for (std::size_t i = 0; i < dim; ++i) y[i] = center[i] + y[i] * shrink;
      worst_gap = std::max(worst_gap, px - weighted_norm(sub(y, z), metric));
    }
    // Scale invariance of the weighted projection.
    Vec a3(dim);
    for (std::size_t i = 0; i < dim; ++i) a3[i] = 3.0 * a[i];
    worst_scale = std::max(worst_scale,
                           rel_diff_vec(pball, ball.project(DiagonalMetric(a3), z)));
    // Interior points project to themselves.
    Vec inside(dim);
    for (std::size_t i = 0; i < dim; ++i)
      inside[i] = center[i] + rng.uniform(-0.4, 0.4) * radius / std::sqrt(double(dim));
    Vec pin = ball.project(metric, inside);
    worst_feas = std::max(worst_feas, rel_diff_vec(pin, inside));
  }
  result.passed = worst_box == 0.0 && worst_feas <= 1e-10 && worst_gap <= 1e-9 &&
                  worst_scale <= 1e-10;
  result.detail = "box clamp gap " + fmt(worst_box) + " (exact), feasibility excess " +
                  fmt(worst_feas) + ", best probe advantage " + fmt(worst_gap) +
                  " (tol 1e-9), metric-scaling drift " + fmt(worst_scale) + " over " +
                  str(trials) + " trials";
  return result;
}

inline double finite_difference_worst(const OnlineProblem& problem, const Vec& point,
                                      std::int64_t round, double h) {
  auto [loss, grad] = problem.loss_grad(point, round);
  (void)loss;
  double worst = 0.0;
  Vec probe = point;
  for (std::size_t i = 0; i < point.size(); ++i) {
    probe[i] = point[i] + h;
    double up = problem.loss(probe, round);
    probe[i] = point[i] - h;
    double down = problem.loss(probe, round);
    probe[i] = point[i];
    double fd = (up - down) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - grad[i]) / std::max(1.0, std::abs(grad[i])));
  }
  return worst;
}

inline CheckResult check_gradients(std::uint64_t seed) {
  CheckResult result{"gradients", true, ""};
  const int points = 20;

  Rng curv(rng_at(seed, 600));
  Vec h(6);
  for (double& x : h) x = curv.uniform(0.5, 2.0);
  QuadraticStream quadratic(h, 50, -1.0, 1.0, seed);

  Dataset blobs = synthetic_gaussian_blobs(seed, 60, 4, 3, 2.5);
  auto batches = minibatch_stream(60, 8, 2, rng_at(seed, 601));
  SoftmaxRegressionProblem softmax(blobs, 0.05, batches);
  MlpProblem mlp(blobs, 5, batches);

  double worst_quadratic = 0.0, worst_softmax = 0.0, worst_mlp = 0.0;
  for (int p = 0; p < points; ++p) {
    Rng rng(rng_at(seed, 700 + p));
    Vec q(quadratic.dim());
    for (double& x : q) x = rng.uniform(-2.0, 2.0);
    std::int64_t round_q = 1 + static_cast<std::int64_t>(rng.next_u64() % 50);
    worst_quadratic =
        std::max(worst_quadratic, finite_difference_worst(quadratic, q, round_q, 1e-5));

    Vec s(softmax.dim());
    for (double& x : s) x = rng.uniform(-0.5, 0.5);
    std::int64_t round_s = 1 + static_cast<std::int64_t>(rng.next_u64() %
                                                         static_cast<std::uint64_t>(softmax.rounds()));
    worst_softmax = std::max(worst_softmax, finite_difference_worst(softmax, s, round_s, 1e-5));

    // Jittered parameters keep hidden-unit preactivations away from the
    // nondifferentiable kink of the rectifier.
    Vec m(mlp.dim());
    for (double& x : m) x = rng.uniform(0.05, 0.6) * (rng.next_u64() & 1 ? 1.0 : -1.0);
    std::int64_t round_m = 1 + static_cast<std::int64_t>(rng.next_u64() %
                                                         static_cast<std::uint64_t>(mlp.rounds()));
    worst_mlp = std::max(worst_mlp, finite_difference_worst(mlp, m, round_m, 1e-5));
  }
  result.passed = worst_quadratic <= 1e-8 && worst_softmax <= 1e-6 && worst_mlp <= 1e-5;
  result.detail = "max rel error vs central differences at " + str(points) +
                  " points each: quadratic " + fmt(worst_quadratic) + " (tol 1e-8), softmax " +
                  fmt(worst_softmax) + " (tol 1e-6), mlp " + fmt(worst_mlp) + " (tol 1e-5)";
  return result;
}

inline CheckResult check_growth(std::uint64_t seed) {
  CheckResult result{"growth", true, ""};
  std::vector<RegretPoint> log_series, sqrt_series;
  Rng rng(rng_at(seed, 800));
  for (std::int64_t T : {10, 50, 100, 500, 1000, 5000, 10000}) {
    log_series.push_back({T, 3.0 * std::log(static_cast<double>(T))});
    sqrt_series.push_back({T, 2.0 * std::sqrt(static_cast<double>(T))});
  }
  GrowthFit lf = fit_growth(log_series, GrowthModel::log_t);
  GrowthFit sf_log = fit_growth(sqrt_series, GrowthModel::log_t);
  GrowthFit sf_sqrt = fit_growth(sqrt_series, GrowthModel::sqrt_t);
  bool exact = std::abs(lf.slope - 3.0) <= 1e-9 && std::abs(lf.intercept) <= 1e-9 &&
               lf.r2 >= 1.0 - 1e-12;
  bool discriminates = sf_sqrt.r2 > sf_log.r2 && std::abs(sf_sqrt.slope - 2.0) <= 1e-9;
  result.passed = exact && discriminates;
  result.detail = "log identity slope " + fmt(lf.slope) + " r2 " + fmt(lf.r2) +
                  "; sqrt series r2 sqrt " + fmt(sf_sqrt.r2) + " vs log " + fmt(sf_log.r2);
  return result;
}

inline CheckResult check_damping(std::uint64_t seed) {
  CheckResult result{"damping", true, ""};
  double worst = -std::numeric_limits<double>::infinity();
  for (const char* optimizer : {"sc-adagrad", "sc-rmsprop"}) {
    RunSpec spec;
    spec.problem = "quadratic";
    spec.dim = 5;
    spec.set = "box:-1:1";
    spec.rounds = 300;
    spec.seed = seed;
    spec.optimizer = optimizer;
    spec.alpha = 1.0;
    ResolvedRun rr = resolve_run(spec);
    RunTrace trace = run_online(*rr.problem, rr.config, rr.set, rr.rounds);
    for (std::size_t k = 1; k < trace.dampings.size(); ++k) {
      for (std::size_t i = 0; i < trace.dampings[k].size(); ++i) {
        double prev = trace.dampings[k - 1][i];
        double next = trace.dampings[k][i];
        worst = std::max(worst, next - prev * (1.0 + 1e-10));
        result.passed = result.passed && next <= prev * (1.0 + 1e-10);
      }
    }
  }
  result.detail = "max damping increase beyond tolerance " + fmt(worst) +
                  " across both strongly convex variants (must be <= 0)";
  return result;
}

inline CheckResult check_relsub(std::uint64_t) {
  CheckResult result{"relsub", true, ""};
  const double p = 0.7;
  RelativeSuboptimality r =
      relative_suboptimality({2.0 * p, 1.1 * p, p * (1.0 + 1e-6), p * (1.0 - 1e-9)}, p);
  double worst = std::max({std::abs(r.log10_gap[0] - 0.0), std::abs(r.log10_gap[1] - (-1.0)),
                           std::abs(r.log10_gap[2] - (-6.0))});
  result.passed = worst <= 1e-9 && !r.clamped[0] && !r.clamped[1] && !r.clamped[2] &&
                  r.clamped[3] && r.log10_gap[3] == -16.0;
  result.detail = "identity error " + fmt(worst) +
                  " (tol 1e-9); sub-reference value clamped to -16 and flagged";
  return result;
}

inline CheckResult check_determinism(std::uint64_t seed) {
  CheckResult result{"determinism", true, ""};
  RunSpec spec;
  spec.problem = "softmax";
  spec.dim = 5;
  spec.blobs_m = 120;
  spec.blobs_k = 3;
  spec.batch_size = 7;  // ragged final batch on purpose
  spec.rounds = 100;
  spec.seed = seed;
  spec.optimizer = "adagrad";
  spec.alpha = 0.5;
  ExecutedRun first = execute_run(resolve_run(spec));
  ExecutedRun second = execute_run(resolve_run(spec));
  // Round-trip through the manifest grammar must reproduce the run exactly.
  RunSpec reloaded;
  apply_keyvals(reloaded, to_config_keyvals(first.resolved.spec));
  ExecutedRun third = execute_run(resolve_run(reloaded));
  bool same = first.trace.losses == second.trace.losses &&
              first.trace.final_iterate == second.trace.final_iterate &&
              first.trace.losses == third.trace.losses &&
              first.trace.final_iterate == third.trace.final_iterate &&
              first.regret.back().regret == second.regret.back().regret &&
              first.regret.back().regret == third.regret.back().regret;
  result.passed = same;
  result.detail = same ? "rerun and config round-trip reproduce losses, iterates, and regret bitwise"
                       : "rerun diverged from the original trace";
  return result;
}

}  // namespace verify_detail

inline std::vector<std::string> verification_check_names() {
  return {"reduction-adagrad", "reduction-sc", "closed-form", "lemma-sc",     "lemma-rms",
          "lemma-sc-rms",      "bounds",       "projections", "gradients",    "growth",
          "damping",           "relsub",       "determinism"};
}

inline std::vector<CheckResult> run_verification(const VerifyOptions& options) {
  using namespace verify_detail;
  if (options.trials < 1) throw Error("verify: trials must be >= 1");
  if (!options.only.empty()) {
    const auto names = verification_check_names();
    if (std::find(names.begin(), names.end(), options.only) == names.end())
      throw Error("verify: unknown check '" + options.only + "'");
  }
  std::vector<CheckResult> results;
  auto want = [&](const char* name) { return options.only.empty() || options.only == name; };
  if (want("reduction-adagrad")) results.push_back(check_reduction(false, options.seed));
  if (want("reduction-sc")) results.push_back(check_reduction(true, options.seed));
  if (want("closed-form")) results.push_back(check_closed_form(options.seed));
  if (want("lemma-sc")) results.push_back(check_lemma_sc_battery(options.trials, options.seed));
  if (want("lemma-rms")) results.push_back(check_lemma_rms_battery(options.trials, options.seed));
  if (want("lemma-sc-rms"))
    results.push_back(check_lemma_sc_rms_battery(options.trials, options.seed));
  if (want("bounds")) results.push_back(check_bounds_battery(options.seed));
  if (want("projections")) results.push_back(check_projections(options.trials, options.seed));
  if (want("gradients")) results.push_back(check_gradients(options.seed));
  if (want("growth")) results.push_back(check_growth(options.seed));
  if (want("damping")) results.push_back(check_damping(options.seed));
  if (want("relsub")) results.push_back(check_relsub(options.seed));
  if (want("determinism")) results.push_back(check_determinism(options.seed));
  return results;
}

}  // namespace oco

#endif  // OCO_VERIFY_HPP
