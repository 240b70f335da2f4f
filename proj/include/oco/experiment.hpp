#ifndef OCO_EXPERIMENT_HPP
#define OCO_EXPERIMENT_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "oco/bounds.hpp"
#include "oco/common.hpp"
#include "oco/csv.hpp"
#include "oco/feasible_set.hpp"
#include "oco/optimizer.hpp"
#include "oco/problems.hpp"
#include "oco/rng.hpp"
#include "oco/trace.hpp"

namespace oco {

// Full experiment description. Optional fields distinguish "user left the
// default" from "user pinned a value", which drives config precedence
// (flags > config file > environment > built-in defaults) and the
// problem-dependent defaults (xi2, stepsize schedule, checkpoint grid).
struct RunSpec {
  // problem
  std::string problem = "quadratic";  // quadratic | softmax | mlp
  std::int64_t dim = 10;              // quadratic dimension / synthetic feature dim
  double curvature_lo = 0.5;
  double curvature_hi = 2.0;
  double center_lo = -1.0;
  double center_hi = 1.0;
  std::string dataset;  // CSV path; empty => synthetic blobs for dataset problems
  std::int64_t label_col = -1;
  std::int64_t blobs_m = 2000;
  std::int64_t blobs_k = 3;
  double blobs_sep = 3.0;
  double lambda = 0.01;
  std::int64_t hidden = 16;
  std::int64_t batch_size = 1;
  std::int64_t epochs = 0;  // 0 => derive epochs from T
  std::optional<std::int64_t> rounds;
  std::optional<std::uint64_t> seed;
  // optimizer
  std::string optimizer = "sc-adagrad";
  double alpha = 0.1;
  double gamma = 0.9;
  double xi1 = 0.1;
  std::optional<double> xi2;  // default 1 (convex problems) / 0.1 (mlp)
  double delta = 1e-8;
  std::optional<std::string> stepsize;
  // feasible set: unconstrained | box:lo:hi | ball:r
  std::string set = "unconstrained";
  // evaluation
  std::vector<std::int64_t> checkpoints;  // empty => powers of 10 plus T
  std::optional<double> d_inf;
  std::optional<double> g_inf;
  bool trace_v = false;
  std::int64_t snapshot_stride = 1;
  // output / scheduling
  std::string out = "run-out";
  std::int64_t workers = 1;
  // grid sweep
  std::vector<double> grid_alphas = {1.0, 0.1, 0.01, 0.001, 0.0001};
  std::vector<std::string> grid_algorithms = {"sgd",        "adagrad", "sc-adagrad",
                                              "rmsprop-ours", "sc-rmsprop", "adam",
                                              "rmsprop-classic"};
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

inline double parse_f64(const std::string& key, const std::string& value) {
  double v = 0.0;
  if (!parse_double(value, v))
    throw Error("config: cannot parse '" + value + "' as a number for " + key);
  return v;
}

inline std::int64_t parse_i64(const std::string& key, const std::string& value) {
  double v = parse_f64(key, value);
  if (v != std::nearbyint(v) || std::abs(v) > 9.0e18)
    throw Error("config: '" + value + "' is not an integer for " + key);
  return static_cast<std::int64_t>(v);
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::string t = trim(value);
  if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
    throw Error("config: '" + value + "' is not an unsigned integer for " + key);
  try {
    return std::stoull(t);
  } catch (const std::exception&) {
    throw Error("config: '" + value + "' out of range for " + key);
  }
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  std::string t = trim(value);
  if (t == "1" || t == "true") return true;
  if (t == "0" || t == "false") return false;
  throw Error("config: '" + value + "' is not a boolean (0/1/true/false) for " + key);
}

inline std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(value);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::vector<std::int64_t> parse_i64_list(const std::string& key, const std::string& value) {
  std::vector<std::int64_t> out;
  for (const std::string& item : split_list(value)) out.push_back(parse_i64(key, item));
  return out;
}

inline std::vector<double> parse_f64_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const std::string& item : split_list(value)) out.push_back(parse_f64(key, item));
  return out;
}

template <typename T, typename F>
inline std::string join_list(const std::vector<T>& items, F fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += fmt(items[i]);
  }
  return out;
}

}  // namespace detail

// Flat key=value config file: one pair per line, '#' starts a comment,
// blank lines ignored, whitespace around key and value trimmed.
inline std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config: cannot open '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("config '" + path + "': expected key=value", lineno);
    std::string key = detail::trim(line.substr(0, eq));
    if (key.empty()) throw ParseError("config '" + path + "': empty key", lineno);
    kv[key] = detail::trim(line.substr(eq + 1));
  }
  return kv;
}

// Applies config-file / manifest pairs onto a spec. Keys with the derived-
// output prefixes are skipped so a run manifest doubles as a rerun config.
inline void apply_keyvals(RunSpec& spec, const std::map<std::string, std::string>& kv) {
  using namespace detail;
  for (const auto& [key, value] : kv) {
    if (key.rfind("observed_", 0) == 0 || key.rfind("result_", 0) == 0 ||
        key.rfind("hindsight_", 0) == 0 || key.rfind("constants_", 0) == 0)
      continue;
    if (key == "problem") spec.problem = value;
    else if (key == "dim") spec.dim = parse_i64(key, value);
    else if (key == "curvature_lo") spec.curvature_lo = parse_f64(key, value);
    else if (key == "curvature_hi") spec.curvature_hi = parse_f64(key, value);
    else if (key == "center_lo") spec.center_lo = parse_f64(key, value);
    else if (key == "center_hi") spec.center_hi = parse_f64(key, value);
    else if (key == "dataset") spec.dataset = value;
    else if (key == "label_col") spec.label_col = parse_i64(key, value);
    else if (key == "blobs_m") spec.blobs_m = parse_i64(key, value);
    else if (key == "blobs_k") spec.blobs_k = parse_i64(key, value);
    else if (key == "blobs_sep") spec.blobs_sep = parse_f64(key, value);
    else if (key == "lambda") spec.lambda = parse_f64(key, value);
    else if (key == "hidden") spec.hidden = parse_i64(key, value);
    else if (key == "batch_size") spec.batch_size = parse_i64(key, value);
    else if (key == "epochs") spec.epochs = parse_i64(key, value);
    else if (key == "T") spec.rounds = parse_i64(key, value);
    else if (key == "seed") spec.seed = parse_u64(key, value);
    else if (key == "optimizer") spec.optimizer = value;
    else if (key == "alpha") spec.alpha = parse_f64(key, value);
    else if (key == "gamma") spec.gamma = parse_f64(key, value);
    else if (key == "xi1") spec.xi1 = parse_f64(key, value);
    else if (key == "xi2") spec.xi2 = parse_f64(key, value);
    else if (key == "delta") spec.delta = parse_f64(key, value);
    else if (key == "stepsize") spec.stepsize = value;
    else if (key == "set") spec.set = value;
    else if (key == "checkpoints") spec.checkpoints = parse_i64_list(key, value);
    else if (key == "D_inf") spec.d_inf = parse_f64(key, value);
    else if (key == "G_inf") spec.g_inf = parse_f64(key, value);
    else if (key == "trace_v") spec.trace_v = parse_bool(key, value);
    else if (key == "snapshot_stride") spec.snapshot_stride = parse_i64(key, value);
    else if (key == "out") spec.out = value;
    else if (key == "workers") spec.workers = parse_i64(key, value);
    else if (key == "grid_alphas") spec.grid_alphas = parse_f64_list(key, value);
    else if (key == "grid_algorithms") spec.grid_algorithms = split_list(value);
    else throw Error("config: unknown key '" + key + "'");
  }
}

// Serializes a resolved spec back to the config grammar (the canonical form
// written to run manifests; T is always canonical, epochs only informative).
inline std::map<std::string, std::string> to_config_keyvals(const RunSpec& spec) {
  using namespace detail;
  std::map<std::string, std::string> kv;
  kv["problem"] = spec.problem;
  kv["dim"] = fmt_int(spec.dim);
  kv["curvature_lo"] = fmt_double(spec.curvature_lo);
  kv["curvature_hi"] = fmt_double(spec.curvature_hi);
  kv["center_lo"] = fmt_double(spec.center_lo);
  kv["center_hi"] = fmt_double(spec.center_hi);
  kv["dataset"] = spec.dataset;
  kv["label_col"] = fmt_int(spec.label_col);
  kv["blobs_m"] = fmt_int(spec.blobs_m);
  kv["blobs_k"] = fmt_int(spec.blobs_k);
  kv["blobs_sep"] = fmt_double(spec.blobs_sep);
  kv["lambda"] = fmt_double(spec.lambda);
  kv["hidden"] = fmt_int(spec.hidden);
  kv["batch_size"] = fmt_int(spec.batch_size);
  kv["epochs"] = fmt_int(spec.epochs);
  if (spec.rounds) kv["T"] = fmt_int(*spec.rounds);
  if (spec.seed) kv["seed"] = fmt_int(static_cast<long long>(*spec.seed));
  kv["optimizer"] = spec.optimizer;
  kv["alpha"] = fmt_double(spec.alpha);
  kv["gamma"] = fmt_double(spec.gamma);
  kv["xi1"] = fmt_double(spec.xi1);
  if (spec.xi2) kv["xi2"] = fmt_double(*spec.xi2);
  kv["delta"] = fmt_double(spec.delta);
  if (spec.stepsize) kv["stepsize"] = *spec.stepsize;
  kv["set"] = spec.set;
  kv["checkpoints"] = join_list(spec.checkpoints, [](std::int64_t t) { return fmt_int(t); });
  if (spec.d_inf) kv["D_inf"] = fmt_double(*spec.d_inf);
  if (spec.g_inf) kv["G_inf"] = fmt_double(*spec.g_inf);
  kv["trace_v"] = spec.trace_v ? "1" : "0";
  kv["snapshot_stride"] = fmt_int(spec.snapshot_stride);
  kv["out"] = spec.out;
  kv["workers"] = fmt_int(spec.workers);
  kv["grid_alphas"] = join_list(spec.grid_alphas, fmt_double);
  kv["grid_algorithms"] =
      join_list(spec.grid_algorithms, [](const std::string& s) { return s; });
  return kv;
}

// "unconstrained" | "box:lo:hi" | "ball:r" (ball centered at the origin).
inline FeasibleSet parse_feasible_set(const std::string& text, std::size_t dim) {
  if (text == "unconstrained") return FeasibleSet::unconstrained();
  std::vector<std::string> parts;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, ':')) parts.push_back(item);
  if (!parts.empty() && parts[0] == "box") {
    if (parts.size() != 3) throw Error("set: expected box:lo:hi, got '" + text + "'");
    double lo = detail::parse_f64("set", parts[1]);
    double hi = detail::parse_f64("set", parts[2]);
    return FeasibleSet::box(Vec(dim, lo), Vec(dim, hi));
  }
  if (!parts.empty() && parts[0] == "ball") {
    if (parts.size() != 2) throw Error("set: expected ball:r, got '" + text + "'");
    double r = detail::parse_f64("set", parts[1]);
    return FeasibleSet::ball(Vec(dim, 0.0), r);
  }
  throw Error("set: expected unconstrained | box:lo:hi | ball:r, got '" + text + "'");
}

// A spec turned into live objects: problem instance, feasible set, validated
// optimizer configuration, resolved round count, checkpoint grid. spec holds
// the canonicalized copy (optionals filled) used for manifests.
struct ResolvedRun {
  RunSpec spec;
  std::shared_ptr<const OnlineProblem> problem;
  FeasibleSet set = FeasibleSet::unconstrained();
  OptimizerConfig config;
  std::int64_t rounds = 0;
  std::uint64_t seed = 0;
  std::vector<std::int64_t> checkpoints;
  std::int64_t batches_per_epoch = 0;  // 0 for round-stream problems
};

inline ResolvedRun resolve_run(const RunSpec& input,
                               std::optional<std::uint64_t> env_seed = std::nullopt) {
  ResolvedRun rr;
  rr.spec = input;
  RunSpec& spec = rr.spec;

  rr.seed = spec.seed ? *spec.seed : (env_seed ? *env_seed : 42);
  spec.seed = rr.seed;
  if (spec.rounds && spec.epochs > 0)
    throw Error("config: give either T or epochs, not both");
  if (spec.rounds && *spec.rounds < 1) throw Error("config: T must be >= 1");
  if (spec.epochs < 0) throw Error("config: epochs must be >= 0");
  if (spec.batch_size < 1) throw Error("config: batch_size must be >= 1");
  if (spec.snapshot_stride < 1) throw Error("config: snapshot_stride must be >= 1");
  if (spec.workers < 1) throw Error("config: workers must be >= 1");
  if (spec.d_inf && !(*spec.d_inf > 0.0)) throw Error("config: D_inf must be > 0");
  if (spec.g_inf && !(*spec.g_inf > 0.0)) throw Error("config: G_inf must be > 0");

  const bool dataset_problem = spec.problem == "softmax" || spec.problem == "mlp";
  if (spec.problem == "quadratic") {
    if (spec.epochs > 0) throw Error("config: epochs applies to dataset problems only");
    if (spec.dim < 1) throw Error("config: dim must be >= 1");
    rr.rounds = spec.rounds.value_or(1000);
    Rng curvature_rng(rng_at(rr.seed, 1));
    Vec curvature(static_cast<std::size_t>(spec.dim));
    if (!(spec.curvature_lo > 0.0) || !(spec.curvature_hi >= spec.curvature_lo))
      throw Error("config: need 0 < curvature_lo <= curvature_hi");
    for (double& h : curvature) h = curvature_rng.uniform(spec.curvature_lo, spec.curvature_hi);
    rr.problem = std::make_shared<QuadraticStream>(std::move(curvature), rr.rounds,
                                                   spec.center_lo, spec.center_hi, rr.seed);
  } else if (dataset_problem) {
    Dataset data = spec.dataset.empty()
                       ? synthetic_gaussian_blobs(rr.seed, static_cast<std::size_t>(spec.blobs_m),
                                                  static_cast<std::size_t>(spec.dim),
                                                  static_cast<std::size_t>(spec.blobs_k),
                                                  spec.blobs_sep)
                       : load_csv_dataset(spec.dataset, static_cast<int>(spec.label_col));
    const std::int64_t m = static_cast<std::int64_t>(data.features.size());
    if (spec.batch_size > m) throw Error("config: batch_size exceeds dataset size");
    rr.batches_per_epoch = (m + spec.batch_size - 1) / spec.batch_size;
    rr.rounds = spec.rounds ? *spec.rounds
                            : (spec.epochs > 0 ? spec.epochs * rr.batches_per_epoch : 1000);
    const std::int64_t epochs_needed =
        (rr.rounds + rr.batches_per_epoch - 1) / rr.batches_per_epoch;
    auto batches = minibatch_stream(static_cast<std::size_t>(m),
                                    static_cast<std::size_t>(spec.batch_size),
                                    static_cast<std::size_t>(epochs_needed), rng_at(rr.seed, 2));
    if (spec.problem == "softmax")
      rr.problem = std::make_shared<SoftmaxRegressionProblem>(std::move(data), spec.lambda,
                                                              std::move(batches));
    else
      rr.problem = std::make_shared<MlpProblem>(std::move(data),
                                                static_cast<std::size_t>(spec.hidden),
                                                std::move(batches));
  } else {
    throw Error("config: unknown problem '" + spec.problem + "' (quadratic|softmax|mlp)");
  }
  spec.rounds = rr.rounds;
  spec.epochs = 0;  // canonical form carries T

  rr.set = parse_feasible_set(spec.set, rr.problem->dim());

  if (!spec.xi2) spec.xi2 = spec.problem == "mlp" ? 0.1 : 1.0;
  rr.config.algorithm = algorithm_from_string(spec.optimizer);
  rr.config.alpha = spec.alpha;
  rr.config.gamma = spec.gamma;
  rr.config.xi1 = spec.xi1;
  rr.config.xi2 = *spec.xi2;
  rr.config.delta = spec.delta;
  if (spec.stepsize) rr.config.stepsize_mode = stepsize_mode_from_string(*spec.stepsize);
  validate(rr.config);
  spec.stepsize = to_string(resolved_stepsize_mode(rr.config));

  rr.checkpoints = spec.checkpoints.empty() ? default_checkpoints(rr.rounds) : spec.checkpoints;
  for (std::size_t i = 0; i < rr.checkpoints.size(); ++i) {
    if (rr.checkpoints[i] < 1 || rr.checkpoints[i] > rr.rounds)
      throw Error("config: checkpoint " + str(rr.checkpoints[i]) + " outside [1, " +
                  str(rr.rounds) + "]");
    if (i > 0 && rr.checkpoints[i] <= rr.checkpoints[i - 1])
      throw Error("config: checkpoints must be strictly increasing");
  }
  spec.checkpoints = rr.checkpoints;
  if (spec.trace_v && spec.snapshot_stride != 1)
    throw Error("config: trace_v needs snapshot_stride=1");
  return rr;
}

struct RelsubRow {
  std::int64_t index = 0;        // epoch for dataset problems, checkpoint ordinal otherwise
  std::int64_t rounds_done = 0;  // optimizer steps taken at this row
  double objective = 0.0;
  double value = 0.0;  // log10 relative gap
  bool clamped = false;
};

// One finished run with everything its artifacts are generated from.
struct ExecutedRun {
  ResolvedRun resolved;
  RunTrace trace;
  HindsightSolution solution;
  std::vector<RegretPoint> regret;
  Vec regret_series;  // cumulative regret after each round
  std::vector<BoundReport> bounds;
  std::vector<RelsubRow> relsub;
  std::string relsub_status = "written";
  double p_star_batch = std::numeric_limits<double>::quiet_NaN();
  double observed_d = 0.0;
  double observed_g = 0.0;
  std::string constants_d_source = "observed";
  std::string constants_g_source = "observed";
};

namespace detail {

// theta after `steps` optimizer updates (stride-1 snapshots assumed).
inline const Vec& iterate_after(const RunTrace& trace, std::int64_t steps) {
  if (steps >= trace.rounds) return trace.final_iterate;
  return trace.iterates[static_cast<std::size_t>(steps)];
}

inline void evaluate_bounds(ExecutedRun& run) {
  const ResolvedRun& rr = run.resolved;
  const Algorithm algo = rr.config.algorithm;
  if (algo != Algorithm::adagrad && algo != Algorithm::sc_adagrad &&
      algo != Algorithm::rmsprop_ours && algo != Algorithm::sc_rmsprop)
    return;  // no worst-case certificate for the reference baselines

  BoundConstants observed;
  observed.mu = rr.problem->strong_convexity();
  observed.label = "observed";

  BoundConstants known = observed;
  known.label = "known";
  if (rr.spec.d_inf) {
    known.D_inf = rr.spec.d_inf;
    run.constants_d_source = "flag";
  } else if (auto diam = rr.set.diameter_inf()) {
    known.D_inf = diam;
    run.constants_d_source = "set-diameter";
  }
  if (rr.spec.g_inf) {
    known.G_inf = rr.spec.g_inf;
    run.constants_g_source = "flag";
  } else if (auto gb = rr.problem->grad_inf_bound(rr.set)) {
    known.G_inf = gb;
    run.constants_g_source = "problem-bound";
  }
  const bool have_known = known.D_inf.has_value() || known.G_inf.has_value();

  auto evaluate = [&](const BoundConstants& constants) {
    switch (algo) {
      case Algorithm::adagrad:
        run.bounds.push_back(bound_adagrad(run.trace, run.solution.theta_star, run.regret,
                                           constants));
        break;
      case Algorithm::sc_adagrad: {
        auto reports = bound_sc_adagrad(run.trace, run.solution.theta_star, run.regret,
                                        constants);
        for (BoundReport& r : reports) run.bounds.push_back(std::move(r));
        break;
      }
      case Algorithm::rmsprop_ours:
        run.bounds.push_back(bound_rmsprop(run.trace, run.solution.theta_star, run.regret,
                                           constants));
        break;
      default:
        run.bounds.push_back(bound_sc_rmsprop(run.trace, run.solution.theta_star, run.regret,
                                              constants));
        break;
    }
  };
  evaluate(observed);
  if (have_known) evaluate(known);
}

inline void evaluate_relsub(ExecutedRun& run) {
  const ResolvedRun& rr = run.resolved;
  if (rr.spec.snapshot_stride != 1) {
    run.relsub_status = "skipped_thinned_snapshots";
    return;
  }
  run.p_star_batch = rr.problem->batch_objective(run.solution.theta_star, run.trace.rounds);
  if (!(run.p_star_batch > 0.0) || !std::isfinite(run.p_star_batch)) {
    run.relsub_status = "skipped_nonpositive_reference";
    return;
  }
  std::vector<std::int64_t> marks{0};
  if (rr.batches_per_epoch > 0) {
    for (std::int64_t r = rr.batches_per_epoch; r <= run.trace.rounds;
         r += rr.batches_per_epoch)
      marks.push_back(r);
  } else {
    for (std::int64_t c : rr.checkpoints) marks.push_back(c);
  }
  std::vector<double> objectives;
  objectives.reserve(marks.size());
  for (std::int64_t r : marks)
    objectives.push_back(
        rr.problem->batch_objective(iterate_after(run.trace, r), run.trace.rounds));
  RelativeSuboptimality rel = relative_suboptimality(objectives, run.p_star_batch);
  for (std::size_t i = 0; i < marks.size(); ++i) {
    RelsubRow row;
    row.index = rr.batches_per_epoch > 0 ? marks[i] / rr.batches_per_epoch
                                         : static_cast<std::int64_t>(i);
    row.rounds_done = marks[i];
    row.objective = objectives[i];
    row.value = rel.log10_gap[i];
    row.clamped = rel.clamped[i];
    run.relsub.push_back(row);
  }
}

}  // namespace detail

// Runs the online loop, solves the hindsight problem (or reuses a shared
// solution when the caller already solved the identical stream), scores
// regret, bounds, and relative suboptimality.
inline ExecutedRun execute_run(ResolvedRun rr,
                               const HindsightSolution* shared_solution = nullptr) {
  ExecutedRun run;
  run.resolved = std::move(rr);
  const ResolvedRun& r = run.resolved;

  TraceOptions options;
  options.snapshot_stride = r.spec.snapshot_stride;
  run.trace = run_online(*r.problem, r.config, r.set, r.rounds, options);
  run.solution = shared_solution ? *shared_solution : hindsight_optimum(*r.problem, r.set,
                                                                        r.rounds);

  run.regret_series.resize(static_cast<std::size_t>(r.rounds));
  double cumulative = 0.0;
  for (std::int64_t t = 1; t <= r.rounds; ++t) {
    cumulative += run.trace.losses[static_cast<std::size_t>(t - 1)] -
                  r.problem->loss(run.solution.theta_star, t);
    run.regret_series[static_cast<std::size_t>(t - 1)] = cumulative;
  }
  run.regret = compute_regret(run.trace, run.solution, *r.problem, r.checkpoints);

  run.observed_d = observed_distance_inf(run.trace, run.solution.theta_star);
  run.observed_g = run.trace.observed_grad_inf;
  detail::evaluate_bounds(run);
  detail::evaluate_relsub(run);
  return run;
}

namespace detail {

// Removes everything this writer created if commit() is never reached, so a
// failed command leaves no partial artifacts behind.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(const std::string& dir) : dir_(dir) {
    created_dir_ = std::filesystem::create_directories(dir_);
  }
  std::string path(const std::string& name) {
    files_.push_back(dir_ / name);
    return (dir_ / name).string();
  }
  void commit() { committed_ = true; }
  ~ArtifactWriter() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& f : files_) std::filesystem::remove(f, ec);
    if (created_dir_) std::filesystem::remove(dir_, ec);
  }

 private:
  std::filesystem::path dir_;
  bool created_dir_ = false;
  bool committed_ = false;
  std::vector<std::filesystem::path> files_;
};

inline std::string sanitize_cell(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

inline std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (i) out += ';';
    out += flags[i];
  }
  return out;
}

}  // namespace detail

// Writes trace.csv, bounds.csv, relsub.csv, and manifest.txt into the run's
// output directory. Refuses to touch a directory that already holds a run.
inline void write_run_artifacts(const std::string& out_dir, const ExecutedRun& run) {
  namespace fs = std::filesystem;
  if (fs::exists(fs::path(out_dir) / "manifest.txt"))
    throw Error("output directory '" + out_dir + "' already holds a run; refusing to overwrite");
  detail::ArtifactWriter writer(out_dir);
  const ResolvedRun& rr = run.resolved;

  CsvTable trace;
  trace.header = {"t", "loss", "cumulative_regret", "grad_inf_norm"};
  const std::size_t dim = rr.problem->dim();
  if (rr.spec.trace_v) {
    for (std::size_t i = 0; i < dim; ++i) trace.header.push_back("v_" + str(i));
  }
  for (std::int64_t t = 1; t <= run.trace.rounds; ++t) {
    const std::size_t k = static_cast<std::size_t>(t - 1);
    std::vector<std::string> row{fmt_int(t), fmt_double(run.trace.losses[k]),
                                 fmt_double(run.regret_series[k]),
                                 fmt_double(inf_norm(run.trace.gradients[k]))};
    if (rr.spec.trace_v) {
      for (std::size_t i = 0; i < dim; ++i) row.push_back(fmt_double(run.trace.accums[k][i]));
    }
    trace.rows.push_back(std::move(row));
  }
  write_csv(writer.path("trace.csv"), trace);

  CsvTable bounds;
  bounds.header = {"name", "constants", "T",         "regret",
                   "bound", "slack",    "satisfied", "assumption_flags"};
  for (const BoundReport& report : run.bounds) {
    for (const BoundCheckpoint& c : report.checkpoints) {
      bounds.rows.push_back({report.name, report.constants, fmt_int(c.T), fmt_double(c.regret),
                             fmt_double(c.bound), fmt_double(c.slack), c.satisfied ? "1" : "0",
                             detail::join_flags(report.flags)});
    }
  }
  write_csv(writer.path("bounds.csv"), bounds);

  CsvTable relsub;
  relsub.header = {"index", "rounds", "objective", "log10_relative_suboptimality", "clamped"};
  for (const RelsubRow& row : run.relsub) {
    relsub.rows.push_back({fmt_int(row.index), fmt_int(row.rounds_done),
                           fmt_double(row.objective), fmt_double(row.value),
                           row.clamped ? "1" : "0"});
  }
  write_csv(writer.path("relsub.csv"), relsub);

  std::map<std::string, std::string> manifest = to_config_keyvals(rr.spec);
  manifest["observed_G_inf"] = fmt_double(run.observed_g);
  manifest["observed_D_inf"] = fmt_double(run.observed_d);
  manifest["constants_D_source"] = run.constants_d_source;
  manifest["constants_G_source"] = run.constants_g_source;
  manifest["hindsight_closed_form"] = run.solution.report.closed_form ? "1" : "0";
  manifest["hindsight_iterations"] = fmt_int(run.solution.report.iterations);
  manifest["hindsight_residual"] = fmt_double(run.solution.report.residual);
  manifest["hindsight_cumulative_value"] = fmt_double(run.solution.cumulative_value);
  manifest["hindsight_mean_value"] = fmt_double(run.solution.mean_value);
  manifest["result_p_star_batch"] = fmt_double(run.p_star_batch);
  manifest["result_final_regret"] = fmt_double(run.regret.back().regret);
  manifest["result_relsub_status"] = run.relsub_status;
  manifest["result_batches_per_epoch"] = fmt_int(rr.batches_per_epoch);
  if (!run.bounds.empty()) {
    bool all = true;
    for (const BoundReport& b : run.bounds) all = all && b.all_satisfied();
    manifest["result_bounds_all_satisfied"] = all ? "1" : "0";
  } else {
    manifest["result_bounds_all_satisfied"] = "na";
  }
  write_manifest(writer.path("manifest.txt"), manifest);
  writer.commit();
}

// ---------------------------------------------------------------------------
// Grid sweep: every (algorithm, alpha) cell on one shared problem stream.

struct GridCell {
  std::string algorithm;
  double alpha = 0.0;
  std::size_t alpha_index = 0;
  std::string status = "ok";  // ok | diverged | error
  std::string message;
  std::string run_dir;
  double final_regret = std::numeric_limits<double>::quiet_NaN();
  double final_objective = std::numeric_limits<double>::quiet_NaN();
  std::int64_t diverged_round = 0;
  bool best_regret = false;
  bool best_objective = false;
};

struct GridResult {
  std::vector<GridCell> cells;
  std::string summary_path;
};

inline void validate_grid_lists(const RunSpec& spec) {
  if (spec.grid_alphas.empty()) throw Error("grid: need at least one alpha");
  if (spec.grid_algorithms.empty()) throw Error("grid: need at least one algorithm");
  for (const std::string& name : spec.grid_algorithms) algorithm_from_string(name);
  for (double alpha : spec.grid_alphas) {
    if (!(alpha > 0.0)) throw Error("grid: alphas must be > 0");
  }
}

// Runs every (algorithm, alpha) cell on one shared problem stream. The
// adversary is oblivious to the optimizer, so the hindsight solution is
// cell-independent and solved exactly once.
inline GridResult run_grid_resolved(ResolvedRun base) {
  namespace fs = std::filesystem;
  validate_grid_lists(base.spec);
  if (fs::exists(fs::path(base.spec.out) / "summary.csv") ||
      fs::exists(fs::path(base.spec.out) / "manifest.txt"))
    throw Error("output directory '" + base.spec.out +
                "' already holds a grid; refusing to overwrite");
  HindsightSolution shared = hindsight_optimum(*base.problem, base.set, base.rounds);

  const std::size_t n_cells = base.spec.grid_algorithms.size() * base.spec.grid_alphas.size();
  std::vector<GridCell> cells(n_cells);
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= n_cells) return;
      const std::size_t ai = idx / base.spec.grid_alphas.size();
      const std::size_t aj = idx % base.spec.grid_alphas.size();
      GridCell& cell = cells[idx];
      cell.algorithm = base.spec.grid_algorithms[ai];
      cell.alpha = base.spec.grid_alphas[aj];
      cell.alpha_index = aj;
      const std::string dir =
          (fs::path(base.spec.out) / cell.algorithm / ("alpha" + str(aj))).string();
      try {
        ResolvedRun rr = base;
        rr.spec.optimizer = cell.algorithm;
        rr.spec.alpha = cell.alpha;
        rr.spec.out = dir;
        rr.config.algorithm = algorithm_from_string(cell.algorithm);
        rr.config.alpha = cell.alpha;
        validate(rr.config);
        rr.spec.stepsize = to_string(resolved_stepsize_mode(rr.config));
        ExecutedRun run = execute_run(std::move(rr), &shared);
        write_run_artifacts(dir, run);
        cell.run_dir = dir;
        cell.final_regret = run.regret.back().regret;
        cell.final_objective =
            run.resolved.problem->batch_objective(run.trace.final_iterate, run.trace.rounds);
      } catch (const NonFiniteError& e) {
        cell.status = "diverged";
        cell.diverged_round = e.round;
        cell.message = detail::sanitize_cell(e.what());
      } catch (const std::exception& e) {
        cell.status = "error";
        cell.message = detail::sanitize_cell(e.what());
      }
    }
  };
  const std::size_t n_workers =
      std::min<std::size_t>(static_cast<std::size_t>(base.spec.workers), n_cells);
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }

  // Per-algorithm best alpha by final regret and by final objective.
  for (std::size_t ai = 0; ai < base.spec.grid_algorithms.size(); ++ai) {
    std::size_t best_r = n_cells, best_o = n_cells;
    for (std::size_t aj = 0; aj < base.spec.grid_alphas.size(); ++aj) {
      const std::size_t idx = ai * base.spec.grid_alphas.size() + aj;
      if (cells[idx].status != "ok") continue;
      if (std::isfinite(cells[idx].final_regret) &&
          (best_r == n_cells || cells[idx].final_regret < cells[best_r].final_regret))
        best_r = idx;
      if (std::isfinite(cells[idx].final_objective) &&
          (best_o == n_cells || cells[idx].final_objective < cells[best_o].final_objective))
        best_o = idx;
    }
    if (best_r < n_cells) cells[best_r].best_regret = true;
    if (best_o < n_cells) cells[best_o].best_objective = true;
  }

  detail::ArtifactWriter writer(base.spec.out);
  CsvTable summary;
  summary.header = {"algorithm",     "alpha",          "alpha_index", "status",
                    "final_regret",  "final_objective", "diverged_round", "best_regret",
                    "best_objective", "run_dir",        "message"};
  for (const GridCell& cell : cells) {
    summary.rows.push_back(
        {cell.algorithm, fmt_double(cell.alpha), fmt_int(static_cast<long long>(cell.alpha_index)),
         cell.status, cell.status == "ok" ? fmt_double(cell.final_regret) : "",
         cell.status == "ok" ? fmt_double(cell.final_objective) : "",
         cell.status == "diverged" ? fmt_int(cell.diverged_round) : "",
         cell.status == "ok" ? (cell.best_regret ? "1" : "0") : "",
         cell.status == "ok" ? (cell.best_objective ? "1" : "0") : "", cell.run_dir,
         cell.message});
  }
  GridResult result;
  result.summary_path = writer.path("summary.csv");
  write_csv(result.summary_path, summary);
  std::map<std::string, std::string> manifest = to_config_keyvals(base.spec);
  manifest["result_cells"] = fmt_int(static_cast<long long>(n_cells));
  write_manifest(writer.path("manifest.txt"), manifest);
  writer.commit();
  result.cells = std::move(cells);
  return result;
}

inline GridResult run_grid(const RunSpec& base_spec,
                           std::optional<std::uint64_t> env_seed = std::nullopt) {
  validate_grid_lists(base_spec);
  return run_grid_resolved(resolve_run(base_spec, env_seed));
}

// ---------------------------------------------------------------------------
// Plot-data consolidation: one tidy CSV across several finished run dirs.

struct PlotdataSpec {
  std::vector<std::string> run_dirs;
  std::string metric = "regret";  // regret | relsub
  std::string out = "plotdata.csv";
};

inline CsvTable build_plotdata(const PlotdataSpec& spec) {
  namespace fs = std::filesystem;
  if (spec.run_dirs.empty()) throw Error("plotdata: need at least one run directory");
  if (spec.metric != "regret" && spec.metric != "relsub")
    throw Error("plotdata: metric must be regret or relsub");
  CsvTable out;
  out.header = {"run_id", "algorithm", "x", "y"};
  for (const std::string& dir : spec.run_dirs) {
    const std::string manifest_path = (fs::path(dir) / "manifest.txt").string();
    if (!fs::exists(manifest_path))
      throw Error("plotdata: '" + dir + "' has no manifest.txt (not a run directory)");
    std::map<std::string, std::string> manifest = read_manifest(manifest_path);
    auto need = [&](const std::string& key) -> std::string {
      auto it = manifest.find(key);
      if (it == manifest.end())
        throw Error("plotdata: manifest in '" + dir + "' lacks key '" + key + "'");
      return it->second;
    };
    const std::string run_id = detail::sanitize_cell(dir);
    const std::string algorithm = detail::sanitize_cell(need("optimizer"));
    if (spec.metric == "regret") {
      const double total = static_cast<double>(detail::parse_i64("T", need("T")));
      CsvTable trace = read_csv((fs::path(dir) / "trace.csv").string());
      const std::size_t tc = trace.column("t");
      const std::size_t rc = trace.column("cumulative_regret");
      for (const auto& row : trace.rows) {
        double t = detail::parse_f64("t", row[tc]);
        out.rows.push_back({run_id, algorithm, fmt_double(t / total), row[rc]});
      }
    } else {
      if (need("result_relsub_status") != "written")
        throw Error("plotdata: run '" + dir + "' has no relative-suboptimality series (status " +
                    manifest["result_relsub_status"] + ")");
      CsvTable relsub = read_csv((fs::path(dir) / "relsub.csv").string());
      const std::size_t xc = relsub.column("index");
      const std::size_t yc = relsub.column("log10_relative_suboptimality");
      for (const auto& row : relsub.rows) out.rows.push_back({run_id, algorithm, row[xc], row[yc]});
    }
  }
  return out;
}

inline void run_plotdata(const PlotdataSpec& spec) {
  CsvTable table = build_plotdata(spec);
  write_csv(spec.out, table);
}

}  // namespace oco

#endif  // OCO_EXPERIMENT_HPP
