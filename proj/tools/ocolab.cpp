// ocolab: online convex optimization laboratory.
//
// Subcommands:
//   run       one experiment -> trace.csv, bounds.csv, relsub.csv, manifest.txt
//   grid      (algorithm x alpha) sweep on a shared stream -> summary.csv
//   verify    property battery (reductions, lemma inequalities, bound
//             certificates, projections, gradients, determinism)
//   plotdata  consolidate finished runs into one tidy CSV
//
// Exit codes: 0 success, 1 execution/verification failure, 2 usage error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oco/experiment.hpp"
#include "oco/verify.hpp"

namespace {

// Every value-carrying flag lives here; presence (count > 0) decides whether
// it overrides the config file, which overrides OCO_LAB_SEED, which
// overrides the built-in defaults.
struct SharedFlags {
  std::string config;
  std::string problem, dataset, optimizer, stepsize, set, out;
  std::string checkpoints, grid_alphas, grid_algorithms;
  std::int64_t dim = 0, label_col = 0, blobs_m = 0, blobs_k = 0, hidden = 0;
  std::int64_t batch_size = 0, epochs = 0, rounds = 0, snapshot_stride = 0, workers = 0;
  double curvature_lo = 0, curvature_hi = 0, center_lo = 0, center_hi = 0;
  double blobs_sep = 0, lambda = 0, alpha = 0, gamma = 0, xi1 = 0, xi2 = 0, delta = 0;
  double d_inf = 0, g_inf = 0;
  std::uint64_t seed = 0;
  bool trace_v = false;
};

void add_shared_flags(CLI::App* cmd, SharedFlags& f) {
  cmd->add_option("--config", f.config, "flat key=value config file (flags take precedence)");
  cmd->add_option("--problem", f.problem, "quadratic | softmax | mlp");
  cmd->add_option("--dim", f.dim, "quadratic dimension / synthetic feature dimension");
  cmd->add_option("--curvature-lo", f.curvature_lo, "quadratic curvature range low end");
  cmd->add_option("--curvature-hi", f.curvature_hi, "quadratic curvature range high end");
  cmd->add_option("--center-lo", f.center_lo, "quadratic center range low end");
  cmd->add_option("--center-hi", f.center_hi, "quadratic center range high end");
  cmd->add_option("--dataset", f.dataset, "CSV dataset path (default: synthetic blobs)");
  cmd->add_option("--label-col", f.label_col, "label column index (negative counts from end)");
  cmd->add_option("--blobs-m", f.blobs_m, "synthetic blobs: sample count");
  cmd->add_option("--blobs-k", f.blobs_k, "synthetic blobs: class count");
  cmd->add_option("--blobs-sep", f.blobs_sep, "synthetic blobs: class separation");
  cmd->add_option("--lambda", f.lambda, "softmax L2 regularization strength");
  cmd->add_option("--hidden", f.hidden, "mlp hidden width");
  cmd->add_option("--batch-size", f.batch_size, "minibatch size for dataset problems");
  cmd->add_option("--epochs", f.epochs, "dataset passes (alternative to --T)");
  cmd->add_option("--T", f.rounds, "number of online rounds");
  cmd->add_option("--seed", f.seed, "run seed (default: OCO_LAB_SEED, then 42)");
  cmd->add_option("--optimizer", f.optimizer,
                  "sgd | adagrad | sc-adagrad | rmsprop-ours | sc-rmsprop | adam | "
                  "rmsprop-classic");
  cmd->add_option("--alpha", f.alpha, "stepsize scale");
  cmd->add_option("--gamma", f.gamma, "exponential-average window parameter");
  cmd->add_option("--xi1", f.xi1, "damping decay rate");
  cmd->add_option("--xi2", f.xi2, "damping scale");
  cmd->add_option("--delta", f.delta, "static damping");
  cmd->add_option("--stepsize", f.stepsize, "constant | inv_sqrt_t | inv_t");
  cmd->add_option("--set", f.set, "unconstrained | box:lo:hi | ball:r");
  cmd->add_option("--checkpoints", f.checkpoints,
                  "comma-separated regret checkpoints (default: powers of 10 plus T)");
  cmd->add_option("--D-inf", f.d_inf, "known feasible-set sup-norm diameter");
  cmd->add_option("--G-inf", f.g_inf, "known gradient sup-norm bound");
  cmd->add_flag("--trace-v", f.trace_v, "add per-coordinate second-moment columns to trace.csv");
  cmd->add_option("--snapshot-stride", f.snapshot_stride, "iterate snapshot thinning stride");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--workers", f.workers, "concurrent grid cells");
  cmd->add_option("--grid-alphas", f.grid_alphas, "comma-separated stepsize grid");
  cmd->add_option("--grid-algorithms", f.grid_algorithms, "comma-separated algorithm grid");
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("OCO_LAB_SEED");
  if (!raw) return std::nullopt;
  return oco::detail::parse_u64("OCO_LAB_SEED", raw);
}

oco::RunSpec build_spec(const CLI::App* cmd, const SharedFlags& f) {
  oco::RunSpec spec;
  if (cmd->count("--config")) oco::apply_keyvals(spec, oco::parse_config_file(f.config));
  auto has = [cmd](const char* name) { return cmd->count(name) > 0; };
  if (has("--problem")) spec.problem = f.problem;
  if (has("--dim")) spec.dim = f.dim;
  if (has("--curvature-lo")) spec.curvature_lo = f.curvature_lo;
  if (has("--curvature-hi")) spec.curvature_hi = f.curvature_hi;
  if (has("--center-lo")) spec.center_lo = f.center_lo;
  if (has("--center-hi")) spec.center_hi = f.center_hi;
  if (has("--dataset")) spec.dataset = f.dataset;
  if (has("--label-col")) spec.label_col = f.label_col;
  if (has("--blobs-m")) spec.blobs_m = f.blobs_m;
  if (has("--blobs-k")) spec.blobs_k = f.blobs_k;
  if (has("--blobs-sep")) spec.blobs_sep = f.blobs_sep;
  if (has("--lambda")) spec.lambda = f.lambda;
  if (has("--hidden")) spec.hidden = f.hidden;
  if (has("--batch-size")) spec.batch_size = f.batch_size;
  if (has("--epochs")) spec.epochs = f.epochs;
  if (has("--T")) spec.rounds = f.rounds;
  if (has("--seed")) spec.seed = f.seed;
  if (has("--optimizer")) spec.optimizer = f.optimizer;
  if (has("--alpha")) spec.alpha = f.alpha;
  if (has("--gamma")) spec.gamma = f.gamma;
  if (has("--xi1")) spec.xi1 = f.xi1;
  if (has("--xi2")) spec.xi2 = f.xi2;
  if (has("--delta")) spec.delta = f.delta;
  if (has("--stepsize")) spec.stepsize = f.stepsize;
  if (has("--set")) spec.set = f.set;
  if (has("--checkpoints"))
    spec.checkpoints = oco::detail::parse_i64_list("checkpoints", f.checkpoints);
  if (has("--D-inf")) spec.d_inf = f.d_inf;
  if (has("--G-inf")) spec.g_inf = f.g_inf;
  if (has("--trace-v")) spec.trace_v = f.trace_v;
  if (has("--snapshot-stride")) spec.snapshot_stride = f.snapshot_stride;
  if (has("--out")) spec.out = f.out;
  if (has("--workers")) spec.workers = f.workers;
  if (has("--grid-alphas"))
    spec.grid_alphas = oco::detail::parse_f64_list("grid_alphas", f.grid_alphas);
  if (has("--grid-algorithms"))
    spec.grid_algorithms = oco::detail::split_list(f.grid_algorithms);
  return spec;
}

int usage_error(const std::string& message) {
  std::cerr << "usage error: " << message << "\n";
  return 2;
}

int run_error(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return 1;
}

int cmd_run(const CLI::App* cmd, const SharedFlags& flags) {
  oco::ResolvedRun resolved;
  try {
    resolved = oco::resolve_run(build_spec(cmd, flags), env_seed());
  } catch (const std::exception& e) {
    return usage_error(e.what());
  }
  try {
    oco::ExecutedRun run = oco::execute_run(std::move(resolved));
    oco::write_run_artifacts(run.resolved.spec.out, run);
    std::cout << "run complete: " << run.resolved.spec.out << "\n"
              << "  optimizer " << run.resolved.spec.optimizer << ", T " << run.trace.rounds
              << ", seed " << *run.resolved.spec.seed << "\n"
              << "  final regret " << oco::fmt_double(run.regret.back().regret) << "\n";
    for (const oco::BoundReport& report : run.bounds) {
      std::cout << "  bound " << report.name << " [" << report.constants << "]: "
                << (report.all_satisfied() ? "satisfied" : "VIOLATED")
                << " at all " << report.checkpoints.size() << " checkpoints";
      if (!report.flags.empty()) {
        std::cout << " (flags:";
        for (const std::string& flag : report.flags) std::cout << ' ' << flag;
        std::cout << ")";
      }
      std::cout << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    return run_error(e.what());
  }
}

int cmd_grid(const CLI::App* cmd, const SharedFlags& flags) {
  oco::ResolvedRun resolved;
  try {
    oco::RunSpec spec = build_spec(cmd, flags);
    oco::validate_grid_lists(spec);
    resolved = oco::resolve_run(spec, env_seed());
  } catch (const std::exception& e) {
    return usage_error(e.what());
  }
  try {
    oco::GridResult result = oco::run_grid_resolved(std::move(resolved));
    std::size_t ok = 0, diverged = 0, failed = 0;
    for (const oco::GridCell& cell : result.cells) {
      if (cell.status == "ok") ++ok;
      else if (cell.status == "diverged") ++diverged;
      else ++failed;
    }
    std::cout << "grid complete: " << result.summary_path << "\n  " << result.cells.size()
              << " cells (" << ok << " ok, " << diverged << " diverged, " << failed
              << " failed)\n";
    for (const oco::GridCell& cell : result.cells) {
      if (cell.best_regret)
        std::cout << "  best regret for " << cell.algorithm << ": alpha "
                  << oco::fmt_double(cell.alpha) << " -> "
                  << oco::fmt_double(cell.final_regret) << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    return run_error(e.what());
  }
}

int cmd_verify(const oco::VerifyOptions& options) {
  std::vector<oco::CheckResult> results;
  try {
    results = oco::run_verification(options);
  } catch (const std::exception& e) {
    return run_error(e.what());
  }
  bool all = true;
  for (const oco::CheckResult& r : results) {
    std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
    all = all && r.passed;
  }
  std::cout << (all ? "verification passed" : "verification FAILED") << " (" << results.size()
            << " checks)\n";
  return all ? 0 : 1;
}

int cmd_plotdata(const oco::PlotdataSpec& spec) {
  try {
    oco::run_plotdata(spec);
    std::cout << "plotdata written: " << spec.out << " (" << spec.run_dirs.size()
              << " runs, metric " << spec.metric << ")\n";
    return 0;
  } catch (const std::exception& e) {
    return run_error(e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online convex optimization laboratory"};
  app.require_subcommand(1);

  SharedFlags run_flags, grid_flags;
  CLI::App* run_cmd = app.add_subcommand("run", "execute one experiment and write artifacts");
  add_shared_flags(run_cmd, run_flags);
  CLI::App* grid_cmd =
      app.add_subcommand("grid", "sweep (algorithm, alpha) cells on one shared stream");
  add_shared_flags(grid_cmd, grid_flags);

  oco::VerifyOptions verify_options;
  CLI::App* verify_cmd = app.add_subcommand("verify", "run the property battery");
  verify_cmd->add_option("--only", verify_options.only, "run a single named check");
  verify_cmd->add_option("--trials", verify_options.trials,
                         "randomized streams per configuration");
  verify_cmd->add_option("--seed", verify_options.seed, "battery seed");

  oco::PlotdataSpec plot_spec;
  CLI::App* plot_cmd =
      app.add_subcommand("plotdata", "consolidate finished runs into one tidy CSV");
  plot_cmd->add_option("dirs", plot_spec.run_dirs, "run directories")->required();
  plot_cmd->add_option("--metric", plot_spec.metric, "regret | relsub");
  plot_cmd->add_option("--out", plot_spec.out, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  if (run_cmd->parsed()) return cmd_run(run_cmd, run_flags);
  if (grid_cmd->parsed()) return cmd_grid(grid_cmd, grid_flags);
  if (verify_cmd->parsed()) {
    if (verify_options.trials < 1) return usage_error("--trials must be >= 1");
    if (!verify_options.only.empty()) {
      const auto names = oco::verification_check_names();
      if (std::find(names.begin(), names.end(), verify_options.only) == names.end())
        return usage_error("unknown check '" + verify_options.only + "'");
    }
    return cmd_verify(verify_options);
  }
  if (plot_cmd->parsed()) {
    if (plot_spec.metric != "regret" && plot_spec.metric != "relsub")
      return usage_error("metric must be regret or relsub");
    return cmd_plotdata(plot_spec);
  }
  return 2;
}
