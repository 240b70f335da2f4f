// Regret machinery: trace recording, hindsight optima (checked against an
// independent in-test descent), regret replay, growth fits, and every bound
// and inequality evaluator pinned to hand-computed examples on synthetic
// gradient streams built without the production walkers.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "oco/bounds.hpp"
#include "oco/problems.hpp"
#include "oco/rng.hpp"
#include "oco/trace.hpp"

using oco::Algorithm;
using oco::BoundConstants;
using oco::BoundReport;
using oco::FeasibleSet;
using oco::OptimizerConfig;
using oco::QuadraticStream;
using oco::RegretPoint;
using oco::RunTrace;
using oco::Vec;

namespace {

bool has_flag(const std::vector<std::string>& flags, const std::string& name) {
  for (const auto& f : flags)
    if (f == name) return true;
  return false;
}

// Builds a fully populated snapshot-per-round trace from a gradient stream,
// with all iterates pinned at a constant point. Statistics are filled by the
// plain recursions (not the production optimizer).
RunTrace synthetic_trace(Algorithm alg, const std::vector<Vec>& grads, const Vec& theta,
                         double alpha, double gamma, double xi1, double xi2, double delta) {
  RunTrace tr;
  tr.config.algorithm = alg;
  tr.config.alpha = alpha;
  tr.config.gamma = gamma;
  tr.config.xi1 = xi1;
  tr.config.xi2 = xi2;
  tr.config.delta = delta;
  tr.rounds = static_cast<std::int64_t>(grads.size());
  tr.snapshot_stride = 1;
  tr.gradients = grads;
  tr.final_iterate = theta;
  const std::size_t d = theta.size();
  Vec stat(d, 0.0);
  for (std::size_t t = 0; t < grads.size(); ++t) {
    double tt = static_cast<double>(t + 1);
    tr.losses.push_back(0.0);
    tr.snapshot_rounds.push_back(static_cast<std::int64_t>(t + 1));
    tr.iterates.push_back(theta);
    for (std::size_t i = 0; i < d; ++i) {
      double g2 = grads[t][i] * grads[t][i];
      if (alg == Algorithm::adagrad || alg == Algorithm::sc_adagrad)
        stat[i] += g2;
      else
        stat[i] = (1.0 - gamma / tt) * stat[i] + (gamma / tt) * g2;
    }
    tr.accums.push_back(stat);
    if (alg == Algorithm::sc_adagrad) {
      Vec damp(d);
      for (std::size_t i = 0; i < d; ++i) damp[i] = xi2 * std::exp(-xi1 * stat[i]);
      tr.dampings.push_back(damp);
    } else if (alg == Algorithm::sc_rmsprop) {
      Vec damp(d);
      for (std::size_t i = 0; i < d; ++i) damp[i] = xi2 * std::exp(-xi1 * tt * stat[i]);
      tr.dampings.push_back(damp);
    }
    for (double g : grads[t])
      tr.observed_grad_inf = std::max(tr.observed_grad_inf, std::abs(g));
  }
  return tr;
}

std::vector<Vec> ones_stream(std::size_t rounds) {
  return std::vector<Vec>(rounds, Vec(1, 1.0));
}

std::vector<RegretPoint> zero_regret(const std::vector<std::int64_t>& ts) {
  std::vector<RegretPoint> out;
  for (auto t : ts) out.push_back({t, 0.0});
  return out;
}

// A loss stream that turns non-finite at a chosen round.
class PoisonProblem : public oco::OnlineProblem {
 public:
  PoisonProblem(std::int64_t bad_round, bool poison_grad)
      : bad_round_(bad_round), poison_grad_(poison_grad) {}
  std::string name() const override { return "poison"; }
  std::size_t dim() const override { return 1; }
  std::int64_t rounds() const override { return 100; }
  std::pair<double, Vec> loss_grad(const Vec& point, std::int64_t round) const override {
    if (round == bad_round_) {
      if (poison_grad_) return {0.0, Vec{std::numeric_limits<double>::quiet_NaN()}};
      return {std::numeric_limits<double>::infinity(), Vec{0.0}};
    }
    return {0.5 * point[0] * point[0], Vec{point[0]}};
  }

 private:
  std::int64_t bad_round_;
  bool poison_grad_;
};

}  // namespace

TEST_CASE("run_online records exactly what the optimizer did") {
  QuadraticStream prob({1.0, 2.0}, 40, -1.0, 1.0, 13);
  OptimizerConfig cfg;
  cfg.algorithm = Algorithm::sc_adagrad;
  cfg.alpha = 1.0;
  FeasibleSet box = FeasibleSet::box({-1.0, -1.0}, {1.0, 1.0});
  RunTrace tr = oco::run_online(prob, cfg, box, 40);

  REQUIRE(tr.rounds == 40);
  REQUIRE(tr.losses.size() == 40);
  REQUIRE(tr.gradients.size() == 40);
  REQUIRE(tr.iterates.size() == 40);
  REQUIRE(tr.accums.size() == 40);
  REQUIRE(tr.dampings.size() == 40);
  CHECK(tr.snapshot_rounds.front() == 1);
  CHECK(tr.snapshot_rounds.back() == 40);

  // Independent replay with the optimizer primitives: identical records.
  oco::OptimizerState state = oco::init_state(cfg, box, Vec(2, 0.0));
  double ginf = 0.0;
  for (std::int64_t t = 1; t <= 40; ++t) {
    auto [loss, grad] = prob.loss_grad(state.iterate, t);
    CHECK(tr.losses[static_cast<std::size_t>(t - 1)] == loss);
    CHECK(tr.gradients[static_cast<std::size_t>(t - 1)] == grad);
    CHECK(tr.iterates[static_cast<std::size_t>(t - 1)] == state.iterate);
    ginf = std::max(ginf, oco::inf_norm(grad));
    oco::step(state, grad, box, cfg);
    CHECK(tr.accums[static_cast<std::size_t>(t - 1)] == state.accum);
    CHECK(tr.dampings[static_cast<std::size_t>(t - 1)] == state.damping);
  }
  CHECK(tr.final_iterate == state.iterate);
  CHECK(tr.observed_grad_inf == ginf);
}

TEST_CASE("snapshot thinning keeps the first, stride hits, and final round") {
  QuadraticStream prob({1.0}, 10, -1.0, 1.0, 1);
  OptimizerConfig cfg;
  RunTrace tr = oco::run_online(prob, cfg, FeasibleSet::unconstrained(), 10, {3});
  CHECK(tr.snapshot_rounds == std::vector<std::int64_t>{1, 4, 7, 10});
  CHECK(tr.iterates.size() == 4);
  CHECK(tr.losses.size() == 10);     // per-round data is never thinned
  CHECK(tr.gradients.size() == 10);

  CHECK_THROWS_AS(oco::run_online(prob, cfg, FeasibleSet::unconstrained(), 0), oco::Error);
  CHECK_THROWS_AS(oco::run_online(prob, cfg, FeasibleSet::unconstrained(), 11), oco::Error);
  CHECK_THROWS_AS(oco::run_online(prob, cfg, FeasibleSet::unconstrained(), 10, {0}), oco::Error);
}

TEST_CASE("non-finite losses and gradients abort with the offending round") {
  OptimizerConfig cfg;
  try {
    oco::run_online(PoisonProblem(3, false), cfg, FeasibleSet::unconstrained(), 10);
    FAIL("expected NonFiniteError");
  } catch (const oco::NonFiniteError& e) {
    CHECK(e.round == 3);
  }
  try {
    oco::run_online(PoisonProblem(2, true), cfg, FeasibleSet::unconstrained(), 10);
    FAIL("expected NonFiniteError");
  } catch (const oco::NonFiniteError& e) {
    CHECK(e.round == 2);
  }
}

TEST_CASE("hindsight optimum uses the closed form when offered") {
  QuadraticStream prob({2.0, 0.5}, 25, -1.0, 1.0, 3);
  FeasibleSet box = FeasibleSet::box({-0.2, -0.2}, {0.2, 0.2});
  oco::HindsightSolution sol = oco::hindsight_optimum(prob, box, 25);
  CHECK(sol.report.closed_form);
  CHECK(sol.report.iterations == 0);
  CHECK(sol.report.residual <= 1e-9);
  CHECK(sol.mean_value == Catch::Approx(sol.cumulative_value / 25.0).epsilon(1e-15));

  // The numeric solver lands on the same point.
  oco::HindsightSolution num = oco::hindsight_numeric(prob, box, 25);
  CHECK_FALSE(num.report.closed_form);
  CHECK(std::abs(num.theta_star[0] - sol.theta_star[0]) <= 1e-7);
  CHECK(std::abs(num.theta_star[1] - sol.theta_star[1]) <= 1e-7);
  CHECK(num.mean_value <= sol.mean_value + 1e-10);

  CHECK_THROWS_AS(oco::hindsight_optimum(prob, box, 0), oco::Error);
  CHECK_THROWS_AS(oco::hindsight_optimum(prob, box, 26), oco::Error);
}

TEST_CASE("numeric hindsight matches an independent fixed-step descent") {
  oco::Dataset ds = oco::synthetic_gaussian_blobs(5, 24, 2, 2, 2.0);
  auto batches = oco::minibatch_stream(ds.size(), 6, 1, 4);
  auto prob = std::make_shared<oco::SoftmaxRegressionProblem>(ds, 0.1, batches);
  const std::int64_t upto = prob->rounds();
  FeasibleSet all = FeasibleSet::unconstrained();

  oco::HindsightSolution sol = oco::hindsight_numeric(*prob, all, upto);
  CHECK(sol.report.residual <= 1e-10);
  CHECK(sol.report.iterations > 0);

  // Plain gradient descent on the mean objective with a conservative fixed
  // step; strong convexity (lambda = 0.1) forces both to the same optimum.
  Vec x(prob->dim(), 0.0);
  for (int it = 0; it < 30000; ++it) {
    Vec g(prob->dim(), 0.0);
    for (std::int64_t t = 1; t <= upto; ++t) {
      Vec gt = prob->loss_grad(x, t).second;
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += gt[i] / static_cast<double>(upto);
    }
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= 0.05 * g[i];
  }
  double mean_at_x = 0.0;
  for (std::int64_t t = 1; t <= upto; ++t) mean_at_x += prob->loss(x, t) / static_cast<double>(upto);

  CHECK(sol.mean_value <= mean_at_x + 1e-9);              // never worse
  CHECK(std::abs(sol.mean_value - mean_at_x) <= 1e-7);    // and essentially equal
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(sol.theta_star[i] - x[i]) <= 1e-4);
}

TEST_CASE("hindsight solver reports failure through SolverError") {
  QuadraticStream prob({1.0}, 10, -1.0, 1.0, 8);
  try {
    oco::hindsight_numeric(prob, FeasibleSet::unconstrained(), 10, 1e-300, 3);
    FAIL("expected SolverError");
  } catch (const oco::SolverError& e) {
    CHECK(e.residual >= 0.0);
  }
}

TEST_CASE("regret replay equals an independent recomputation") {
  QuadraticStream prob({1.0, 3.0}, 150, -1.0, 1.0, 77);
  OptimizerConfig cfg;
  cfg.algorithm = Algorithm::adagrad;
  cfg.alpha = 0.5;
  FeasibleSet box = FeasibleSet::box({-1.0, -1.0}, {1.0, 1.0});
  RunTrace tr = oco::run_online(prob, cfg, box, 150);
  oco::HindsightSolution sol = oco::hindsight_optimum(prob, box, 150);
  std::vector<std::int64_t> cps = {10, 50, 100, 150};
  auto regret = oco::compute_regret(tr, sol, prob, cps);
  REQUIRE(regret.size() == 4);

  // Brute force from the recorded iterates, not the recorded losses.
  double cum = 0.0;
  std::size_t next = 0;
  for (std::int64_t t = 1; t <= 150; ++t) {
    cum += prob.loss(tr.iterates[static_cast<std::size_t>(t - 1)], t) -
           prob.loss(sol.theta_star, t);
    if (t == cps[next]) {
      CHECK(regret[next].T == t);
      CHECK(regret[next].regret ==
            Catch::Approx(cum).margin(1e-12 * std::max(1.0, std::abs(cum))));
      ++next;
    }
  }

  CHECK_THROWS_AS(oco::compute_regret(tr, sol, prob, {}), oco::Error);
  CHECK_THROWS_AS(oco::compute_regret(tr, sol, prob, {10, 10}), oco::Error);
  CHECK_THROWS_AS(oco::compute_regret(tr, sol, prob, {50, 10}), oco::Error);
  CHECK_THROWS_AS(oco::compute_regret(tr, sol, prob, {0}), oco::Error);
  CHECK_THROWS_AS(oco::compute_regret(tr, sol, prob, {151}), oco::Error);
}

TEST_CASE("default checkpoints are decades plus the horizon") {
  CHECK(oco::default_checkpoints(1000) == std::vector<std::int64_t>{10, 100, 1000});
  CHECK(oco::default_checkpoints(12) == std::vector<std::int64_t>{10, 12});
  CHECK(oco::default_checkpoints(10) == std::vector<std::int64_t>{10});
  CHECK(oco::default_checkpoints(7) == std::vector<std::int64_t>{7});
  CHECK(oco::default_checkpoints(1) == std::vector<std::int64_t>{1});
}

TEST_CASE("observed distance tracks the worst recorded iterate") {
  RunTrace tr;
  tr.iterates = {{0.0, 0.0}, {0.5, -2.0}, {1.0, 1.0}};
  CHECK(oco::observed_distance_inf(tr, {0.0, 0.0}) == 2.0);
  CHECK(oco::observed_distance_inf(tr, {1.0, 1.0}) == 3.0);
}

TEST_CASE("relative suboptimality produces exact decades and clamps below the floor") {
  auto out = oco::relative_suboptimality({4.0, 2.2, 2.0 + 2e-7, 1.9}, 2.0);
  CHECK(out.log10_gap[0] == Catch::Approx(0.0).margin(1e-12));
  CHECK(out.log10_gap[1] == Catch::Approx(-1.0).margin(1e-12));
  CHECK(out.log10_gap[2] == Catch::Approx(-7.0).margin(1e-9));
  CHECK(out.log10_gap[3] == -16.0);
  CHECK_FALSE(out.clamped[0]);
  CHECK_FALSE(out.clamped[2]);
  CHECK(out.clamped[3]);
  CHECK_THROWS_AS(oco::relative_suboptimality({1.0}, 0.0), oco::Error);
  CHECK_THROWS_AS(oco::relative_suboptimality({1.0}, -2.0), oco::Error);
}

TEST_CASE("growth fits recover planted coefficients exactly") {
  std::vector<RegretPoint> logpts, sqrtpts;
  for (std::int64_t t : {10, 100, 1000, 10000, 100000}) {
    logpts.push_back({t, 3.0 + 2.0 * std::log(static_cast<double>(t))});
    sqrtpts.push_back({t, 1.0 + 0.5 * std::sqrt(static_cast<double>(t))});
  }
  oco::GrowthFit lf = oco::fit_growth(logpts, oco::GrowthModel::log_t);
  CHECK(lf.slope == Catch::Approx(2.0).epsilon(1e-12));
  CHECK(lf.intercept == Catch::Approx(3.0).epsilon(1e-10));
  CHECK(lf.r2 == Catch::Approx(1.0).margin(1e-12));

  oco::GrowthFit sf = oco::fit_growth(sqrtpts, oco::GrowthModel::sqrt_t);
  CHECK(sf.slope == Catch::Approx(0.5).epsilon(1e-12));
  CHECK(sf.intercept == Catch::Approx(1.0).epsilon(1e-9));
  CHECK(sf.r2 == Catch::Approx(1.0).margin(1e-12));

  // Cross-model discrimination: the wrong abscissa fits visibly worse.
  oco::GrowthFit wrong = oco::fit_growth(sqrtpts, oco::GrowthModel::log_t);
  CHECK(wrong.r2 < 0.9);
  CHECK(oco::fit_growth(logpts, oco::GrowthModel::sqrt_t).r2 < sf.r2);

  CHECK_THROWS_AS(oco::fit_growth({{1, 0.0}, {2, 1.0}, {3, 2.0}}, oco::GrowthModel::log_t),
                  oco::Error);  // too few
  std::vector<RegretPoint> bad = logpts;
  bad[2].T = bad[1].T;
  CHECK_THROWS_AS(oco::fit_growth(bad, oco::GrowthModel::log_t), oco::Error);
  std::vector<RegretPoint> flat = {{1, 5.0}, {2, 5.0}, {3, 5.0}, {4, 5.0}};
  CHECK_THROWS_AS(oco::fit_growth(flat, oco::GrowthModel::log_t), oco::Error);
}

TEST_CASE("cumulative square-root certificate on a unit gradient stream") {
  // d=1, g_t = 1, alpha = 1, D = 2 known: bound = (D^2/2 + 1) sqrt(T) = 3 sqrt(T).
  RunTrace tr = synthetic_trace(Algorithm::adagrad, ones_stream(16), {0.0}, 1.0, 0.9, 0.1,
                                1.0, 1e-8);
  BoundConstants known;
  known.D_inf = 2.0;
  known.G_inf = 1.0;
  known.label = "known";
  BoundReport rep =
      oco::bound_adagrad(tr, {0.0}, zero_regret({1, 4, 9, 16}), known);
  REQUIRE(rep.checkpoints.size() == 4);
  CHECK(rep.name == "adagrad");
  CHECK(rep.constants == "known");
  CHECK(rep.checkpoints[0].bound == Catch::Approx(3.0).epsilon(1e-14));
  CHECK(rep.checkpoints[1].bound == Catch::Approx(6.0).epsilon(1e-14));
  CHECK(rep.checkpoints[2].bound == Catch::Approx(9.0).epsilon(1e-14));
  CHECK(rep.checkpoints[3].bound == Catch::Approx(12.0).epsilon(1e-14));
  for (const auto& c : rep.checkpoints) {
    CHECK(c.satisfied);
    CHECK(c.slack == Catch::Approx(c.bound).epsilon(1e-14));
  }

  // Observed constants: iterates sit on theta_star, so D_obs = 0 and the
  // bound collapses to alpha * sqrt(T).
  BoundConstants observed;  // label defaults to "observed"
  BoundReport obs = oco::bound_adagrad(tr, {0.0}, zero_regret({16}), observed);
  CHECK(obs.checkpoints[0].bound == Catch::Approx(4.0).epsilon(1e-14));

  // A regret value above the bound is reported unsatisfied.
  BoundReport fail = oco::bound_adagrad(tr, {0.0}, {{16, 13.0}}, known);
  CHECK_FALSE(fail.checkpoints[0].satisfied);
  CHECK(fail.checkpoints[0].slack == Catch::Approx(-1.0).epsilon(1e-12));
  CHECK_FALSE(fail.all_satisfied());

  // Wrong-algorithm traces are rejected.
  CHECK_THROWS_AS(oco::bound_rmsprop(tr, {0.0}, zero_regret({4}), known), oco::Error);
}

TEST_CASE("strongly convex cumulative certificate: constant damping hand value") {
  // d=1, g_t = 1, xi1 = 0, xi2 = 1, alpha = 2, D = 2:
  // bound(T) = D^2 d xi2/(2 alpha) + (alpha/2) log((T + xi2)/xi2) = 1 + log(T+1).
  RunTrace tr = synthetic_trace(Algorithm::sc_adagrad, ones_stream(9), {0.0}, 2.0, 0.9, 0.0,
                                1.0, 1e-8);
  BoundConstants known;
  known.D_inf = 2.0;
  known.G_inf = 1.0;
  known.mu = Vec{1.0};  // alpha = 2 >= G^2/(2 mu) = 0.5: condition satisfied
  known.label = "known";
  auto reports = oco::bound_sc_adagrad(tr, {0.0}, zero_regret({1, 4, 9}), known);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].name == "sc-adagrad-general");
  CHECK(reports[1].name == "sc-adagrad-constant");

  CHECK(reports[1].checkpoints[0].bound == Catch::Approx(1.0 + std::log(2.0)).epsilon(1e-13));
  CHECK(reports[1].checkpoints[1].bound == Catch::Approx(1.0 + std::log(5.0)).epsilon(1e-13));
  CHECK(reports[1].checkpoints[2].bound == Catch::Approx(1.0 + std::log(10.0)).epsilon(1e-13));

  // With zero damping decay the general form degenerates to the constant one.
  for (std::size_t k = 0; k < 3; ++k)
    CHECK(reports[0].checkpoints[k].bound ==
          Catch::Approx(reports[1].checkpoints[k].bound).epsilon(1e-13));

  // Sufficient alpha: no condition flags on either report.
  CHECK(reports[0].flags.empty());
  CHECK(reports[1].flags.empty());
}

TEST_CASE("strongly convex cumulative certificate: decaying damping hand value") {
  // d=1, g_t = 1, T = 2, xi1 = 1, xi2 = 2, alpha = 1, D = 2, G = 1; iterates
  // pinned at theta*. All four terms computed literally below.
  RunTrace tr = synthetic_trace(Algorithm::sc_adagrad, ones_stream(2), {0.0}, 1.0, 0.9, 1.0,
                                2.0, 1e-8);
  BoundConstants known;
  known.D_inf = 2.0;
  known.G_inf = 1.0;
  known.mu = Vec{1.0};
  known.label = "known";
  auto reports = oco::bound_sc_adagrad(tr, {0.0}, zero_regret({2}), known);
  REQUIRE(reports.size() == 2);
  CHECK(reports[1].name == "sc-adagrad-corollary");

  const double d1 = 2.0 * std::exp(-1.0);  // damping after round 1
  const double d2 = 2.0 * std::exp(-2.0);  // damping after round 2
  {
    // General form: D^2 d1/(2a) + (a/2) log((2 + d2)/d1) + (1/2) min_bracket (d2 - d1),
    // where min_bracket = min_t (0 - a/(cum_t + damp_t)).
    double bracket = std::min(-1.0 / (1.0 + d1), -1.0 / (2.0 + d2));
    double expected = 4.0 * d1 / 2.0 + 0.5 * std::log((2.0 + d2) / d1) +
                      0.5 * bracket * (d2 - d1);
    CHECK(reports[0].checkpoints[0].bound == Catch::Approx(expected).epsilon(1e-13));
  }
  {
    // Closed form: d D^2 xi2/(2a) - (a/2)(log xi2 - xi1 G^2)
    //   + (a/2) sum log(cum + xi2 e^{-xi1 cum})
    //   + a xi1 xi2/(2(log(xi1 xi2) + 1)) sum (1 - e^{-xi1 cum}).
    double expected = 4.0 - 0.5 * (std::log(2.0) - 1.0) + 0.5 * std::log(2.0 + d2) +
                      2.0 / (2.0 * (std::log(2.0) + 1.0)) * (1.0 - std::exp(-2.0));
    CHECK(reports[1].checkpoints[0].bound == Catch::Approx(expected).epsilon(1e-13));
    CHECK_FALSE(has_flag(reports[1].flags, "corollary_min_formula_out_of_range"));
  }

  // xi1 * xi2 < 1 puts the closed form's minimum formula outside its domain.
  RunTrace tr2 = synthetic_trace(Algorithm::sc_adagrad, ones_stream(2), {0.0}, 1.0, 0.9, 0.1,
                                 1.0, 1e-8);
  auto reports2 = oco::bound_sc_adagrad(tr2, {0.0}, zero_regret({2}), known);
  CHECK(has_flag(reports2[1].flags, "corollary_min_formula_out_of_range"));
}

TEST_CASE("alpha condition flags on the strongly convex certificates") {
  RunTrace tr = synthetic_trace(Algorithm::sc_adagrad, ones_stream(4), {0.0}, 1.0, 0.9, 0.0,
                                1.0, 1e-8);
  // G = 2 known, mu = 0.5: threshold G^2/(2 mu) = 4 > alpha = 1.
  BoundConstants weak;
  weak.D_inf = 1.0;
  weak.G_inf = 2.0;
  weak.mu = Vec{0.5};
  auto reports = oco::bound_sc_adagrad(tr, {0.0}, zero_regret({4}), weak);
  CHECK(has_flag(reports[0].flags, "alpha_condition_violated"));
  CHECK(has_flag(reports[1].flags, "alpha_condition_violated"));

  // Unknown mu: the condition cannot be checked.
  BoundConstants nomu;
  nomu.D_inf = 1.0;
  nomu.G_inf = 2.0;
  auto reports2 = oco::bound_sc_adagrad(tr, {0.0}, zero_regret({4}), nomu);
  CHECK(has_flag(reports2[0].flags, "alpha_condition_unchecked_mu_unknown"));

  // Mixed-curvature mu: zero block is flagged; the positive block passes only
  // with a large enough alpha.
  BoundConstants mixed;
  mixed.D_inf = 1.0;
  mixed.G_inf = 2.0;
  mixed.mu = Vec{0.0};
  auto reports3 = oco::bound_sc_adagrad(tr, {0.0}, zero_regret({4}), mixed);
  CHECK(has_flag(reports3[0].flags, "mu_zero_on_some_coordinates"));

  // The exponential-average variant scales the threshold by (2 - gamma).
  RunTrace trr = synthetic_trace(Algorithm::sc_rmsprop, ones_stream(4), {0.0}, 5.0, 0.5, 0.0,
                                 1.0, 1e-8);
  BoundConstants edge;
  edge.D_inf = 1.0;
  edge.G_inf = 2.0;
  edge.mu = Vec{0.5};  // threshold (2 - 0.5) * 4 / 1 = 6 > alpha = 5
  BoundReport rep = oco::bound_sc_rmsprop(trr, {0.0}, zero_regret({4}), edge);
  CHECK(has_flag(rep.flags, "alpha_condition_violated"));

  RunTrace trr2 = synthetic_trace(Algorithm::sc_rmsprop, ones_stream(4), {0.0}, 7.0, 0.5, 0.0,
                                  1.0, 1e-8);
  BoundReport rep2 = oco::bound_sc_rmsprop(trr2, {0.0}, zero_regret({4}), edge);
  CHECK_FALSE(has_flag(rep2.flags, "alpha_condition_violated"));
}

TEST_CASE("exponential-average square-root certificate on a unit stream") {
  // gamma = 1 on unit gradients keeps v_t = 1 exactly, so t v_t = t and the
  // bound is (D^2/(2a) + a (2-gamma)/gamma)(sqrt(T) + delta) = 3 (sqrt(T) + 1e-8).
  RunTrace tr = synthetic_trace(Algorithm::rmsprop_ours, ones_stream(16), {0.0}, 1.0, 1.0,
                                0.1, 1.0, 1e-8);
  BoundConstants known;
  known.D_inf = 2.0;
  known.label = "known";
  BoundReport rep = oco::bound_rmsprop(tr, {0.0}, zero_regret({1, 4, 16}), known);
  CHECK(rep.checkpoints[0].bound == Catch::Approx(3.0 * (1.0 + 1e-8)).epsilon(1e-13));
  CHECK(rep.checkpoints[1].bound == Catch::Approx(3.0 * (2.0 + 1e-8)).epsilon(1e-13));
  CHECK(rep.checkpoints[2].bound == Catch::Approx(3.0 * (4.0 + 1e-8)).epsilon(1e-13));
  CHECK(rep.flags.empty());

  // gamma < 1 reweights the additive constant: (2 - 0.5)/0.5 = 3, so
  // (D^2/(2a) + 3a) multiplies the statistic.
  RunTrace tr2 = synthetic_trace(Algorithm::rmsprop_ours, ones_stream(4), {0.0}, 1.0, 0.5,
                                 0.1, 1.0, 1e-8);
  // v_t recursion with gamma = 0.5 on unit gradients: v_1 = 1/2, v_2 = 5/8, ...
  double v = 0.0;
  for (int t = 1; t <= 4; ++t) {
    double tt = t;
    v = (1.0 - 0.5 / tt) * v + (0.5 / tt) * 1.0;
  }
  BoundReport rep2 = oco::bound_rmsprop(tr2, {0.0}, zero_regret({4}), known);
  CHECK(rep2.checkpoints[0].bound ==
        Catch::Approx((2.0 + 3.0) * (std::sqrt(4.0 * v) + 1e-8)).epsilon(1e-13));
}

TEST_CASE("window-one drift between averaged and cumulative statistics is flagged") {
  // Corrupt the accumulator so t * v_T strays from the cumulative sum.
  RunTrace tr = synthetic_trace(Algorithm::rmsprop_ours, ones_stream(4), {0.0}, 1.0, 1.0, 0.1,
                                1.0, 1e-8);
  for (Vec& a : tr.accums) a[0] *= 1.5;
  BoundConstants known;
  known.D_inf = 2.0;
  BoundReport rep = oco::bound_rmsprop(tr, {0.0}, zero_regret({4}), known);
  CHECK(has_flag(rep.flags, "gamma_one_cumulative_mismatch"));
}

TEST_CASE("checkpoints off a thinned snapshot grid are flagged") {
  RunTrace tr = synthetic_trace(Algorithm::rmsprop_ours, ones_stream(5), {0.0}, 1.0, 0.9, 0.1,
                                1.0, 1e-8);
  // Thin by hand to snapshots {1, 3, 5}.
  tr.snapshot_stride = 2;
  tr.snapshot_rounds = {1, 3, 5};
  tr.iterates = {tr.iterates[0], tr.iterates[2], tr.iterates[4]};
  tr.accums = {tr.accums[0], tr.accums[2], tr.accums[4]};
  BoundConstants known;
  known.D_inf = 2.0;
  BoundReport rep = oco::bound_rmsprop(tr, {0.0}, {{4, 0.0}}, known);
  CHECK(has_flag(rep.flags, "checkpoint_off_snapshot_grid"));

  // Thinned strongly convex traces warn that inf-terms are approximate.
  RunTrace sc = synthetic_trace(Algorithm::sc_adagrad, ones_stream(6), {0.0}, 1.0, 0.9, 0.1,
                                1.0, 1e-8);
  sc.snapshot_stride = 2;
  sc.snapshot_rounds = {1, 3, 6};
  sc.iterates = {sc.iterates[0], sc.iterates[2], sc.iterates[5]};
  sc.accums = {sc.accums[0], sc.accums[2], sc.accums[5]};
  sc.dampings = {sc.dampings[0], sc.dampings[2], sc.dampings[5]};
  BoundConstants nomu;
  nomu.D_inf = 1.0;
  auto reports = oco::bound_sc_adagrad(sc, {0.0}, zero_regret({6}), nomu);
  CHECK(has_flag(reports[0].flags, "thinned_snapshots_inf_terms_approximate"));
}

TEST_CASE("damping above one on the exponential-average variant is flagged") {
  RunTrace tr = synthetic_trace(Algorithm::sc_rmsprop, ones_stream(4), {0.0}, 8.0, 0.9, 0.1,
                                2.0, 1e-8);
  BoundConstants c;
  c.D_inf = 1.0;
  BoundReport rep = oco::bound_sc_rmsprop(tr, {0.0}, zero_regret({4}), c);
  CHECK(has_flag(rep.flags, "damping_above_one_outside_theory"));

  RunTrace ok = synthetic_trace(Algorithm::sc_rmsprop, ones_stream(4), {0.0}, 8.0, 0.9, 0.1,
                                0.9, 1e-8);
  BoundReport rep2 = oco::bound_sc_rmsprop(ok, {0.0}, zero_regret({4}), c);
  CHECK_FALSE(has_flag(rep2.flags, "damping_above_one_outside_theory"));
}

TEST_CASE("window-one certificates agree across the averaged and cumulative forms") {
  // Real paired runs: identical trajectories at gamma = 1, so the two
  // strongly convex certificates must price the same data the same way.
  QuadraticStream prob({0.5, 1.0, 2.0, 1.5}, 200, -1.0, 1.0, 42);
  FeasibleSet box = FeasibleSet::box(Vec(4, -1.0), Vec(4, 1.0));
  oco::HindsightSolution sol = oco::hindsight_optimum(prob, box, 200);
  std::vector<std::int64_t> cps = {10, 100, 200};

  OptimizerConfig sc_avg;
  sc_avg.algorithm = Algorithm::sc_rmsprop;
  sc_avg.gamma = 1.0;
  sc_avg.alpha = 2.0;
  sc_avg.xi1 = 0.05;
  sc_avg.xi2 = 0.8;
  OptimizerConfig sc_cum = sc_avg;
  sc_cum.algorithm = Algorithm::sc_adagrad;

  RunTrace ta = oco::run_online(prob, sc_avg, box, 200);
  RunTrace tc = oco::run_online(prob, sc_cum, box, 200);
  auto ra = oco::compute_regret(ta, sol, prob, cps);
  auto rc = oco::compute_regret(tc, sol, prob, cps);
  for (std::size_t k = 0; k < cps.size(); ++k)
    CHECK(std::abs(ra[k].regret - rc[k].regret) <=
          1e-9 * std::max(1.0, std::abs(rc[k].regret)));

  BoundConstants c;
  c.D_inf = 2.0;
  c.G_inf = 4.0;
  BoundReport avg_rep = oco::bound_sc_rmsprop(ta, sol.theta_star, ra, c);
  auto cum_reps = oco::bound_sc_adagrad(tc, sol.theta_star, rc, c);
  for (std::size_t k = 0; k < cps.size(); ++k)
    CHECK(std::abs(avg_rep.checkpoints[k].bound - cum_reps[0].checkpoints[k].bound) <=
          1e-8 * std::max(1.0, std::abs(cum_reps[0].checkpoints[k].bound)));

  // Square-root family: same agreement up to the additive d * delta term.
  OptimizerConfig avg;
  avg.algorithm = Algorithm::rmsprop_ours;
  avg.gamma = 1.0;
  avg.alpha = 0.5;
  OptimizerConfig cum;
  cum.algorithm = Algorithm::adagrad;
  cum.alpha = 0.5;
  RunTrace ta2 = oco::run_online(prob, avg, box, 200);
  RunTrace tc2 = oco::run_online(prob, cum, box, 200);
  auto ra2 = oco::compute_regret(ta2, sol, prob, cps);
  auto rc2 = oco::compute_regret(tc2, sol, prob, cps);
  BoundReport r1 = oco::bound_rmsprop(ta2, sol.theta_star, ra2, c);
  BoundReport r2 = oco::bound_adagrad(tc2, sol.theta_star, rc2, c);
  CHECK_FALSE(has_flag(r1.flags, "gamma_one_cumulative_mismatch"));
  for (std::size_t k = 0; k < cps.size(); ++k)
    CHECK(std::abs(r1.checkpoints[k].bound - r2.checkpoints[k].bound) <=
          1e-6 * std::max(1.0, std::abs(r2.checkpoints[k].bound)));
}

TEST_CASE("missing damping history is rejected by the strongly convex certificates") {
  RunTrace tr = synthetic_trace(Algorithm::sc_adagrad, ones_stream(4), {0.0}, 1.0, 0.9, 0.1,
                                1.0, 1e-8);
  tr.dampings.clear();
  BoundConstants c;
  CHECK_THROWS_AS(oco::bound_sc_adagrad(tr, {0.0}, zero_regret({4}), c), oco::Error);
}

TEST_CASE("telescoping inequality, cumulative form: hand values") {
  // T=1, d=1, g=2, xi1=0, xi2=1: lhs = 4/5, rhs = log(5).
  oco::LemmaReport r = oco::check_lemma_sc({{2.0}}, 0.0, 1.0);
  CHECK(r.lhs == Catch::Approx(0.8).epsilon(1e-15));
  CHECK(r.rhs == Catch::Approx(std::log(5.0)).epsilon(1e-15));
  CHECK(r.holds);

  // T=2 with decay, computed literally: cum = {4, 8}, damp_t = e^{-cum_t}.
  double dm1 = std::exp(-4.0), dm2 = std::exp(-8.0);
  oco::LemmaReport r2 = oco::check_lemma_sc({{2.0}, {2.0}}, 1.0, 1.0);
  double lhs = 4.0 / (4.0 + dm1) + 4.0 / (8.0 + dm2);
  double rhs = std::log((8.0 + dm2) / dm1) - (dm2 - dm1) / (8.0 + dm2);
  CHECK(r2.lhs == Catch::Approx(lhs).epsilon(1e-14));
  CHECK(r2.rhs == Catch::Approx(rhs).epsilon(1e-14));
  CHECK(r2.holds);

  // Zero gradients: both sides collapse to zero, inequality holds with
  // equality.
  oco::LemmaReport rz = oco::check_lemma_sc({{0.0}, {0.0}}, 0.5, 1.0);
  CHECK(rz.lhs == 0.0);
  CHECK(rz.rhs == Catch::Approx(0.0).margin(1e-15));
  CHECK(rz.holds);

  CHECK_THROWS_AS(oco::check_lemma_sc({}, 0.1, 1.0), oco::Error);
  CHECK_THROWS_AS(oco::check_lemma_sc({{1.0}, {1.0, 2.0}}, 0.1, 1.0), oco::DimensionMismatch);
}

TEST_CASE("telescoping inequality, square-root form: hand values") {
  // T=1, gamma=0.9, delta=1, g=1: v = 0.9.
  oco::LemmaReport r = oco::check_lemma_rms({{1.0}}, 0.9, 1.0);
  double tail = std::sqrt(0.9) + 1.0;
  CHECK(r.lhs == Catch::Approx(0.5 / tail).epsilon(1e-14));  // aggregated, alpha=1
  CHECK(r.rhs == Catch::Approx((1.1 / 0.9) * tail).epsilon(1e-14));
  CHECK(r.worst_coordinate_slack.value() ==
        Catch::Approx((2.2 / 0.9) * tail - 1.0 / tail).epsilon(1e-13));
  CHECK(r.holds);

  CHECK_THROWS_AS(oco::check_lemma_rms({{1.0}}, 0.0, 1.0), oco::Error);
  CHECK_THROWS_AS(oco::check_lemma_rms({{1.0}}, 0.9, 0.0), oco::Error);
}

TEST_CASE("telescoping inequality, strongly convex square-root form: hand values") {
  // T=1, gamma=0.9, xi=(0,1), alpha=1, g=1: v=0.9, eps=1, stat=1.9.
  oco::LemmaReport r = oco::check_lemma_sc_rms({{1.0}}, 0.9, 0.0, 1.0, 1.0);
  CHECK(r.lhs == Catch::Approx(0.5 / 1.9).epsilon(1e-14));
  double rhs = (1.0 / 1.8) * (std::log(1.9) + 0.1 * 1.0 / 1.9);
  CHECK(r.rhs == Catch::Approx(rhs).epsilon(1e-14));
  CHECK(r.holds);
  CHECK(r.flags.empty());

  oco::LemmaReport big = oco::check_lemma_sc_rms({{1.0}}, 0.9, 0.0, 2.0, 1.0);
  CHECK(has_flag(big.flags, "xi2_above_one_outside_theory"));

  CHECK_THROWS_AS(oco::check_lemma_sc_rms({{1.0}}, 1.5, 0.0, 1.0, 1.0), oco::Error);
}

TEST_CASE("telescoping inequalities hold across random streams") {
  oco::Rng rng(60601);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t rounds = 5 + rng.next_u64() % 120;
    std::size_t d = 1 + rng.next_u64() % 4;
    std::vector<Vec> grads(rounds, Vec(d));
    for (auto& g : grads)
      for (double& x : g) x = 3.0 * rng.normal();
    double gamma = 0.4 + 0.6 * rng.uniform(0.0, 1.0);
    CHECK(oco::check_lemma_sc(grads, 0.3, 0.7).holds);
    CHECK(oco::check_lemma_rms(grads, gamma, 1e-4).holds);
    CHECK(oco::check_lemma_sc_rms(grads, gamma, 0.1, 1.0, 2.0).holds);
  }
}
