#ifndef OCO_PROBLEMS_HPP
#define OCO_PROBLEMS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oco/common.hpp"
#include "oco/feasible_set.hpp"
#include "oco/rng.hpp"
#include "oco/vector.hpp"

namespace oco {

// A sequence of round objectives f_1..f_T revealed one per round. Round
// indices are 1-based. Implementations must be deterministic: the same
// (construction arguments, round, point) always produce the same values, and
// loss_grad must stay const so runs can replay rounds at other points.
class OnlineProblem {
 public:
  virtual ~OnlineProblem() = default;
  virtual std::string name() const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::int64_t rounds() const = 0;
  virtual std::pair<double, Vec> loss_grad(const Vec& point, std::int64_t round) const = 0;

  double loss(const Vec& point, std::int64_t round) const { return loss_grad(point, round).first; }

  // Componentwise strong-convexity moduli shared by every round objective,
  // when known (convention: f(y) >= f(x) + <grad, y-x> + sum_i mu_i (y-x)_i^2).
  virtual std::optional<Vec> strong_convexity() const { return std::nullopt; }

  // Worst-case sup-norm gradient bound over the given feasible set, when
  // derivable a priori.
  virtual std::optional<double> grad_inf_bound(const FeasibleSet&) const { return std::nullopt; }

  // Objective used for relative-suboptimality reporting. Default: average of
  // the first `upto` round objectives. Dataset problems override this with
  // the full-batch objective (equal to the average when minibatches tile the
  // dataset).
  virtual double batch_objective(const Vec& point, std::int64_t upto) const {
    check_round(upto);
    double s = 0.0;
    for (std::int64_t t = 1; t <= upto; ++t) s += loss(point, t);
    return s / static_cast<double>(upto);
  }

  // (theta_star, sum of the first `upto` round losses at theta_star) when a
  // closed form exists.
  virtual std::optional<std::pair<Vec, double>> hindsight_closed_form(
      const FeasibleSet&, std::int64_t) const {
    return std::nullopt;
  }

 protected:
  void check_round(std::int64_t round) const {
    if (round < 1 || round > rounds())
      throw Error(name() + ": round " + std::to_string(round) + " out of range [1, " +
                  std::to_string(rounds()) + "]");
  }
  void check_point(const Vec& point) const {
    if (point.size() != dim()) throw DimensionMismatch(name() + " point", point.size(), dim());
  }
};

// Per-round losses f_t(x) = 1/2 sum_i h_i (x_i - c_{t,i})^2 with a fixed
// positive curvature h and per-round centers drawn uniformly from
// [center_lo, center_hi]. Centers come from the counter-based generator so
// any round is replayable in O(d).
class QuadraticStream : public OnlineProblem {
 public:
  QuadraticStream(Vec curvature, std::int64_t total_rounds, double center_lo, double center_hi,
                  std::uint64_t seed)
      : curvature_(std::move(curvature)),
        total_rounds_(total_rounds),
        center_lo_(center_lo),
        center_hi_(center_hi),
        seed_(seed) {
    require_nonempty("QuadraticStream", curvature_);
    require_finite("QuadraticStream curvature", curvature_);
    for (double h : curvature_) {
      if (h <= 0.0) throw Error("QuadraticStream: curvature must be > 0");
    }
    if (total_rounds_ < 1) throw Error("QuadraticStream: need at least one round");
    if (!(center_lo_ < center_hi_)) throw Error("QuadraticStream: center box is empty");
  }

  std::string name() const override { return "quadratic"; }
  std::size_t dim() const override { return curvature_.size(); }
  std::int64_t rounds() const override { return total_rounds_; }
  const Vec& curvature() const { return curvature_; }

  Vec center(std::int64_t round) const {
    check_round(round);
    Vec c(dim());
    std::uint64_t base = static_cast<std::uint64_t>(round - 1) * dim();
    for (std::size_t i = 0; i < dim(); ++i)
      c[i] = uniform_at(seed_, base + i, center_lo_, center_hi_);
    return c;
  }

  std::pair<double, Vec> loss_grad(const Vec& point, std::int64_t round) const override {
    check_point(point);
    Vec c = center(round);
    double loss = 0.0;
    Vec grad(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
      double r = point[i] - c[i];
      loss += 0.5 * curvature_[i] * r * r;
      grad[i] = curvature_[i] * r;
    }
    return {loss, grad};
  }

  std::optional<Vec> strong_convexity() const override {
    // f(y) = f(x) + <grad, y-x> + 1/2 sum h_i (y-x)_i^2 exactly.
    return scale(0.5, curvature_);
  }

  std::optional<double> grad_inf_bound(const FeasibleSet& set) const override {
    Vec lo(dim()), hi(dim());
    if (const Box* b = set.as_box()) {
      lo = b->lower;
      hi = b->upper;
    } else if (const L2Ball* ball = set.as_ball()) {
      for (std::size_t i = 0; i < dim(); ++i) {
        lo[i] = ball->center[i] - ball->radius;
        hi[i] = ball->center[i] + ball->radius;
      }
    } else {
      return std::nullopt;
    }
    double g = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
      double gap = std::max({hi[i] - center_lo_, center_hi_ - lo[i], 0.0});
      g = std::max(g, curvature_[i] * gap);
    }
    return g;
  }

  std::optional<std::pair<Vec, double>> hindsight_closed_form(
      const FeasibleSet& set, std::int64_t upto) const override {
    check_round(upto);
    // Cumulative objective is upto/2 * sum_i h_i (x_i - cbar_i)^2 + const,
    // so the optimum is the center mean projected under metric diag(h).
    Vec mean(dim(), 0.0);
    for (std::int64_t t = 1; t <= upto; ++t) {
      Vec c = center(t);
      for (std::size_t i = 0; i < dim(); ++i) mean[i] += c[i];
    }
    for (std::size_t i = 0; i < dim(); ++i) mean[i] /= static_cast<double>(upto);
    Vec star = set.project(DiagonalMetric(curvature_), mean);
    double value = 0.0;
    for (std::int64_t t = 1; t <= upto; ++t) value += loss(star, t);
    return std::make_pair(star, value);
  }

 private:
  Vec curvature_;
  std::int64_t total_rounds_;
  double center_lo_;
  double center_hi_;
  std::uint64_t seed_;
};

struct Dataset {
  std::size_t feature_dim = 0;
  std::size_t num_classes = 0;
  std::vector<Vec> features;
  std::vector<int> labels;

  std::size_t size() const { return features.size(); }
};

// Validates creation invariants: consistent dims, finite features, labels
// exactly covering 0..K-1.
inline Dataset make_dataset(std::vector<Vec> features, std::vector<int> labels) {
  if (features.empty()) throw Error("Dataset: no samples");
  if (features.size() != labels.size())
    throw DimensionMismatch("Dataset rows vs labels", features.size(), labels.size());
  std::size_t d = features.front().size();
  if (d == 0) throw Error("Dataset: zero feature dimension");
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].size() != d)
      throw Error("Dataset: row " + std::to_string(i) + " has " +
                  std::to_string(features[i].size()) + " features, expected " + std::to_string(d));
    require_finite("Dataset row " + std::to_string(i), features[i]);
  }
  int max_label = *std::max_element(labels.begin(), labels.end());
  int min_label = *std::min_element(labels.begin(), labels.end());
  if (min_label < 0) throw Error("Dataset: negative label " + std::to_string(min_label));
  std::size_t k = static_cast<std::size_t>(max_label) + 1;
  std::vector<std::int64_t> counts(k, 0);
  for (int y : labels) counts[static_cast<std::size_t>(y)]++;
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0)
      throw Error("Dataset: label " + std::to_string(c) + " has no samples (labels must cover 0.." +
                  std::to_string(k - 1) + ")");
  }
  Dataset ds;
  ds.feature_dim = d;
  ds.num_classes = k;
  ds.features = std::move(features);
  ds.labels = std::move(labels);
  return ds;
}

namespace detail {

inline bool parse_double(const std::string& field, double& out) {
  const char* begin = field.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  if (end == begin) return false;
  while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
  return *end == '\0';
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

// Numeric CSV; label_column < 0 counts from the end (-1 = last column). A
// first row that fails to parse as numbers is treated as a header.
inline Dataset load_csv_dataset(const std::string& path, int label_column = -1) {
  std::ifstream in(path);
  if (!in) throw Error("load_csv_dataset: cannot open '" + path + "'");
  std::vector<Vec> features;
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  bool first_content_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> fields = detail::split_csv_line(line);
    if (first_content_row) {
      columns = fields.size();
      if (columns < 2)
        throw ParseError("load_csv_dataset: need at least two columns", line_no);
      bool numeric = true;
      double tmp;
      for (const std::string& f : fields) {
        if (!detail::parse_double(f, tmp)) {
          numeric = false;
          break;
        }
      }
      first_content_row = false;
      if (!numeric) continue;  // header row
    }
    if (fields.size() != columns)
      throw ParseError("load_csv_dataset: expected " + std::to_string(columns) +
                           " columns, got " + std::to_string(fields.size()),
                       line_no);
    std::size_t label_idx;
    if (label_column >= 0) {
      if (static_cast<std::size_t>(label_column) >= columns)
        throw Error("load_csv_dataset: label column " + std::to_string(label_column) +
                    " out of range for " + std::to_string(columns) + " columns");
      label_idx = static_cast<std::size_t>(label_column);
    } else {
      if (static_cast<std::size_t>(-label_column) > columns)
        throw Error("load_csv_dataset: label column " + std::to_string(label_column) +
                    " out of range for " + std::to_string(columns) + " columns");
      label_idx = columns - static_cast<std::size_t>(-label_column);
    }
    Vec row;
    row.reserve(columns - 1);
    int label = 0;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      double v;
      if (!detail::parse_double(fields[i], v))
        throw ParseError("load_csv_dataset: cannot parse '" + fields[i] + "'", line_no);
      if (i == label_idx) {
        double rounded = std::nearbyint(v);
        if (std::abs(v - rounded) > 1e-9)
          throw ParseError("load_csv_dataset: label '" + fields[i] + "' is not an integer",
                           line_no);
        label = static_cast<int>(rounded);
      } else {
        row.push_back(v);
      }
    }
    features.push_back(std::move(row));
    labels.push_back(label);
  }
  if (features.empty()) throw Error("load_csv_dataset: no data rows in '" + path + "'");
  return make_dataset(std::move(features), std::move(labels));
}

// Balanced K-class Gaussian mixture. Class means sit at (separation/sqrt(2))
// along distinct coordinate axes when K <= d (pairwise distance exactly
// `separation`), otherwise along seeded random unit directions. Unit-variance
// isotropic noise. Labels cycle 0,1,..,K-1 so class sizes differ by at most 1.
inline Dataset synthetic_gaussian_blobs(std::uint64_t seed, std::size_t m, std::size_t d,
                                        std::size_t k, double separation) {
  if (k < 2) throw Error("synthetic_gaussian_blobs: need at least two classes");
  if (m < k) throw Error("synthetic_gaussian_blobs: need at least one sample per class");
  if (d < 1) throw Error("synthetic_gaussian_blobs: need at least one feature");
  if (separation < 0.0) throw Error("synthetic_gaussian_blobs: separation must be >= 0");
  Rng rng(seed);
  std::vector<Vec> means(k, Vec(d, 0.0));
  double radius = separation / std::sqrt(2.0);
  if (k <= d) {
    for (std::size_t c = 0; c < k; ++c) means[c][c] = radius;
  } else {
    for (std::size_t c = 0; c < k; ++c) {
      Vec dir(d);
      for (std::size_t i = 0; i < d; ++i) dir[i] = rng.normal();
      double n = norm2(dir);
      for (std::size_t i = 0; i < d; ++i) means[c][i] = n > 0 ? radius * dir[i] / n : 0.0;
    }
  }
  std::vector<Vec> features(m, Vec(d));
  std::vector<int> labels(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t c = i % k;
    labels[i] = static_cast<int>(c);
    for (std::size_t j = 0; j < d; ++j) features[i][j] = means[c][j] + rng.normal();
  }
  return make_dataset(std::move(features), std::move(labels));
}

// Round-indexed minibatches: each epoch is an independent seeded shuffle cut
// into batches of `batch_size` (last batch ragged), so every sample appears
// exactly once per epoch.
inline std::vector<std::vector<std::int32_t>> minibatch_stream(std::size_t dataset_size,
                                                               std::size_t batch_size,
                                                               std::size_t epochs,
                                                               std::uint64_t seed) {
  if (dataset_size == 0) throw Error("minibatch_stream: empty dataset");
  if (batch_size < 1 || batch_size > dataset_size)
    throw Error("minibatch_stream: batch size must lie in [1, dataset size]");
  if (epochs < 1) throw Error("minibatch_stream: need at least one epoch");
  Rng rng(seed);
  std::vector<std::vector<std::int32_t>> batches;
  std::vector<std::int32_t> order(dataset_size);
  for (std::size_t i = 0; i < dataset_size; ++i) order[i] = static_cast<std::int32_t>(i);
  for (std::size_t e = 0; e < epochs; ++e) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < dataset_size; start += batch_size) {
      std::size_t stop = std::min(start + batch_size, dataset_size);
      batches.emplace_back(order.begin() + start, order.begin() + stop);
    }
  }
  return batches;
}

// Multiclass logistic regression with squared-norm weight regularization.
// Parameter layout: K weight rows of length d (row-major), then K biases.
// Round objective: minibatch-average cross entropy plus
// lambda * sum_k ||w_k||^2 (biases unregularized), which makes every round
// objective lambda-strongly convex per weight coordinate and merely convex in
// the biases.
class SoftmaxRegressionProblem : public OnlineProblem {
 public:
  SoftmaxRegressionProblem(Dataset dataset, double lambda,
                           std::vector<std::vector<std::int32_t>> batches)
      : dataset_(std::move(dataset)), lambda_(lambda), batches_(std::move(batches)) {
    if (lambda_ < 0.0 || !std::isfinite(lambda_))
      throw Error("SoftmaxRegressionProblem: lambda must be finite and >= 0");
    if (batches_.empty()) throw Error("SoftmaxRegressionProblem: no rounds");
    for (const auto& b : batches_) {
      if (b.empty()) throw Error("SoftmaxRegressionProblem: empty minibatch");
      for (std::int32_t idx : b) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= dataset_.size())
          throw Error("SoftmaxRegressionProblem: sample index out of range");
      }
    }
  }

  std::string name() const override { return "softmax"; }
  std::size_t dim() const override {
    return dataset_.num_classes * (dataset_.feature_dim + 1);
  }
  std::int64_t rounds() const override { return static_cast<std::int64_t>(batches_.size()); }
  const Dataset& dataset() const { return dataset_; }
  double lambda() const { return lambda_; }
  std::size_t weight_count() const { return dataset_.num_classes * dataset_.feature_dim; }

  std::pair<double, Vec> loss_grad(const Vec& point, std::int64_t round) const override {
    check_round(round);
    return loss_grad_batch(point, batches_[static_cast<std::size_t>(round - 1)]);
  }

  // Minibatch-average cross entropy (log-sum-exp stabilized by max
  // subtraction) plus the regularizer.
  std::pair<double, Vec> loss_grad_batch(const Vec& point,
                                         const std::vector<std::int32_t>& batch) const {
    check_point(point);
    if (batch.empty()) throw Error("softmax: empty minibatch");
    const std::size_t d = dataset_.feature_dim;
    const std::size_t k = dataset_.num_classes;
    double loss = 0.0;
    Vec grad(dim(), 0.0);
    Vec logits(k);
    for (std::int32_t idx : batch) {
      const Vec& x = dataset_.features[static_cast<std::size_t>(idx)];
      int y = dataset_.labels[static_cast<std::size_t>(idx)];
      for (std::size_t c = 0; c < k; ++c) {
        double z = point[weight_count() + c];
        const double* w = point.data() + c * d;
        for (std::size_t j = 0; j < d; ++j) z += w[j] * x[j];
        logits[c] = z;
      }
      double zmax = *std::max_element(logits.begin(), logits.end());
      double sum = 0.0;
      for (std::size_t c = 0; c < k; ++c) sum += std::exp(logits[c] - zmax);
      double lse = zmax + std::log(sum);
      loss += lse - logits[static_cast<std::size_t>(y)];
      for (std::size_t c = 0; c < k; ++c) {
        double p = std::exp(logits[c] - lse);
        double coef = p - (static_cast<int>(c) == y ? 1.0 : 0.0);
        double* gw = grad.data() + c * d;
        for (std::size_t j = 0; j < d; ++j) gw[j] += coef * x[j];
        grad[weight_count() + c] += coef;
      }
    }
    double inv = 1.0 / static_cast<double>(batch.size());
    loss *= inv;
    for (double& g : grad) g *= inv;
    if (lambda_ > 0.0) {
      for (std::size_t i = 0; i < weight_count(); ++i) {
        loss += lambda_ * point[i] * point[i];
        grad[i] += 2.0 * lambda_ * point[i];
      }
    }
    return {loss, grad};
  }

  std::optional<Vec> strong_convexity() const override {
    Vec mu(dim(), 0.0);
    for (std::size_t i = 0; i < weight_count(); ++i) mu[i] = lambda_;
    return mu;
  }

  double batch_objective(const Vec& point, std::int64_t) const override {
    std::vector<std::int32_t> all(dataset_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<std::int32_t>(i);
    return loss_grad_batch(point, all).first;
  }

 private:
  Dataset dataset_;
  double lambda_;
  std::vector<std::vector<std::int32_t>> batches_;
};

// One-hidden-layer ReLU network with softmax cross-entropy output; a
// non-convex smoke problem, so no strong-convexity or hindsight guarantees.
// Layout: W1 (hidden x d, row-major), b1, W2 (K x hidden, row-major), b2.
// ReLU subgradient at 0 is taken as 0.
class MlpProblem : public OnlineProblem {
 public:
  MlpProblem(Dataset dataset, std::size_t hidden,
             std::vector<std::vector<std::int32_t>> batches)
      : dataset_(std::move(dataset)), hidden_(hidden), batches_(std::move(batches)) {
    if (hidden_ < 1) throw Error("MlpProblem: need at least one hidden unit");
    if (batches_.empty()) throw Error("MlpProblem: no rounds");
  }

  std::string name() const override { return "mlp"; }
  std::size_t dim() const override {
    const std::size_t d = dataset_.feature_dim;
    const std::size_t k = dataset_.num_classes;
    return hidden_ * d + hidden_ + k * hidden_ + k;
  }
  std::int64_t rounds() const override { return static_cast<std::int64_t>(batches_.size()); }
  const Dataset& dataset() const { return dataset_; }
  std::size_t hidden() const { return hidden_; }

  std::pair<double, Vec> loss_grad(const Vec& point, std::int64_t round) const override {
    check_round(round);
    return loss_grad_batch(point, batches_[static_cast<std::size_t>(round - 1)]);
  }

  std::pair<double, Vec> loss_grad_batch(const Vec& point,
                                         const std::vector<std::int32_t>& batch) const {
    check_point(point);
    if (batch.empty()) throw Error("mlp: empty minibatch");
    const std::size_t d = dataset_.feature_dim;
    const std::size_t h = hidden_;
    const std::size_t k = dataset_.num_classes;
    const std::size_t w1 = 0, b1 = h * d, w2 = h * d + h, b2 = h * d + h + k * h;
    double loss = 0.0;
    Vec grad(dim(), 0.0);
    Vec pre(h), act(h), logits(k), dz2(k), dz1(h);
    for (std::int32_t idx : batch) {
      const Vec& x = dataset_.features[static_cast<std::size_t>(idx)];
      int y = dataset_.labels[static_cast<std::size_t>(idx)];
      for (std::size_t u = 0; u < h; ++u) {
        double z = point[b1 + u];
        const double* w = point.data() + w1 + u * d;
        for (std::size_t j = 0; j < d; ++j) z += w[j] * x[j];
        pre[u] = z;
        act[u] = z > 0.0 ? z : 0.0;
      }
      for (std::size_t c = 0; c < k; ++c) {
        double z = point[b2 + c];
        const double* w = point.data() + w2 + c * h;
        for (std::size_t u = 0; u < h; ++u) z += w[u] * act[u];
        logits[c] = z;
      }
      double zmax = *std::max_element(logits.begin(), logits.end());
      double sum = 0.0;
      for (std::size_t c = 0; c < k; ++c) sum += std::exp(logits[c] - zmax);
      double lse = zmax + std::log(sum);
      loss += lse - logits[static_cast<std::size_t>(y)];
      for (std::size_t c = 0; c < k; ++c)
        dz2[c] = std::exp(logits[c] - lse) - (static_cast<int>(c) == y ? 1.0 : 0.0);
      for (std::size_t u = 0; u < h; ++u) {
        double s = 0.0;
        for (std::size_t c = 0; c < k; ++c) s += point[w2 + c * h + u] * dz2[c];
        dz1[u] = pre[u] > 0.0 ? s : 0.0;
      }
      for (std::size_t c = 0; c < k; ++c) {
        double* gw = grad.data() + w2 + c * h;
        for (std::size_t u = 0; u < h; ++u) gw[u] += dz2[c] * act[u];
        grad[b2 + c] += dz2[c];
      }
      for (std::size_t u = 0; u < h; ++u) {
        double* gw = grad.data() + w1 + u * d;
        for (std::size_t j = 0; j < d; ++j) gw[j] += dz1[u] * x[j];
        grad[b1 + u] += dz1[u];
      }
    }
    double inv = 1.0 / static_cast<double>(batch.size());
    loss *= inv;
    for (double& g : grad) g *= inv;
    return {loss, grad};
  }

  double batch_objective(const Vec& point, std::int64_t) const override {
    std::vector<std::int32_t> all(dataset_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<std::int32_t>(i);
    return loss_grad_batch(point, all).first;
  }

 private:
  Dataset dataset_;
  std::size_t hidden_;
  std::vector<std::vector<std::int32_t>> batches_;
};

}  // namespace oco

#endif  // OCO_PROBLEMS_HPP
