#include "rbr/model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "rbr/error.hpp"
#include "rbr/kernels.hpp"
#include "rbr/parallel.hpp"

namespace rbr {

namespace {

// Inner-CV splits use a seed derived from the training seed so they do not
// line up with an outer split drawn from the same seed.
constexpr std::uint64_t kInnerSplitSalt = 0x696e6e6572ULL;

double heldout_loss(Task task, std::span<const double> scores, std::span<const double> y) {
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (task == Task::kRegression) {
      const double r = y[i] - scores[i];
      total += r * r;
    } else {
      total += softplus(scores[i]) - y[i] * scores[i];
    }
  }
  return total / static_cast<double>(y.size());
}

std::vector<double> gather(std::span<const double> v, std::span<const std::size_t> rows) {
  std::vector<double> out(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) out[r] = v[rows[r]];
  return out;
}

}  // namespace

std::vector<double> default_lambda_grid() { return {0.01, 0.1, 1.0, 10.0, 100.0}; }

void validate(const TrainConfig& config) {
  if (config.k < 2) throw ArgumentError("feature count k must be >= 2");
  if (config.lambdas.empty()) throw ArgumentError("at least one lambda is required");
  for (double l : config.lambdas) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw ArgumentError("lambda values must be finite and >= 0");
  }
  if (config.lambdas.size() > 1 && config.inner_folds < 2) {
    throw ArgumentError("lambda selection needs at least 2 inner folds");
  }
  validate(config.lbfgs);
}

void validate(const RbrModel& model) {
  if (model.format_version != kModelFormatVersion) {
    throw ModelError("unsupported model format '" + model.format_version + "'");
  }
  if (model.k < 1) throw ModelError("model k must be >= 1");
  if (model.beta.size() != model.k) throw ModelError("beta length does not match k");
  if (model.bank.specs.size() + 1 != model.k) throw ModelError("feature count does not match k");
  if (model.standardizer.means.size() != model.bank.m || model.standardizer.stds.size() != model.bank.m) {
    throw ModelError("standardizer width does not match feature bank width");
  }
  for (double sd : model.standardizer.stds) {
    if (!(sd > 0.0) || !std::isfinite(sd)) throw ModelError("standardizer std must be > 0");
  }
  for (double mean : model.standardizer.means) {
    if (!std::isfinite(mean)) throw ModelError("standardizer mean must be finite");
  }
  for (double b : model.beta) {
    if (!std::isfinite(b)) throw ModelError("beta must be finite");
  }
  if (!(model.lambda >= 0.0) || !std::isfinite(model.lambda)) throw ModelError("lambda must be >= 0");
  if (!model.column_names.empty() && model.column_names.size() != model.bank.m) {
    throw ModelError("column name count does not match model width");
  }
  validate(model.bank);
}

SolveReport fit_coefficients(const BitMatrix& f, std::span<const double> y, Task task,
                             double lambda, const LbfgsConfig& lbfgs, std::vector<double> beta0,
                             const IterationObserver& observer) {
  if (beta0.empty()) beta0.assign(f.cols(), 0.0);
  const Objective objective = task == Task::kRegression ? make_ridge_objective(f, y, lambda)
                                                        : make_logistic_objective(f, y, lambda);
  return lbfgs_minimize(objective, std::move(beta0), lbfgs, observer);
}

double select_lambda(const BitMatrix& f, std::span<const double> y, Task task,
                     const TrainConfig& config) {
  if (config.lambdas.size() == 1) return config.lambdas.front();
  const std::size_t n = f.rows();
  const std::size_t folds = std::min(config.inner_folds, n);
  const auto split = kfold_split(
      n, folds, config.seed ^ kInnerSplitSalt,
      task == Task::kClassification ? std::optional<std::span<const double>>(y) : std::nullopt);

  // Largest lambda first: each fit warm-starts the next, less regularized one.
  std::vector<double> grid = config.lambdas;
  std::ranges::sort(grid, std::greater<>());
  std::vector<double> total(grid.size(), 0.0);

  for (std::uint32_t fold = 0; fold < split.k; ++fold) {
    const auto train_rows = split.train_rows(fold);
    const auto test_rows = split.test_rows(fold);
    const BitMatrix f_train = f.select_rows(train_rows);
    const BitMatrix f_test = f.select_rows(test_rows);
    const auto y_train = gather(y, train_rows);
    const auto y_test = gather(y, test_rows);

    std::vector<double> beta;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      beta = fit_coefficients(f_train, y_train, task, grid[g], config.lbfgs, std::move(beta)).beta;
      total[g] += heldout_loss(task, score(f_test, beta), y_test);
    }
  }

  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (total[g] < total[best]) best = g;
  }
  return grid[best];
}

RbrModel train(const Dataset& data, const TrainConfig& config) {
  validate(data);
  validate(config);
  ThreadCountScope threads(config.threads);

  RbrModel model;
  model.task = data.task;
  model.k = config.k;
  model.seed = config.seed;
  model.column_names = data.column_names;
  if (model.column_names.size() != data.m()) model.column_names.clear();
  model.standardizer = standardize_fit(data.x);
  const Matrix x_std = standardize_apply(model.standardizer, data.x);
  auto [bank, bits] = generate_bank(x_std, config.k, config.seed);
  model.bank = std::move(bank);

  model.lambda = select_lambda(bits, data.y, data.task, config);
  model.beta =
      fit_coefficients(bits, data.y, data.task, model.lambda, config.lbfgs, {}, config.observer).beta;
  return model;
}

Predictions predict(const RbrModel& model, const Matrix& x) {
  if (x.cols() != model.m()) {
    std::ostringstream msg;
    msg << "model expects " << model.m() << " predictor columns, got " << x.cols();
    throw ArgumentError(msg.str());
  }
  const BitMatrix bits = apply_bank(model.bank, standardize_apply(model.standardizer, x));
  Predictions out;
  out.values = score(bits, model.beta);
  if (model.task == Task::kClassification) {
    out.labels.resize(out.values.size());
    for (std::size_t i = 0; i < out.values.size(); ++i) {
      out.values[i] = sigmoid(out.values[i]);
      out.labels[i] = out.values[i] >= 0.5 ? 1 : 0;
    }
  }
  return out;
}

double rmse(std::span<const double> truth, std::span<const double> predicted) {
  if (truth.size() != predicted.size() || truth.empty()) {
    throw ArgumentError("rmse: lengths must match and be non-zero");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double r = truth[i] - predicted[i];
    total += r * r;
  }
  return std::sqrt(total / static_cast<double>(truth.size()));
}

double error_percent(std::span<const double> truth, std::span<const int> labels) {
  if (truth.size() != labels.size() || truth.empty()) {
    throw ArgumentError("error_percent: lengths must match and be non-zero");
  }
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (static_cast<double>(labels[i]) != truth[i]) ++wrong;
  }
  return 100.0 * static_cast<double>(wrong) / static_cast<double>(truth.size());
}

EvalMetrics cross_validate(const Dataset& data, const TrainConfig& config, std::size_t folds,
                           const FoldObserver& on_fold) {
  validate(data);
  validate(config);
  if (folds < 2) throw ArgumentError("cross_validate needs at least 2 folds");
  ThreadCountScope threads(config.threads);
  const auto start = std::chrono::steady_clock::now();

  const auto split = kfold_split(
      data.n(), folds, config.seed,
      data.task == Task::kClassification ? std::optional<std::span<const double>>(data.y)
                                         : std::nullopt);
  EvalMetrics metrics;
  metrics.metric_name = data.task == Task::kRegression ? "rmse" : "error_pct";
  TrainConfig fold_config = config;
  fold_config.observer = {};
  for (std::uint32_t fold = 0; fold < split.k; ++fold) {
    const auto train_rows = split.train_rows(fold);
    const auto test_rows = split.test_rows(fold);
    const Dataset train_set = data.subset(train_rows);
    const Dataset test_set = data.subset(test_rows);

    const RbrModel model = train(train_set, fold_config);
    const Predictions pred = predict(model, test_set.x);
    metrics.per_fold.push_back(data.task == Task::kRegression
                                   ? rmse(test_set.y, pred.values)
                                   : error_percent(test_set.y, pred.labels));
    metrics.fold_params.push_back(model.lambda);
    if (on_fold) on_fold(fold, split.k, metrics.per_fold.back(), model.lambda);
    metrics.feature_bytes = std::max(metrics.feature_bytes,
                                     BitMatrix::words_for(train_set.n()) * sizeof(std::uint64_t) * config.k);
  }
  double sum = 0.0;
  for (double v : metrics.per_fold) sum += v;
  metrics.mean = sum / static_cast<double>(metrics.per_fold.size());
  metrics.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return metrics;
}

}  // namespace rbr
