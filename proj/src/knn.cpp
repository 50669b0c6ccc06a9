#include "rbr/knn.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>
#include <sstream>

#include "rbr/error.hpp"

namespace rbr {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double t = a[j] - b[j];
    d += t * t;
  }
  return d;
}

double heldout_score(const Dataset& data, const Predictions& pred, std::span<const std::size_t> rows) {
  double total = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double truth = data.y[rows[r]];
    if (data.task == Task::kRegression) {
      const double e = truth - pred.values[r];
      total += e * e;
    } else {
      total += static_cast<double>(pred.labels[r]) != truth ? 1.0 : 0.0;
    }
  }
  return total;
}

}  // namespace

std::vector<std::size_t> nearest_rows(const Matrix& train_std, std::span<const double> query,
                                      std::size_t k_neighbors) {
  std::vector<std::pair<double, std::size_t>> dist(train_std.rows());
  for (std::size_t i = 0; i < train_std.rows(); ++i) {
    dist[i] = {squared_distance(train_std.row(i), query), i};
  }
  const auto middle = dist.begin() + static_cast<std::ptrdiff_t>(k_neighbors);
  std::partial_sort(dist.begin(), middle, dist.end());
  std::vector<std::size_t> out(k_neighbors);
  for (std::size_t t = 0; t < k_neighbors; ++t) out[t] = dist[t].second;
  return out;
}

Predictions knn_predict(const Dataset& train, const Matrix& test_x, std::size_t k_neighbors) {
  if (k_neighbors < 1) throw ArgumentError("knn: k must be >= 1");
  if (k_neighbors > train.n()) {
    std::ostringstream msg;
    msg << "knn: k = " << k_neighbors << " exceeds training size " << train.n();
    throw ArgumentError(msg.str());
  }
  if (test_x.cols() != train.m()) throw ArgumentError("knn: test column count does not match training");

  const StandardizerParams params = standardize_fit(train.x);
  const Matrix train_std = standardize_apply(params, train.x);
  const Matrix test_std = standardize_apply(params, test_x);

  Predictions out;
  out.values.resize(test_x.rows());
  if (train.task == Task::kClassification) out.labels.resize(test_x.rows());

#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t qq = 0; qq < static_cast<std::ptrdiff_t>(test_x.rows()); ++qq) {
    const auto q = static_cast<std::size_t>(qq);
    const auto neighbours = nearest_rows(train_std, test_std.row(q), k_neighbors);
    double sum = 0.0;
    for (auto i : neighbours) sum += train.y[i];
    if (train.task == Task::kRegression) {
      out.values[q] = sum / static_cast<double>(k_neighbors);
    } else {
      const double ones = sum;
      const double zeros = static_cast<double>(k_neighbors) - ones;
      out.values[q] = ones / static_cast<double>(k_neighbors);
      out.labels[q] = ones > zeros ? 1 : 0;
    }
  }
  return out;
}

EvalMetrics knn_cross_validate(const Dataset& data, std::span<const std::size_t> grid,
                               std::size_t folds, std::uint64_t seed) {
  validate(data);
  if (grid.empty()) throw ArgumentError("knn: neighbour grid is empty");
  const auto start = std::chrono::steady_clock::now();
  const bool stratify = data.task == Task::kClassification;
  const auto labels = stratify ? std::optional<std::span<const double>>(data.y) : std::nullopt;
  const auto split = kfold_split(data.n(), folds, seed, labels);

  EvalMetrics metrics;
  metrics.metric_name = data.task == Task::kRegression ? "rmse" : "error_pct";
  for (std::uint32_t fold = 0; fold < split.k; ++fold) {
    const Dataset train_set = data.subset(split.train_rows(fold));
    const Dataset test_set = data.subset(split.test_rows(fold));

    std::size_t best_k = 0;
    if (grid.size() == 1) {
      best_k = grid.front();
    } else {
      const std::size_t inner_folds = std::min<std::size_t>(5, train_set.n());
      const auto inner = kfold_split(
          train_set.n(), inner_folds, seed ^ 0x6b6e6eULL,
          stratify ? std::optional<std::span<const double>>(train_set.y) : std::nullopt);
      double best_score = std::numeric_limits<double>::infinity();
      for (std::size_t kn : grid) {
        double score = 0.0;
        bool feasible = true;
        for (std::uint32_t f = 0; f < inner.k && feasible; ++f) {
          const auto fit_rows = inner.train_rows(f);
          const auto held_rows = inner.test_rows(f);
          if (kn > fit_rows.size()) {
            feasible = false;
            break;
          }
          const Dataset fit_set = train_set.subset(fit_rows);
          const Matrix held_x = train_set.subset(held_rows).x;
          score += heldout_score(train_set, knn_predict(fit_set, held_x, kn), held_rows);
        }
        if (feasible && score < best_score) {
          best_score = score;
          best_k = kn;
        }
      }
      if (best_k == 0) throw ArgumentError("knn: no neighbour count in the grid fits the data");
    }

    const Predictions pred = knn_predict(train_set, test_set.x, best_k);
    metrics.per_fold.push_back(data.task == Task::kRegression
                                   ? rmse(test_set.y, pred.values)
                                   : error_percent(test_set.y, pred.labels));
    metrics.fold_params.push_back(static_cast<double>(best_k));
  }
  metrics.mean = std::accumulate(metrics.per_fold.begin(), metrics.per_fold.end(), 0.0) /
                 static_cast<double>(metrics.per_fold.size());
  metrics.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return metrics;
}

}  // namespace rbr
