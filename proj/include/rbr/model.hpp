#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "rbr/dataio.hpp"
#include "rbr/features.hpp"
#include "rbr/solver.hpp"

namespace rbr {

inline constexpr std::string_view kModelFormatVersion = "rbr/1";

/// Default lambda grid searched when the caller does not fix lambda.
std::vector<double> default_lambda_grid();

struct TrainConfig {
  std::size_t k = 10000;
  /// One value fixes lambda; several values are searched by inner CV.
  std::vector<double> lambdas = default_lambda_grid();
  std::uint64_t seed = 42;
  LbfgsConfig lbfgs;
  /// OpenMP threads; 0 leaves the runtime default (all cores).
  std::size_t threads = 0;
  /// Folds of the inner cross-validation that picks lambda from a grid.
  std::size_t inner_folds = 5;
  /// Optional per-iteration callback for the final fit.
  IterationObserver observer;
};

void validate(const TrainConfig& config);

struct RbrModel {
  std::string format_version{kModelFormatVersion};
  Task task = Task::kRegression;
  StandardizerParams standardizer;
  FeatureBank bank;
  std::vector<double> beta;
  double lambda = 0.0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  /// Predictor names in the order the model expects them; may be empty.
  std::vector<std::string> column_names;

  std::size_t m() const noexcept { return bank.m; }

  bool operator==(const RbrModel&) const = default;
};

/// Throws ModelError if the model's fields are mutually inconsistent.
void validate(const RbrModel& model);

struct Predictions {
  /// Regression: predicted value. Classification: probability of class 1.
  std::vector<double> values;
  /// Classification only: 1 when the probability is >= 0.5.
  std::vector<int> labels;
};

RbrModel train(const Dataset& data, const TrainConfig& config);
Predictions predict(const RbrModel& model, const Matrix& x);

/// Fits one lambda on an existing bit matrix, starting from beta0 (zeros when empty).
SolveReport fit_coefficients(const BitMatrix& f, std::span<const double> y, Task task,
                             double lambda, const LbfgsConfig& lbfgs,
                             std::vector<double> beta0 = {}, const IterationObserver& observer = {});

/// Picks the lambda with the lowest mean held-out loss (squared error or log
/// loss) over an inner k-fold split of the rows of f. Ties go to the larger lambda.
double select_lambda(const BitMatrix& f, std::span<const double> y, Task task,
                     const TrainConfig& config);

struct EvalMetrics {
  /// "rmse" or "error_pct".
  std::string metric_name;
  std::vector<double> per_fold;
  double mean = 0.0;
  /// Tuned parameter per fold: lambda for RBR, neighbour count for KNN.
  std::vector<double> fold_params;
  double seconds = 0.0;
  /// Largest feature matrix built during the run.
  std::size_t feature_bytes = 0;
};

double rmse(std::span<const double> truth, std::span<const double> predicted);
double error_percent(std::span<const double> truth, std::span<const int> labels);

/// Called after each outer fold with (fold index, fold count, metric, tuned parameter).
using FoldObserver = std::function<void(std::size_t, std::size_t, double, double)>;

/// Outer k-fold evaluation. Every fold fits its own standardizer, bank,
/// lambda and coefficients on the training rows only.
EvalMetrics cross_validate(const Dataset& data, const TrainConfig& config, std::size_t folds = 10,
                           const FoldObserver& on_fold = {});

/// Text model container, format "rbr/1".
void write_model(const RbrModel& model, std::ostream& out);
RbrModel read_model(std::istream& in);
void save_model(const RbrModel& model, const std::filesystem::path& path);
RbrModel load_model(const std::filesystem::path& path);

}  // namespace rbr
