#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rbr/dataio.hpp"
#include "rbr/model.hpp"

namespace rbr {

enum class TargetTransform { kNone, kLog1p };

struct RbrMethodSettings {
  std::size_t k = 100000;
  std::vector<double> lambdas = default_lambda_grid();
  LbfgsConfig lbfgs;
};

struct KnnMethodSettings {
  std::vector<std::size_t> grid = {1, 3, 5, 7, 9};
};

struct BenchmarkSpec {
  std::string name;
  /// CSV path, or the literal "sine" for the simulated sine data.
  std::string source;
  Task task = Task::kRegression;
  std::string target;
  TargetTransform transform = TargetTransform::kNone;
  std::optional<RbrMethodSettings> rbr;
  std::optional<KnnMethodSettings> knn;
  /// Rows drawn when source is "sine".
  std::size_t sine_samples = 1000;
  /// Large datasets are skipped unless the run opts in.
  bool large = false;
};

struct BenchmarkPlan {
  std::vector<BenchmarkSpec> specs;
  std::size_t folds = 10;
  std::uint64_t seed = 42;
  std::size_t threads = 0;
  bool include_large = false;
};

/// Reads a JSON benchmark description. Relative dataset paths resolve against
/// the directory of the spec file.
BenchmarkPlan load_benchmark_plan(const std::filesystem::path& path);

struct BenchmarkCell {
  std::string dataset;
  std::string method;
  std::string metric_name;
  double metric_value = 0.0;
  double seconds = 0.0;
  std::size_t bytes = 0;
  bool ok = false;
  std::string error;
};

struct BenchmarkReport {
  std::vector<BenchmarkCell> cells;

  const BenchmarkCell* find(std::string_view dataset, std::string_view method) const;
};

/// Loads the dataset behind a spec, applying the target transform.
Dataset load_benchmark_dataset(const BenchmarkSpec& spec, std::uint64_t seed);

/// Runs every (dataset, method) cell in order. A failing cell is recorded with
/// its reason and does not stop the others. Progress goes to `log` if given.
BenchmarkReport run_benchmark(const BenchmarkPlan& plan, std::ostream* log = nullptr);

void print_report_table(const BenchmarkReport& report, std::ostream& out);
/// CSV rows: dataset,method,metric_name,metric_value,seconds,bytes (failed
/// cells carry "failed" as the metric name and the reason in a trailing column).
void write_report_csv(const BenchmarkReport& report, std::ostream& out);

struct SineFit {
  std::vector<double> x;
  std::vector<double> truth;
  std::vector<double> fitted;
  /// RMSE of the fit against the noisy test targets.
  double test_rmse = 0.0;
  /// Largest |fitted - sin(x)| over the test points.
  double max_abs_error = 0.0;
  double lambda = 0.0;
};

/// Trains on simulate_sine(n, n, config.seed, noise_sd) and evaluates on its
/// test half. Points are returned sorted by x.
SineFit fit_sine(std::size_t n, const TrainConfig& config, double noise_sd = 0.1);

/// fit_sine, then writes "x,sin_x,fitted" rows to out_path.
SineFit emit_sine_fit(std::size_t n, const TrainConfig& config, const std::filesystem::path& out_path,
                      double noise_sd = 0.1);

}  // namespace rbr
