#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rbr {

enum class Task { kRegression, kClassification };

std::string_view to_string(Task task);
/// Accepts "regression" / "classification"; throws ArgumentError otherwise.
Task parse_task(std::string_view text);

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<const double> values() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Dataset {
  Matrix x;
  std::vector<double> y;
  std::vector<std::string> column_names;
  Task task = Task::kRegression;

  std::size_t n() const noexcept { return x.rows(); }
  std::size_t m() const noexcept { return x.cols(); }

  /// Copy of the given rows, in the given order.
  Dataset subset(std::span<const std::size_t> rows) const;
};

/// Checks the Dataset invariants; throws DataError on violation.
void validate(const Dataset& data);

struct StandardizerParams {
  std::vector<double> means;
  std::vector<double> stds;

  bool operator==(const StandardizerParams&) const = default;
};

struct FoldAssignment {
  std::vector<std::uint32_t> fold_of;
  std::uint32_t k = 0;

  /// Row indices whose fold is (or is not) `fold`, ascending.
  std::vector<std::size_t> test_rows(std::uint32_t fold) const;
  std::vector<std::size_t> train_rows(std::uint32_t fold) const;
};

/// Reads a comma-separated file with a header row. The target column becomes
/// y and every other column becomes a predictor, in file order.
Dataset load_csv(const std::filesystem::path& path, std::string_view target_column, Task task);

/// Parses CSV text with a header; no target column is extracted.
Matrix load_csv_matrix(const std::filesystem::path& path, std::vector<std::string>* header);

/// Column means and sample standard deviations (n-1). Stds below 1e-12 become 1.
StandardizerParams standardize_fit(const Matrix& x);
Matrix standardize_apply(const StandardizerParams& params, const Matrix& x);

/// Shuffles rows with `seed`, then deals them round-robin into k folds. With
/// labels the dealing walks class 0 then class 1 so each fold also gets a
/// balanced share of every class.
FoldAssignment kfold_split(std::size_t n, std::size_t k, std::uint64_t seed,
                           std::optional<std::span<const double>> labels = std::nullopt);

/// y = sin(x) + N(0, noise_sd), x uniform on the open interval (-10pi, 10pi).
std::pair<Dataset, Dataset> simulate_sine(std::size_t n_train, std::size_t n_test,
                                          std::uint64_t seed, double noise_sd = 0.1);

}  // namespace rbr
