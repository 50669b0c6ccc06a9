#include "rbr/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "rbr/error.hpp"
#include "rbr/random.hpp"

namespace rbr {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool blank(std::string_view line) { return trim(line).empty(); }

std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

RawTable read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path.string() + "'");

  RawTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!blank(line)) break;
  }
  if (blank(line)) throw DataError("'" + path.string() + "' has no header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  std::set<std::string> seen;
  for (auto field : split_fields(line)) {
    std::string name(field);
    if (name.empty()) throw DataError("empty column name in header of '" + path.string() + "'");
    if (!seen.insert(name).second) throw DataError("duplicate column name '" + name + "'");
    table.header.push_back(std::move(name));
  }

  std::size_t data_row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    ++data_row;
    const auto fields = split_fields(line);
    if (fields.size() != table.header.size()) {
      std::ostringstream msg;
      msg << path.string() << ":" << line_no << ": expected " << table.header.size()
          << " fields, found " << fields.size();
      throw DataError(msg.str());
    }
    std::vector<double> values(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const auto parsed = parse_double(fields[j]);
      if (!parsed) {
        std::ostringstream msg;
        msg << path.string() << ": row " << data_row << " (line " << line_no << "), column '"
            << table.header[j] << "': cannot parse '" << fields[j] << "' as a finite number";
        throw DataError(msg.str());
      }
      values[j] = *parsed;
    }
    table.rows.push_back(std::move(values));
  }
  return table;
}

}  // namespace

std::string_view to_string(Task task) {
  return task == Task::kRegression ? "regression" : "classification";
}

Task parse_task(std::string_view text) {
  if (text == "regression") return Task::kRegression;
  if (text == "classification") return Task::kClassification;
  throw ArgumentError("unknown task '" + std::string(text) +
                      "' (expected regression or classification)");
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.x = Matrix(rows.size(), m());
  out.y.resize(rows.size());
  out.column_names = column_names;
  out.task = task;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::ranges::copy(x.row(rows[r]), out.x.row(r).begin());
    out.y[r] = y[rows[r]];
  }
  return out;
}

void validate(const Dataset& data) {
  if (data.n() < 2) throw DataError("dataset needs at least 2 rows");
  if (data.m() < 1) throw DataError("dataset needs at least 1 predictor column");
  if (data.y.size() != data.n()) throw DataError("target length does not match row count");
  for (double v : data.x.values()) {
    if (!std::isfinite(v)) throw DataError("dataset contains a non-finite predictor");
  }
  for (std::size_t i = 0; i < data.y.size(); ++i) {
    const double v = data.y[i];
    if (!std::isfinite(v)) throw DataError("dataset contains a non-finite target");
    if (data.task == Task::kClassification && v != 0.0 && v != 1.0) {
      std::ostringstream msg;
      msg << "classification target must be 0 or 1; row " << (i + 1) << " has " << v;
      throw DataError(msg.str());
    }
  }
}

std::vector<std::size_t> FoldAssignment::test_rows(std::uint32_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::train_rows(std::uint32_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] != fold) out.push_back(i);
  }
  return out;
}

Dataset load_csv(const std::filesystem::path& path, std::string_view target_column, Task task) {
  RawTable table = read_table(path);
  const auto it = std::ranges::find(table.header, target_column);
  if (it == table.header.end()) {
    throw DataError("target column '" + std::string(target_column) + "' not found in '" +
                    path.string() + "'");
  }
  const auto target = static_cast<std::size_t>(it - table.header.begin());

  Dataset data;
  data.task = task;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (j != target) data.column_names.push_back(table.header[j]);
  }
  data.x = Matrix(table.rows.size(), table.header.size() - 1);
  data.y.resize(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    std::size_t out_col = 0;
    for (std::size_t j = 0; j < table.header.size(); ++j) {
      if (j == target) {
        data.y[i] = table.rows[i][j];
      } else {
        data.x(i, out_col++) = table.rows[i][j];
      }
    }
  }
  validate(data);
  return data;
}

Matrix load_csv_matrix(const std::filesystem::path& path, std::vector<std::string>* header) {
  RawTable table = read_table(path);
  Matrix x(table.rows.size(), table.header.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    std::ranges::copy(table.rows[i], x.row(i).begin());
  }
  if (header != nullptr) *header = std::move(table.header);
  return x;
}

StandardizerParams standardize_fit(const Matrix& x) {
  const std::size_t n = x.rows();
  const std::size_t m = x.cols();
  if (n < 2) throw ArgumentError("standardize_fit needs at least 2 rows");

  StandardizerParams params;
  params.means.assign(m, 0.0);
  params.stds.assign(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) params.means[j] += x(i, j);
  }
  for (double& mean : params.means) mean /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double d = x(i, j) - params.means[j];
      params.stds[j] += d * d;
    }
  }
  for (double& sd : params.stds) {
    sd = std::sqrt(sd / static_cast<double>(n - 1));
    if (sd < 1e-12) sd = 1.0;
  }
  return params;
}

Matrix standardize_apply(const StandardizerParams& params, const Matrix& x) {
  if (x.cols() != params.means.size()) {
    std::ostringstream msg;
    msg << "standardizer expects " << params.means.size() << " columns, got " << x.cols();
    throw ArgumentError(msg.str());
  }
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      out(i, j) = (x(i, j) - params.means[j]) / params.stds[j];
    }
  }
  return out;
}

FoldAssignment kfold_split(std::size_t n, std::size_t k, std::uint64_t seed,
                           std::optional<std::span<const double>> labels) {
  if (k < 2 || k > n) {
    std::ostringstream msg;
    msg << "fold count " << k << " out of range [2, " << n << "]";
    throw ArgumentError(msg.str());
  }
  if (labels && labels->size() != n) throw ArgumentError("label count does not match n");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Substream rng(seed, 0x666f6c64ULL);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[rng.uniform_index(i)]);
  }
  if (labels) {
    // Stable partition keeps the shuffled order within each class; dealing then
    // continues round-robin across the class boundary.
    std::ranges::stable_partition(order, [&](std::size_t i) { return (*labels)[i] == 0.0; });
  }

  FoldAssignment folds;
  folds.k = static_cast<std::uint32_t>(k);
  folds.fold_of.resize(n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    folds.fold_of[order[pos]] = static_cast<std::uint32_t>(pos % k);
  }
  return folds;
}

std::pair<Dataset, Dataset> simulate_sine(std::size_t n_train, std::size_t n_test,
                                          std::uint64_t seed, double noise_sd) {
  if (n_train < 1 || n_test < 1) throw ArgumentError("simulate_sine counts must be >= 1");
  constexpr double kHalfWidth = 10.0 * std::numbers::pi;

  auto draw = [&](std::size_t count, std::uint64_t stream) {
    Substream rng(seed, stream);
    Dataset d;
    d.task = Task::kRegression;
    d.column_names = {"x"};
    d.x = Matrix(count, 1);
    d.y.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      double x = 0.0;
      do {
        x = -kHalfWidth + 2.0 * kHalfWidth * rng.uniform_open();
      } while (!(x > -kHalfWidth && x < kHalfWidth));
      const double noise = rng.normal();
      d.x(i, 0) = x;
      d.y[i] = std::sin(x) + noise_sd * noise;
    }
    return d;
  };
  return {draw(n_train, 0x7472ULL), draw(n_test, 0x7465ULL)};
}

}  // namespace rbr
