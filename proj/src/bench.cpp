#include "rbr/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "rbr/error.hpp"
#include "rbr/knn.hpp"

namespace rbr {

namespace {

using nlohmann::json;

TargetTransform parse_transform(const std::string& text) {
  if (text == "none") return TargetTransform::kNone;
  if (text == "log1p") return TargetTransform::kLog1p;
  throw DataError("unknown target transform '" + text + "' (expected none or log1p)");
}

BenchmarkSpec parse_spec(const json& node, const std::filesystem::path& base) {
  BenchmarkSpec spec;
  spec.name = node.at("name").get<std::string>();
  spec.source = node.at("source").get<std::string>();
  if (spec.source != "sine") {
    std::filesystem::path p(spec.source);
    if (p.is_relative()) p = base / p;
    spec.source = p.string();
  }
  spec.task = parse_task(node.value("task", std::string("regression")));
  spec.target = node.value("target", std::string());
  spec.transform = parse_transform(node.value("transform", std::string("none")));
  spec.sine_samples = node.value("samples", spec.sine_samples);
  spec.large = node.value("large", false);
  if (spec.source != "sine" && spec.target.empty()) {
    throw DataError("dataset '" + spec.name + "' needs a target column");
  }

  const json methods = node.value("methods", json::object());
  if (methods.contains("rbr")) {
    const json& r = methods.at("rbr");
    RbrMethodSettings settings;
    settings.k = r.value("k", settings.k);
    if (r.contains("lambda")) {
      const json& l = r.at("lambda");
      settings.lambdas = l.is_array() ? l.get<std::vector<double>>() : std::vector<double>{l.get<double>()};
    }
    settings.lbfgs.history_size = r.value("lbfgs_history", settings.lbfgs.history_size);
    settings.lbfgs.max_iterations = r.value("max_iters", settings.lbfgs.max_iterations);
    spec.rbr = settings;
  }
  if (methods.contains("knn")) {
    KnnMethodSettings settings;
    const json& kn = methods.at("knn");
    if (kn.contains("k")) {
      const json& g = kn.at("k");
      settings.grid = g.is_array() ? g.get<std::vector<std::size_t>>()
                                   : std::vector<std::size_t>{g.get<std::size_t>()};
    }
    spec.knn = settings;
  }
  if (!spec.rbr && !spec.knn) throw DataError("dataset '" + spec.name + "' lists no methods");
  return spec;
}

std::string format_fixed(double v, int digits) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

std::string csv_escape(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

const BenchmarkCell* BenchmarkReport::find(std::string_view dataset, std::string_view method) const {
  for (const auto& cell : cells) {
    if (cell.dataset == dataset && cell.method == method) return &cell;
  }
  return nullptr;
}

BenchmarkPlan load_benchmark_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open benchmark spec '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("benchmark spec '" + path.string() + "': " + e.what());
  }

  BenchmarkPlan plan;
  try {
    plan.folds = doc.value("folds", plan.folds);
    plan.seed = doc.value("seed", plan.seed);
    plan.threads = doc.value("threads", plan.threads);
    const auto base = path.parent_path();
    for (const auto& node : doc.at("datasets")) plan.specs.push_back(parse_spec(node, base));
  } catch (const json::exception& e) {
    throw DataError("benchmark spec '" + path.string() + "': " + e.what());
  }
  return plan;
}

Dataset load_benchmark_dataset(const BenchmarkSpec& spec, std::uint64_t seed) {
  Dataset data;
  if (spec.source == "sine") {
    data = simulate_sine(spec.sine_samples, 1, seed).first;
  } else {
    if (!std::filesystem::exists(spec.source)) {
      throw DataError("dataset file '" + spec.source + "' does not exist");
    }
    data = load_csv(spec.source, spec.target, spec.task);
  }
  if (spec.transform == TargetTransform::kLog1p) {
    for (double& v : data.y) {
      if (!(v > -1.0)) throw DataError("log1p transform needs targets > -1");
      v = std::log1p(v);
    }
  }
  return data;
}

BenchmarkReport run_benchmark(const BenchmarkPlan& plan, std::ostream* log) {
  BenchmarkReport report;
  for (const auto& spec : plan.specs) {
    std::vector<std::string> methods;
    if (spec.rbr) methods.emplace_back("rbr");
    if (spec.knn) methods.emplace_back("knn");

    if (spec.large && !plan.include_large) {
      for (const auto& method : methods) {
        report.cells.push_back({spec.name, method, "", 0.0, 0.0, 0, false,
                                "skipped: large dataset (enable large datasets to run)"});
      }
      continue;
    }

    std::optional<Dataset> data;
    std::string load_error;
    try {
      data = load_benchmark_dataset(spec, plan.seed);
    } catch (const std::exception& e) {
      load_error = e.what();
    }

    for (const auto& method : methods) {
      BenchmarkCell cell{spec.name, method, "", 0.0, 0.0, 0, false, load_error};
      if (data) {
        if (log) *log << "[bench] " << spec.name << " / " << method << " ..." << std::endl;
        try {
          EvalMetrics metrics;
          if (method == "rbr") {
            TrainConfig config;
            config.k = spec.rbr->k;
            config.lambdas = spec.rbr->lambdas;
            config.lbfgs = spec.rbr->lbfgs;
            config.seed = plan.seed;
            config.threads = plan.threads;
            metrics = cross_validate(*data, config, plan.folds);
          } else {
            metrics = knn_cross_validate(*data, spec.knn->grid, plan.folds, plan.seed);
          }
          cell.metric_name = metrics.metric_name;
          cell.metric_value = metrics.mean;
          cell.seconds = metrics.seconds;
          cell.bytes = metrics.feature_bytes;
          cell.ok = true;
        } catch (const std::exception& e) {
          cell.error = e.what();
        }
      }
      if (log) {
        *log << "[bench] " << spec.name << " / " << method << ": "
             << (cell.ok ? cell.metric_name + " " + format_fixed(cell.metric_value, 4)
                         : "failed (" + cell.error + ")")
             << std::endl;
      }
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

void print_report_table(const BenchmarkReport& report, std::ostream& out) {
  std::size_t name_width = 7;
  for (const auto& cell : report.cells) name_width = std::max(name_width, cell.dataset.size());

  out << std::left << std::setw(static_cast<int>(name_width)) << "dataset" << "  " << std::setw(6)
      << "method" << "  " << std::setw(9) << "metric" << "  " << std::right << std::setw(12)
      << "value" << "  " << std::setw(10) << "seconds" << "  " << std::setw(14) << "bytes" << '\n';
  for (const auto& cell : report.cells) {
    out << std::left << std::setw(static_cast<int>(name_width)) << cell.dataset << "  "
        << std::setw(6) << cell.method << "  ";
    if (cell.ok) {
      out << std::setw(9) << cell.metric_name << "  " << std::right << std::setw(12)
          << format_fixed(cell.metric_value, 4) << "  " << std::setw(10)
          << format_fixed(cell.seconds, 2) << "  " << std::setw(14) << cell.bytes << '\n';
    } else {
      out << "FAILED: " << cell.error << '\n';
    }
    out << std::right;
  }
}

void write_report_csv(const BenchmarkReport& report, std::ostream& out) {
  out << "dataset,method,metric_name,metric_value,seconds,bytes\n";
  for (const auto& cell : report.cells) {
    out << csv_escape(cell.dataset) << ',' << cell.method << ',';
    if (cell.ok) {
      char value[40];
      std::snprintf(value, sizeof value, "%.10g", cell.metric_value);
      out << cell.metric_name << ',' << value << ',' << format_fixed(cell.seconds, 3) << ','
          << cell.bytes << '\n';
    } else {
      out << "failed,,,," << csv_escape(cell.error) << '\n';
    }
  }
}

SineFit fit_sine(std::size_t n, const TrainConfig& config, double noise_sd) {
  auto [train_set, test_set] = simulate_sine(n, n, config.seed, noise_sd);
  const RbrModel model = train(train_set, config);
  const Predictions pred = predict(model, test_set.x);

  std::vector<std::size_t> order(test_set.n());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::ranges::sort(order, [&](std::size_t a, std::size_t b) { return test_set.x(a, 0) < test_set.x(b, 0); });

  SineFit fit;
  fit.lambda = model.lambda;
  fit.test_rmse = rmse(test_set.y, pred.values);
  for (auto i : order) {
    const double x = test_set.x(i, 0);
    fit.x.push_back(x);
    fit.truth.push_back(std::sin(x));
    fit.fitted.push_back(pred.values[i]);
    fit.max_abs_error = std::max(fit.max_abs_error, std::abs(pred.values[i] - std::sin(x)));
  }
  return fit;
}

SineFit emit_sine_fit(std::size_t n, const TrainConfig& config, const std::filesystem::path& out_path,
                      double noise_sd) {
  SineFit fit = fit_sine(n, config, noise_sd);
  std::ofstream out(out_path);
  if (!out) throw DataError("cannot open '" + out_path.string() + "' for writing");
  out << "x,sin_x,fitted\n";
  char line[128];
  for (std::size_t i = 0; i < fit.x.size(); ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", fit.x[i], fit.truth[i], fit.fitted[i]);
    out << line;
  }
  out.flush();
  if (!out) throw DataError("failed writing '" + out_path.string() + "'");
  return fit;
}

}  // namespace rbr
