#include "rbr/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "rbr/bench.hpp"
#include "rbr/error.hpp"
#include "rbr/model.hpp"
#include "rbr/parallel.hpp"

namespace rbr {

namespace {

// Bad flag values detected after parsing; reported like a parse error.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string data;
  std::string target;
  std::string task = "regression";
  std::size_t k = 10000;
  std::string lambda;
  std::uint64_t seed = 42;
  std::size_t threads = 0;
  std::size_t folds = 10;
  std::string out;
  std::string model;
  std::size_t lbfgs_history = LbfgsConfig{}.history_size;
  std::size_t max_iters = LbfgsConfig{}.max_iterations;
  // bench
  std::string spec;
  std::string csv;
  bool large = false;
  // sine
  std::size_t n = 1000;
  double noise = 0.1;
};

void add_training_flags(CLI::App& cmd, Options& opt) {
  cmd.add_option("--k", opt.k, "Number of random bits, including the intercept")->capture_default_str();
  cmd.add_option("--lambda", opt.lambda, "Ridge penalty, or a comma-separated grid searched by inner CV");
  cmd.add_option("--seed", opt.seed, "Random seed")->capture_default_str();
  cmd.add_option("--threads", opt.threads, "OpenMP threads (0 = all cores)")->capture_default_str();
  cmd.add_option("--lbfgs-history", opt.lbfgs_history, "L-BFGS history size")->capture_default_str();
  cmd.add_option("--max-iters", opt.max_iters, "L-BFGS iteration cap")->capture_default_str();
}

void add_data_flags(CLI::App& cmd, Options& opt) {
  cmd.add_option("--data", opt.data, "Input CSV with a header row")->required();
  cmd.add_option("--target", opt.target, "Target column name")->required();
  cmd.add_option("--task", opt.task, "regression or classification")
      ->check(CLI::IsMember({"regression", "classification"}))
      ->capture_default_str();
}

TrainConfig make_config(const Options& opt, std::ostream& err) {
  TrainConfig config;
  config.k = opt.k;
  if (!opt.lambda.empty()) {
    try {
      config.lambdas = parse_lambda_list(opt.lambda);
    } catch (const ArgumentError& e) {
      throw UsageError(e.what());
    }
  }
  config.seed = opt.seed;
  config.threads = opt.threads;
  config.lbfgs.history_size = opt.lbfgs_history;
  config.lbfgs.max_iterations = opt.max_iters;
  config.observer = [&err](const IterationInfo& info) {
    if (info.iteration % 10 == 0) {
      char line[128];
      std::snprintf(line, sizeof line, "[lbfgs] iter %zu  loss %.6g  |grad|inf %.3g\n",
                    info.iteration, info.loss, info.gradient_norm);
      err << line << std::flush;
    }
  };
  try {
    validate(config);
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
  return config;
}

std::string real(double v, const char* fmt = "%.17g") {
  char buf[40];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

int cmd_train(const Options& opt, std::ostream& out, std::ostream& err) {
  const TrainConfig config = make_config(opt, err);
  err << "[train] loading " << opt.data << '\n';
  const Dataset data = load_csv(opt.data, opt.target, parse_task(opt.task));
  err << "[train] n=" << data.n() << " m=" << data.m() << " k=" << config.k << '\n';
  const RbrModel model = train(data, config);
  save_model(model, opt.out);
  out << "lambda " << real(model.lambda, "%g") << '\n' << "model " << opt.out << '\n';
  return kExitOk;
}

int cmd_predict(const Options& opt, std::ostream& out, std::ostream& err) {
  const RbrModel model = load_model(opt.model);
  std::vector<std::string> header;
  const Matrix raw = load_csv_matrix(opt.data, &header);

  Matrix x;
  if (model.column_names.empty()) {
    if (raw.cols() != model.m()) {
      throw DataError("data has " + std::to_string(raw.cols()) + " columns, model expects " +
                      std::to_string(model.m()));
    }
    x = raw;
  } else {
    // Pick the model's predictors by name; any other column (e.g. the target) is ignored.
    std::vector<std::size_t> source;
    for (const auto& name : model.column_names) {
      const auto it = std::ranges::find(header, name);
      if (it == header.end()) throw DataError("column '" + name + "' required by the model is missing");
      source.push_back(static_cast<std::size_t>(it - header.begin()));
    }
    x = Matrix(raw.rows(), source.size());
    for (std::size_t i = 0; i < raw.rows(); ++i) {
      for (std::size_t j = 0; j < source.size(); ++j) x(i, j) = raw(i, source[j]);
    }
  }

  const Predictions pred = predict(model, x);
  std::ofstream file(opt.out);
  if (!file) throw DataError("cannot open '" + opt.out + "' for writing");
  if (model.task == Task::kRegression) {
    file << "prediction\n";
    for (double v : pred.values) file << real(v) << '\n';
  } else {
    file << "probability,label\n";
    for (std::size_t i = 0; i < pred.values.size(); ++i) {
      file << real(pred.values[i]) << ',' << pred.labels[i] << '\n';
    }
  }
  file.flush();
  if (!file) throw DataError("failed writing '" + opt.out + "'");
  err << "[predict] " << pred.values.size() << " rows\n";
  out << "predictions " << pred.values.size() << ' ' << opt.out << '\n';
  return kExitOk;
}

int cmd_cv(const Options& opt, std::ostream& out, std::ostream& err) {
  TrainConfig config = make_config(opt, err);
  config.observer = {};
  const Dataset data = load_csv(opt.data, opt.target, parse_task(opt.task));
  err << "[cv] n=" << data.n() << " m=" << data.m() << " k=" << config.k << " folds=" << opt.folds
      << '\n';
  const EvalMetrics metrics =
      cross_validate(data, config, opt.folds, [&err](std::size_t fold, std::size_t total, double value, double lambda) {
        char line[128];
        std::snprintf(line, sizeof line, "[cv] fold %zu/%zu  %.6f  lambda %g\n", fold + 1, total, value, lambda);
        err << line << std::flush;
      });
  for (std::size_t f = 0; f < metrics.per_fold.size(); ++f) {
    out << "fold " << (f + 1) << ' ' << metrics.metric_name << ' ' << real(metrics.per_fold[f], "%.6f")
        << " lambda " << real(metrics.fold_params[f], "%g") << '\n';
  }
  out << "mean " << metrics.metric_name << ' ' << real(metrics.mean, "%.6f") << '\n';
  out << "seconds " << real(metrics.seconds, "%.2f") << '\n';
  return kExitOk;
}

int cmd_bench(const Options& opt, std::ostream& out, std::ostream& err) {
  BenchmarkPlan plan = load_benchmark_plan(opt.spec);
  plan.include_large = opt.large;
  if (opt.threads > 0) plan.threads = opt.threads;
  const BenchmarkReport report = run_benchmark(plan, &err);
  print_report_table(report, out);
  if (!opt.csv.empty()) {
    std::ofstream csv(opt.csv);
    if (!csv) throw DataError("cannot open '" + opt.csv + "' for writing");
    write_report_csv(report, csv);
  } else {
    out << '\n';
    write_report_csv(report, out);
  }
  return kExitOk;
}

int cmd_sine(const Options& opt, std::ostream& out, std::ostream& err) {
  TrainConfig config = make_config(opt, err);
  config.observer = {};
  ThreadCountScope threads(config.threads);
  const std::string path = opt.out.empty() ? "sine_fit.csv" : opt.out;
  const SineFit fit = emit_sine_fit(opt.n, config, path, opt.noise);
  out << "test_rmse " << real(fit.test_rmse, "%.6f") << '\n'
      << "max_abs_error " << real(fit.max_abs_error, "%.6f") << '\n'
      << "lambda " << real(fit.lambda, "%g") << '\n'
      << "output " << path << '\n';
  return kExitOk;
}

}  // namespace

std::vector<double> parse_lambda_list(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = text.find(',', start);
    std::string_view item = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size() || !(value >= 0.0) ||
        !std::isfinite(value)) {
      throw ArgumentError("invalid lambda '" + std::string(item) + "'");
    }
    out.push_back(value);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Random bits regression: train, predict, cross-validate and benchmark", "rbr"};
  app.require_subcommand(1);

  auto* train_cmd = app.add_subcommand("train", "Fit a model on a CSV file");
  add_data_flags(*train_cmd, opt);
  add_training_flags(*train_cmd, opt);
  train_cmd->add_option("--out", opt.out, "Model file to write")->required();

  auto* predict_cmd = app.add_subcommand("predict", "Score a CSV file with a saved model");
  predict_cmd->add_option("--model", opt.model, "Model file")->required();
  predict_cmd->add_option("--data", opt.data, "Input CSV with a header row")->required();
  predict_cmd->add_option("--out", opt.out, "Prediction CSV to write")->required();
  predict_cmd->add_option("--threads", opt.threads, "OpenMP threads (0 = all cores)");

  auto* cv_cmd = app.add_subcommand("cv", "k-fold cross-validation");
  add_data_flags(*cv_cmd, opt);
  add_training_flags(*cv_cmd, opt);
  cv_cmd->add_option("--folds", opt.folds, "Number of folds")->capture_default_str();

  auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark plan (JSON)");
  bench_cmd->add_option("--spec", opt.spec, "Benchmark plan file")->required();
  bench_cmd->add_option("--csv", opt.csv, "Write machine-readable rows here");
  bench_cmd->add_option("--threads", opt.threads, "OpenMP threads (0 = plan setting)");
  bench_cmd->add_flag("--large", opt.large, "Also run datasets marked large");

  auto* sine_cmd = app.add_subcommand("sine", "Fit the simulated sine curve and write plot data");
  sine_cmd->add_option("--n", opt.n, "Training and test sample count")->capture_default_str();
  sine_cmd->add_option("--noise", opt.noise, "Noise standard deviation")->capture_default_str();
  sine_cmd->add_option("--out", opt.out, "CSV of x, sin(x), fitted (default sine_fit.csv)");
  add_training_flags(*sine_cmd, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    ThreadCountScope threads(opt.threads);
    if (*train_cmd) return cmd_train(opt, out, err);
    if (*predict_cmd) return cmd_predict(opt, out, err);
    if (*cv_cmd) return cmd_cv(opt, out, err);
    if (*bench_cmd) return cmd_bench(opt, out, err);
    if (*sine_cmd) return cmd_sine(opt, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitUsage;
}

}  // namespace rbr
