#include <doctest.h>

#include <sstream>

#include "rbr/cli.hpp"
#include "rbr/error.hpp"
#include "rbr/model.hpp"
#include "test_support.hpp"

using namespace rbr;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "rbr");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string toy_csv(std::size_t n) {
  std::ostringstream out;
  out << "u,v,target\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double u = static_cast<double>(i % 13) - 6.0;
    const double v = static_cast<double>((i * 7) % 5);
    out << u << ',' << v << ',' << (u * u - v) << '\n';
  }
  return out.str();
}

std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_CASE("usage errors exit with 1") {
  CHECK(run({}).code == kExitUsage);
  const Run unknown = run({"train", "--bogus"});
  CHECK(unknown.code == kExitUsage);
  CHECK(unknown.err.find("Usage") != std::string::npos);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"train", "--data", "x.csv", "--target", "t", "--out", "m", "--lambda", "abc"}).code == kExitUsage);
  CHECK(run({"train", "--data", "x.csv", "--target", "t", "--out", "m", "--k", "1"}).code == kExitUsage);
  CHECK(run({"train", "--data", "x.csv", "--target", "t", "--out", "m", "--task", "ranking"}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("data and model errors exit with 2") {
  testing::TempDir dir;
  const Run missing = run({"train", "--data", dir.file("none.csv").string(), "--target", "t", "--out",
                           dir.file("m.rbr").string()});
  CHECK(missing.code == kExitDataError);
  CHECK(missing.err.find("cannot open") != std::string::npos);

  const auto data = dir.write("d.csv", toy_csv(20));
  CHECK(run({"predict", "--model", dir.file("none.rbr").string(), "--data", data.string(), "--out",
             dir.file("p.csv").string()})
            .code == kExitDataError);
  CHECK(run({"train", "--data", data.string(), "--target", "nope", "--out", dir.file("m.rbr").string()}).code ==
        kExitDataError);
}

TEST_CASE("parse_lambda_list") {
  CHECK(parse_lambda_list("1") == std::vector<double>{1.0});
  CHECK(parse_lambda_list("0.01, 0.1,1") == std::vector<double>{0.01, 0.1, 1.0});
  CHECK_THROWS_AS(parse_lambda_list("1,,2"), ArgumentError);
  CHECK_THROWS_AS(parse_lambda_list("-1"), ArgumentError);
  CHECK_THROWS_AS(parse_lambda_list("nan"), ArgumentError);
}

TEST_CASE("train then predict writes one prediction per input row") {
  testing::TempDir dir;
  const auto data = dir.write("d.csv", toy_csv(60));
  const auto model = dir.file("m.rbr");
  const Run trained = run({"train", "--data", data.string(), "--target", "target", "--task", "regression", "--k",
                           "400", "--seed", "42", "--out", model.string()});
  REQUIRE(trained.code == kExitOk);
  CHECK(trained.out.find("lambda") != std::string::npos);
  CHECK(trained.err.find("[lbfgs] iter 10") != std::string::npos);

  const auto preds = dir.file("p.csv");
  const Run predicted = run({"predict", "--model", model.string(), "--data", data.string(), "--out", preds.string()});
  REQUIRE(predicted.code == kExitOk);
  const std::string text = testing::read_file(preds);
  CHECK(text.rfind("prediction\n", 0) == 0);
  CHECK(count_lines(text) == 61);

  // Predictor columns are found by name, so order and extra columns do not matter.
  const auto shuffled = dir.write("s.csv", "target,extra,v,u\n0,9,1,2\n0,9,3,-4\n");
  const Run again = run({"predict", "--model", model.string(), "--data", shuffled.string(), "--out", preds.string()});
  CHECK(again.code == kExitOk);
  CHECK(count_lines(testing::read_file(preds)) == 3);

  const auto narrow = dir.write("n.csv", "u\n1\n2\n");
  CHECK(run({"predict", "--model", model.string(), "--data", narrow.string(), "--out", preds.string()}).code ==
        kExitDataError);
}

TEST_CASE("classification predictions carry probability and label") {
  testing::TempDir dir;
  std::ostringstream csv;
  csv << "a,b,cls\n";
  for (int i = 0; i < 40; ++i) csv << (i % 10) << ',' << (i % 3) << ',' << (i % 10 >= 5 ? 1 : 0) << '\n';
  const auto data = dir.write("c.csv", csv.str());
  const auto model = dir.file("c.rbr");
  REQUIRE(run({"train", "--data", data.string(), "--target", "cls", "--task", "classification", "--k", "200",
               "--lambda", "0.1", "--out", model.string()})
              .code == kExitOk);
  const auto preds = dir.file("p.csv");
  REQUIRE(run({"predict", "--model", model.string(), "--data", data.string(), "--out", preds.string()}).code ==
          kExitOk);
  const std::string text = testing::read_file(preds);
  CHECK(text.rfind("probability,label\n", 0) == 0);
  CHECK(count_lines(text) == 41);
}

TEST_CASE("identical invocations give identical files, across thread counts too") {
  testing::TempDir dir;
  const auto data = dir.write("d.csv", toy_csv(80));
  auto train_with = [&](const std::string& name, const std::string& threads) {
    const auto path = dir.file(name);
    REQUIRE(run({"train", "--data", data.string(), "--target", "target", "--k", "600", "--threads", threads,
                 "--out", path.string()})
                .code == kExitOk);
    return path;
  };
  const auto a = train_with("a.rbr", "1");
  const auto b = train_with("b.rbr", "1");
  const auto c = train_with("c.rbr", "8");
  CHECK(testing::read_file(a) == testing::read_file(b));

  const RbrModel ma = load_model(a);
  const RbrModel mc = load_model(c);
  CHECK(ma.bank == mc.bank);
  REQUIRE(ma.beta.size() == mc.beta.size());
  for (std::size_t j = 0; j < ma.beta.size(); ++j) {
    CHECK(std::abs(ma.beta[j] - mc.beta[j]) <= 1e-9 * std::max(1.0, std::abs(ma.beta[j])));
  }

  const auto pa = dir.file("pa.csv");
  const auto pb = dir.file("pb.csv");
  run({"predict", "--model", a.string(), "--data", data.string(), "--out", pa.string()});
  run({"predict", "--model", b.string(), "--data", data.string(), "--out", pb.string()});
  CHECK(testing::read_file(pa) == testing::read_file(pb));
}

TEST_CASE("cv, sine and bench subcommands") {
  testing::TempDir dir;
  const auto data = dir.write("d.csv", toy_csv(50));
  const Run cv = run({"cv", "--data", data.string(), "--target", "target", "--k", "200", "--lambda", "1", "--folds",
                      "5"});
  REQUIRE(cv.code == kExitOk);
  CHECK(count_lines(cv.out) == 7);
  CHECK(cv.out.find("mean rmse ") != std::string::npos);
  CHECK(cv.err.find("[cv] fold 5/5") != std::string::npos);

  const auto sine = dir.file("fit.csv");
  const Run s = run({"sine", "--n", "100", "--k", "300", "--lambda", "1", "--out", sine.string()});
  REQUIRE(s.code == kExitOk);
  CHECK(s.out.find("test_rmse") != std::string::npos);
  CHECK(count_lines(testing::read_file(sine)) == 101);

  const auto plan = dir.write("plan.json", R"({"folds": 2, "datasets": [
      {"name": "d", "source": "d.csv", "target": "target", "methods": {"knn": {"k": 1}}},
      {"name": "gone", "source": "gone.csv", "target": "target", "methods": {"knn": {"k": 1}}}]})");
  const auto csv = dir.file("report.csv");
  const Run b = run({"bench", "--spec", plan.string(), "--csv", csv.string()});
  CHECK(b.code == kExitOk);
  CHECK(b.out.find("FAILED") != std::string::npos);
  CHECK(count_lines(testing::read_file(csv)) == 3);
}
