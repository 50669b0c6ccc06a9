#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "oracles.hpp"
#include "rbr/dataio.hpp"
#include "rbr/error.hpp"
#include "test_support.hpp"

using namespace rbr;

namespace {

Matrix column(std::initializer_list<double> values) {
  Matrix m(values.size(), 1);
  std::size_t i = 0;
  for (double v : values) m(i++, 0) = v;
  return m;
}

std::vector<std::size_t> fold_sizes(const FoldAssignment& folds) {
  std::vector<std::size_t> sizes(folds.k, 0);
  for (auto f : folds.fold_of) ++sizes[f];
  return sizes;
}

}  // namespace

TEST_CASE("load_csv splits target from predictors") {
  testing::TempDir dir;
  const auto path = dir.write("abt.csv", "a,b,t\n1,2,3\n4,5,6\n7,8,9\n");
  const Dataset d = load_csv(path, "t", Task::kRegression);
  CHECK(d.n() == 3);
  CHECK(d.m() == 2);
  CHECK(d.y == std::vector<double>{3, 6, 9});
  CHECK(d.column_names == std::vector<std::string>{"a", "b"});
  CHECK(d.x(2, 1) == 8.0);
}

TEST_CASE("load_csv accepts a target in the middle and quoted headers") {
  testing::TempDir dir;
  const auto path = dir.write("mid.csv", "\"a\",t,b\n1,0,2\n3,1,4\n");
  const Dataset d = load_csv(path, "t", Task::kClassification);
  CHECK(d.column_names == std::vector<std::string>{"a", "b"});
  CHECK(d.y == std::vector<double>{0, 1});
  CHECK(d.x(1, 1) == 4.0);
}

TEST_CASE("load_csv reports the offending cell") {
  testing::TempDir dir;
  const auto path = dir.write("na.csv", "a,b,t\n1,2,3\n4,NA,6\n");
  try {
    load_csv(path, "t", Task::kRegression);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 2") != std::string::npos);
    CHECK(msg.find("'b'") != std::string::npos);
    CHECK(msg.find("NA") != std::string::npos);
  }
}

TEST_CASE("load_csv rejects bad inputs") {
  testing::TempDir dir;
  CHECK_THROWS_AS(load_csv(dir.file("missing.csv"), "t", Task::kRegression), DataError);
  CHECK_THROWS_AS(load_csv(dir.write("dup.csv", "a,a,t\n1,2,3\n4,5,6\n"), "t", Task::kRegression), DataError);
  CHECK_THROWS_AS(load_csv(dir.write("not.csv", "a,b\n1,2\n3,4\n"), "t", Task::kRegression), DataError);
  CHECK_THROWS_AS(load_csv(dir.write("cls.csv", "a,t\n1,0\n2,2\n"), "t", Task::kClassification), DataError);
  CHECK_THROWS_AS(load_csv(dir.write("ragged.csv", "a,t\n1,0\n2\n"), "t", Task::kRegression), DataError);
  CHECK_THROWS_AS(load_csv(dir.write("inf.csv", "a,t\n1,0\ninf,1\n"), "t", Task::kRegression), DataError);
}

TEST_CASE("bundled Housing file has the expected shape") {
  const Dataset d = load_csv(std::filesystem::path(RBR_DATA_DIR) / "housing.csv", "MEDV", Task::kRegression);
  CHECK(d.n() == 506);
  CHECK(d.m() == 13);
}

TEST_CASE("standardize_fit hand examples") {
  const auto a = standardize_fit(column({1, 2, 3}));
  CHECK(a.means[0] == doctest::Approx(2.0));
  CHECK(a.stds[0] == doctest::Approx(1.0));

  const auto b = standardize_fit(column({-1, 1}));
  CHECK(b.means[0] == doctest::Approx(0.0));
  CHECK(b.stds[0] == doctest::Approx(std::numbers::sqrt2));

  const auto c = standardize_fit(column({5, 5, 5}));
  CHECK(c.means[0] == doctest::Approx(5.0));
  CHECK(c.stds[0] == 1.0);

  CHECK_THROWS_AS(standardize_fit(column({1})), ArgumentError);
}

TEST_CASE("standardize_apply arithmetic") {
  const StandardizerParams p{{2.0}, {1.0}};
  CHECK(standardize_apply(p, column({3}))(0, 0) == doctest::Approx(1.0));
  const StandardizerParams constant{{5.0}, {1.0}};
  CHECK(standardize_apply(constant, column({5}))(0, 0) == 0.0);
  CHECK_THROWS_AS(standardize_apply(p, Matrix(2, 3)), ArgumentError);
}

TEST_CASE("standardized training columns have zero mean and unit std") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal(3.0, 4.0);
  Matrix x(50, 4);
  for (std::size_t i = 0; i < 50; ++i) {
    for (std::size_t j = 0; j < 3; ++j) x(i, j) = normal(rng);
    x(i, 3) = 2.5;  // constant column
  }
  const Matrix z = standardize_apply(standardize_fit(x), x);
  const Matrix expected = oracle::standardize(x, x);
  for (std::size_t j = 0; j < 4; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < 50; ++i) mean += z(i, j);
    mean /= 50.0;
    CHECK(std::abs(mean) < 1e-10);
    if (j < 3) {
      double ss = 0.0;
      for (std::size_t i = 0; i < 50; ++i) ss += (z(i, j) - mean) * (z(i, j) - mean);
      CHECK(std::abs(std::sqrt(ss / 49.0) - 1.0) < 1e-10);
    }
    for (std::size_t i = 0; i < 50; ++i) CHECK(z(i, j) == doctest::Approx(expected(i, j)).epsilon(1e-12));
  }
}

TEST_CASE("kfold_split sizes, partition and determinism") {
  CHECK(fold_sizes(kfold_split(10, 10, 1)) == std::vector<std::size_t>(10, 1));

  auto sizes = fold_sizes(kfold_split(10, 3, 1));
  std::sort(sizes.begin(), sizes.end());
  CHECK(sizes == std::vector<std::size_t>{3, 3, 4});

  const auto a = kfold_split(101, 7, 99);
  const auto b = kfold_split(101, 7, 99);
  CHECK(a.fold_of == b.fold_of);
  CHECK(kfold_split(101, 7, 100).fold_of != a.fold_of);

  std::multiset<std::size_t> seen;
  for (std::uint32_t f = 0; f < a.k; ++f) {
    const auto test = a.test_rows(f);
    const auto train = a.train_rows(f);
    CHECK(test.size() + train.size() == 101);
    seen.insert(test.begin(), test.end());
  }
  CHECK(seen.size() == 101);
  CHECK(std::set<std::size_t>(seen.begin(), seen.end()).size() == 101);

  CHECK_THROWS_AS(kfold_split(10, 1, 1), ArgumentError);
  CHECK_THROWS_AS(kfold_split(3, 4, 1), ArgumentError);
}

TEST_CASE("stratified kfold keeps per-class counts within one") {
  std::vector<double> labels(53, 0.0);
  for (std::size_t i = 0; i < 17; ++i) labels[i * 3] = 1.0;
  const auto folds = kfold_split(labels.size(), 5, 3, labels);
  for (double cls : {0.0, 1.0}) {
    std::vector<std::size_t> count(5, 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) ++count[folds.fold_of[i]];
    }
    const auto [lo, hi] = std::minmax_element(count.begin(), count.end());
    CHECK(*hi - *lo <= 1);
  }
}

TEST_CASE("simulate_sine shape, range, determinism and noiseless hook") {
  const auto [train, test] = simulate_sine(1000, 1000, 5);
  CHECK(train.n() == 1000);
  CHECK(test.n() == 1000);
  CHECK(train.m() == 1);
  const double bound = 10.0 * std::numbers::pi;
  for (const auto* d : {&train, &test}) {
    for (std::size_t i = 0; i < d->n(); ++i) {
      CHECK(d->x(i, 0) > -bound);
      CHECK(d->x(i, 0) < bound);
    }
  }
  const auto again = simulate_sine(1000, 1000, 5);
  CHECK(again.first.x == train.x);
  CHECK(again.first.y == train.y);
  CHECK(train.x != test.x);

  // Residual noise has roughly the requested spread.
  double ss = 0.0;
  for (std::size_t i = 0; i < train.n(); ++i) {
    const double r = train.y[i] - std::sin(train.x(i, 0));
    ss += r * r;
  }
  CHECK(std::sqrt(ss / 1000.0) == doctest::Approx(0.1).epsilon(0.1));

  const auto clean = simulate_sine(200, 10, 5, 0.0).first;
  for (std::size_t i = 0; i < clean.n(); ++i) CHECK(clean.y[i] == std::sin(clean.x(i, 0)));
}
