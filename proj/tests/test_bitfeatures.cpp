#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "rbr/bit_matrix.hpp"
#include "rbr/error.hpp"
#include "rbr/features.hpp"
#include "rbr/kernels.hpp"
#include "rbr/parallel.hpp"

using namespace rbr;

namespace {

Matrix random_matrix(std::size_t n, std::size_t m, std::mt19937_64& rng) {
  Matrix x(n, m);
  std::normal_distribution<double> normal;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) x(i, j) = normal(rng);
  }
  return x;
}

double dot(std::span<const double> a, std::span<const double> b) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return static_cast<double>(s);
}

bool tail_is_zero(const BitMatrix& f) {
  const std::size_t tail = f.rows() % 64;
  if (tail == 0 || f.words_per_column() == 0) return true;
  const std::uint64_t mask = ~((std::uint64_t{1} << tail) - 1);
  for (std::size_t j = 0; j < f.cols(); ++j) {
    if (f.column(j).back() & mask) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("BitMatrix layout and accessors") {
  BitMatrix f(70, 3);
  CHECK(f.words_per_column() == 2);
  CHECK(f.storage_bytes() == 3 * 2 * 8);
  f.fill_ones(0);
  CHECK(f.popcount(0) == 70);
  CHECK(tail_is_zero(f));
  f.set(65, 2, true);
  CHECK(f.get(65, 2));
  CHECK(f.column(2)[1] == (std::uint64_t{1} << 1));
  f.set(65, 2, false);
  CHECK(f.popcount(2) == 0);
}

TEST_CASE("select_rows gathers bits in the requested order") {
  std::mt19937_64 rng(3);
  const BitMatrix f = oracle::random_bits(130, 9, rng);
  const std::vector<std::size_t> rows = {129, 0, 64, 63, 5, 5, 100};
  const BitMatrix g = f.select_rows(rows);
  CHECK(g.rows() == rows.size());
  CHECK(tail_is_zero(g));
  for (std::size_t j = 0; j < f.cols(); ++j) {
    for (std::size_t r = 0; r < rows.size(); ++r) CHECK(g.get(r, j) == f.get(rows[r], j));
  }
  CHECK_THROWS_AS(f.select_rows(std::vector<std::size_t>{130}), ArgumentError);
}

TEST_CASE("score and correlate trivial cases") {
  std::mt19937_64 rng(11);
  const BitMatrix f = oracle::random_bits(37, 12, rng);

  CHECK(score(f, std::vector<double>(12, 0.0)) == std::vector<double>(37, 0.0));
  std::vector<double> intercept(12, 0.0);
  intercept[0] = 2.5;
  CHECK(score(f, intercept) == std::vector<double>(37, 2.5));

  CHECK(correlate(f, std::vector<double>(37, 0.0)) == std::vector<double>(12, 0.0));
  const auto r = oracle::random_vector(37, rng);
  const auto g = correlate(f, r);
  double total = 0.0;
  for (double v : r) total += v;
  CHECK(g[0] == doctest::Approx(total).epsilon(1e-12));

  CHECK_THROWS_AS(score(f, std::vector<double>(11)), ArgumentError);
  CHECK_THROWS_AS(correlate(f, std::vector<double>(36)), ArgumentError);
}

TEST_CASE("packed kernels match the dense oracle and the reference kernels") {
  std::mt19937_64 rng(2024);
  // Fixed 8 x 16 instance plus random shapes, including word boundaries.
  std::vector<std::pair<std::size_t, std::size_t>> shapes = {{8, 16}, {1, 1}, {64, 3}, {65, 40}, {256, 256}};
  std::uniform_int_distribution<std::size_t> dim(1, 256);
  for (int t = 0; t < 30; ++t) shapes.emplace_back(dim(rng), dim(rng));

  for (const auto& [n, k] : shapes) {
    CAPTURE(n);
    CAPTURE(k);
    const BitMatrix f = oracle::random_bits(n, k, rng);
    const auto dense = oracle::to_dense(f);
    const auto beta = oracle::random_vector(k, rng);
    const auto r = oracle::random_vector(n, rng);

    const auto s_dense = oracle::dense_score(dense, beta);
    const auto g_dense = oracle::dense_correlate(dense, k, r);
    CHECK(oracle::relative_error(score(f, beta), s_dense) < 1e-10);
    CHECK(oracle::relative_error(reference::score(f, beta), s_dense) < 1e-10);
    CHECK(oracle::relative_error(correlate(f, r), g_dense) < 1e-10);
    CHECK(oracle::relative_error(reference::correlate(f, r), g_dense) < 1e-10);

    const double lhs = dot(score(f, beta), r);
    const double rhs = dot(beta, correlate(f, r));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max({std::abs(lhs), std::abs(rhs), 1.0}));
  }
}

TEST_CASE("kernels give the same answer for every thread count") {
  std::mt19937_64 rng(5);
  const BitMatrix f = oracle::random_bits(300, 20000, rng);
  const auto beta = oracle::random_vector(f.cols(), rng);
  const auto r = oracle::random_vector(f.rows(), rng);
  std::vector<double> s1, g1;
  {
    ThreadCountScope one(1);
    s1 = score(f, beta);
    g1 = correlate(f, r);
  }
  ThreadCountScope many(8);
  CHECK(score(f, beta) == s1);
  CHECK(correlate(f, r) == g1);
}

TEST_CASE("hand-built bit: weight 1 on variable 0, threshold 0") {
  FeatureBank bank;
  bank.m = 1;
  bank.specs.push_back({{0}, {1.0}, 0.0});

  Matrix train(3, 1);
  train(0, 0) = -1.0;
  train(1, 0) = 0.0;
  train(2, 0) = 2.0;
  const BitMatrix a = apply_bank(bank, train);
  CHECK_FALSE(a.get(0, 1));
  CHECK(a.get(1, 1));
  CHECK(a.get(2, 1));
  CHECK(a.popcount(0) == 3);

  Matrix test(2, 1);
  test(0, 0) = -5.0;
  test(1, 0) = 5.0;
  const BitMatrix b = apply_bank(bank, test);
  CHECK_FALSE(b.get(0, 1));
  CHECK(b.get(1, 1));

  const BitMatrix empty = apply_bank(bank, Matrix(0, 1));
  CHECK(empty.rows() == 0);
  CHECK(empty.cols() == 2);
  CHECK(empty.storage_bytes() == 0);

  CHECK_THROWS_AS(apply_bank(bank, Matrix(2, 2)), ArgumentError);
}

TEST_CASE("generate_bank follows the random-bit recipe") {
  std::mt19937_64 rng(8);
  const Matrix x = random_matrix(150, 5, rng);
  const auto [bank, bits] = generate_bank(x, 800, 17);
  CHECK(bank.k() == 800);
  CHECK(bits.cols() == 800);
  CHECK(bits.rows() == 150);
  CHECK(bits.popcount(0) == 150);
  CHECK(tail_is_zero(bits));
  CHECK_NOTHROW(validate(bank));

  std::set<std::size_t> sizes;
  std::set<std::uint32_t> vars;
  for (std::size_t j = 1; j < bank.k(); ++j) {
    const auto& spec = bank.specs[j - 1];
    sizes.insert(spec.var_indices.size());
    vars.insert(spec.var_indices.begin(), spec.var_indices.end());
    CHECK(std::set<std::uint32_t>(spec.var_indices.begin(), spec.var_indices.end()).size() ==
          spec.var_indices.size());
    // Threshold is one of the projected training values; bits are z >= T.
    bool threshold_is_sample = false;
    std::size_t ones = 0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      double z = 0.0;
      for (std::size_t t = 0; t < spec.var_indices.size(); ++t) z += spec.weights[t] * x(i, spec.var_indices[t]);
      threshold_is_sample |= z == spec.threshold;
      CHECK(bits.get(i, j) == (z >= spec.threshold));
      ones += z >= spec.threshold;
    }
    CHECK(threshold_is_sample);
    CHECK(ones >= 1);
  }
  CHECK(sizes == std::set<std::size_t>{1, 2, 3});
  CHECK(vars.size() == 5);

  CHECK(apply_bank(bank, x) == bits);
}

TEST_CASE("generate_bank with one input variable uses singleton subsets") {
  Matrix x(4, 1);
  for (std::size_t i = 0; i < 4; ++i) x(i, 0) = static_cast<double>(i);
  const auto [bank, bits] = generate_bank(x, 50, 1);
  for (const auto& spec : bank.specs) CHECK(spec.var_indices == std::vector<std::uint32_t>{0});
}

TEST_CASE("generate_bank is deterministic and thread-count independent") {
  std::mt19937_64 rng(9);
  const Matrix x = random_matrix(90, 4, rng);
  std::pair<FeatureBank, BitMatrix> one;
  {
    ThreadCountScope t(1);
    one = generate_bank(x, 3000, 5);
  }
  ThreadCountScope t(8);
  const auto many = generate_bank(x, 3000, 5);
  CHECK(many.first == one.first);
  CHECK(many.second == one.second);
  CHECK_FALSE(generate_bank(x, 3000, 6).second == one.second);
}

TEST_CASE("generate_bank rejects degenerate requests") {
  Matrix x(5, 2, 1.0);
  CHECK_THROWS_AS(generate_bank(x, 1, 0), ArgumentError);
  CHECK_THROWS_AS(generate_bank(Matrix(1, 2), 10, 0), ArgumentError);
  CHECK_THROWS_AS(generate_bank(Matrix(5, 0), 10, 0), ArgumentError);
}

TEST_CASE("bank validation catches malformed specs") {
  FeatureBank bank;
  bank.m = 2;
  bank.specs.push_back({{0, 0}, {1.0, 1.0}, 0.0});
  CHECK_THROWS_AS(validate(bank), ModelError);
  bank.specs[0] = {{2}, {1.0}, 0.0};
  CHECK_THROWS_AS(validate(bank), ModelError);
  bank.specs[0] = {{0}, {1.0, 2.0}, 0.0};
  CHECK_THROWS_AS(validate(bank), ModelError);
  bank.specs[0] = {{0, 1}, {1.0, -1.0}, 0.5};
  CHECK_NOTHROW(validate(bank));
}

TEST_CASE("packed storage is within 5% of n*K/8 bytes") {
  const std::size_t n = 1000;
  const std::size_t k = 5000;
  const BitMatrix f(n, k);
  CHECK(static_cast<double>(f.storage_bytes()) <= 1.05 * static_cast<double>(n * k) / 8.0);
}
