#include "rbr/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "rbr/error.hpp"
#include "rbr/random.hpp"

namespace rbr {

namespace {

FeatureSpec draw_spec(Substream& rng, std::size_t m) {
  const std::size_t max_size = std::min(m, kMaxSubsetSize);
  const std::size_t size = 1 + rng.uniform_index(max_size);

  FeatureSpec spec;
  spec.var_indices.reserve(size);
  while (spec.var_indices.size() < size) {
    const auto candidate = static_cast<std::uint32_t>(rng.uniform_index(m));
    if (std::ranges::find(spec.var_indices, candidate) == spec.var_indices.end()) {
      spec.var_indices.push_back(candidate);
    }
  }
  spec.weights.resize(size);
  for (double& w : spec.weights) w = rng.normal();
  return spec;
}

// Packs (z_i >= threshold) into one column.
template <typename ZAt>
void fill_column(std::span<std::uint64_t> col, std::size_t n, double threshold, ZAt&& z_at) {
  for (std::size_t w = 0; w < col.size(); ++w) {
    const std::size_t begin = w * 64;
    const std::size_t end = std::min(begin + 64, n);
    std::uint64_t word = 0;
    for (std::size_t i = begin; i < end; ++i) {
      word |= static_cast<std::uint64_t>(z_at(i) >= threshold) << (i - begin);
    }
    col[w] = word;
  }
}

}  // namespace

void validate(const FeatureBank& bank) {
  if (bank.m == 0) throw ModelError("feature bank has zero input width");
  const std::size_t max_size = std::min(bank.m, kMaxSubsetSize);
  for (std::size_t s = 0; s < bank.specs.size(); ++s) {
    const auto& spec = bank.specs[s];
    std::ostringstream where;
    where << "feature " << (s + 1) << ": ";
    if (spec.var_indices.empty() || spec.var_indices.size() > max_size) {
      throw ModelError(where.str() + "subset size out of range");
    }
    if (spec.weights.size() != spec.var_indices.size()) {
      throw ModelError(where.str() + "weight count does not match index count");
    }
    for (std::size_t a = 0; a < spec.var_indices.size(); ++a) {
      if (spec.var_indices[a] >= bank.m) throw ModelError(where.str() + "variable index out of range");
      for (std::size_t b = 0; b < a; ++b) {
        if (spec.var_indices[a] == spec.var_indices[b]) {
          throw ModelError(where.str() + "duplicate variable index");
        }
      }
      if (!std::isfinite(spec.weights[a])) throw ModelError(where.str() + "non-finite weight");
    }
    if (!std::isfinite(spec.threshold)) throw ModelError(where.str() + "non-finite threshold");
  }
}

std::pair<FeatureBank, BitMatrix> generate_bank(const Matrix& x_std, std::size_t k,
                                                std::uint64_t seed) {
  if (k < 2) throw ArgumentError("generate_bank: k must be at least 2");
  if (x_std.rows() < 2 || x_std.cols() < 1) {
    throw ArgumentError("generate_bank: need at least 2 rows and 1 column");
  }
  const std::size_t n = x_std.rows();
  const std::size_t m = x_std.cols();

  FeatureBank bank;
  bank.seed = seed;
  bank.m = m;
  bank.specs.resize(k - 1);
  BitMatrix bits(n, k);
  bits.fill_ones(0);

#pragma omp parallel
  {
    std::vector<double> z(n);
#pragma omp for schedule(dynamic, 256)
    for (std::ptrdiff_t jj = 1; jj < static_cast<std::ptrdiff_t>(k); ++jj) {
      const auto j = static_cast<std::size_t>(jj);
      Substream rng(seed, j);
      FeatureSpec spec = draw_spec(rng, m);
      for (std::size_t i = 0; i < n; ++i) z[i] = spec.project(x_std.row(i));
      spec.threshold = z[rng.uniform_index(n)];
      fill_column(bits.column(j), n, spec.threshold, [&](std::size_t i) { return z[i]; });
      bank.specs[j - 1] = std::move(spec);
    }
  }
  return {std::move(bank), std::move(bits)};
}

BitMatrix apply_bank(const FeatureBank& bank, const Matrix& x_std) {
  if (x_std.cols() != bank.m) {
    std::ostringstream msg;
    msg << "feature bank expects " << bank.m << " columns, got " << x_std.cols();
    throw ArgumentError(msg.str());
  }
  const std::size_t n = x_std.rows();
  const std::size_t k = bank.k();
  BitMatrix bits(n, k);
  if (n == 0) return bits;
  bits.fill_ones(0);

#pragma omp parallel for schedule(dynamic, 256)
  for (std::ptrdiff_t jj = 1; jj < static_cast<std::ptrdiff_t>(k); ++jj) {
    const auto j = static_cast<std::size_t>(jj);
    const FeatureSpec& spec = bank.specs[j - 1];
    fill_column(bits.column(j), n, spec.threshold,
                [&](std::size_t i) { return spec.project(x_std.row(i)); });
  }
  return bits;
}

}  // namespace rbr
