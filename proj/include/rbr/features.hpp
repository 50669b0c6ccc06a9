#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rbr/bit_matrix.hpp"
#include "rbr/dataio.hpp"

namespace rbr {

/// Maximum number of input variables combined by one random bit.
inline constexpr std::size_t kMaxSubsetSize = 3;

/// Recipe for one random bit: bit = (sum_t weights[t] * x[var_indices[t]]) >= threshold.
struct FeatureSpec {
  std::vector<std::uint32_t> var_indices;
  std::vector<double> weights;
  double threshold = 0.0;

  /// Weighted sum of the selected variables of one standardized row.
  double project(std::span<const double> row) const noexcept {
    double z = 0.0;
    for (std::size_t t = 0; t < var_indices.size(); ++t) z += weights[t] * row[var_indices[t]];
    return z;
  }

  bool operator==(const FeatureSpec&) const = default;
};

/// Recipes for columns 1..k-1 of the bit matrix (column 0 is the intercept).
struct FeatureBank {
  std::vector<FeatureSpec> specs;
  std::uint64_t seed = 0;
  std::size_t m = 0;

  /// Total column count including the intercept.
  std::size_t k() const noexcept { return specs.size() + 1; }

  bool operator==(const FeatureBank&) const = default;
};

/// Throws ModelError if a spec breaks the FeatureSpec invariants for width m.
void validate(const FeatureBank& bank);

/// Draws k - 1 random bits from standardized training rows. Column j >= 1
/// uses only Substream(seed, j), so the result does not depend on thread count.
std::pair<FeatureBank, BitMatrix> generate_bank(const Matrix& x_std, std::size_t k,
                                                std::uint64_t seed);

/// Evaluates a stored bank on new standardized rows.
BitMatrix apply_bank(const FeatureBank& bank, const Matrix& x_std);

}  // namespace rbr
