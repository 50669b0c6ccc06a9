#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rbr {

/// n x k binary matrix packed 64 rows per word, feature-major: column j
/// occupies words [j * words_per_column, (j + 1) * words_per_column), and row
/// i of that column is bit (i % 64) of word i / 64. Bits past row n are zero.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t n, std::size_t k);

  std::size_t rows() const noexcept { return n_; }
  std::size_t cols() const noexcept { return k_; }
  std::size_t words_per_column() const noexcept { return wpc_; }

  static constexpr std::size_t words_for(std::size_t n) noexcept { return (n + 63) / 64; }

  std::span<std::uint64_t> column(std::size_t j) noexcept { return {words_.data() + j * wpc_, wpc_}; }
  std::span<const std::uint64_t> column(std::size_t j) const noexcept {
    return {words_.data() + j * wpc_, wpc_};
  }

  bool get(std::size_t i, std::size_t j) const noexcept {
    return (words_[j * wpc_ + i / 64] >> (i % 64)) & 1U;
  }
  void set(std::size_t i, std::size_t j, bool value) noexcept {
    auto& word = words_[j * wpc_ + i / 64];
    const std::uint64_t mask = std::uint64_t{1} << (i % 64);
    word = value ? (word | mask) : (word & ~mask);
  }

  /// Sets every row of column j to one (tail padding stays zero).
  void fill_ones(std::size_t j) noexcept;

  std::size_t popcount(std::size_t j) const noexcept;

  /// Bytes held by the packed words.
  std::size_t storage_bytes() const noexcept { return words_.size() * sizeof(std::uint64_t); }

  std::span<const std::uint64_t> words() const noexcept { return words_; }

  /// New matrix made of the listed rows, in order.
  BitMatrix select_rows(std::span<const std::size_t> rows) const;

  bool operator==(const BitMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  std::size_t wpc_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace rbr
