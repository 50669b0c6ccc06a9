#include "rbr/bit_matrix.hpp"

#include <algorithm>

#include "rbr/error.hpp"

namespace rbr {

BitMatrix::BitMatrix(std::size_t n, std::size_t k)
    : n_(n), k_(k), wpc_(words_for(n)), words_(k * wpc_, 0) {}

void BitMatrix::fill_ones(std::size_t j) noexcept {
  auto col = column(j);
  std::ranges::fill(col, ~std::uint64_t{0});
  if (const std::size_t tail = n_ % 64; tail != 0) {
    col.back() = (std::uint64_t{1} << tail) - 1;
  }
}

std::size_t BitMatrix::popcount(std::size_t j) const noexcept {
  std::size_t total = 0;
  for (auto word : column(j)) total += static_cast<std::size_t>(std::popcount(word));
  return total;
}

BitMatrix BitMatrix::select_rows(std::span<const std::size_t> rows) const {
  for (auto r : rows) {
    if (r >= n_) throw ArgumentError("select_rows: row index out of range");
  }
  BitMatrix out(rows.size(), k_);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(k_); ++j) {
    const auto src = column(static_cast<std::size_t>(j));
    auto dst = out.column(static_cast<std::size_t>(j));
    for (std::size_t w = 0; w < out.wpc_; ++w) {
      const std::size_t begin = w * 64;
      const std::size_t end = std::min(begin + 64, rows.size());
      std::uint64_t word = 0;
      for (std::size_t i = begin; i < end; ++i) {
        const std::size_t r = rows[i];
        word |= ((src[r / 64] >> (r % 64)) & 1U) << (i - begin);
      }
      dst[w] = word;
    }
  }
  return out;
}

}  // namespace rbr
