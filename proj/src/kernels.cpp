#include "rbr/kernels.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>

#include "rbr/error.hpp"

namespace rbr {

namespace {

// Columns per score block. Fixed (not derived from the thread count) so the
// reduction order, and therefore the result, is the same on any machine.
constexpr std::size_t kScoreBlockColumns = 16384;
// Words handled together in one pass over a column block of score. Score
// accumulates into 16-entry nibble tables so a whole tile stays in L1.
constexpr std::size_t kScoreTileWords = 8;

using NibbleTable = std::array<double, 16>;

// For each bit t of the nibble, the sum of the table entries whose index has
// bit t set.
void expand_nibble_table(const NibbleTable& table, double* out) {
  for (std::size_t t = 0; t < 4; ++t) {
    const std::size_t bit = std::size_t{1} << t;
    double sum = 0.0;
    for (std::size_t p = bit; p < 16; p = (p + 1) | bit) sum += table[p];
    out[t] += sum;
  }
}

}  // namespace

std::vector<double> score(const BitMatrix& f, std::span<const double> beta) {
  std::vector<double> out(f.rows());
  score_into(f, beta, out);
  return out;
}

void score_into(const BitMatrix& f, std::span<const double> beta, std::span<double> out) {
  if (beta.size() != f.cols()) throw ArgumentError("score: beta length must equal column count");
  if (out.size() != f.rows()) throw ArgumentError("score: output length must equal row count");
  const std::size_t n = f.rows();
  const std::size_t k = f.cols();
  const std::size_t wpc = f.words_per_column();
  std::ranges::fill(out, 0.0);
  if (n == 0 || k == 0) return;

  const std::size_t blocks = (k + kScoreBlockColumns - 1) / kScoreBlockColumns;
  const std::size_t tiles = (wpc + kScoreTileWords - 1) / kScoreTileWords;
  // One partial score vector per column block, padded to whole words.
  const std::size_t stride = wpc * 64;
  std::vector<double> partial(blocks * stride, 0.0);

#pragma omp parallel
  {
    std::vector<NibbleTable> tables(kScoreTileWords * 16);
#pragma omp for collapse(2) schedule(dynamic, 1)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
      for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(tiles); ++t) {
        const std::size_t j0 = static_cast<std::size_t>(b) * kScoreBlockColumns;
        const std::size_t j1 = std::min(k, j0 + kScoreBlockColumns);
        const std::size_t w0 = static_cast<std::size_t>(t) * kScoreTileWords;
        const std::size_t tile = std::min(kScoreTileWords, wpc - w0);
        for (std::size_t q = 0; q < tile * 16; ++q) tables[q].fill(0.0);

        for (std::size_t j = j0; j < j1; ++j) {
          const double coef = beta[j];
          const std::uint64_t* col = f.column(j).data() + w0;
          for (std::size_t w = 0; w < tile; ++w) {
            const std::uint64_t word = col[w];
            NibbleTable* group = &tables[w * 16];
            for (std::size_t q = 0; q < 16; ++q) group[q][(word >> (4 * q)) & 0xF] += coef;
          }
        }

        double* dst = partial.data() + static_cast<std::size_t>(b) * stride + w0 * 64;
        for (std::size_t q = 0; q < tile * 16; ++q) expand_nibble_table(tables[q], dst + q * 4);
      }
    }

#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      double sum = 0.0;
      for (std::size_t b = 0; b < blocks; ++b) sum += partial[b * stride + static_cast<std::size_t>(i)];
      out[static_cast<std::size_t>(i)] = sum;
    }
  }
}

std::vector<double> correlate(const BitMatrix& f, std::span<const double> r) {
  std::vector<double> out(f.cols());
  correlate_into(f, r, out);
  return out;
}

void correlate_into(const BitMatrix& f, std::span<const double> r, std::span<double> out) {
  if (r.size() != f.rows()) throw ArgumentError("correlate: r length must equal row count");
  if (out.size() != f.cols()) throw ArgumentError("correlate: output length must equal column count");
  const std::size_t n = f.rows();
  const std::size_t k = f.cols();
  const std::size_t wpc = f.words_per_column();
  if (n == 0) {
    std::ranges::fill(out, 0.0);
    return;
  }

  // tables[g][p] = sum of r over the rows of group g selected by nibble p.
  // Nibble tables keep all lookups for a column within L1.
  const std::size_t groups = wpc * 16;
  std::vector<NibbleTable> tables(groups);

#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (std::ptrdiff_t g = 0; g < static_cast<std::ptrdiff_t>(groups); ++g) {
      std::array<double, 4> rows{};
      const std::size_t base = static_cast<std::size_t>(g) * 4;
      for (std::size_t t = 0; t < 4 && base + t < n; ++t) rows[t] = r[base + t];
      NibbleTable& table = tables[static_cast<std::size_t>(g)];
      table[0] = 0.0;
      for (std::size_t p = 1; p < 16; ++p) {
        table[p] = table[p & (p - 1)] + rows[static_cast<std::size_t>(std::countr_zero(p))];
      }
    }

#pragma omp for schedule(static)
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(k); ++j) {
      const std::uint64_t* col = f.column(static_cast<std::size_t>(j)).data();
      double acc[4] = {0.0, 0.0, 0.0, 0.0};
      for (std::size_t w = 0; w < wpc; ++w) {
        const std::uint64_t word = col[w];
        const NibbleTable* group = &tables[w * 16];
        for (std::size_t q = 0; q < 16; ++q) acc[q & 3] += group[q][(word >> (4 * q)) & 0xF];
      }
      out[static_cast<std::size_t>(j)] = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    }
  }
}

}  // namespace rbr
