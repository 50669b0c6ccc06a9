#include <bit>

#include "rbr/error.hpp"
#include "rbr/kernels.hpp"

namespace rbr::reference {

std::vector<double> score(const BitMatrix& f, std::span<const double> beta) {
  if (beta.size() != f.cols()) throw ArgumentError("score: beta length must equal column count");
  std::vector<double> out(f.rows(), 0.0);
  for (std::size_t j = 0; j < f.cols(); ++j) {
    const auto col = f.column(j);
    for (std::size_t w = 0; w < col.size(); ++w) {
      for (std::uint64_t word = col[w]; word != 0; word &= word - 1) {
        out[w * 64 + static_cast<std::size_t>(std::countr_zero(word))] += beta[j];
      }
    }
  }
  return out;
}

std::vector<double> correlate(const BitMatrix& f, std::span<const double> r) {
  if (r.size() != f.rows()) throw ArgumentError("correlate: r length must equal row count");
  std::vector<double> out(f.cols(), 0.0);
  for (std::size_t j = 0; j < f.cols(); ++j) {
    const auto col = f.column(j);
    double sum = 0.0;
    for (std::size_t w = 0; w < col.size(); ++w) {
      for (std::uint64_t word = col[w]; word != 0; word &= word - 1) {
        sum += r[w * 64 + static_cast<std::size_t>(std::countr_zero(word))];
      }
    }
    out[j] = sum;
  }
  return out;
}

}  // namespace rbr::reference
