#pragma once

#include <span>
#include <vector>

#include "rbr/bit_matrix.hpp"

namespace rbr {

// Bit-matrix/real-vector products used by the objectives.
//
//   score:     s_i = sum over set bits (i, j) of beta_j     (F * beta)
//   correlate: g_j = sum over set bits (i, j) of r_i        (F^T * r)
//
// The production kernels read the packed words four rows at a time and
// resolve each nibble through a 16-entry table of partial sums, so the work
// per column is about n / 4 table operations on L1-resident data. They are OpenMP-parallel
// and their results do not depend on the thread count. Summation order differs
// from the reference kernels; the two agree to about 1e-10 relative.

std::vector<double> score(const BitMatrix& f, std::span<const double> beta);
void score_into(const BitMatrix& f, std::span<const double> beta, std::span<double> out);

std::vector<double> correlate(const BitMatrix& f, std::span<const double> r);
void correlate_into(const BitMatrix& f, std::span<const double> r, std::span<double> out);

namespace reference {

/// Serial bit-at-a-time kernels. score sums columns in ascending j and
/// correlate sums rows in ascending i; these define the reference semantics.
std::vector<double> score(const BitMatrix& f, std::span<const double> beta);
std::vector<double> correlate(const BitMatrix& f, std::span<const double> r);

}  // namespace reference

}  // namespace rbr
