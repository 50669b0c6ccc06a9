#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rbr/dataio.hpp"
#include "rbr/model.hpp"

namespace rbr {

/// Brute-force k-nearest-neighbour prediction on predictors standardized with
/// the training statistics. Regression averages the neighbours' targets;
/// classification takes a majority vote with ties going to label 0 (values
/// then hold the fraction of neighbours labelled 1). Equal distances are
/// broken by the lower training row index.
Predictions knn_predict(const Dataset& train, const Matrix& test_x, std::size_t k_neighbors);

/// Indices of the k nearest training rows for one standardized query row,
/// nearest first.
std::vector<std::size_t> nearest_rows(const Matrix& train_std, std::span<const double> query,
                                      std::size_t k_neighbors);

inline std::vector<std::size_t> default_knn_grid() { return {1, 3, 5, 7, 9}; }

/// Outer k-fold evaluation of KNN; each fold chooses its neighbour count from
/// `grid` by an inner 5-fold split of its training rows.
EvalMetrics knn_cross_validate(const Dataset& data, std::span<const std::size_t> grid,
                               std::size_t folds, std::uint64_t seed);

}  // namespace rbr
