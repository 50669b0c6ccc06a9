#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "rbr/bit_matrix.hpp"

namespace rbr {

/// Evaluates the objective at beta, writes the gradient into grad (same
/// length) and returns the loss.
using Objective = std::function<double(std::span<const double> beta, std::span<double> grad)>;

struct LossGrad {
  double loss = 0.0;
  std::vector<double> gradient;
};

/// Ridge loss: sum_i (y_i - s_i)^2 + lambda/2 * sum_{j>=1} beta_j^2, with s = F beta.
/// Column 0 is the intercept and carries no penalty.
LossGrad ridge_loss_grad(const BitMatrix& f, std::span<const double> y,
                         std::span<const double> beta, double lambda);

/// Logistic loss: sum_i [softplus(s_i) - y_i s_i] + lambda/2 * sum_{j>=1} beta_j^2.
/// This equals the cross-entropy of y against sigmoid(s) without overflowing.
LossGrad logistic_loss_grad(const BitMatrix& f, std::span<const double> y,
                            std::span<const double> beta, double lambda);

/// Reusable Objective wrappers around the two losses. They hold references to
/// f and y, which must outlive the returned function.
Objective make_ridge_objective(const BitMatrix& f, std::span<const double> y, double lambda);
Objective make_logistic_objective(const BitMatrix& f, std::span<const double> y, double lambda);

/// Numerically stable log(1 + exp(s)) and 1 / (1 + exp(-s)).
double softplus(double s) noexcept;
double sigmoid(double s) noexcept;

struct LbfgsConfig {
  std::size_t history_size = 20;
  std::size_t max_iterations = 500;
  /// Converged when max_j |grad_j| <= gradient_tolerance * max(1, |loss|).
  double gradient_tolerance = 1e-6;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  /// Trial steps allowed in one line search before it is declared failed.
  std::size_t max_line_search_steps = 50;
};

/// Throws ArgumentError unless 0 < c1 < c2 < 1 and history >= 1.
void validate(const LbfgsConfig& config);

struct SolveReport {
  std::vector<double> beta;
  double final_loss = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  bool converged = false;
  /// Loss at the start point followed by the loss at every accepted iterate.
  std::vector<double> loss_history;
};

struct IterationInfo {
  std::size_t iteration = 0;
  double loss = 0.0;
  double gradient_norm = 0.0;  // infinity norm
};

using IterationObserver = std::function<void(const IterationInfo&)>;

/// Two-loop-recursion L-BFGS with a strong-Wolfe line search.
SolveReport lbfgs_minimize(const Objective& objective, std::vector<double> beta0,
                           const LbfgsConfig& config, const IterationObserver& observer = {});

}  // namespace rbr
