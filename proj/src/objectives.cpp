#include <algorithm>
#include <cmath>
#include <memory>

#include "rbr/error.hpp"
#include "rbr/kernels.hpp"
#include "rbr/solver.hpp"

namespace rbr {

namespace {

void check_dims(const BitMatrix& f, std::span<const double> y, std::size_t beta_size,
                double lambda) {
  if (y.size() != f.rows()) throw ArgumentError("objective: y length must equal row count");
  if (beta_size != f.cols()) throw ArgumentError("objective: beta length must equal column count");
  if (!(lambda >= 0.0)) throw ArgumentError("objective: lambda must be >= 0");
}

void check_binary(std::span<const double> y) {
  for (double v : y) {
    if (v != 0.0 && v != 1.0) throw ArgumentError("logistic objective: y must be 0 or 1");
  }
}

// Adds lambda/2 * sum_{j>=1} beta_j^2 to the loss and lambda * beta_j to grad_j.
double add_penalty(std::span<const double> beta, std::span<double> grad, double lambda) {
  double sq = 0.0;
  for (std::size_t j = 1; j < beta.size(); ++j) {
    sq += beta[j] * beta[j];
    grad[j] += lambda * beta[j];
  }
  return 0.5 * lambda * sq;
}

class RidgeObjective {
 public:
  RidgeObjective(const BitMatrix& f, std::span<const double> y, double lambda)
      : f_(f), y_(y), lambda_(lambda), work_(f.rows()) {}

  double operator()(std::span<const double> beta, std::span<double> grad) {
    score_into(f_, beta, work_);
    double loss = 0.0;
    for (std::size_t i = 0; i < work_.size(); ++i) {
      const double r = y_[i] - work_[i];
      loss += r * r;
      work_[i] = -2.0 * r;
    }
    correlate_into(f_, work_, grad);
    return loss + add_penalty(beta, grad, lambda_);
  }

 private:
  const BitMatrix& f_;
  std::span<const double> y_;
  double lambda_;
  std::vector<double> work_;
};

class LogisticObjective {
 public:
  LogisticObjective(const BitMatrix& f, std::span<const double> y, double lambda)
      : f_(f), y_(y), lambda_(lambda), work_(f.rows()) {}

  double operator()(std::span<const double> beta, std::span<double> grad) {
    score_into(f_, beta, work_);
    double loss = 0.0;
    for (std::size_t i = 0; i < work_.size(); ++i) {
      const double s = work_[i];
      loss += softplus(s) - y_[i] * s;
      work_[i] = sigmoid(s) - y_[i];
    }
    correlate_into(f_, work_, grad);
    return loss + add_penalty(beta, grad, lambda_);
  }

 private:
  const BitMatrix& f_;
  std::span<const double> y_;
  double lambda_;
  std::vector<double> work_;
};

}  // namespace

double softplus(double s) noexcept { return std::max(s, 0.0) + std::log1p(std::exp(-std::abs(s))); }

double sigmoid(double s) noexcept {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

LossGrad ridge_loss_grad(const BitMatrix& f, std::span<const double> y,
                         std::span<const double> beta, double lambda) {
  check_dims(f, y, beta.size(), lambda);
  LossGrad out;
  out.gradient.resize(beta.size());
  out.loss = RidgeObjective(f, y, lambda)(beta, out.gradient);
  return out;
}

LossGrad logistic_loss_grad(const BitMatrix& f, std::span<const double> y,
                            std::span<const double> beta, double lambda) {
  check_dims(f, y, beta.size(), lambda);
  check_binary(y);
  LossGrad out;
  out.gradient.resize(beta.size());
  out.loss = LogisticObjective(f, y, lambda)(beta, out.gradient);
  return out;
}

Objective make_ridge_objective(const BitMatrix& f, std::span<const double> y, double lambda) {
  check_dims(f, y, f.cols(), lambda);
  auto impl = std::make_shared<RidgeObjective>(f, y, lambda);
  return [impl](std::span<const double> beta, std::span<double> grad) {
    return (*impl)(beta, grad);
  };
}

Objective make_logistic_objective(const BitMatrix& f, std::span<const double> y, double lambda) {
  check_dims(f, y, f.cols(), lambda);
  check_binary(y);
  auto impl = std::make_shared<LogisticObjective>(f, y, lambda);
  return [impl](std::span<const double> beta, std::span<double> grad) {
    return (*impl)(beta, grad);
  };
}

}  // namespace rbr
