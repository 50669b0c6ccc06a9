#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "rbr/error.hpp"
#include "rbr/solver.hpp"

namespace rbr {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double inf_norm(std::span<const double> v) {
  double out = 0.0;
  for (double x : v) out = std::max(out, std::abs(x));
  return out;
}

bool all_finite(std::span<const double> v) {
  return std::ranges::all_of(v, [](double x) { return std::isfinite(x); });
}

// Curvature pairs of the last `capacity` accepted steps, oldest first.
class History {
 public:
  History(std::size_t capacity, std::size_t dim) : s_(capacity), y_(capacity), rho_(capacity) {
    for (auto& v : s_) v.resize(dim);
    for (auto& v : y_) v.resize(dim);
  }

  std::size_t size() const noexcept { return size_; }
  void clear() noexcept { size_ = 0; }

  // Slot for the next pair; evicts the oldest pair when full.
  std::pair<std::vector<double>&, std::vector<double>&> next_slot() {
    const std::size_t slot = (head_ + size_) % s_.size();
    return {s_[slot], y_[slot]};
  }

  void commit(double ys) {
    const std::size_t slot = (head_ + size_) % s_.size();
    rho_[slot] = 1.0 / ys;
    if (size_ < s_.size()) {
      ++size_;
    } else {
      head_ = (head_ + 1) % s_.size();
    }
  }

  // d = -H g via the two-loop recursion.
  void apply(std::span<const double> g, std::span<double> d, std::vector<double>& alpha) const {
    std::ranges::transform(g, d.begin(), [](double v) { return -v; });
    alpha.resize(size_);
    for (std::size_t t = size_; t-- > 0;) {
      const std::size_t slot = (head_ + t) % s_.size();
      alpha[t] = rho_[slot] * dot(s_[slot], d);
      for (std::size_t j = 0; j < d.size(); ++j) d[j] -= alpha[t] * y_[slot][j];
    }
    if (size_ > 0) {
      const std::size_t last = (head_ + size_ - 1) % s_.size();
      const double gamma = 1.0 / (rho_[last] * dot(y_[last], y_[last]));
      for (double& v : d) v *= gamma;
    }
    for (std::size_t t = 0; t < size_; ++t) {
      const std::size_t slot = (head_ + t) % s_.size();
      const double b = rho_[slot] * dot(y_[slot], d);
      for (std::size_t j = 0; j < d.size(); ++j) d[j] += (alpha[t] - b) * s_[slot][j];
    }
  }

 private:
  std::vector<std::vector<double>> s_;
  std::vector<std::vector<double>> y_;
  std::vector<double> rho_;
  std::size_t head_ = 0;
  std::size_t size_ = 0;
};

struct Point {
  double alpha = 0.0;
  double f = 0.0;
  double dg = 0.0;  // directional derivative along the search direction
  std::vector<double> x;
  std::vector<double> g;
};

// Minimizer of the cubic through two points, or NaN if it does not exist.
double cubic_step(const Point& a, const Point& b) {
  const double d1 = a.dg + b.dg - 3.0 * (a.f - b.f) / (a.alpha - b.alpha);
  const double disc = d1 * d1 - a.dg * b.dg;
  if (!(disc >= 0.0)) return std::numeric_limits<double>::quiet_NaN();
  const double d2 = std::copysign(std::sqrt(disc), b.alpha - a.alpha);
  const double denom = b.dg - a.dg + 2.0 * d2;
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return b.alpha - (b.alpha - a.alpha) * (b.dg + d2 - d1) / denom;
}

enum class SearchResult { kWolfe, kSufficientDecrease, kFailed };

class LineSearch {
 public:
  LineSearch(const Objective& objective, const LbfgsConfig& config, std::size_t dim)
      : objective_(objective), config_(config) {
    for (Point* p : {&cur_, &lo_}) {
      p->x.resize(dim);
      p->g.resize(dim);
    }
  }

  // Searches along d from (x0, f0, g0). On success the accepted point is
  // returned through `accepted`.
  SearchResult run(std::span<const double> x0, double f0, std::span<const double> d, double dg0,
                   double alpha_init, std::size_t& evaluations, Point*& accepted) {
    x0_ = x0;
    d_ = d;
    f0_ = f0;
    dg0_ = dg0;
    steps_ = 0;
    evaluations_ = &evaluations;

    Point prev;
    prev.alpha = 0.0;
    prev.f = f0;
    prev.dg = dg0;
    bool have_lo = false;  // lo_ holds a point with sufficient decrease

    double alpha = alpha_init;
    while (steps_ < config_.max_line_search_steps) {
      evaluate(alpha, cur_);
      if (!sufficient_decrease(cur_) || (steps_ > 1 && cur_.f >= prev.f)) {
        return zoom(prev, have_lo, scalar(cur_), accepted);
      }
      if (std::abs(cur_.dg) <= -config_.wolfe_c2 * dg0_) {
        accepted = &cur_;
        return SearchResult::kWolfe;
      }
      if (cur_.dg >= 0.0) {
        const Point hi = scalar(prev);
        std::swap(cur_, lo_);
        have_lo = true;
        return zoom(scalar(lo_), have_lo, hi, accepted);
      }
      prev = scalar(cur_);
      std::swap(cur_, lo_);
      have_lo = true;
      alpha *= 2.0;
    }
    return finish(have_lo, accepted);
  }

 private:
  static Point scalar(const Point& p) { return Point{p.alpha, p.f, p.dg, {}, {}}; }

  // Armijo on the loss, or its derivative form once loss differences are
  // down at rounding level (approximate Wolfe).
  bool sufficient_decrease(const Point& p) const {
    if (p.f <= f0_ + config_.wolfe_c1 * p.alpha * dg0_) return true;
    return p.f <= f0_ + kLossNoise * std::abs(f0_) && p.dg <= (2.0 * config_.wolfe_c1 - 1.0) * dg0_;
  }

  static constexpr double kLossNoise = 1e-10;

  void evaluate(double alpha, Point& p) {
    ++steps_;
    ++*evaluations_;
    p.alpha = alpha;
    for (std::size_t j = 0; j < p.x.size(); ++j) p.x[j] = x0_[j] + alpha * d_[j];
    const double f = objective_(p.x, p.g);
    p.f = std::isfinite(f) && all_finite(p.g) ? f : std::numeric_limits<double>::infinity();
    p.dg = std::isfinite(p.f) ? dot(p.g, d_) : std::numeric_limits<double>::quiet_NaN();
  }

  // lo satisfies sufficient decrease and has the lowest loss seen; the
  // interval between lo and hi contains a strong-Wolfe point.
  SearchResult zoom(Point lo, bool& have_lo, Point hi, Point*& accepted) {
    while (steps_ < config_.max_line_search_steps) {
      const double width = hi.alpha - lo.alpha;
      if (std::abs(width) <= 1e-16 * std::max(1.0, std::abs(lo.alpha))) break;
      double alpha = std::isfinite(hi.f) && std::isfinite(hi.dg) ? cubic_step(lo, hi)
                                                                   : std::numeric_limits<double>::quiet_NaN();
      const double a = std::min(lo.alpha, hi.alpha);
      const double b = std::max(lo.alpha, hi.alpha);
      if (!(alpha >= a + 0.1 * (b - a) && alpha <= b - 0.1 * (b - a))) alpha = 0.5 * (a + b);

      evaluate(alpha, cur_);
      if (!sufficient_decrease(cur_) || cur_.f >= lo.f) {
        hi = scalar(cur_);
        continue;
      }
      if (std::abs(cur_.dg) <= -config_.wolfe_c2 * dg0_) {
        accepted = &cur_;
        return SearchResult::kWolfe;
      }
      if (cur_.dg * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
      lo = scalar(cur_);
      std::swap(cur_, lo_);
      have_lo = true;
    }
    return finish(have_lo, accepted);
  }

  SearchResult finish(bool have_lo, Point*& accepted) {
    if (have_lo) {
      accepted = &lo_;
      return SearchResult::kSufficientDecrease;
    }
    return SearchResult::kFailed;
  }

  const Objective& objective_;
  const LbfgsConfig& config_;
  std::span<const double> x0_;
  std::span<const double> d_;
  double f0_ = 0.0;
  double dg0_ = 0.0;
  std::size_t steps_ = 0;
  std::size_t* evaluations_ = nullptr;
  Point cur_;
  Point lo_;
};

}  // namespace

void validate(const LbfgsConfig& config) {
  if (config.history_size < 1) throw ArgumentError("L-BFGS history size must be >= 1");
  if (!(config.wolfe_c1 > 0.0 && config.wolfe_c1 < config.wolfe_c2 && config.wolfe_c2 < 1.0)) {
    throw ArgumentError("L-BFGS needs 0 < c1 < c2 < 1");
  }
  if (!(config.gradient_tolerance >= 0.0)) throw ArgumentError("gradient tolerance must be >= 0");
  if (config.max_line_search_steps < 1) throw ArgumentError("line search needs at least one step");
}

SolveReport lbfgs_minimize(const Objective& objective, std::vector<double> beta0,
                           const LbfgsConfig& config, const IterationObserver& observer) {
  validate(config);
  const std::size_t dim = beta0.size();

  SolveReport report;
  report.beta = std::move(beta0);
  std::vector<double> grad(dim);
  double loss = objective(report.beta, grad);
  report.evaluations = 1;
  if (!std::isfinite(loss) || !all_finite(grad)) {
    throw Error("L-BFGS: objective is not finite at the starting point");
  }
  report.loss_history.push_back(loss);

  History history(config.history_size, dim);
  LineSearch search(objective, config, dim);
  std::vector<double> direction(dim);
  std::vector<double> two_loop_alpha;

  for (;;) {
    const double gnorm = inf_norm(grad);
    if (gnorm <= config.gradient_tolerance * std::max(1.0, std::abs(loss))) {
      report.converged = true;
      break;
    }
    if (report.iterations >= config.max_iterations) break;

    history.apply(grad, direction, two_loop_alpha);
    double dg0 = dot(direction, grad);
    if (!(dg0 < 0.0)) {
      history.clear();
      history.apply(grad, direction, two_loop_alpha);
      dg0 = dot(direction, grad);
    }
    const double alpha_init = history.size() == 0 ? 1.0 / std::sqrt(dot(grad, grad)) : 1.0;

    Point* accepted = nullptr;
    const auto result =
        search.run(report.beta, loss, direction, dg0, alpha_init, report.evaluations, accepted);
    if (result == SearchResult::kFailed) break;

    auto [s, y] = history.next_slot();
    for (std::size_t j = 0; j < dim; ++j) {
      s[j] = accepted->x[j] - report.beta[j];
      y[j] = accepted->g[j] - grad[j];
    }
    const double ys = dot(y, s);
    if (ys > 1e-10 * std::sqrt(dot(s, s) * dot(y, y))) history.commit(ys);

    std::swap(report.beta, accepted->x);
    std::swap(grad, accepted->g);
    loss = accepted->f;
    ++report.iterations;
    report.loss_history.push_back(loss);
    if (observer) observer({report.iterations, loss, inf_norm(grad)});
  }
  report.final_loss = loss;
  return report;
}

}  // namespace rbr
