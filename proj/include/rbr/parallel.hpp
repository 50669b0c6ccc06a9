#pragma once

#include <omp.h>

#include <cstddef>

namespace rbr {

/// Sets the OpenMP thread count for the lifetime of the object; 0 keeps the
/// current setting.
class ThreadCountScope {
 public:
  explicit ThreadCountScope(std::size_t threads) : previous_(omp_get_max_threads()) {
    if (threads > 0) omp_set_num_threads(static_cast<int>(threads));
  }
  ~ThreadCountScope() { omp_set_num_threads(previous_); }

  ThreadCountScope(const ThreadCountScope&) = delete;
  ThreadCountScope& operator=(const ThreadCountScope&) = delete;

 private:
  int previous_;
};

}  // namespace rbr
