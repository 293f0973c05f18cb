#pragma once

#include <cstddef>
#include <functional>
#include <memory>

namespace quatnav {

/// Fixed-width pool for per-particle work. Results never depend on the
/// worker count: each index is processed independently and callers reduce
/// sequentially afterwards.
class WorkerPool {
 public:
  /// threads <= 0 selects the hardware concurrency.
  explicit WorkerPool(int threads = 0);
  ~WorkerPool();
  WorkerPool(WorkerPool&&) noexcept;
  WorkerPool& operator=(WorkerPool&&) noexcept;

  int threads() const { return threads_; }

  void for_each(std::size_t n, const std::function<void(std::size_t)>& fn) const;

 private:
  struct Arena;
  int threads_;
  std::unique_ptr<Arena> arena_;
};

/// Worker count from QUATNAV_THREADS, or 0 (hardware default) when unset.
int threads_from_environment();

}  // namespace quatnav
