#include "quatnav/parallel.hpp"

#include <cstdlib>
#include <string>

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include "quatnav/errors.hpp"

namespace quatnav {

struct WorkerPool::Arena {
  tbb::task_arena arena;
  explicit Arena(int threads) : arena(threads) {}
};

WorkerPool::WorkerPool(int threads)
    : threads_(threads > 0 ? threads : tbb::this_task_arena::max_concurrency()) {
  if (threads_ > 1) {
    arena_ = std::make_unique<Arena>(threads_);
  }
}

WorkerPool::~WorkerPool() = default;
WorkerPool::WorkerPool(WorkerPool&&) noexcept = default;
WorkerPool& WorkerPool::operator=(WorkerPool&&) noexcept = default;

void WorkerPool::for_each(std::size_t n, const std::function<void(std::size_t)>& fn) const {
  if (!arena_ || n < 2) {
    for (std::size_t i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
  arena_->arena.execute([&] {
    tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n), [&](const auto& range) {
      for (std::size_t i = range.begin(); i != range.end(); ++i) {
        fn(i);
      }
    });
  });
}

int threads_from_environment() {
  const char* value = std::getenv("QUATNAV_THREADS");
  if (value == nullptr || *value == '\0') {
    return 0;
  }
  try {
    const int n = std::stoi(value);
    if (n < 0) {
      throw ConfigError("QUATNAV_THREADS must be non-negative");
    }
    return n;
  } catch (const std::logic_error&) {
    throw ConfigError(std::string("QUATNAV_THREADS is not an integer: ") + value);
  }
}

}  // namespace quatnav
