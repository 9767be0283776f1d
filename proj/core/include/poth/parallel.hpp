#pragma once

#include <cstddef>
#include <functional>

namespace poth {

/// Worker count for internal fan-out. 0 means std::thread::hardware_concurrency().
/// Results never depend on this value.
struct ExecutionPolicy {
  unsigned threads = 0;

  unsigned resolved() const noexcept;
};

/// Runs task(0..count-1) across the policy's workers. Each task must write only
/// to its own output slot. The first exception thrown by any task is rethrown
/// after all workers join.
void parallel_for(std::size_t count, ExecutionPolicy policy,
                  const std::function<void(std::size_t)>& task);

}  // namespace poth
