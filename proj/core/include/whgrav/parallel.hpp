#pragma once

#include <cstddef>
#include <functional>

namespace whgrav {

/// Worker count: WHGRAV_THREADS when set to a positive integer, otherwise
/// the hardware concurrency.
std::size_t thread_count();

/// Runs body(i) for i in [0, n) across worker threads. The first exception
/// thrown by any body is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace whgrav
