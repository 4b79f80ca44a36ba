#pragma once

#include <cstddef>
#include <functional>

namespace fracollo {

/// Worker count: FRACOLLO_THREADS if set and positive, else the hardware count.
unsigned worker_count();

/// Runs body(begin, end) over contiguous chunks of [0, n) on up to
/// worker_count() threads, each chunk at least min_chunk long. Exceptions
/// from any chunk are rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 256);

}  // namespace fracollo
