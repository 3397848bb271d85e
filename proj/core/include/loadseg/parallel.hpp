#pragma once

#include <cstddef>
#include <functional>

namespace loadseg {

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Work is handed out
// in index order; the first exception thrown by any task is rethrown after
// all threads join. jobs <= 1 runs inline.
void parallel_for(std::size_t n, std::size_t jobs,
                  const std::function<void(std::size_t)>& fn);

}  // namespace loadseg
