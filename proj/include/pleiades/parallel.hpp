#pragma once

#include <cstddef>
#include <functional>

namespace pleiades {

// Runs body(i) for i in [0, n) on up to `jobs` threads. Each index is
// processed exactly once; results must be written to per-index slots.
// The exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body);

// Hardware concurrency, at least 1.
int default_jobs();

}  // namespace pleiades
