#pragma once

#include <cstddef>
#include <functional>

namespace bilap {

// Runs body(i) for i in [0, n) on up to `jobs` threads. Exceptions from the
// body are rethrown on the calling thread (the one with the lowest index).
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body);

}  // namespace bilap
