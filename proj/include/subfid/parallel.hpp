#pragma once

#include <cstddef>
#include <functional>

namespace subfid {

// Worker count from SUBFID_THREADS, else the hardware concurrency (>= 1).
std::size_t thread_count();

// Runs body(i) for i in [0, n) on up to thread_count() threads. Each index
// runs exactly once; the first exception thrown is rethrown after all
// workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace subfid
