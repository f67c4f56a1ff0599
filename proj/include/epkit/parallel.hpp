#pragma once

#include <cstddef>
#include <functional>

namespace epkit {

// Worker count from EPKIT_THREADS (defaults to the hardware concurrency).
unsigned thread_count();

// Runs body(i) for i in [0, count).  Each index writes only its own output
// slot, so results are independent of scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace epkit
