#pragma once

#include <cstddef>
#include <functional>

namespace helab {

/// Worker count used by parallel loops. Defaults to the hardware concurrency,
/// capped by HELICITY_LAB_THREADS when set.
int thread_cap();
void set_thread_cap(int threads);

/// Runs body(begin, end) over a static partition of [0, count). Callers write
/// per-index results and reduce them serially, so outcomes do not depend on
/// the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace helab
