#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace lexgeo {

/// Worker count: LEXGEO_THREADS if set and positive, else hardware concurrency.
std::size_t worker_count();

/// Runs fn(i) for i in [0, n). Each index is an independent task that writes
/// only its own output slot; callers reduce serially afterwards, so results
/// never depend on the worker count. The first exception thrown (lowest
/// index) is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace lexgeo
