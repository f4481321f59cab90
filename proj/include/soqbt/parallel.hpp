#pragma once

#include <cstddef>
#include <functional>

namespace soqbt {

/// Worker cap used by node-wise loops. Defaults to the SOQBT_THREADS
/// environment variable, else 1. Results never depend on this value.
std::size_t thread_count();
void set_thread_count(std::size_t threads);

/// Runs body(i) for i in [0, count). Each index is handled by exactly one
/// worker; callers write into preallocated slots so output order is fixed.
/// The first exception thrown by any worker is rethrown after all join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace soqbt
