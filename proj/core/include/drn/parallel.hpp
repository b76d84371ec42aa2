#pragma once

#include <cstdint>

namespace drn {

/// Number of threads the kernels may use. Resolves to the DRN_THREADS
/// environment variable on first call (0 or unset means hardware count).
/// Results are bit-identical for any thread count: every output element is
/// reduced by exactly one thread in a fixed order.
int thread_cap();

/// Override the cap programmatically (takes precedence over the env var).
void set_thread_cap(int n);

namespace detail {
/// Threads to use for a loop of `items` independent work items.
int threads_for(int64_t items);
}  // namespace detail

}  // namespace drn
