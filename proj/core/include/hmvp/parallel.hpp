#pragma once

#include <cstddef>
#include <functional>

namespace hmvp {

/// Worker-count control.  Resolution order: explicit set_thread_count(),
/// the HMVP_THREADS environment variable, then hardware concurrency.
void set_thread_count(int count);
int thread_count();

/// Runs fn(begin, end, chunk_index) over [0, size) split into a fixed number
/// of chunks that does not depend on the worker count, so that reductions
/// over per-chunk partials are reproducible bit-for-bit.
void parallel_chunks(std::size_t size,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

/// Number of chunks parallel_chunks uses for a given problem size.
std::size_t chunk_count(std::size_t size);

}  // namespace hmvp
