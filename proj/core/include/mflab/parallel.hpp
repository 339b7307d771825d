#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace mflab {

/// Global worker count for the fork-join helpers below. 0 means "pick the
/// hardware concurrency". Set once at startup (CLI flag or MFLAB_THREADS);
/// not synchronized against concurrent mutation.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Resolve the effective worker count for a job of `n` items.
unsigned effective_workers(std::size_t n);

/// Run fn(begin, end) over a static contiguous partition of [0, n).
/// The partition depends only on n and the configured thread count, never on
/// scheduling, so any per-index outputs are bit-reproducible.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

/// Deterministic sum reduction: fn(i) is evaluated for every i in [0, n),
/// each worker accumulating its contiguous range in index order with
/// compensated summation; the per-range partials are then combined in range
/// order. The result is bit-identical for any thread count.
double parallel_reduce(std::size_t n, const std::function<double(std::size_t)>& fn);

}  // namespace mflab
