#include "mflab/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "mflab/vecops.hpp"

namespace mflab {

namespace {
std::atomic<unsigned> g_threads{0};

// Fixed reduction chunk. Partial sums are formed per chunk and combined in
// chunk order, so the addend order depends only on n, never on the worker
// count. Changing this constant changes last-bit results.
constexpr std::size_t kReduceChunk = 8192;
}  // namespace

void set_thread_count(unsigned n) { g_threads.store(n); }

unsigned thread_count() {
  unsigned n = g_threads.load();
  if (n == 0) {
    n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
  }
  return n;
}

unsigned effective_workers(std::size_t n) {
  unsigned w = thread_count();
  if (n < 2048) return 1;  // not worth the spawn overhead
  if (static_cast<std::size_t>(w) > n) w = static_cast<unsigned>(n);
  return w;
}

namespace {

// Runs fn over [b, e) ranges on `w` threads; the first exception thrown by
// any worker is rethrown on the caller after the join.
void run_ranges_on_pool(std::size_t n, unsigned w,
                        const std::function<void(std::size_t, std::size_t)>& fn) {
  std::vector<std::thread> pool;
  pool.reserve(w);
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::size_t chunk = (n + w - 1) / w;
  for (unsigned t = 0; t < w; ++t) {
    std::size_t b = static_cast<std::size_t>(t) * chunk;
    std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&, b, e] {
      try {
        fn(b, e);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  unsigned w = effective_workers(n);
  if (w <= 1) {
    fn(0, n);
    return;
  }
  run_ranges_on_pool(n, w, fn);
}

double parallel_reduce(std::size_t n, const std::function<double(std::size_t)>& fn) {
  if (n == 0) return 0.0;
  std::size_t ranges = (n + kReduceChunk - 1) / kReduceChunk;
  std::vector<double> partial(ranges, 0.0);
  auto run_ranges = [&](std::size_t rb, std::size_t re) {
    for (std::size_t r = rb; r < re; ++r) {
      std::size_t b = r * kReduceChunk;
      std::size_t e = std::min(n, b + kReduceChunk);
      KahanSum s;
      for (std::size_t i = b; i < e; ++i) s.add(fn(i));
      partial[r] = s.value();
    }
  };
  unsigned w = effective_workers(n);
  if (static_cast<std::size_t>(w) > ranges) w = static_cast<unsigned>(ranges);
  if (w <= 1) {
    run_ranges(0, ranges);
  } else {
    run_ranges_on_pool(ranges, w, run_ranges);
  }
  return kahan_total(partial);
}

}  // namespace mflab
