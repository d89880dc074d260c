#include "fracperim/core.hpp"

#include <algorithm>
#include <atomic>

namespace fracperim {

namespace {
std::atomic<int> g_workers{1};
}

int default_workers() { return g_workers.load(); }

void set_default_workers(int n) { g_workers.store(std::max(1, n)); }

void parallel_for(int64_t n, const std::function<void(int64_t, int64_t)>& chunk_fn,
                  int nthreads) {
  if (n <= 0) return;
  nthreads = std::max(1, nthreads);
  if (nthreads == 1) {
    chunk_fn(0, n);
    return;
  }
  // Fixed chunking (independent of nthreads) keeps per-chunk work identical;
  // only the assignment of chunks to threads varies.
  int64_t nchunks = std::min<int64_t>(n, int64_t(nthreads) * 4);
  int64_t chunk = (n + nchunks - 1) / nchunks;
  std::atomic<int64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(size_t(nthreads));
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        int64_t c = next.fetch_add(1);
        int64_t lo = c * chunk;
        if (lo >= n) break;
        chunk_fn(lo, std::min(n, lo + chunk));
      }
    });
  }
  for (auto& th : pool) th.join();
}

double parallel_sum(int64_t n, const std::function<double(int64_t)>& term,
                    int nthreads) {
  if (n <= 0) return 0.0;
  const int64_t block = 4096;
  const int64_t nblocks = (n + block - 1) / block;
  std::vector<double> partial(size_t(nblocks), 0.0);
  parallel_for(
      nblocks,
      [&](int64_t b0, int64_t b1) {
        for (int64_t b = b0; b < b1; ++b) {
          double s = 0.0;
          int64_t hi = std::min(n, (b + 1) * block);
          for (int64_t i = b * block; i < hi; ++i) s += term(i);
          partial[size_t(b)] = s;
        }
      },
      nthreads);
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

}  // namespace fracperim
