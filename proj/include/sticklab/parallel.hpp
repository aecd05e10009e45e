#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sticklab {

inline constexpr std::uint64_t default_chunk = 4096;

// Splits [0, n) into fixed chunks, runs body(begin, end, partial) on a pool of
// workers and merges partials in chunk order. The chunking ignores the worker
// count, so the result is identical for any number of workers.
template <class Agg, class Body, class Merge>
Agg run_chunked(std::uint64_t n, unsigned workers, Body&& body, Merge&& merge,
                std::uint64_t chunk = default_chunk) {
  const std::uint64_t nchunks = (n + chunk - 1) / chunk;
  std::vector<Agg> parts(nchunks);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto work = [&] {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= nchunks) return;
      try {
        body(c * chunk, std::min(n, (c + 1) * chunk), parts[c]);
      } catch (...) {
        std::lock_guard lk(err_mu);
        if (!err) err = std::current_exception();
        next = nchunks;
      }
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, unsigned(std::max<std::uint64_t>(nchunks, 1))));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);
  Agg total{};
  for (auto& p : parts) merge(total, p);
  return total;
}

}  // namespace sticklab
