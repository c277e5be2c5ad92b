#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace symstat {

/// Replications per Monte Carlo block; each block owns one RNG stream.
inline constexpr std::size_t kBlockSize = std::size_t{1} << 14;

inline std::size_t block_count(std::size_t reps) { return (reps + kBlockSize - 1) / kBlockSize; }

inline std::size_t block_length(std::size_t reps, std::size_t block) {
  return std::min(kBlockSize, reps - block * kBlockSize);
}

/// Runs fn(block) for every block on up to `workers` threads. Callers write
/// into per-block slots and reduce in index order, so results do not depend
/// on the worker count.
template <class Fn>
void for_each_block(std::size_t blocks, int workers, Fn&& fn) {
  const auto threads = static_cast<std::size_t>(std::max(1, workers));
  if (threads == 1 || blocks <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) fn(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto loop = [&] {
    for (std::size_t b; (b = next.fetch_add(1)) < blocks;) {
      try {
        fn(b);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < std::min(threads, blocks); ++i) pool.emplace_back(loop);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace symstat
