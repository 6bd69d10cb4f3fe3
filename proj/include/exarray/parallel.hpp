#ifndef EXARRAY_PARALLEL_HPP
#define EXARRAY_PARALLEL_HPP

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace exarray {

/// Number of chunks parallel_chunks will use.
inline int chunk_count(std::uint64_t count, int threads) {
  return static_cast<int>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(std::max(threads, 1), count)));
}

/**
 * Splits [0, count) into `threads` contiguous chunks and calls
 * body(chunk, begin, end) for each, chunk 0 on the calling thread. Callers
 * keep one accumulator per chunk and reduce them in chunk order, which
 * makes results independent of the thread count whenever the per-item
 * work is a pure function of the item index.
 */
template <class Body>
void parallel_chunks(std::uint64_t count, int threads, Body&& body) {
  const std::uint64_t t = static_cast<std::uint64_t>(chunk_count(count, threads));
  if (t <= 1) {
    body(0, std::uint64_t{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(t);
  const std::uint64_t step = count / t;
  const std::uint64_t extra = count % t;
  auto bounds = [&](std::uint64_t c) {
    const std::uint64_t begin = c * step + std::min(c, extra);
    return std::pair{begin, begin + step + (c < extra ? 1 : 0)};
  };
  for (std::uint64_t c = 1; c < t; ++c) {
    pool.emplace_back([&, c] {
      try {
        auto [b, e] = bounds(c);
        body(static_cast<int>(c), b, e);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  try {
    auto [b, e] = bounds(0);
    body(0, b, e);
  } catch (...) {
    errors[0] = std::current_exception();
  }
  for (auto& th : pool) th.join();
  for (auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

}  // namespace exarray

#endif  // EXARRAY_PARALLEL_HPP
