#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>
#include <vector>

namespace chemlab::parallel {

/// Cells per reduction chunk. Partial sums are formed per chunk and combined in
/// chunk order, so reductions are bit-identical for every thread count.
inline constexpr std::size_t kChunk = 4096;

/// Below this many cells loops run inline; thread start-up would dominate.
inline constexpr std::size_t kParallelThreshold = 32768;

/// Worker count: hardware concurrency capped by CHEMLAB_THREADS (if set and positive).
inline unsigned thread_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CHEMLAB_THREADS")) {
    try {
      long cap = std::stol(env);
      if (cap > 0) return std::min<unsigned>(hw, static_cast<unsigned>(cap));
    } catch (...) {
    }
  }
  return hw;
}

/// Calls body(begin, end) over disjoint chunk-aligned ranges covering [0, n).
template <class Body>
void for_ranges(std::size_t n, Body&& body, unsigned threads = thread_count()) {
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  if (threads <= 1 || n < kParallelThreshold || chunks < 2) {
    body(std::size_t{0}, n);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, chunks);
  const std::size_t per = (chunks + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t b = std::min(n, w * per * kChunk);
    const std::size_t e = std::min(n, (w + 1) * per * kChunk);
    if (b < e) pool.emplace_back([&body, b, e] { body(b, e); });
  }
}

/// Deterministic sum of term(i) over [0, n).
template <class Term>
double sum(std::size_t n, Term&& term, unsigned threads = thread_count()) {
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(chunks, 0.0);
  for_ranges(
      n,
      [&](std::size_t b, std::size_t e) {
        for (std::size_t c = b / kChunk; c * kChunk < e; ++c) {
          const std::size_t lo = c * kChunk;
          const std::size_t hi = std::min(e, lo + kChunk);
          double s = 0.0;
          for (std::size_t i = lo; i < hi; ++i) s += term(i);
          partial[c] = s;
        }
      },
      threads);
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

/// Deterministic maximum of term(i) over [0, n); returns lowest() for n == 0.
template <class Term>
double max(std::size_t n, Term&& term, unsigned threads = thread_count()) {
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(chunks, -std::numeric_limits<double>::infinity());
  for_ranges(
      n,
      [&](std::size_t b, std::size_t e) {
        for (std::size_t c = b / kChunk; c * kChunk < e; ++c) {
          const std::size_t lo = c * kChunk;
          const std::size_t hi = std::min(e, lo + kChunk);
          double m = -std::numeric_limits<double>::infinity();
          for (std::size_t i = lo; i < hi; ++i) m = std::max(m, term(i));
          partial[c] = m;
        }
      },
      threads);
  double m = -std::numeric_limits<double>::infinity();
  for (double p : partial) m = std::max(m, p);
  return m;
}

}  // namespace chemlab::parallel
