#pragma once

#include <algorithm>
#include <atomic>
#include <complex>
#include <cstddef>
#include <span>
#include <thread>
#include <vector>

namespace bosegas {

namespace detail {
inline std::atomic<unsigned>& thread_setting() {
  static std::atomic<unsigned> threads{1};
  return threads;
}
}  // namespace detail

/// Number of worker threads used by parallel loops. Never affects results.
inline unsigned thread_count() { return detail::thread_setting().load(); }
inline void set_thread_count(unsigned k) { detail::thread_setting().store(std::max(1u, k)); }

/// Calls body(i) for i in [0, n). Iterations must be independent and write
/// only to their own slots.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const unsigned k = std::min<std::size_t>(thread_count(), std::max<std::size_t>(n, 1));
  if (k <= 1 || n < 64) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(k);
  const std::size_t chunk = (n + k - 1) / k;
  for (unsigned w = 0; w < k; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    workers.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : workers) t.join();
}

/// Pairwise (cascade) summation in a fixed order.
template <class T>
T pairwise_sum(std::span<const T> v) {
  constexpr std::size_t kLeaf = 16;
  if (v.size() <= kLeaf) {
    T s{};
    for (const auto& x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

template <class T>
T pairwise_sum(const std::vector<T>& v) {
  return pairwise_sum(std::span<const T>(v));
}

/// Evaluates f(i) for every i (possibly in parallel) and reduces the values
/// with pairwise_sum, so the result is bit-identical for any thread count.
template <class T, class F>
T parallel_sum(std::size_t n, F&& f) {
  std::vector<T> vals(n);
  parallel_for(n, [&](std::size_t i) { vals[i] = f(i); });
  return pairwise_sum(vals);
}

}  // namespace bosegas
