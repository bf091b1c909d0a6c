// SPDX-License-Identifier: Apache-2.0
//
// Thin wrappers over OpenMP for the bulk data-parallel loops used throughout
// the library. Every loop body must be correct under any schedule, including
// a plain serial one.
#pragma once

#include <atomic>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include <omp.h>

namespace promap::par {

template <typename Index, typename Body>
void parallel_for(Index begin, Index end, Body&& body) {
#pragma omp parallel for schedule(static)
  for (Index i = begin; i < end; ++i) {
    body(i);
  }
}

template <typename T, typename Index, typename Body>
T parallel_reduce_sum(Index begin, Index end, Body&& body) {
  T acc{};
#pragma omp parallel for schedule(static) reduction(+ : acc)
  for (Index i = begin; i < end; ++i) {
    acc += body(i);
  }
  return acc;
}

template <typename T, typename Index, typename Body>
T parallel_reduce_max(Index begin, Index end, T init, Body&& body) {
  T acc = init;
#pragma omp parallel for schedule(static) reduction(max : acc)
  for (Index i = begin; i < end; ++i) {
    const T value = body(i);
    if (value > acc) acc = value;
  }
  return acc;
}

/// In-place exclusive prefix sum; returns the total.
template <typename T>
T exclusive_scan_inplace(std::span<T> values) {
  T running{};
  for (auto& x : values) {
    const T next = running + x;
    x = running;
    running = next;
  }
  return running;
}

template <typename T>
void atomic_add(T& target, T delta) {
  std::atomic_ref<T>(target).fetch_add(delta, std::memory_order_relaxed);
}

template <typename T>
T atomic_sub_fetch(T& target, T delta) {
  return std::atomic_ref<T>(target).fetch_sub(delta, std::memory_order_relaxed) - delta;
}

/// Returns the previous value, like a hardware CAS.
template <typename T>
T compare_and_swap(T& target, T expected, T desired) {
  std::atomic_ref<T>(target).compare_exchange_strong(expected, desired, std::memory_order_relaxed);
  return expected;
}

inline int max_threads() { return omp_get_max_threads(); }
inline void set_threads(int n) { omp_set_num_threads(n); }

}  // namespace promap::par
