// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace cochlea
{

/// Resolves a requested worker count: 0 means hardware concurrency.
inline unsigned resolve_threads(unsigned requested)
{
  if (requested > 0)
    return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, count) on up to `threads` workers using a
/// fixed contiguous block partition. Each index is processed exactly once
/// and results written to per-index slots are independent of the worker
/// count. The first exception thrown by any worker is rethrown.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body &&body)
{
  const std::size_t workers = std::min<std::size_t>(resolve_threads(threads), count);
  if (workers <= 1)
  {
    for (std::size_t i = 0; i < count; ++i)
      body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
  {
    const std::size_t begin = count * w / workers;
    const std::size_t end = count * (w + 1) / workers;
    pool.emplace_back([&, w, begin, end] {
      try
      {
        for (std::size_t i = begin; i < end; ++i)
          body(i);
      }
      catch (...)
      {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto &t : pool)
    t.join();
  for (auto &e : errors)
    if (e)
      std::rethrow_exception(e);
}

}  // namespace cochlea
