#pragma once

// Minimal bounded worker pool for index loops whose iterations write disjoint
// output slots. Results are therefore independent of the thread count.

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "catmap/residue.hpp"

namespace catmap {

template <class F>
void parallel_for(Int n, int jobs, F&& body) {
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(std::max<Int>(n, 1))));
  if (jobs == 1) {
    for (Int i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex guard;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(jobs));
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (Int i = w; i < n; i += jobs) body(i);
      } catch (...) {
        std::lock_guard lock(guard);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace catmap
