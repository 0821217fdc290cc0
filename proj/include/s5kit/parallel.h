/* Copyright 2025 The s5kit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef S5KIT_PARALLEL_H_
#define S5KIT_PARALLEL_H_

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace s5kit {

// Runs fn(index, worker) for index in [0, n) on up to `jobs` threads. Work is
// handed out dynamically; results must be written to per-index slots. The
// first exception thrown by any task is rethrown after all workers finish.
inline void ParallelFor(std::size_t n, std::size_t jobs,
                        const std::function<void(std::size_t, std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i, 0);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&](std::size_t id) {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i, id);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  const std::size_t count = jobs < n ? jobs : n;
  for (std::size_t t = 0; t < count; ++t) threads.emplace_back(worker, t);
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace s5kit

#endif  // S5KIT_PARALLEL_H_
