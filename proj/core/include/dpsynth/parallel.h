//
// Copyright 2026 The dpsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef DPSYNTH_PARALLEL_H_
#define DPSYNTH_PARALLEL_H_

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace dpsynth {

// Upper bound on worker threads used by ParallelFor. Defaults to the value of
// DPSYNTH_THREADS when set, otherwise the hardware concurrency.
int MaxThreads();
void SetMaxThreads(int threads);

// Runs fn(i) for i in [0, n). Iterations must write to disjoint outputs; no
// reduction happens here, so results never depend on the thread count.
// `min_per_thread` keeps tiny loops on the calling thread.
template <typename Fn>
void ParallelFor(std::size_t n, Fn&& fn, std::size_t min_per_thread = 1) {
  const std::size_t workers = std::min<std::size_t>(
      static_cast<std::size_t>(MaxThreads()),
      min_per_thread == 0 ? n : n / std::max<std::size_t>(min_per_thread, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&fn, begin, end] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (std::size_t i = 0; i < std::min(n, chunk); ++i) fn(i);
  for (auto& t : threads) t.join();
}

}  // namespace dpsynth

#endif  // DPSYNTH_PARALLEL_H_
