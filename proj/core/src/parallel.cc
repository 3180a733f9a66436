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

#include "dpsynth/parallel.h"

#include <atomic>
#include <cstdlib>
#include <string>

namespace dpsynth {
namespace {

int DefaultThreads() {
  if (const char* env = std::getenv("DPSYNTH_THREADS")) {
    try {
      const int value = std::stoi(env);
      if (value > 0) return value;
    } catch (...) {
      // Fall through to the hardware default on garbage.
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::atomic<int>& ThreadSetting() {
  static std::atomic<int> threads{DefaultThreads()};
  return threads;
}

}  // namespace

int MaxThreads() { return ThreadSetting().load(); }

void SetMaxThreads(int threads) { ThreadSetting().store(threads < 1 ? 1 : threads); }

}  // namespace dpsynth
