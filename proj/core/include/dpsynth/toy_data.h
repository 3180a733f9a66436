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

#ifndef DPSYNTH_TOY_DATA_H_
#define DPSYNTH_TOY_DATA_H_

#include <cstddef>
#include <cstdint>

#include "dpsynth/domain.h"

namespace dpsynth {

// Correlated categorical data from a random low-entropy mixture of product
// distributions:
//   1. mixture weights ~ Dirichlet(1, ..., 1) over `components`;
//   2. for each component and attribute, g ~ N(0, I) of length `size` and
//      the attribute's distribution is softmax(sharpness * g);
//   3. each record draws a component, then every attribute independently.
// Attributes are named a0, a1, ... and all share the same size.
struct ToyDataOptions {
  int attributes = 4;
  int size = 8;
  std::size_t n = 2000;
  std::uint64_t seed = 0;
  int components = 3;
  double sharpness = 2.5;
};

Domain ToyDomain(int attributes, int size);
Dataset GenerateToyData(const ToyDataOptions& options);

}  // namespace dpsynth

#endif  // DPSYNTH_TOY_DATA_H_
