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

#include "dpsynth/toy_data.h"

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "dpsynth/error.h"

namespace dpsynth {

Domain ToyDomain(int attributes, int size) {
  Require(attributes >= 1, "toy data needs at least one attribute");
  std::vector<Attribute> attrs;
  for (int a = 0; a < attributes; ++a) attrs.push_back({"a" + std::to_string(a), size});
  return Domain(std::move(attrs));
}

Dataset GenerateToyData(const ToyDataOptions& options) {
  Require(options.n >= 1, "toy data needs at least one record");
  Require(options.components >= 1, "toy data needs at least one component");
  const Domain domain = ToyDomain(options.attributes, options.size);
  Rng rng(options.seed);
  const auto d = static_cast<std::size_t>(options.attributes);
  const auto k = static_cast<std::size_t>(options.components);
  const auto size = static_cast<std::size_t>(options.size);

  std::gamma_distribution<double> gamma(1.0, 1.0);
  std::vector<double> weights(k);
  for (double& w : weights) w = gamma(rng);

  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::discrete_distribution<int>> marginals;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t a = 0; a < d; ++a) {
      std::vector<double> p(size);
      for (double& v : p) v = std::exp(options.sharpness * normal(rng));
      marginals.emplace_back(p.begin(), p.end());
    }
  }

  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::vector<int> values(options.n * d);
  for (std::size_t i = 0; i < options.n; ++i) {
    const std::size_t c = pick(rng);
    for (std::size_t a = 0; a < d; ++a) values[i * d + a] = marginals[c * d + a](rng);
  }
  return Dataset(domain, std::move(values));
}

}  // namespace dpsynth
