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

#ifndef DPSYNTH_PUBLIC_ASSIST_H_
#define DPSYNTH_PUBLIC_ASSIST_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dpsynth/distribution.h"
#include "dpsynth/gem.h"
#include "dpsynth/marginals.h"

namespace dpsynth {

// Distribution over the distinct public records, weighted by their
// frequencies. The public data must cover every attribute of `domain`.
SupportHistogram PepPubInit(const Dataset& public_data, const Domain& domain);

// Indices into `domain` of the public dataset's attributes, matched by name.
std::vector<std::size_t> MapPublicAttributes(const Domain& public_domain,
                                             const Domain& domain);

struct PretrainResult {
  GemCheckpoint checkpoint;
  // Workloads of `queries` whose attributes all appear in the public data.
  std::vector<std::size_t> workloads;
  double final_loss = 0.0;
};

// Fits a generator over `queries.domain()` to the exact public answers of
// the covered workloads, with no privacy mechanism involved. The public
// data may hold a subset of the attributes.
PretrainResult GemPubPretrain(const Dataset& public_data, const QuerySet& queries,
                              const GemOptions& options, int steps, Rng& rng);

struct BestMixtureResult {
  // Smallest max error of the averaged mixtures seen: an upper bound.
  double value = 0.0;
  // Largest value of the query player's mixed strategy: a lower bound.
  double lower_bound = 0.0;
  // Mixture weights over the support achieving `value`.
  std::vector<double> weights;
  int iterations = 0;
};

// min over mixtures mu of the support of max_q |target_q - q(mu)|, by
// multiplicative weights over the signed queries against best-response
// support points.
BestMixtureResult BestMixtureError(std::span<const std::uint64_t> support,
                                   const QuerySet& queries,
                                   std::span<const double> targets,
                                   int iterations = 2000);

}  // namespace dpsynth

#endif  // DPSYNTH_PUBLIC_ASSIST_H_
