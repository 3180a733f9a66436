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

#ifndef DPSYNTH_RAP_SOFTMAX_H_
#define DPSYNTH_RAP_SOFTMAX_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dpsynth/adaptive.h"
#include "dpsynth/distribution.h"
#include "dpsynth/marginals.h"

namespace dpsynth {

struct RapOptions {
  int rows = 1000;
  double lr = 0.1;
  // Optimizer steps per round, including rejected ones.
  int max_steps = 1000;
  // Stop when the loss improved by less than plateau_tol (relative) over
  // the last plateau_window accepted steps.
  int plateau_window = 10;
  double plateau_tol = 1e-6;
  // Clipped [0, 1] rows instead of softmax logits.
  bool original = false;
};

// n' relaxed records. In softmax form each row holds free logits and its
// probabilities are the per-attribute softmax; in the original form the row
// values are used directly and kept in [0, 1].
class RelaxedDataset {
 public:
  RelaxedDataset() = default;
  RelaxedDataset(Domain domain, std::size_t rows, bool original);
  // Logits (or clipped values) drawn at random.
  static RelaxedDataset Random(const Domain& domain, std::size_t rows,
                               bool original, Rng& rng);

  const Domain& domain() const { return domain_; }
  std::size_t rows() const { return rows_; }
  bool original() const { return original_; }
  std::span<const double> params() const { return params_; }
  std::span<double> params() { return params_; }

  // Row values that enter the product queries.
  ProbabilityBatch Relaxed() const;
  // Block-normalized rows, a valid product mixture.
  ProbabilityBatch Normalized() const;

 private:
  Domain domain_;
  std::size_t rows_ = 0;
  bool original_ = false;
  std::vector<double> params_;
};

std::vector<double> RapAnswers(const RelaxedDataset& data, const QuerySet& queries);

// Sum over constraints of (answer - target)^2.
double RapLoss(const RelaxedDataset& data, std::span<const Constraint> constraints);

struct RapStats {
  int accepted = 0;
  int rejected = 0;
  // Loss before the first step and after every accepted step.
  std::vector<double> loss_trace;
};

// Adam on the squared loss; a step that raises the loss is undone and the
// step size halved, so the accepted losses never increase.
RapStats RapFit(RelaxedDataset& data, std::span<const Constraint> constraints,
                const RapOptions& options);

class RapSoftmaxSynthesizer : public Synthesizer {
 public:
  RapSoftmaxSynthesizer(const Domain& domain, RapOptions options, Rng& rng);

  std::string name() const override {
    return options_.original ? "rap" : "rap-softmax";
  }
  std::vector<double> Answers(const QuerySet& queries) const override;
  void Update(const MeasurementLedger& ledger, const QuerySet& queries,
              const RoundContext& ctx) override;
  Distribution Current() const override;

  const RelaxedDataset& data() const { return data_; }
  const RapStats& last_stats() const { return stats_; }

 private:
  RapOptions options_;
  RelaxedDataset data_;
  RapStats stats_;
};

}  // namespace dpsynth

#endif  // DPSYNTH_RAP_SOFTMAX_H_
