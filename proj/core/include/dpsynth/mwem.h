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

#ifndef DPSYNTH_MWEM_H_
#define DPSYNTH_MWEM_H_

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dpsynth/adaptive.h"
#include "dpsynth/distribution.h"
#include "dpsynth/marginals.h"

namespace dpsynth {

struct MwemOptions {
  // Step size divisor: D(x) *= exp(q(x) (a - q(D)) / eta_divisor).
  double eta_divisor = 2.0;
  // Passes over all past measurements per round.
  int cycles = 10;
};

// One multiplicative-weights step toward `target` (clipped to [0, 1]).
// Returns the answer before the step.
double MwemStep(SupportHistogram& hist, const MarginalQuery& q, double target,
                double eta_divisor);

// A measurement with the answer of the distribution it was first applied to.
struct MwemTerm {
  MarginalQuery query;
  double target = 0.0;
  double answer_before = 0.0;
};

// D(x) proportional to D0(x) exp(sum_i q_i(x) (a_i - q_i(D_{i-1})) / eta).
// With one pass and no replay this equals the iterated update.
Histogram MwemClosedForm(const Histogram& initial, std::span<const MwemTerm> terms,
                         double eta_divisor);

class MwemSynthesizer : public Synthesizer {
 public:
  MwemSynthesizer(SupportHistogram initial, MwemOptions options);

  std::string name() const override { return "mwem"; }
  std::vector<double> Answers(const QuerySet& queries) const override;
  void Update(const MeasurementLedger& ledger, const QuerySet& queries,
              const RoundContext& ctx) override;
  Distribution Current() const override { return Distribution(hist_); }

  const SupportHistogram& histogram() const { return hist_; }
  // Answers recorded at each measurement's first step, by query index.
  const std::unordered_map<std::size_t, double>& first_step_answers() const {
    return first_step_;
  }

 private:
  SupportHistogram hist_;
  MwemOptions options_;
  std::unordered_map<std::size_t, double> first_step_;
};

}  // namespace dpsynth

#endif  // DPSYNTH_MWEM_H_
