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

#ifndef DPSYNTH_PEP_H_
#define DPSYNTH_PEP_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dpsynth/adaptive.h"
#include "dpsynth/distribution.h"
#include "dpsynth/marginals.h"

namespace dpsynth {

struct PepOptions {
  // Stop once every residual is at most gamma.
  double gamma = 0.0;
  // Projections per update.
  int t_max = 25;
  // Targets are clipped to [clip, 1 - clip].
  double clip = 1e-4;
};

// Reweights hist to the closest distribution in KL whose answer to q is
// exactly `target` (in (0, 1)): matching cells scale by target / q(D), the
// rest by (1 - target) / (1 - q(D)). Returns false, leaving hist untouched,
// when q(D) is 0 or 1 and no finite reweighting exists.
bool PepProjectOnce(SupportHistogram& hist, const MarginalQuery& q, double target);

struct PepStats {
  int projections = 0;
  int skipped = 0;
  double final_max_residual = 0.0;
  // Max residual before each projection, then after the last.
  std::vector<double> residual_trace;
};

// Repeatedly projects onto the constraint with the largest residual (lowest
// index on ties) until the residuals are within gamma or t_max projections.
// Targets are clipped first.
PepStats PepUpdate(SupportHistogram& hist, std::span<const Constraint> constraints,
                   const PepOptions& options);

// log sum_x exp(sum_i lambda_i (q_i(x) - a_i)) + gamma |lambda|_1 over the
// full domain. Its minimizer gives PepDualDistribution.
double PepDualLoss(std::span<const double> lambdas,
                   std::span<const Constraint> constraints, const Domain& domain,
                   double gamma);
// D(x) proportional to exp(sum_i lambda_i q_i(x)).
Histogram PepDualDistribution(std::span<const double> lambdas,
                              std::span<const Constraint> constraints,
                              const Domain& domain);

class PepSynthesizer : public Synthesizer {
 public:
  PepSynthesizer(SupportHistogram initial, PepOptions options);

  std::string name() const override { return "pep"; }
  std::vector<double> Answers(const QuerySet& queries) const override;
  void Update(const MeasurementLedger& ledger, const QuerySet& queries,
              const RoundContext& ctx) override;
  Distribution Current() const override { return Distribution(hist_); }

  const SupportHistogram& histogram() const { return hist_; }
  const PepStats& last_stats() const { return stats_; }

 private:
  SupportHistogram hist_;
  PepOptions options_;
  PepStats stats_;
};

}  // namespace dpsynth

#endif  // DPSYNTH_PEP_H_
