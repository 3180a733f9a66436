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

#ifndef DPSYNTH_ADAPTIVE_H_
#define DPSYNTH_ADAPTIVE_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpsynth/distribution.h"
#include "dpsynth/domain.h"
#include "dpsynth/marginals.h"
#include "dpsynth/privacy.h"

namespace dpsynth {

struct RoundContext {
  int round = 1;  // 1-based
  int total_rounds = 1;
  // Query indices measured in this round.
  std::span<const std::size_t> new_measurements;
  // The synthesizer's answers to every query before this round's update.
  std::span<const double> answers_before;
};

// A distributional family together with the loss it minimizes against the
// measurements. The synthesizer only ever sees the ledger, never the data.
class Synthesizer {
 public:
  virtual ~Synthesizer() = default;

  virtual std::string name() const = 0;
  virtual std::vector<double> Answers(const QuerySet& queries) const = 0;
  virtual void Update(const MeasurementLedger& ledger, const QuerySet& queries,
                      const RoundContext& ctx) = 0;
  // The current iterate D_t.
  virtual Distribution Current() const = 0;
  // The distribution to publish after the last round.
  virtual Distribution Finalize() const { return Current(); }
};

enum class OutputRule { kLastIterate, kAverage };

struct RunConfig {
  SelectionMode mode = SelectionMode::kPerQuery;
  bool em_score_halved = false;
  bool noiseless = false;
  OutputRule output = OutputRule::kLastIterate;
  // Also track the error on all queries against the private answers.
  bool audit_errors = false;
};

struct RoundRecord {
  int round = 0;
  std::vector<std::size_t> selected;
  std::vector<std::size_t> measured;
  std::vector<double> noisy_answers;
  // Max |answer - noisy answer| over the live ledger after the update.
  double max_err_measured = 0.0;
  std::optional<double> max_err_all;
};

struct RunResult {
  Distribution output;
  std::vector<RoundRecord> trace;
  MeasurementLedger ledger;
};

// T rounds of select, measure, update. The round count and per-round
// selections come from the accountant.
RunResult Run(const Dataset& data, const QuerySet& queries, Synthesizer& synth,
              const Accountant& acct, const RunConfig& config, Rng& rng);
// Same, with the private answers to every query precomputed.
RunResult RunWithAnswers(std::span<const double> private_answers,
                         const QuerySet& queries, Synthesizer& synth,
                         const Accountant& acct, const RunConfig& config,
                         Rng& rng);

// Pointwise mean of histograms over one domain, renormalized.
Histogram AverageOutput(std::span<const Histogram> histories);

void WriteTraceJsonl(std::span<const RoundRecord> trace,
                     const std::filesystem::path& path);

}  // namespace dpsynth

#endif  // DPSYNTH_ADAPTIVE_H_
