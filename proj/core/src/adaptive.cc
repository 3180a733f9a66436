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

#include "dpsynth/adaptive.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "dpsynth/error.h"
#include "json.hpp"

namespace dpsynth {
namespace {

double MaxLedgerError(const MeasurementLedger& ledger,
                      std::span<const double> answers) {
  double worst = 0.0;
  for (const auto& m : ledger.entries()) {
    worst = std::max(worst, std::abs(answers[m.query] - m.answer));
  }
  return worst;
}

double MaxError(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

}  // namespace

RunResult Run(const Dataset& data, const QuerySet& queries, Synthesizer& synth,
              const Accountant& acct, const RunConfig& config, Rng& rng) {
  if (!(data.domain() == queries.domain())) {
    Fail(ErrorCode::kDomainMismatch, "dataset and workload domains differ");
  }
  Require(acct.n() == data.size(), "accountant record count differs from the data");
  const std::vector<double> private_answers = queries.AnswerRecords(data);
  return RunWithAnswers(private_answers, queries, synth, acct, config, rng);
}

RunResult RunWithAnswers(std::span<const double> private_answers,
                         const QuerySet& queries, Synthesizer& synth,
                         const Accountant& acct, const RunConfig& config,
                         Rng& rng) {
  Require(private_answers.size() == queries.size(),
          "private answers must cover the query set");
  Require(!acct.selection_only(), "adaptive runs need a measurement budget");
  const int rounds = acct.rounds();
  const RoundOptions options{config.mode, config.em_score_halved, config.noiseless};

  RunResult result;
  std::vector<Distribution> iterates;
  std::vector<double> current = synth.Answers(queries);
  for (int t = 1; t <= rounds; ++t) {
    RoundSelection sel = SelectAndMeasureRound(result.ledger, queries, current,
                                               private_answers, acct, options,
                                               t, rng);
    const RoundContext ctx{t, rounds, sel.measured, current};
    try {
      synth.Update(result.ledger, queries, ctx);
    } catch (const Error& e) {
      Fail(e.code(), synth.name() + " update failed in round " +
                         std::to_string(t) + ": " + e.what());
    }
    current = synth.Answers(queries);
    for (double a : current) {
      if (!std::isfinite(a)) {
        Fail(ErrorCode::kNumerical, synth.name() + " produced a non-finite answer");
      }
    }

    RoundRecord rec;
    rec.round = t;
    rec.selected = std::move(sel.selected);
    rec.measured = std::move(sel.measured);
    rec.noisy_answers = std::move(sel.noisy_answers);
    rec.max_err_measured = MaxLedgerError(result.ledger, current);
    if (config.audit_errors || config.noiseless) {
      rec.max_err_all = MaxError(current, private_answers);
    }
    result.trace.push_back(std::move(rec));
    if (config.output == OutputRule::kAverage) iterates.push_back(synth.Current());
  }
  result.output = config.output == OutputRule::kAverage
                      ? AverageDistributions(iterates)
                      : synth.Finalize();
  return result;
}

Histogram AverageOutput(std::span<const Histogram> histories) {
  Require(!histories.empty(), "nothing to average");
  const Domain& domain = histories.front().domain();
  std::vector<double> mass(histories.front().size(), 0.0);
  for (const auto& h : histories) {
    if (!(h.domain() == domain)) {
      Fail(ErrorCode::kDomainMismatch, "averaged histograms have different domains");
    }
    for (std::size_t i = 0; i < mass.size(); ++i) mass[i] += h[i];
  }
  for (double& m : mass) m /= static_cast<double>(histories.size());
  return Histogram(domain, std::move(mass));
}

void WriteTraceJsonl(std::span<const RoundRecord> trace,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIo, "cannot open trace file " + path.string());
  for (const auto& rec : trace) {
    nlohmann::json j;
    j["round"] = rec.round;
    j["selected"] = rec.selected;
    j["measured"] = rec.measured;
    j["noisy_answers"] = rec.noisy_answers;
    j["max_err_measured"] = rec.max_err_measured;
    if (rec.max_err_all) j["max_err_all"] = *rec.max_err_all;
    out << j.dump() << '\n';
  }
  if (!out) Fail(ErrorCode::kIo, "failed writing trace file " + path.string());
}

}  // namespace dpsynth
