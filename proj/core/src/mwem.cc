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

#include "dpsynth/mwem.h"

#include <algorithm>
#include <cmath>

#include "dpsynth/error.h"

namespace dpsynth {

double MwemStep(SupportHistogram& hist, const MarginalQuery& q, double target,
                double eta_divisor) {
  Require(eta_divisor > 0.0, "MWEM step divisor must be positive");
  const double before = hist.Answer(q);
  const double factor =
      std::exp((std::clamp(target, 0.0, 1.0) - before) / eta_divisor);
  auto mass = hist.mutable_mass();
  hist.ForEachMatching(q, [&](std::size_t i) { mass[i] *= factor; });
  hist.Normalize();
  return before;
}

Histogram MwemClosedForm(const Histogram& initial, std::span<const MwemTerm> terms,
                         double eta_divisor) {
  Require(eta_divisor > 0.0, "MWEM step divisor must be positive");
  const Domain& domain = initial.domain();
  std::vector<double> log_weight(initial.size(), 0.0);
  for (const auto& term : terms) {
    const double step =
        (std::clamp(term.target, 0.0, 1.0) - term.answer_before) / eta_divisor;
    ForEachMatchingCell(domain, term.query,
                        [&](std::uint64_t c) { log_weight[c] += step; });
  }
  const double top = *std::max_element(log_weight.begin(), log_weight.end());
  std::vector<double> mass(initial.size());
  for (std::size_t c = 0; c < mass.size(); ++c) {
    mass[c] = initial[c] * std::exp(log_weight[c] - top);
  }
  return Histogram(domain, std::move(mass));
}

MwemSynthesizer::MwemSynthesizer(SupportHistogram initial, MwemOptions options)
    : hist_(std::move(initial)), options_(options) {
  Require(options_.eta_divisor > 0.0, "MWEM step divisor must be positive");
  Require(options_.cycles >= 1, "MWEM needs at least one cycle");
}

std::vector<double> MwemSynthesizer::Answers(const QuerySet& queries) const {
  return hist_.AnswerAll(queries);
}

void MwemSynthesizer::Update(const MeasurementLedger& ledger,
                             const QuerySet& queries, const RoundContext& ctx) {
  Require(!ledger.empty(), "MWEM update needs at least one measurement");
  for (std::size_t j : ctx.new_measurements) first_step_.erase(j);
  for (int r = 0; r < options_.cycles; ++r) {
    for (const auto& m : ledger.entries()) {
      const double before =
          MwemStep(hist_, queries.Query(m.query), m.answer, options_.eta_divisor);
      first_step_.try_emplace(m.query, before);
    }
  }
}

}  // namespace dpsynth
