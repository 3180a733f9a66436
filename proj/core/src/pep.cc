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

#include "dpsynth/pep.h"

#include <algorithm>
#include <cmath>

#include "dpsynth/error.h"

namespace dpsynth {
namespace {

std::vector<double> LogWeights(std::span<const double> lambdas,
                               std::span<const Constraint> constraints,
                               const Domain& domain) {
  Require(lambdas.size() == constraints.size(),
          "one multiplier per constraint is required");
  RequireHistogramCapacity(domain, kDefaultCellCap);
  std::vector<double> logw(domain.total_cells(), 0.0);
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    ValidateQuery(domain, constraints[i].query);
    const double l = lambdas[i];
    ForEachMatchingCell(domain, constraints[i].query,
                        [&](std::uint64_t c) { logw[c] += l; });
  }
  return logw;
}

}  // namespace

bool PepProjectOnce(SupportHistogram& hist, const MarginalQuery& q, double target) {
  Require(target > 0.0 && target < 1.0, "projection target must lie in (0, 1)");
  const double current = hist.Answer(q);
  if (current <= 0.0 || current >= 1.0) return false;
  auto mass = hist.mutable_mass();
  std::vector<char> match(mass.size(), 0);
  hist.ForEachMatching(q, [&](std::size_t i) { match[i] = 1; });
  const double in_scale = target / current;
  const double out_scale = (1.0 - target) / (1.0 - current);
  for (std::size_t i = 0; i < mass.size(); ++i) {
    mass[i] *= match[i] ? in_scale : out_scale;
  }
  hist.Normalize();
  return true;
}

PepStats PepUpdate(SupportHistogram& hist, std::span<const Constraint> constraints,
                   const PepOptions& options) {
  Require(options.gamma >= 0.0, "gamma must be nonnegative");
  Require(options.t_max >= 0, "t_max must be nonnegative");
  Require(options.clip > 0.0 && options.clip < 0.5, "clip must lie in (0, 0.5)");
  std::vector<double> targets(constraints.size());
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    targets[i] = std::clamp(constraints[i].target, options.clip, 1.0 - options.clip);
  }
  std::vector<char> degenerate(constraints.size(), 0);
  std::vector<double> residual(constraints.size());

  PepStats stats;
  auto refresh = [&]() {
    for (std::size_t i = 0; i < constraints.size(); ++i) {
      residual[i] = std::abs(targets[i] - hist.Answer(constraints[i].query));
    }
  };
  auto max_live = [&](std::size_t* arg) {
    double best = -1.0;
    for (std::size_t i = 0; i < residual.size(); ++i) {
      if (!degenerate[i] && residual[i] > best) {
        best = residual[i];
        *arg = i;
      }
    }
    return best;
  };

  refresh();
  while (stats.projections < options.t_max) {
    std::size_t pick = 0;
    const double worst = max_live(&pick);
    if (worst < 0.0 || worst <= options.gamma) break;
    stats.residual_trace.push_back(worst);
    if (!PepProjectOnce(hist, constraints[pick].query, targets[pick])) {
      degenerate[pick] = 1;
      ++stats.skipped;
      continue;
    }
    ++stats.projections;
    refresh();
  }
  stats.final_max_residual =
      residual.empty() ? 0.0 : *std::max_element(residual.begin(), residual.end());
  stats.residual_trace.push_back(stats.final_max_residual);
  return stats;
}

double PepDualLoss(std::span<const double> lambdas,
                   std::span<const Constraint> constraints, const Domain& domain,
                   double gamma) {
  const auto logw = LogWeights(lambdas, constraints, domain);
  double shift = 0.0;
  double l1 = 0.0;
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    shift += lambdas[i] * constraints[i].target;
    l1 += std::abs(lambdas[i]);
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  double sum = 0.0;
  for (double v : logw) sum += std::exp(v - top);
  return top + std::log(sum) - shift + gamma * l1;
}

Histogram PepDualDistribution(std::span<const double> lambdas,
                              std::span<const Constraint> constraints,
                              const Domain& domain) {
  auto logw = LogWeights(lambdas, constraints, domain);
  const double top = *std::max_element(logw.begin(), logw.end());
  for (double& v : logw) v = std::exp(v - top);
  return Histogram(domain, std::move(logw));
}

PepSynthesizer::PepSynthesizer(SupportHistogram initial, PepOptions options)
    : hist_(std::move(initial)), options_(options) {}

std::vector<double> PepSynthesizer::Answers(const QuerySet& queries) const {
  return hist_.AnswerAll(queries);
}

void PepSynthesizer::Update(const MeasurementLedger& ledger,
                            const QuerySet& queries, const RoundContext&) {
  Require(!ledger.empty(), "PEP update needs at least one measurement");
  std::vector<Constraint> constraints;
  constraints.reserve(ledger.size());
  for (const auto& m : ledger.entries()) {
    constraints.push_back({queries.Query(m.query), m.answer});
  }
  stats_ = PepUpdate(hist_, constraints, options_);
}

}  // namespace dpsynth
