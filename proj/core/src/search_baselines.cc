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

#include "dpsynth/search_baselines.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dpsynth/error.h"
#include "dpsynth/privacy.h"

namespace dpsynth {
namespace {

void RequireSearchDomain(const Domain& domain) {
  RequireHistogramCapacity(domain, kDefaultCellCap);
}

Distribution EmpiricalCells(const Domain& domain, std::span<const std::uint64_t> cells) {
  std::vector<double> mass(domain.total_cells(), 0.0);
  for (std::uint64_t c : cells) mass[c] += 1.0;
  return Distribution(SupportHistogram(Histogram(domain, std::move(mass))));
}

double MaxError(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace

std::size_t NumSignedQueries(const QuerySet& queries) { return 2 * queries.size(); }

double SignedAnswer(std::span<const double> answers, std::size_t signed_index) {
  const std::size_t m = answers.size();
  return signed_index < m ? answers[signed_index] : 1.0 - answers[signed_index - m];
}

std::size_t ExhaustiveArgmin(std::span<const double> cost) {
  Require(!cost.empty(), "argmin over an empty set");
  std::size_t best = 0;
  for (std::size_t i = 1; i < cost.size(); ++i) {
    if (cost[i] < cost[best]) best = i;
  }
  return best;
}

std::vector<double> SignedQueryCost(const QuerySet& queries,
                                    std::span<const std::size_t> signed_indices) {
  const Domain& domain = queries.domain();
  RequireSearchDomain(domain);
  const std::size_t m = queries.size();
  double complements = 0.0;
  std::vector<double> cost(domain.total_cells(), 0.0);
  for (std::size_t s : signed_indices) {
    Require(s < 2 * m, "signed query index out of range");
    const bool negated = s >= m;
    if (negated) complements += 1.0;
    ForEachMatchingCell(domain, queries.Query(negated ? s - m : s),
                        [&](std::uint64_t c) { cost[c] += negated ? -1.0 : 1.0; });
  }
  for (double& v : cost) v += complements;
  return cost;
}

double DualQueryRho(double eta, int rounds, int samples, std::size_t n) {
  double squares = 0.0;
  for (int t = 1; t < rounds; ++t) squares += static_cast<double>(t) * t;
  const double nn = static_cast<double>(n);
  return samples * eta * eta / (2.0 * nn * nn) * squares;
}

double DualQueryStepSize(double rho, int rounds, int samples, std::size_t n,
                         double eta) {
  Require(rho > 0.0 && rounds >= 1 && samples >= 1 && n >= 1 && eta > 0.0,
          "invalid DualQuery budget");
  const double unit = DualQueryRho(1.0, rounds, samples, n);
  if (unit == 0.0) return eta;
  return std::min(eta, std::sqrt(rho / unit));
}

DualQueryState::DualQueryState(const QuerySet& queries,
                               std::span<const double> private_answers,
                               int samples, double eta)
    : queries_(&queries),
      private_answers_(private_answers.begin(), private_answers.end()),
      samples_(samples),
      eta_(eta),
      log_weights_(NumSignedQueries(queries), 0.0) {
  RequireSearchDomain(queries.domain());
  Require(private_answers_.size() == queries.size(),
          "private answers must cover the query set");
  Require(samples >= 1, "DualQuery needs at least one sample per round");
  Require(eta >= 0.0 && std::isfinite(eta), "DualQuery step size must be finite");
}

std::vector<double> DualQueryState::QueryDistribution() const {
  return ExpMechanismProbabilities(log_weights_, 1.0);
}

std::uint64_t DualQueryState::Round(Rng& rng) {
  const auto probs = QueryDistribution();
  std::discrete_distribution<std::size_t> pick(probs.begin(), probs.end());
  last_sample_.resize(static_cast<std::size_t>(samples_));
  for (auto& s : last_sample_) s = pick(rng);
  const auto cost = SignedQueryCost(*queries_, last_sample_);
  const auto cell = static_cast<std::uint64_t>(ExhaustiveArgmin(cost));
  records_.push_back(cell);

  const std::size_t m = queries_->size();
  std::vector<std::size_t> matched(queries_->num_workloads());
  queries_->RecordMatches(queries_->domain().Decode(cell), matched);
  std::vector<double> hit(m, 0.0);
  for (std::size_t g : matched) hit[g] = 1.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double gap = hit[j] - private_answers_[j];
    log_weights_[j] += eta_ * gap;
    log_weights_[m + j] -= eta_ * gap;
  }
  return cell;
}

Distribution DualQueryState::Output() const {
  Require(!records_.empty(), "DualQuery has produced no records");
  return EmpiricalCells(queries_->domain(), records_);
}

FemState::FemState(const QuerySet& queries, FemOptions options)
    : queries_(&queries), options_(options) {
  RequireSearchDomain(queries.domain());
  Require(options.samples >= 1, "FEM needs at least one sample per round");
  Require(options.sigma >= 0.0 && std::isfinite(options.sigma),
          "FEM noise scale must be nonnegative");
  cost_.assign(queries.domain().total_cells(), 0.0);
}

std::uint64_t FemState::PerturbedLeader(std::span<const double> noise) const {
  const Domain& domain = queries_->domain();
  Require(noise.size() == domain.onehot_width(), "noise must cover the one-hot width");
  std::vector<double> total(cost_);
  for (std::uint64_t c = 0; c < total.size(); ++c) {
    for (std::size_t a = 0; a < domain.num_attributes(); ++a) {
      total[c] += noise[domain.onehot_offset(a) +
                        static_cast<std::size_t>(domain.ValueAt(c, a))];
    }
  }
  return static_cast<std::uint64_t>(ExhaustiveArgmin(total));
}

std::vector<std::uint64_t> FemState::Round(std::size_t signed_index, Rng& rng) {
  const std::size_t one[] = {signed_index};
  const auto add = SignedQueryCost(*queries_, one);
  for (std::size_t c = 0; c < cost_.size(); ++c) cost_[c] += add[c];

  const std::size_t width = queries_->domain().onehot_width();
  std::vector<double> noise(width, 0.0);
  std::vector<std::uint64_t> out;
  for (int s = 0; s < options_.samples; ++s) {
    if (options_.sigma > 0.0) {
      std::exponential_distribution<double> exp_noise(1.0 / options_.sigma);
      for (double& v : noise) v = exp_noise(rng);
    }
    out.push_back(PerturbedLeader(noise));
  }
  records_.insert(records_.end(), out.begin(), out.end());
  return out;
}

Distribution FemState::Output() const {
  Require(!records_.empty(), "FEM has produced no records");
  return EmpiricalCells(queries_->domain(), records_);
}

SearchRunResult RunDualQuery(std::span<const double> private_answers,
                             const QuerySet& queries, double rho, int rounds,
                             std::size_t n, const DualQueryOptions& options,
                             bool audit_errors, Rng& rng) {
  SearchRunResult result;
  result.eta = DualQueryStepSize(rho, rounds, options.samples, n, options.eta);
  DualQueryState state(queries, private_answers, options.samples, result.eta);
  for (int t = 1; t <= rounds; ++t) {
    state.Round(rng);
    RoundRecord rec;
    rec.round = t;
    rec.selected = state.last_sample();
    if (audit_errors) {
      rec.max_err_all = MaxError(state.Output().Answers(queries), private_answers);
    }
    result.trace.push_back(std::move(rec));
  }
  result.output = state.Output();
  return result;
}

SearchRunResult RunFem(std::span<const double> private_answers,
                       const QuerySet& queries, double rho, int rounds,
                       std::size_t n, const FemOptions& options, bool noiseless,
                       bool audit_errors, Rng& rng) {
  Require(private_answers.size() == queries.size(),
          "private answers must cover the query set");
  const Accountant acct = Accountant::SelectionOnly(rho, rounds, 1, n);
  FemState state(queries, options);
  SearchRunResult result;
  std::vector<double> current =
      SupportHistogram::Uniform(queries.domain()).AnswerAll(queries);
  const std::size_t signed_count = NumSignedQueries(queries);
  std::vector<double> scores(signed_count);
  for (int t = 1; t <= rounds; ++t) {
    for (std::size_t j = 0; j < signed_count; ++j) {
      scores[j] = SignedAnswer(current, j) - SignedAnswer(private_answers, j);
    }
    const std::size_t pick =
        noiseless ? static_cast<std::size_t>(
                        std::max_element(scores.begin(), scores.end()) - scores.begin())
                  : ExpMechanismSelect(scores, acct.SelectionExponent(), rng);
    state.Round(pick, rng);
    current = state.Output().Answers(queries);
    RoundRecord rec;
    rec.round = t;
    rec.selected = {pick};
    if (audit_errors || noiseless) rec.max_err_all = MaxError(current, private_answers);
    result.trace.push_back(std::move(rec));
  }
  result.output = state.Output();
  return result;
}

}  // namespace dpsynth
