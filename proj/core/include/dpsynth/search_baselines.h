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

#ifndef DPSYNTH_SEARCH_BASELINES_H_
#define DPSYNTH_SEARCH_BASELINES_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dpsynth/adaptive.h"
#include "dpsynth/distribution.h"
#include "dpsynth/marginals.h"

namespace dpsynth {

// Signed queries: index j < |Q| is query j, index |Q| + j its complement
// 1 - q_j. A synthetic distribution is too high on signed query j when
// v_j(P) - v_j(D) > 0, and a new record lowers it by minimizing v_j(x).
std::size_t NumSignedQueries(const QuerySet& queries);
double SignedAnswer(std::span<const double> answers, std::size_t signed_index);

// Lowest index attaining the minimum.
std::size_t ExhaustiveArgmin(std::span<const double> cost);

// Cost of every cell under a sum of signed queries (repeats count again).
std::vector<double> SignedQueryCost(const QuerySet& queries,
                                    std::span<const std::size_t> signed_indices);

struct DualQueryOptions {
  double eta = 2.0;
  int samples = 100;
};

// Largest step size at most `eta` for which sampling `samples` signed
// queries per round from the multiplicative weights over `rounds` rounds is
// rho-zCDP: rho = samples * eta^2 / (2 n^2) * sum_{t < rounds} t^2.
double DualQueryStepSize(double rho, int rounds, int samples, std::size_t n,
                         double eta);
double DualQueryRho(double eta, int rounds, int samples, std::size_t n);

class DualQueryState {
 public:
  DualQueryState(const QuerySet& queries, std::span<const double> private_answers,
                 int samples, double eta);

  // Samples signed queries from the current weights, adds the record that
  // minimizes their sum, and shifts weight toward the queries it violates.
  // Returns the record's cell.
  std::uint64_t Round(Rng& rng);

  std::vector<double> QueryDistribution() const;
  const std::vector<std::size_t>& last_sample() const { return last_sample_; }
  const std::vector<std::uint64_t>& records() const { return records_; }
  // Empirical distribution of the records so far.
  Distribution Output() const;

 private:
  const QuerySet* queries_;
  std::vector<double> private_answers_;
  int samples_;
  double eta_;
  std::vector<double> log_weights_;
  std::vector<std::size_t> last_sample_;
  std::vector<std::uint64_t> records_;
};

struct FemOptions {
  // Mean of the exponential perturbation on each one-hot coordinate.
  double sigma = 1.0;
  int samples = 100;
};

class FemState {
 public:
  FemState(const QuerySet& queries, FemOptions options);

  // Adds a signed query to the cumulative cost and draws `samples` perturbed
  // leaders: argmin_x cost(x) + <onehot(x), eta> with eta ~ Exp(sigma)^d'.
  std::vector<std::uint64_t> Round(std::size_t signed_index, Rng& rng);
  // One perturbed leader for a given noise vector of length d'.
  std::uint64_t PerturbedLeader(std::span<const double> noise) const;

  std::span<const double> cumulative_cost() const { return cost_; }
  const std::vector<std::uint64_t>& records() const { return records_; }
  Distribution Output() const;

 private:
  const QuerySet* queries_;
  FemOptions options_;
  std::vector<double> cost_;
  std::vector<std::uint64_t> records_;
};

struct SearchRunResult {
  Distribution output;
  std::vector<RoundRecord> trace;
  double eta = 0.0;
};

// DualQuery with the step size capped by the budget.
SearchRunResult RunDualQuery(std::span<const double> private_answers,
                             const QuerySet& queries, double rho, int rounds,
                             std::size_t n, const DualQueryOptions& options,
                             bool audit_errors, Rng& rng);
// FEM: one exponential-mechanism selection per round (the whole budget goes
// to selection), then perturbed leaders.
SearchRunResult RunFem(std::span<const double> private_answers,
                       const QuerySet& queries, double rho, int rounds,
                       std::size_t n, const FemOptions& options, bool noiseless,
                       bool audit_errors, Rng& rng);

}  // namespace dpsynth

#endif  // DPSYNTH_SEARCH_BASELINES_H_
