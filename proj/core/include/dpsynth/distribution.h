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

#ifndef DPSYNTH_DISTRIBUTION_H_
#define DPSYNTH_DISTRIBUTION_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "dpsynth/domain.h"
#include "dpsynth/marginals.h"

namespace dpsynth {

// A normalized distribution over either the whole domain (dense, indexed by
// cell) or an explicit sorted set of support cells.
class SupportHistogram {
 public:
  SupportHistogram() = default;
  explicit SupportHistogram(const Histogram& hist);
  SupportHistogram(Domain domain, std::vector<std::uint64_t> cells,
                   std::vector<double> mass);

  static SupportHistogram Uniform(const Domain& domain);
  // Distinct records of `data` with their empirical frequencies.
  static SupportHistogram Empirical(const Dataset& data);

  const Domain& domain() const { return domain_; }
  bool full_domain() const { return full_; }
  std::size_t size() const { return mass_.size(); }
  std::uint64_t cell(std::size_t i) const { return full_ ? i : cells_[i]; }
  std::span<const double> mass() const { return mass_; }
  std::span<double> mutable_mass() { return mass_; }

  void Normalize();

  // Calls fn(i) for every support position whose cell satisfies q.
  template <typename Fn>
  void ForEachMatching(const MarginalQuery& q, Fn&& fn) const {
    if (full_) {
      ForEachMatchingCell(domain_, q, [&](std::uint64_t c) {
        fn(static_cast<std::size_t>(c));
      });
      return;
    }
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      if (MatchesCell(domain_, q, cells_[i])) fn(i);
    }
  }

  double Answer(const MarginalQuery& q) const;
  std::vector<double> AnswerAll(const QuerySet& queries) const;
  // Dense histogram over the full domain.
  Histogram ToHistogram() const;
  Dataset Sample(std::size_t count, Rng& rng) const;

 private:
  Domain domain_;
  bool full_ = true;
  std::vector<std::uint64_t> cells_;
  std::vector<double> mass_;
};

// Output of a synthesizer: an explicit histogram or a uniform mixture of
// product distributions given by block-normalized probability rows.
class Distribution {
 public:
  Distribution() = default;
  explicit Distribution(SupportHistogram hist);
  Distribution(Domain domain, ProbabilityBatch batch);

  const Domain& domain() const { return domain_; }
  bool is_histogram() const {
    return std::holds_alternative<SupportHistogram>(repr_);
  }
  const SupportHistogram& histogram() const {
    return std::get<SupportHistogram>(repr_);
  }
  const ProbabilityBatch& batch() const { return std::get<ProbabilityBatch>(repr_); }

  std::vector<double> Answers(const QuerySet& queries) const;
  Dataset Sample(std::size_t count, Rng& rng) const;

 private:
  Domain domain_;
  std::variant<SupportHistogram, ProbabilityBatch> repr_;
};

// Pointwise mean of distributions of the same kind over the same domain.
// Histograms must share a support; batches are concatenated, which is the
// mean of their mixtures.
Distribution AverageDistributions(std::span<const Distribution> items);

}  // namespace dpsynth

#endif  // DPSYNTH_DISTRIBUTION_H_
