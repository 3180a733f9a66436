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

#ifndef DPSYNTH_MARGINALS_H_
#define DPSYNTH_MARGINALS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dpsynth/domain.h"

namespace dpsynth {

// A k-way marginal counting query: the fraction of records whose attributes
// `features` (strictly increasing) take the values `targets`.
struct MarginalQuery {
  std::vector<int> features;
  std::vector<int> targets;

  bool operator==(const MarginalQuery&) const = default;
};

void ValidateQuery(const Domain& domain, const MarginalQuery& q);

// Positions of the query's target values in the one-hot layout.
std::vector<std::size_t> OnehotIndices(const Domain& domain,
                                       const MarginalQuery& q);

bool MatchesRecord(const MarginalQuery& q, std::span<const int> record);
bool MatchesCell(const Domain& domain, const MarginalQuery& q,
                 std::uint64_t cell);

// Calls fn(cell) for every cell satisfying q, in ascending cell order.
template <typename Fn>
void ForEachMatchingCell(const Domain& domain, const MarginalQuery& q, Fn&& fn) {
  std::uint64_t base = 0;
  std::vector<std::size_t> free_attrs;
  std::size_t next = 0;
  for (std::size_t a = 0; a < domain.num_attributes(); ++a) {
    if (next < q.features.size() &&
        static_cast<std::size_t>(q.features[next]) == a) {
      base += static_cast<std::uint64_t>(q.targets[next]) * domain.stride(a);
      ++next;
    } else {
      free_attrs.push_back(a);
    }
  }
  std::vector<int> counter(free_attrs.size(), 0);
  std::uint64_t cell = base;
  while (true) {
    fn(cell);
    // Odometer over the free attributes, last attribute fastest.
    std::size_t pos = free_attrs.size();
    while (pos > 0) {
      --pos;
      const std::size_t a = free_attrs[pos];
      if (++counter[pos] < domain.size(a)) {
        cell += domain.stride(a);
        break;
      }
      cell -= static_cast<std::uint64_t>(counter[pos] - 1) * domain.stride(a);
      counter[pos] = 0;
      if (pos == 0) return;
    }
    if (free_attrs.empty()) return;
  }
}

// A set of probability vectors in the one-hot layout (rows x width), each
// row normalized within every attribute block.
struct ProbabilityBatch {
  std::size_t rows = 0;
  std::size_t width = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * width, width};
  }
  std::span<double> row(std::size_t r) {
    return {values.data() + r * width, width};
  }
};

double AnswerHistogram(const MarginalQuery& q, const Histogram& hist);
double AnswerRecords(const MarginalQuery& q, const Dataset& data);

// Product of p at the query's one-hot indices. Each attribute block of p must
// sum to 1 within 1e-6.
double ProductQuery(const Domain& domain, const MarginalQuery& q,
                    std::span<const double> p);
// Adds coef * d(prod_k p[idx_k]) / dp to dp, via leave-one-out products.
void AccumulateProductGradient(const double* p, std::span<const std::size_t> idx,
                               double coef, double* dp);
// Mean of ProductQuery over the rows of a batch.
double AnswerBatch(const Domain& domain, const MarginalQuery& q,
                   const ProbabilityBatch& batch);

// All targets over one feature subset, in lexicographic target order (the
// first feature is most significant).
class Workload {
 public:
  Workload(const Domain& domain, std::vector<int> features);

  const std::vector<int>& features() const { return features_; }
  std::size_t num_queries() const { return num_queries_; }
  MarginalQuery Query(std::size_t local) const;
  std::size_t LocalIndexOfRecord(std::span<const int> record) const;
  std::size_t LocalIndexOfCell(const Domain& domain, std::uint64_t cell) const;
  std::size_t LocalIndexOfTargets(std::span<const int> targets) const;

 private:
  std::vector<int> features_;
  std::vector<int> sizes_;
  std::vector<std::size_t> local_strides_;
  std::size_t num_queries_ = 0;
};

struct QueryLocation {
  std::size_t workload = 0;
  std::size_t local = 0;
};

// Ordered workloads sharing one global query index space.
class QuerySet {
 public:
  QuerySet() = default;
  QuerySet(Domain domain, const std::vector<std::vector<int>>& feature_sets);

  // Every size-k feature subset when `count` is empty or equals C(d, k);
  // otherwise `count` subsets sampled uniformly without replacement and
  // listed in lexicographic order.
  static QuerySet Build(const Domain& domain, int k,
                        std::optional<std::size_t> count, Rng& rng);

  const Domain& domain() const { return domain_; }
  std::size_t size() const { return total_; }
  std::size_t num_workloads() const { return workloads_.size(); }
  const Workload& workload(std::size_t w) const { return workloads_[w]; }
  std::size_t workload_offset(std::size_t w) const { return offsets_[w]; }
  // Largest feature-subset size among the workloads.
  int max_order() const { return max_order_; }

  QueryLocation Locate(std::size_t global) const;
  std::size_t GlobalIndex(std::size_t workload, std::size_t local) const {
    return offsets_[workload] + local;
  }
  MarginalQuery Query(std::size_t global) const;

  std::vector<double> AnswerHistogram(const Histogram& hist) const;
  // Answers on a dense mass vector indexed by cell.
  std::vector<double> AnswerDense(std::span<const double> mass) const;
  std::vector<double> AnswerRecords(const Dataset& data) const;
  std::vector<double> AnswerBatch(const ProbabilityBatch& batch) const;

  // Answers of one record: for each workload, the local query it satisfies.
  void RecordMatches(std::span<const int> record,
                     std::span<std::size_t> global_out) const;

  // Workloads whose features all lie in `attrs`.
  std::vector<std::size_t> WorkloadsWithin(std::span<const std::size_t> attrs) const;

 private:
  void BuildCellMaps();

  Domain domain_;
  std::vector<Workload> workloads_;
  std::vector<std::size_t> offsets_;
  std::size_t total_ = 0;
  int max_order_ = 0;
  // Per-workload cell -> local query map, built when it fits in memory.
  std::vector<std::vector<std::uint32_t>> cell_maps_;
};

// A query paired with the answer a synthesizer should reproduce.
struct Constraint {
  MarginalQuery query;
  double target = 0.0;
};

std::uint64_t BinomialCoefficient(int n, int k);

}  // namespace dpsynth

#endif  // DPSYNTH_MARGINALS_H_
