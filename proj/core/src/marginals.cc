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

#include "dpsynth/marginals.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dpsynth/error.h"
#include "dpsynth/parallel.h"

namespace dpsynth {
namespace {

// Cached cell maps are skipped past this many entries in total.
constexpr std::uint64_t kCellMapBudget = std::uint64_t{1} << 25;

void CheckSameDomain(const Domain& a, const Domain& b) {
  if (!(a == b)) Fail(ErrorCode::kDomainMismatch, "query and data domains differ");
}

}  // namespace

std::uint64_t BinomialCoefficient(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    result = result * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return result;
}

void ValidateQuery(const Domain& domain, const MarginalQuery& q) {
  Require(!q.features.empty(), "marginal query needs at least one feature");
  Require(q.features.size() == q.targets.size(),
          "marginal query features and targets differ in length");
  for (std::size_t i = 0; i < q.features.size(); ++i) {
    const int f = q.features[i];
    Require(f >= 0 && static_cast<std::size_t>(f) < domain.num_attributes(),
            "query feature index out of range");
    Require(i == 0 || q.features[i - 1] < f,
            "query features must be strictly increasing");
    Require(q.targets[i] >= 0 && q.targets[i] < domain.size(static_cast<std::size_t>(f)),
            "query target out of range");
  }
}

std::vector<std::size_t> OnehotIndices(const Domain& domain,
                                       const MarginalQuery& q) {
  std::vector<std::size_t> idx(q.features.size());
  for (std::size_t i = 0; i < q.features.size(); ++i) {
    idx[i] = domain.onehot_offset(static_cast<std::size_t>(q.features[i])) +
             static_cast<std::size_t>(q.targets[i]);
  }
  return idx;
}

bool MatchesRecord(const MarginalQuery& q, std::span<const int> record) {
  for (std::size_t i = 0; i < q.features.size(); ++i) {
    if (record[static_cast<std::size_t>(q.features[i])] != q.targets[i]) return false;
  }
  return true;
}

bool MatchesCell(const Domain& domain, const MarginalQuery& q, std::uint64_t cell) {
  for (std::size_t i = 0; i < q.features.size(); ++i) {
    if (domain.ValueAt(cell, static_cast<std::size_t>(q.features[i])) != q.targets[i]) {
      return false;
    }
  }
  return true;
}

double AnswerHistogram(const MarginalQuery& q, const Histogram& hist) {
  ValidateQuery(hist.domain(), q);
  const auto mass = hist.mass();
  double total = 0.0;
  ForEachMatchingCell(hist.domain(), q, [&](std::uint64_t cell) { total += mass[cell]; });
  return total;
}

double AnswerRecords(const MarginalQuery& q, const Dataset& data) {
  ValidateQuery(data.domain(), q);
  Require(!data.empty(), "empty dataset");
  std::size_t count = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    count += MatchesRecord(q, data.record(i)) ? 1 : 0;
  }
  return static_cast<double>(count) / static_cast<double>(data.size());
}

double ProductQuery(const Domain& domain, const MarginalQuery& q,
                    std::span<const double> p) {
  ValidateQuery(domain, q);
  Require(p.size() == domain.onehot_width(),
          "probability vector length does not match the one-hot width");
  for (std::size_t a = 0; a < domain.num_attributes(); ++a) {
    double block = 0.0;
    for (int v = 0; v < domain.size(a); ++v) {
      const double x = p[domain.onehot_offset(a) + static_cast<std::size_t>(v)];
      Require(x >= -1e-12, "probability vector has a negative entry");
      block += x;
    }
    Require(std::abs(block - 1.0) <= 1e-6,
            "attribute block of the probability vector does not sum to 1");
  }
  double product = 1.0;
  for (std::size_t j : OnehotIndices(domain, q)) product *= p[j];
  return product;
}

void AccumulateProductGradient(const double* p, std::span<const std::size_t> idx,
                               double coef, double* dp) {
  // Products of the entries before position t, then a running suffix.
  double prefix[8];
  std::vector<double> spill;
  double* pre = prefix;
  if (idx.size() + 1 > 8) {
    spill.resize(idx.size() + 1);
    pre = spill.data();
  }
  pre[0] = 1.0;
  for (std::size_t t = 0; t < idx.size(); ++t) pre[t + 1] = pre[t] * p[idx[t]];
  double suffix = 1.0;
  for (std::size_t t = idx.size(); t-- > 0;) {
    dp[idx[t]] += coef * pre[t] * suffix;
    suffix *= p[idx[t]];
  }
}

double AnswerBatch(const Domain& domain, const MarginalQuery& q,
                   const ProbabilityBatch& batch) {
  Require(batch.rows >= 1, "empty batch");
  double total = 0.0;
  for (std::size_t r = 0; r < batch.rows; ++r) {
    total += ProductQuery(domain, q, batch.row(r));
  }
  return total / static_cast<double>(batch.rows);
}

Workload::Workload(const Domain& domain, std::vector<int> features)
    : features_(std::move(features)) {
  Require(!features_.empty(), "workload needs at least one feature");
  sizes_.resize(features_.size());
  local_strides_.resize(features_.size());
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const int f = features_[i];
    Require(f >= 0 && static_cast<std::size_t>(f) < domain.num_attributes(),
            "workload feature out of range");
    Require(i == 0 || features_[i - 1] < f,
            "workload features must be strictly increasing");
    sizes_[i] = domain.size(static_cast<std::size_t>(f));
  }
  std::size_t stride = 1;
  for (std::size_t i = features_.size(); i-- > 0;) {
    local_strides_[i] = stride;
    stride *= static_cast<std::size_t>(sizes_[i]);
  }
  num_queries_ = stride;
}

MarginalQuery Workload::Query(std::size_t local) const {
  Require(local < num_queries_, "local query index out of range");
  MarginalQuery q{features_, std::vector<int>(features_.size())};
  for (std::size_t i = 0; i < features_.size(); ++i) {
    q.targets[i] = static_cast<int>((local / local_strides_[i]) %
                                    static_cast<std::size_t>(sizes_[i]));
  }
  return q;
}

std::size_t Workload::LocalIndexOfRecord(std::span<const int> record) const {
  std::size_t local = 0;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    local += static_cast<std::size_t>(record[static_cast<std::size_t>(features_[i])]) *
             local_strides_[i];
  }
  return local;
}

std::size_t Workload::LocalIndexOfCell(const Domain& domain, std::uint64_t cell) const {
  std::size_t local = 0;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    local += static_cast<std::size_t>(
                 domain.ValueAt(cell, static_cast<std::size_t>(features_[i]))) *
             local_strides_[i];
  }
  return local;
}

std::size_t Workload::LocalIndexOfTargets(std::span<const int> targets) const {
  std::size_t local = 0;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    local += static_cast<std::size_t>(targets[i]) * local_strides_[i];
  }
  return local;
}

QuerySet::QuerySet(Domain domain, const std::vector<std::vector<int>>& feature_sets)
    : domain_(std::move(domain)) {
  Require(!feature_sets.empty(), "query set needs at least one workload");
  offsets_.reserve(feature_sets.size());
  for (const auto& features : feature_sets) {
    workloads_.emplace_back(domain_, features);
    offsets_.push_back(total_);
    total_ += workloads_.back().num_queries();
    max_order_ = std::max(max_order_, static_cast<int>(features.size()));
  }
  BuildCellMaps();
}

void QuerySet::BuildCellMaps() {
  if (!domain_.fits_in_cells() || domain_.total_cells() > kDefaultCellCap) return;
  const std::uint64_t cells = domain_.total_cells();
  if (cells * workloads_.size() > kCellMapBudget) return;
  cell_maps_.resize(workloads_.size());
  ParallelFor(workloads_.size(), [&](std::size_t w) {
    auto& map = cell_maps_[w];
    map.resize(cells);
    for (std::uint64_t c = 0; c < cells; ++c) {
      map[c] = static_cast<std::uint32_t>(workloads_[w].LocalIndexOfCell(domain_, c));
    }
  });
}

QuerySet QuerySet::Build(const Domain& domain, int k,
                         std::optional<std::size_t> count, Rng& rng) {
  const int d = static_cast<int>(domain.num_attributes());
  Require(k >= 1 && k <= d, "marginal order k must satisfy 1 <= k <= d");
  const std::uint64_t total = BinomialCoefficient(d, k);
  Require(total <= 50'000'000, "too many feature subsets to enumerate");
  if (count) {
    Require(*count >= 1, "workload count must be positive");
    Require(*count <= total, "workload count " + std::to_string(*count) +
                                 " exceeds C(d,k) = " + std::to_string(total));
  }
  std::vector<std::vector<int>> subsets;
  subsets.reserve(static_cast<std::size_t>(total));
  std::vector<int> combo(static_cast<std::size_t>(k));
  std::iota(combo.begin(), combo.end(), 0);
  while (true) {
    subsets.push_back(combo);
    int i = k - 1;
    while (i >= 0 && combo[static_cast<std::size_t>(i)] == d - k + i) --i;
    if (i < 0) break;
    ++combo[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) {
      combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  if (count && *count < subsets.size()) {
    // Partial Fisher-Yates, then restore lexicographic order.
    for (std::size_t i = 0; i < *count; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, subsets.size() - 1);
      std::swap(subsets[i], subsets[pick(rng)]);
    }
    subsets.resize(*count);
    std::sort(subsets.begin(), subsets.end());
  }
  return QuerySet(domain, subsets);
}

QueryLocation QuerySet::Locate(std::size_t global) const {
  Require(global < total_, "global query index out of range");
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), global);
  const auto w = static_cast<std::size_t>(it - offsets_.begin()) - 1;
  return {w, global - offsets_[w]};
}

MarginalQuery QuerySet::Query(std::size_t global) const {
  const auto loc = Locate(global);
  return workloads_[loc.workload].Query(loc.local);
}

std::vector<double> QuerySet::AnswerHistogram(const Histogram& hist) const {
  CheckSameDomain(domain_, hist.domain());
  return AnswerDense(hist.mass());
}

std::vector<double> QuerySet::AnswerDense(std::span<const double> mass) const {
  Require(domain_.fits_in_cells() && mass.size() == domain_.total_cells(),
          "mass vector does not cover the domain");
  std::vector<double> answers(total_, 0.0);
  ParallelFor(workloads_.size(), [&](std::size_t w) {
    double* out = answers.data() + offsets_[w];
    if (!cell_maps_.empty()) {
      const auto& map = cell_maps_[w];
      for (std::size_t c = 0; c < mass.size(); ++c) out[map[c]] += mass[c];
    } else {
      for (std::size_t c = 0; c < mass.size(); ++c) {
        out[workloads_[w].LocalIndexOfCell(domain_, c)] += mass[c];
      }
    }
  });
  return answers;
}

std::vector<double> QuerySet::AnswerRecords(const Dataset& data) const {
  CheckSameDomain(domain_, data.domain());
  Require(!data.empty(), "empty dataset");
  std::vector<std::size_t> counts(total_, 0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto rec = data.record(i);
    for (std::size_t w = 0; w < workloads_.size(); ++w) {
      ++counts[offsets_[w] + workloads_[w].LocalIndexOfRecord(rec)];
    }
  }
  std::vector<double> answers(total_);
  const auto n = static_cast<double>(data.size());
  for (std::size_t j = 0; j < total_; ++j) {
    answers[j] = static_cast<double>(counts[j]) / n;
  }
  return answers;
}

std::vector<double> QuerySet::AnswerBatch(const ProbabilityBatch& batch) const {
  Require(batch.rows >= 1, "empty batch");
  Require(batch.width == domain_.onehot_width(), "batch width mismatch");
  std::vector<double> answers(total_, 0.0);
  const double inv_rows = 1.0 / static_cast<double>(batch.rows);
  ParallelFor(workloads_.size(), [&](std::size_t w) {
    const Workload& wl = workloads_[w];
    const auto& features = wl.features();
    std::vector<std::size_t> offsets(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
      offsets[i] = domain_.onehot_offset(static_cast<std::size_t>(features[i]));
    }
    double* out = answers.data() + offsets_[w];
    for (std::size_t local = 0; local < wl.num_queries(); ++local) {
      const MarginalQuery q = wl.Query(local);
      double total = 0.0;
      for (std::size_t r = 0; r < batch.rows; ++r) {
        const double* p = batch.values.data() + r * batch.width;
        double prod = 1.0;
        for (std::size_t i = 0; i < features.size(); ++i) {
          prod *= p[offsets[i] + static_cast<std::size_t>(q.targets[i])];
        }
        total += prod;
      }
      out[local] = total * inv_rows;
    }
  });
  return answers;
}

void QuerySet::RecordMatches(std::span<const int> record,
                             std::span<std::size_t> global_out) const {
  Require(global_out.size() == workloads_.size(), "output span has wrong size");
  for (std::size_t w = 0; w < workloads_.size(); ++w) {
    global_out[w] = offsets_[w] + workloads_[w].LocalIndexOfRecord(record);
  }
}

std::vector<std::size_t> QuerySet::WorkloadsWithin(
    std::span<const std::size_t> attrs) const {
  std::vector<std::size_t> result;
  for (std::size_t w = 0; w < workloads_.size(); ++w) {
    bool inside = true;
    for (int f : workloads_[w].features()) {
      if (std::find(attrs.begin(), attrs.end(), static_cast<std::size_t>(f)) ==
          attrs.end()) {
        inside = false;
        break;
      }
    }
    if (inside) result.push_back(w);
  }
  return result;
}

}  // namespace dpsynth
