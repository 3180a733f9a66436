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

#include "dpsynth/distribution.h"

#include <algorithm>
#include <map>
#include <random>

#include "dpsynth/error.h"
#include "dpsynth/parallel.h"

namespace dpsynth {

SupportHistogram::SupportHistogram(const Histogram& hist)
    : domain_(hist.domain()),
      full_(true),
      mass_(hist.mass().begin(), hist.mass().end()) {}

SupportHistogram::SupportHistogram(Domain domain,
                                   std::vector<std::uint64_t> cells,
                                   std::vector<double> mass)
    : domain_(std::move(domain)),
      full_(false),
      cells_(std::move(cells)),
      mass_(std::move(mass)) {
  Require(!cells_.empty(), "support must be nonempty");
  Require(cells_.size() == mass_.size(), "support and mass differ in length");
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    Require(cells_[i] < domain_.total_cells(), "support cell out of range");
    Require(i == 0 || cells_[i - 1] < cells_[i],
            "support cells must be strictly increasing");
  }
  Normalize();
}

SupportHistogram SupportHistogram::Uniform(const Domain& domain) {
  return SupportHistogram(Histogram::Uniform(domain));
}

SupportHistogram SupportHistogram::Empirical(const Dataset& data) {
  Require(!data.empty(), "empty dataset");
  std::map<std::uint64_t, std::size_t> counts;
  for (std::size_t i = 0; i < data.size(); ++i) {
    ++counts[data.domain().Encode(data.record(i))];
  }
  std::vector<std::uint64_t> cells;
  std::vector<double> mass;
  for (const auto& [cell, count] : counts) {
    cells.push_back(cell);
    mass.push_back(static_cast<double>(count) / static_cast<double>(data.size()));
  }
  return SupportHistogram(data.domain(), std::move(cells), std::move(mass));
}

void SupportHistogram::Normalize() { NormalizeInPlace(mass_); }

double SupportHistogram::Answer(const MarginalQuery& q) const {
  ValidateQuery(domain_, q);
  double total = 0.0;
  ForEachMatching(q, [&](std::size_t i) { total += mass_[i]; });
  return total;
}

std::vector<double> SupportHistogram::AnswerAll(const QuerySet& queries) const {
  Require(queries.domain() == domain_, "query and histogram domains differ");
  if (full_) return queries.AnswerDense(mass_);
  std::vector<double> answers(queries.size(), 0.0);
  ParallelFor(queries.num_workloads(), [&](std::size_t w) {
    const Workload& wl = queries.workload(w);
    double* out = answers.data() + queries.workload_offset(w);
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      out[wl.LocalIndexOfCell(domain_, cells_[i])] += mass_[i];
    }
  });
  return answers;
}

Histogram SupportHistogram::ToHistogram() const {
  if (full_) return Histogram(domain_, mass_);
  RequireHistogramCapacity(domain_, kDefaultCellCap);
  std::vector<double> dense(domain_.total_cells(), 0.0);
  for (std::size_t i = 0; i < cells_.size(); ++i) dense[cells_[i]] = mass_[i];
  return Histogram(domain_, std::move(dense));
}

Dataset SupportHistogram::Sample(std::size_t count, Rng& rng) const {
  Require(count > 0, "sample count must be positive");
  std::discrete_distribution<std::size_t> pick(mass_.begin(), mass_.end());
  const std::size_t d = domain_.num_attributes();
  std::vector<int> values(count * d);
  for (std::size_t r = 0; r < count; ++r) {
    domain_.DecodeInto(cell(pick(rng)), std::span<int>(values.data() + r * d, d));
  }
  return Dataset(domain_, std::move(values));
}

Distribution::Distribution(SupportHistogram hist)
    : domain_(hist.domain()), repr_(std::move(hist)) {}

Distribution::Distribution(Domain domain, ProbabilityBatch batch)
    : domain_(std::move(domain)) {
  Require(batch.rows >= 1, "empty batch");
  Require(batch.width == domain_.onehot_width(), "batch width mismatch");
  Require(batch.values.size() == batch.rows * batch.width,
          "batch storage has the wrong size");
  repr_ = std::move(batch);
}

std::vector<double> Distribution::Answers(const QuerySet& queries) const {
  if (is_histogram()) return histogram().AnswerAll(queries);
  Require(queries.domain() == domain_, "query and distribution domains differ");
  return queries.AnswerBatch(batch());
}

Dataset Distribution::Sample(std::size_t count, Rng& rng) const {
  if (is_histogram()) return histogram().Sample(count, rng);
  Require(count > 0, "sample count must be positive");
  const ProbabilityBatch& b = batch();
  const std::size_t d = domain_.num_attributes();
  std::uniform_int_distribution<std::size_t> pick_row(0, b.rows - 1);
  std::vector<int> values(count * d);
  for (std::size_t r = 0; r < count; ++r) {
    const auto row = b.row(pick_row(rng));
    for (std::size_t a = 0; a < d; ++a) {
      const auto block = row.subspan(domain_.onehot_offset(a),
                                     static_cast<std::size_t>(domain_.size(a)));
      std::discrete_distribution<int> pick(block.begin(), block.end());
      values[r * d + a] = pick(rng);
    }
  }
  return Dataset(domain_, std::move(values));
}

Distribution AverageDistributions(std::span<const Distribution> items) {
  Require(!items.empty(), "nothing to average");
  const Domain& domain = items.front().domain();
  for (const auto& item : items) {
    if (!(item.domain() == domain)) {
      Fail(ErrorCode::kDomainMismatch, "averaged distributions have different domains");
    }
    Require(item.is_histogram() == items.front().is_histogram(),
            "cannot average histograms with product mixtures");
  }
  if (!items.front().is_histogram()) {
    ProbabilityBatch out;
    out.width = domain.onehot_width();
    for (const auto& item : items) {
      out.rows += item.batch().rows;
      out.values.insert(out.values.end(), item.batch().values.begin(),
                        item.batch().values.end());
    }
    return Distribution(domain, std::move(out));
  }
  const SupportHistogram& first = items.front().histogram();
  std::vector<double> mass(first.size(), 0.0);
  for (const auto& item : items) {
    const SupportHistogram& h = item.histogram();
    Require(h.full_domain() == first.full_domain() && h.size() == first.size(),
            "averaged histograms have different supports");
    for (std::size_t i = 0; i < mass.size(); ++i) {
      Require(h.cell(i) == first.cell(i), "averaged histograms have different supports");
      mass[i] += h.mass()[i];
    }
  }
  const double inv = 1.0 / static_cast<double>(items.size());
  for (double& m : mass) m *= inv;
  if (first.full_domain()) {
    return Distribution(SupportHistogram(Histogram(domain, std::move(mass))));
  }
  std::vector<std::uint64_t> cells(first.size());
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = first.cell(i);
  return Distribution(SupportHistogram(domain, std::move(cells), std::move(mass)));
}

}  // namespace dpsynth
