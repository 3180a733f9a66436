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

#include "dpsynth/domain.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include "dpsynth/error.h"

namespace dpsynth {

Domain::Domain(std::vector<Attribute> attributes)
    : attributes_(std::move(attributes)) {
  Require(!attributes_.empty(), "domain must have at least one attribute");
  std::set<std::string> names;
  for (const auto& attr : attributes_) {
    Require(!attr.name.empty(), "attribute names must be nonempty");
    Require(attr.size >= 2,
            "attribute '" + attr.name + "' must have size >= 2");
    Require(names.insert(attr.name).second,
            "duplicate attribute name '" + attr.name + "'");
  }
  const std::size_t d = attributes_.size();
  strides_.assign(d, 1);
  offsets_.assign(d, 0);
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t stride = 1;
  for (std::size_t i = d; i-- > 0;) {
    strides_[i] = stride;
    const auto size = static_cast<std::uint64_t>(attributes_[i].size);
    if (overflow_ || stride > kMax / size) {
      overflow_ = true;
      stride = kMax;
    } else {
      stride *= size;
    }
  }
  total_cells_ = stride;
  std::size_t offset = 0;
  for (std::size_t i = 0; i < d; ++i) {
    offsets_[i] = offset;
    offset += static_cast<std::size_t>(attributes_[i].size);
  }
  onehot_width_ = offset;
}

bool Domain::IsValidRecord(std::span<const int> record) const {
  if (record.size() != attributes_.size()) return false;
  for (std::size_t i = 0; i < record.size(); ++i) {
    if (record[i] < 0 || record[i] >= attributes_[i].size) return false;
  }
  return true;
}

std::uint64_t Domain::Encode(std::span<const int> record) const {
  if (overflow_) {
    Fail(ErrorCode::kCapacity, "domain too large to index cells");
  }
  Require(IsValidRecord(record), "record out of range for domain");
  std::uint64_t cell = 0;
  for (std::size_t i = 0; i < record.size(); ++i) {
    cell += static_cast<std::uint64_t>(record[i]) * strides_[i];
  }
  return cell;
}

void Domain::DecodeInto(std::uint64_t cell, std::span<int> out) const {
  Require(!overflow_ && cell < total_cells_, "cell index out of range");
  Require(out.size() == attributes_.size(), "decode buffer has wrong size");
  for (std::size_t i = 0; i < attributes_.size(); ++i) out[i] = ValueAt(cell, i);
}

std::vector<int> Domain::Decode(std::uint64_t cell) const {
  std::vector<int> record(attributes_.size());
  DecodeInto(cell, record);
  return record;
}

std::optional<std::size_t> Domain::IndexOf(std::string_view name) const {
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i].name == name) return i;
  }
  return std::nullopt;
}

Domain Domain::Restrict(std::span<const std::size_t> attrs) const {
  std::vector<std::size_t> sorted(attrs.begin(), attrs.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<Attribute> kept;
  for (std::size_t a : sorted) {
    Require(a < attributes_.size(), "attribute index out of range");
    kept.push_back(attributes_[a]);
  }
  return Domain(std::move(kept));
}

void RequireHistogramCapacity(const Domain& domain, std::uint64_t cap) {
  if (!domain.fits_in_cells() || domain.total_cells() > cap) {
    Fail(ErrorCode::kCapacity,
         "domain has more cells than the histogram cap (" +
             std::to_string(cap) + ")");
  }
}

Dataset::Dataset(Domain domain, std::vector<int> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  const std::size_t d = domain_.num_attributes();
  Require(d > 0, "dataset needs a nonempty domain");
  Require(values_.size() % d == 0, "record values not a multiple of d");
  size_ = values_.size() / d;
  for (std::size_t i = 0; i < size_; ++i) {
    Require(domain_.IsValidRecord(record(i)),
            "record " + std::to_string(i) + " out of range for domain");
  }
}

void NormalizeInPlace(std::span<double> mass) {
  double total = 0.0;
  for (double& m : mass) {
    if (m < 1e-300) m = 0.0;
    total += m;
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    Fail(ErrorCode::kNumerical, "cannot normalize a zero or non-finite mass");
  }
  for (double& m : mass) m /= total;
}

Histogram::Histogram(Domain domain, std::vector<double> mass)
    : domain_(std::move(domain)), mass_(std::move(mass)) {
  RequireHistogramCapacity(domain_, std::numeric_limits<std::uint64_t>::max() - 1);
  Require(mass_.size() == domain_.total_cells(),
          "histogram length does not match the domain");
  for (double m : mass_) {
    Require(m >= 0.0 && std::isfinite(m), "histogram mass must be >= 0");
  }
  NormalizeInPlace(mass_);
}

Histogram Histogram::Uniform(const Domain& domain) {
  RequireHistogramCapacity(domain, std::numeric_limits<std::uint64_t>::max() - 1);
  const auto cells = domain.total_cells();
  return Histogram(domain,
                   std::vector<double>(cells, 1.0 / static_cast<double>(cells)));
}

Histogram Histogram::FromRecords(const Dataset& data) {
  Require(!data.empty(), "empty dataset");
  const Domain& domain = data.domain();
  RequireHistogramCapacity(domain, std::numeric_limits<std::uint64_t>::max() - 1);
  std::vector<std::uint64_t> counts(domain.total_cells(), 0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    ++counts[domain.Encode(data.record(i))];
  }
  const auto n = static_cast<double>(data.size());
  std::vector<double> mass(counts.size());
  for (std::size_t c = 0; c < counts.size(); ++c) {
    mass[c] = static_cast<double>(counts[c]) / n;
  }
  Histogram hist;
  hist.domain_ = domain;
  hist.mass_ = std::move(mass);
  return hist;
}

Histogram Histogram::PointMass(const Domain& domain, std::uint64_t cell) {
  RequireHistogramCapacity(domain, std::numeric_limits<std::uint64_t>::max() - 1);
  Require(cell < domain.total_cells(), "cell index out of range");
  std::vector<double> mass(domain.total_cells(), 0.0);
  mass[cell] = 1.0;
  return Histogram(domain, std::move(mass));
}

std::vector<double> OneHot(const Domain& domain, std::span<const int> record) {
  Require(domain.IsValidRecord(record), "record out of range for domain");
  std::vector<double> v(domain.onehot_width(), 0.0);
  for (std::size_t i = 0; i < record.size(); ++i) {
    v[domain.onehot_offset(i) + static_cast<std::size_t>(record[i])] = 1.0;
  }
  return v;
}

Dataset SampleRecords(const Histogram& hist, std::size_t count, Rng& rng) {
  Require(count > 0, "sample count must be positive");
  const Domain& domain = hist.domain();
  std::discrete_distribution<std::uint64_t> pick(hist.mass().begin(),
                                                 hist.mass().end());
  const std::size_t d = domain.num_attributes();
  std::vector<int> values(count * d);
  for (std::size_t i = 0; i < count; ++i) {
    domain.DecodeInto(pick(rng), std::span<int>(values.data() + i * d, d));
  }
  return Dataset(domain, std::move(values));
}

}  // namespace dpsynth
