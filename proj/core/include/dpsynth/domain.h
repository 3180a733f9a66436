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

#ifndef DPSYNTH_DOMAIN_H_
#define DPSYNTH_DOMAIN_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dpsynth {

// All randomness flows through one explicitly seeded engine per run.
using Rng = std::mt19937_64;

// Histogram-based synthesizers refuse domains larger than this many cells.
inline constexpr std::uint64_t kDefaultCellCap = std::uint64_t{1} << 22;

struct Attribute {
  std::string name;
  int size = 0;

  bool operator==(const Attribute&) const = default;
};

// Ordered categorical attributes. Cells are indexed row-major: the last
// attribute varies fastest.
class Domain {
 public:
  Domain() = default;
  explicit Domain(std::vector<Attribute> attributes);

  std::size_t num_attributes() const { return attributes_.size(); }
  const std::vector<Attribute>& attributes() const { return attributes_; }
  const Attribute& attribute(std::size_t i) const { return attributes_[i]; }
  int size(std::size_t i) const { return attributes_[i].size; }

  // Saturates at UINT64_MAX when the product overflows; see fits_in_cells().
  std::uint64_t total_cells() const { return total_cells_; }
  bool fits_in_cells() const { return !overflow_; }

  std::size_t onehot_width() const { return onehot_width_; }
  std::size_t onehot_offset(std::size_t attr) const { return offsets_[attr]; }
  std::uint64_t stride(std::size_t attr) const { return strides_[attr]; }

  std::uint64_t Encode(std::span<const int> record) const;
  std::vector<int> Decode(std::uint64_t cell) const;
  void DecodeInto(std::uint64_t cell, std::span<int> out) const;
  int ValueAt(std::uint64_t cell, std::size_t attr) const {
    return static_cast<int>((cell / strides_[attr]) %
                            static_cast<std::uint64_t>(attributes_[attr].size));
  }

  bool IsValidRecord(std::span<const int> record) const;
  std::optional<std::size_t> IndexOf(std::string_view name) const;

  // Sub-domain holding the named attributes in this domain's order.
  Domain Restrict(std::span<const std::size_t> attrs) const;

  bool operator==(const Domain& other) const {
    return attributes_ == other.attributes_;
  }

 private:
  std::vector<Attribute> attributes_;
  std::vector<std::uint64_t> strides_;
  std::vector<std::size_t> offsets_;
  std::uint64_t total_cells_ = 1;
  std::size_t onehot_width_ = 0;
  bool overflow_ = false;
};

// Throws ErrorCode::kCapacity when the domain cannot be held as a dense
// histogram under `cap` cells.
void RequireHistogramCapacity(const Domain& domain, std::uint64_t cap);

// Integer-coded records, stored row-major.
class Dataset {
 public:
  Dataset() = default;
  Dataset(Domain domain, std::vector<int> values);

  const Domain& domain() const { return domain_; }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  std::span<const int> record(std::size_t i) const {
    return {values_.data() + i * domain_.num_attributes(),
            domain_.num_attributes()};
  }
  const std::vector<int>& values() const { return values_; }

 private:
  Domain domain_;
  std::vector<int> values_;
  std::size_t size_ = 0;
};

// Flushes entries below 1e-300 to zero and divides by the exact sum.
void NormalizeInPlace(std::span<double> mass);

// Normalized distribution over every cell of a domain.
class Histogram {
 public:
  Histogram() = default;
  // Validates length and sign, then normalizes.
  Histogram(Domain domain, std::vector<double> mass);

  static Histogram Uniform(const Domain& domain);
  static Histogram FromRecords(const Dataset& data);
  static Histogram PointMass(const Domain& domain, std::uint64_t cell);

  const Domain& domain() const { return domain_; }
  std::span<const double> mass() const { return mass_; }
  std::span<double> mutable_mass() { return mass_; }
  double operator[](std::uint64_t cell) const { return mass_[cell]; }
  std::size_t size() const { return mass_.size(); }

 private:
  Domain domain_;
  std::vector<double> mass_;
};

std::vector<double> OneHot(const Domain& domain, std::span<const int> record);

// Draws `count` i.i.d. records from the histogram.
Dataset SampleRecords(const Histogram& hist, std::size_t count, Rng& rng);

}  // namespace dpsynth

#endif  // DPSYNTH_DOMAIN_H_
