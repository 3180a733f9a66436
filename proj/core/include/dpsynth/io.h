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

#ifndef DPSYNTH_IO_H_
#define DPSYNTH_IO_H_

#include <string>

#include "dpsynth/domain.h"

namespace dpsynth {

// Domain file: {"attributes":[{"name":<string>,"size":<int>},...]}.
Domain ParseDomainJson(const std::string& text);
std::string DomainToJson(const Domain& domain);
Domain LoadDomain(const std::string& path);
void SaveDomain(const Domain& domain, const std::string& path);

// CSV with a header row of attribute names followed by integer codes. The
// header must name every attribute of `domain` exactly once (any column
// order). Non-integer or out-of-range entries are errors.
Dataset LoadDataset(const std::string& path, const Domain& domain);

// Like LoadDataset, but the header may name any nonempty subset of the
// domain's attributes; the result lives on the restricted domain.
Dataset LoadDatasetSubset(const std::string& path, const Domain& domain);

void WriteDatasetCsv(const Dataset& data, const std::string& path);

// Sparse histogram container:
//   bytes 0-3   magic "DPSH"
//   u32         format version (1)
//   u64         length of the domain JSON, followed by its UTF-8 bytes
//   u64         entry count m
//   m x {u64 cell, f64 mass}  (little endian, nonzero cells, ascending)
void WriteHistogramBinary(const Domain& domain,
                          std::span<const std::uint64_t> cells,
                          std::span<const double> mass,
                          const std::string& path);
void WriteHistogramBinary(const Histogram& hist, const std::string& path);
Histogram ReadHistogramBinary(const std::string& path);

}  // namespace dpsynth

#endif  // DPSYNTH_IO_H_
