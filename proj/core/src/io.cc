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

#include "dpsynth/io.h"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "dpsynth/error.h"
#include "json.hpp"

namespace dpsynth {
namespace {

using nlohmann::json;

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::ofstream OpenForWrite(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  return out;
}

std::string Trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(Trim(std::string_view(line).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

int ParseCode(const std::string& field, const std::string& path,
              std::size_t line_no) {
  int value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    Fail(ErrorCode::kInvalidArgument, path + ":" + std::to_string(line_no) +
                                          ": non-integer value '" + field + "'");
  }
  return value;
}

// Reads the CSV into columns named by the header, mapped onto `domain`.
Dataset ReadCsv(const std::string& path, const Domain& domain, bool allow_subset) {
  std::istringstream in(ReadFile(path));
  std::string line;
  if (!std::getline(in, line)) {
    Fail(ErrorCode::kInvalidArgument, path + ": missing header row");
  }
  const auto header = SplitCsvLine(line);
  std::vector<std::size_t> attr_of_column;
  std::vector<bool> seen(domain.num_attributes(), false);
  for (const auto& name : header) {
    const auto idx = domain.IndexOf(name);
    if (!idx) {
      Fail(ErrorCode::kDomainMismatch,
           path + ": column '" + name + "' is not in the domain");
    }
    if (seen[*idx]) {
      Fail(ErrorCode::kInvalidArgument, path + ": duplicate column '" + name + "'");
    }
    seen[*idx] = true;
    attr_of_column.push_back(*idx);
  }
  std::vector<std::size_t> kept;
  for (std::size_t a = 0; a < seen.size(); ++a) {
    if (seen[a]) {
      kept.push_back(a);
    } else if (!allow_subset) {
      Fail(ErrorCode::kDomainMismatch, path + ": missing column '" +
                                           domain.attribute(a).name + "'");
    }
  }
  const Domain target = allow_subset ? domain.Restrict(kept) : domain;
  // Position of each domain attribute inside the (possibly restricted) domain.
  std::vector<std::size_t> position(domain.num_attributes(), 0);
  for (std::size_t i = 0; i < kept.size(); ++i) position[kept[i]] = i;

  const std::size_t d = target.num_attributes();
  std::vector<int> values;
  std::vector<int> row(d);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const auto fields = SplitCsvLine(line);
    if (fields.size() != header.size()) {
      Fail(ErrorCode::kInvalidArgument,
           path + ":" + std::to_string(line_no) + ": expected " +
               std::to_string(header.size()) + " fields");
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::size_t attr = attr_of_column[c];
      const int value = ParseCode(fields[c], path, line_no);
      if (value < 0 || value >= domain.size(attr)) {
        Fail(ErrorCode::kInvalidArgument,
             path + ":" + std::to_string(line_no) + ": value " +
                 std::to_string(value) + " out of range for '" +
                 domain.attribute(attr).name + "'");
      }
      row[position[attr]] = value;
    }
    values.insert(values.end(), row.begin(), row.end());
  }
  return Dataset(target, std::move(values));
}

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutU64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class ByteReader {
 public:
  ByteReader(const std::string& bytes, const std::string& path)
      : bytes_(bytes), path_(path) {}

  std::uint64_t U64() { return Read(8); }
  std::uint32_t U32() { return static_cast<std::uint32_t>(Read(4)); }
  std::string Bytes(std::uint64_t n) {
    Need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool AtEnd() const { return pos_ == bytes_.size(); }

 private:
  void Need(std::uint64_t n) const {
    if (bytes_.size() - pos_ < n) {
      Fail(ErrorCode::kIo, path_ + ": truncated histogram file");
    }
  }
  std::uint64_t Read(int width) {
    Need(static_cast<std::uint64_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += static_cast<std::size_t>(width);
    return v;
  }

  const std::string& bytes_;
  const std::string& path_;
  std::size_t pos_ = 0;
};

constexpr char kHistogramMagic[4] = {'D', 'P', 'S', 'H'};
constexpr std::uint32_t kHistogramVersion = 1;

}  // namespace

Domain ParseDomainJson(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kInvalidArgument, std::string("malformed domain JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("attributes") ||
      !doc["attributes"].is_array()) {
    Fail(ErrorCode::kInvalidArgument, "domain JSON needs an 'attributes' array");
  }
  std::vector<Attribute> attrs;
  for (const auto& a : doc["attributes"]) {
    if (!a.is_object() || !a.contains("name") || !a.contains("size") ||
        !a["name"].is_string() || !a["size"].is_number_integer()) {
      Fail(ErrorCode::kInvalidArgument,
           "each attribute needs a string 'name' and integer 'size'");
    }
    attrs.push_back({a["name"].get<std::string>(), a["size"].get<int>()});
  }
  return Domain(std::move(attrs));
}

std::string DomainToJson(const Domain& domain) {
  json attrs = json::array();
  for (const auto& a : domain.attributes()) {
    attrs.push_back({{"name", a.name}, {"size", a.size}});
  }
  return json{{"attributes", attrs}}.dump();
}

Domain LoadDomain(const std::string& path) { return ParseDomainJson(ReadFile(path)); }

void SaveDomain(const Domain& domain, const std::string& path) {
  auto out = OpenForWrite(path);
  out << DomainToJson(domain) << "\n";
  if (!out) Fail(ErrorCode::kIo, "failed writing '" + path + "'");
}

Dataset LoadDataset(const std::string& path, const Domain& domain) {
  return ReadCsv(path, domain, /*allow_subset=*/false);
}

Dataset LoadDatasetSubset(const std::string& path, const Domain& domain) {
  return ReadCsv(path, domain, /*allow_subset=*/true);
}

void WriteDatasetCsv(const Dataset& data, const std::string& path) {
  auto out = OpenForWrite(path);
  const Domain& domain = data.domain();
  for (std::size_t a = 0; a < domain.num_attributes(); ++a) {
    out << (a ? "," : "") << domain.attribute(a).name;
  }
  out << "\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto rec = data.record(i);
    for (std::size_t a = 0; a < rec.size(); ++a) out << (a ? "," : "") << rec[a];
    out << "\n";
  }
  if (!out) Fail(ErrorCode::kIo, "failed writing '" + path + "'");
}

void WriteHistogramBinary(const Domain& domain,
                          std::span<const std::uint64_t> cells,
                          std::span<const double> mass,
                          const std::string& path) {
  Require(cells.size() == mass.size(), "cells and mass lengths differ");
  std::string bytes(kHistogramMagic, 4);
  PutU32(bytes, kHistogramVersion);
  const std::string domain_json = DomainToJson(domain);
  PutU64(bytes, domain_json.size());
  bytes += domain_json;
  std::uint64_t nonzero = 0;
  for (double m : mass) nonzero += m > 0.0 ? 1 : 0;
  PutU64(bytes, nonzero);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!(mass[i] > 0.0)) continue;
    PutU64(bytes, cells[i]);
    PutU64(bytes, std::bit_cast<std::uint64_t>(mass[i]));
  }
  auto out = OpenForWrite(path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorCode::kIo, "failed writing '" + path + "'");
}

void WriteHistogramBinary(const Histogram& hist, const std::string& path) {
  std::vector<std::uint64_t> cells(hist.size());
  for (std::size_t c = 0; c < cells.size(); ++c) cells[c] = c;
  WriteHistogramBinary(hist.domain(), cells, hist.mass(), path);
}

Histogram ReadHistogramBinary(const std::string& path) {
  const std::string bytes = ReadFile(path);
  ByteReader reader(bytes, path);
  if (reader.Bytes(4) != std::string(kHistogramMagic, 4)) {
    Fail(ErrorCode::kIo, path + ": not a histogram file");
  }
  if (reader.U32() != kHistogramVersion) {
    Fail(ErrorCode::kIo, path + ": unsupported histogram version");
  }
  const Domain domain = ParseDomainJson(reader.Bytes(reader.U64()));
  RequireHistogramCapacity(domain, kDefaultCellCap);
  std::vector<double> mass(domain.total_cells(), 0.0);
  const std::uint64_t entries = reader.U64();
  for (std::uint64_t i = 0; i < entries; ++i) {
    const std::uint64_t cell = reader.U64();
    const double m = std::bit_cast<double>(reader.U64());
    if (cell >= mass.size()) Fail(ErrorCode::kIo, path + ": cell out of range");
    mass[cell] = m;
  }
  if (!reader.AtEnd()) Fail(ErrorCode::kIo, path + ": trailing bytes");
  return Histogram(domain, std::move(mass));
}

}  // namespace dpsynth
