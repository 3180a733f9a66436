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

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "dpsynth/error.h"
#include "testing/test_util.h"

namespace dpsynth {
namespace {

using ::dpsynth::testing::ReadText;
using ::dpsynth::testing::TempDir;
using ::dpsynth::testing::WriteText;
using ::testing::ElementsAre;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kNumerical;
}

const char kDomain[] =
    R"({"attributes":[{"name":"age","size":3},{"name":"sex","size":2}]})";

TEST(DomainJsonTest, RoundTrip) {
  const Domain d = ParseDomainJson(kDomain);
  ASSERT_EQ(d.num_attributes(), 2u);
  EXPECT_EQ(d.attribute(0).name, "age");
  EXPECT_EQ(d.size(1), 2);
  EXPECT_EQ(ParseDomainJson(DomainToJson(d)), d);
}

TEST(DomainJsonTest, MalformedIsInvalidArgument) {
  EXPECT_EQ(CodeOf([] { ParseDomainJson("{"); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { ParseDomainJson(R"({"attributes":[{"name":"a"}]})"); }),
            ErrorCode::kInvalidArgument);
}

TEST(DatasetCsvTest, ColumnsMayBeReordered) {
  TempDir dir;
  WriteText(dir.File("d.csv"), "sex,age\n1,2\n0,0\n");
  const Dataset data = LoadDataset(dir.File("d.csv"), ParseDomainJson(kDomain));
  ASSERT_EQ(data.size(), 2u);
  EXPECT_THAT(testing::Vec(data.record(0)), ElementsAre(2, 1));
  EXPECT_THAT(testing::Vec(data.record(1)), ElementsAre(0, 0));
}

TEST(DatasetCsvTest, BadEntriesAreHardErrors) {
  TempDir dir;
  const Domain d = ParseDomainJson(kDomain);
  for (const char* body : {"age,sex\n3,0\n", "age,sex\n1.5,0\n", "age,sex\nx,0\n",
                           "age,sex\n1\n", "age,sex,age\n1,0,1\n", "age,sex\n-1,0\n"}) {
    WriteText(dir.File("bad.csv"), body);
    EXPECT_EQ(CodeOf([&] { LoadDataset(dir.File("bad.csv"), d); }),
              ErrorCode::kInvalidArgument)
        << body;
  }
  for (const char* body : {"age\n1\n", "age,sex,zip\n1,0,1\n"}) {
    WriteText(dir.File("bad.csv"), body);
    EXPECT_EQ(CodeOf([&] { LoadDataset(dir.File("bad.csv"), d); }),
              ErrorCode::kDomainMismatch)
        << body;
  }
}

TEST(DatasetCsvTest, MissingFileIsIo) {
  EXPECT_EQ(CodeOf([] { LoadDataset("/nonexistent/x.csv", ParseDomainJson(kDomain)); }),
            ErrorCode::kIo);
}

TEST(DatasetCsvTest, WriteThenLoad) {
  TempDir dir;
  const Domain d = ParseDomainJson(kDomain);
  const Dataset data(d, {2, 1, 0, 0, 1, 1});
  WriteDatasetCsv(data, dir.File("out.csv"));
  EXPECT_EQ(ReadText(dir.File("out.csv")), "age,sex\n2,1\n0,0\n1,1\n");
  EXPECT_EQ(LoadDataset(dir.File("out.csv"), d).values(), data.values());
}

TEST(DatasetCsvTest, SubsetLivesOnRestrictedDomain) {
  TempDir dir;
  WriteText(dir.File("p.csv"), "sex\n1\n0\n1\n");
  const Dataset pub = LoadDatasetSubset(dir.File("p.csv"), ParseDomainJson(kDomain));
  ASSERT_EQ(pub.domain().num_attributes(), 1u);
  EXPECT_EQ(pub.domain().attribute(0).name, "sex");
  EXPECT_EQ(pub.size(), 3u);
}

TEST(HistogramBinaryTest, RoundTripIsExact) {
  TempDir dir;
  const Domain d = ParseDomainJson(kDomain);
  const Histogram h(d, {0.1, 0.0, 0.2, 0.3, 0.0, 0.4});
  WriteHistogramBinary(h, dir.File("h.bin"));
  const Histogram back = ReadHistogramBinary(dir.File("h.bin"));
  EXPECT_EQ(back.domain(), d);
  EXPECT_THAT(testing::Vec(back.mass()), ElementsAre(h[0], 0.0, h[2], h[3], 0.0, h[5]));
}

TEST(HistogramBinaryTest, RejectsGarbage) {
  TempDir dir;
  WriteText(dir.File("g.bin"), "not a histogram");
  EXPECT_THROW(ReadHistogramBinary(dir.File("g.bin")), Error);
}

}  // namespace
}  // namespace dpsynth
