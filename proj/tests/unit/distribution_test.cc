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

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "dpsynth/error.h"
#include "testing/test_util.h"

namespace dpsynth {
namespace {

using ::testing::DoubleEq;
using ::testing::ElementsAre;

const Domain kDomain({{"a", 2}, {"b", 3}});

TEST(SupportHistogramTest, EmpiricalSupportIsSortedDistinctCells) {
  const Dataset data(kDomain, {1, 2, 0, 1, 1, 2, 1, 2});
  const SupportHistogram s = SupportHistogram::Empirical(data);
  EXPECT_FALSE(s.full_domain());
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.cell(0), 1u);
  EXPECT_EQ(s.cell(1), 5u);
  EXPECT_THAT(testing::Vec(s.mass()), ElementsAre(0.25, 0.75));
  EXPECT_DOUBLE_EQ(s.Answer({{1}, {2}}), 0.75);
  const Histogram dense = s.ToHistogram();
  EXPECT_THAT(testing::Vec(dense.mass()), ElementsAre(0, 0.25, 0, 0, 0, 0.75));
}

TEST(SupportHistogramTest, RestrictedAndDenseAnswersAgree) {
  Rng rng(0);
  const QuerySet qs = QuerySet::Build(kDomain, 1, std::nullopt, rng);
  const SupportHistogram sparse(kDomain, {0, 2, 3}, {0.2, 0.3, 0.5});
  const SupportHistogram dense(sparse.ToHistogram());
  EXPECT_TRUE(dense.full_domain());
  const auto a = sparse.AnswerAll(qs);
  const auto b = dense.AnswerAll(qs);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-15);
}

TEST(SupportHistogramTest, RejectsBadSupport) {
  EXPECT_THROW(SupportHistogram(kDomain, {2, 1}, {0.5, 0.5}), Error);
  EXPECT_THROW(SupportHistogram(kDomain, {1, 9}, {0.5, 0.5}), Error);
  EXPECT_THROW(SupportHistogram(kDomain, {1}, {0.5, 0.5}), Error);
}

TEST(SupportHistogramTest, SamplingStaysOnSupport) {
  const SupportHistogram s(kDomain, {1, 4}, {0.5, 0.5});
  Rng rng(2);
  const Dataset d = s.Sample(200, rng);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto c = kDomain.Encode(d.record(i));
    EXPECT_TRUE(c == 1 || c == 4);
  }
}

TEST(DistributionTest, BatchAnswersAndSampling) {
  // Two product rows, each a point mass.
  ProbabilityBatch batch{2, 5, {1, 0, 0, 0, 1, 0, 1, 1, 0, 0}};
  const Distribution d(kDomain, batch);
  EXPECT_FALSE(d.is_histogram());
  Rng rng(0);
  const QuerySet qs(kDomain, {{0, 1}});
  const auto ans = d.Answers(qs);
  EXPECT_THAT(ans, ElementsAre(0, 0, 0.5, 0.5, 0, 0));
  const Dataset s = d.Sample(100, rng);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto c = kDomain.Encode(s.record(i));
    EXPECT_TRUE(c == 2 || c == 3);
  }
}

TEST(AverageDistributionsTest, HistogramsAveragePointwise) {
  const Distribution a(SupportHistogram(Histogram::PointMass(kDomain, 0)));
  const Distribution b(SupportHistogram(Histogram::PointMass(kDomain, 5)));
  const Distribution avg = AverageDistributions(std::vector<Distribution>{a, b});
  EXPECT_THAT(testing::Vec(avg.histogram().mass()), ElementsAre(0.5, 0, 0, 0, 0, 0.5));
}

TEST(AverageDistributionsTest, BatchesConcatenate) {
  const Distribution a(kDomain, ProbabilityBatch{1, 5, {1, 0, 1, 0, 0}});
  const Distribution b(kDomain, ProbabilityBatch{1, 5, {0, 1, 0, 0, 1}});
  const Distribution avg = AverageDistributions(std::vector<Distribution>{a, b});
  EXPECT_EQ(avg.batch().rows, 2u);
  const QuerySet qs(kDomain, {{0}});
  EXPECT_THAT(avg.Answers(qs), ElementsAre(DoubleEq(0.5), DoubleEq(0.5)));
}

TEST(AverageDistributionsTest, RejectsMixedKinds) {
  const Distribution a(SupportHistogram::Uniform(kDomain));
  const Distribution b(kDomain, ProbabilityBatch{1, 5, {1, 0, 1, 0, 0}});
  EXPECT_THROW(AverageDistributions(std::vector<Distribution>{a, b}), Error);
  EXPECT_THROW(AverageDistributions(std::vector<Distribution>{}), Error);
}

}  // namespace
}  // namespace dpsynth
