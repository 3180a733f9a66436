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

#include <numeric>
#include <vector>

#include <benchmark/benchmark.h>

#include "dpsynth/distribution.h"
#include "dpsynth/gem.h"
#include "dpsynth/marginals.h"
#include "dpsynth/mwem.h"
#include "dpsynth/pep.h"
#include "dpsynth/toy_data.h"

namespace dpsynth {
namespace {

// Toy data with `attrs` attributes of size 8 and all 3-way workloads.
struct Setup {
  Dataset data;
  QuerySet queries;
  std::vector<double> truth;
};

Setup MakeSetup(int attrs) {
  Setup s;
  s.data = GenerateToyData({attrs, 8, 2000, 1});
  Rng rng(0);
  s.queries = QuerySet::Build(s.data.domain(), 3, std::nullopt, rng);
  s.truth = s.queries.AnswerRecords(s.data);
  return s;
}

void BM_AnswerAllHistogram(benchmark::State& state) {
  const Setup s = MakeSetup(static_cast<int>(state.range(0)));
  const Histogram hist = SupportHistogram::Uniform(s.data.domain()).ToHistogram();
  for (auto _ : state) benchmark::DoNotOptimize(s.queries.AnswerHistogram(hist));
  state.counters["queries"] = static_cast<double>(s.queries.size());
}
BENCHMARK(BM_AnswerAllHistogram)->Arg(4)->Arg(5)->Arg(6);

void BM_AnswerAllRecords(benchmark::State& state) {
  const Setup s = MakeSetup(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(s.queries.AnswerRecords(s.data));
}
BENCHMARK(BM_AnswerAllRecords)->Arg(4)->Arg(6);

void BM_PepProjection(benchmark::State& state) {
  const Setup s = MakeSetup(static_cast<int>(state.range(0)));
  SupportHistogram h = SupportHistogram::Uniform(s.data.domain());
  const MarginalQuery q = s.queries.Query(0);
  double target = 0.3;
  for (auto _ : state) {
    PepProjectOnce(h, q, target);
    target = 0.6 - target;
  }
}
BENCHMARK(BM_PepProjection)->Arg(4)->Arg(6);

void BM_MwemStep(benchmark::State& state) {
  const Setup s = MakeSetup(static_cast<int>(state.range(0)));
  SupportHistogram h = SupportHistogram::Uniform(s.data.domain());
  const MarginalQuery q = s.queries.Query(0);
  double target = 0.3;
  for (auto _ : state) {
    MwemStep(h, q, target, 2.0);
    target = 0.6 - target;
  }
}
BENCHMARK(BM_MwemStep)->Arg(4)->Arg(6);

void BM_GemGradient(benchmark::State& state) {
  const Setup s = MakeSetup(4);
  Rng rng(2);
  const Domain& d = s.data.domain();
  const auto params = GeneratorParams::Random(16, {64, 128}, BlockSizes(d), rng);
  const LatentBatch z = SampleLatent(static_cast<std::size_t>(state.range(0)), 16, rng);
  std::vector<Constraint> cons;
  for (std::size_t j = 0; j < s.queries.size(); j += 16) {
    cons.push_back({s.queries.Query(j), s.truth[j]});
  }
  std::vector<std::size_t> active(cons.size());
  std::iota(active.begin(), active.end(), 0);
  for (auto _ : state) benchmark::DoNotOptimize(GemGradient(params, z, cons, active));
  state.counters["constraints"] = static_cast<double>(cons.size());
}
BENCHMARK(BM_GemGradient)->Arg(100)->Arg(400);

}  // namespace
}  // namespace dpsynth

BENCHMARK_MAIN();
