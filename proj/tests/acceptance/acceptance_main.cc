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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. All tolerances are fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli/cli.h"
#include "dpsynth/adaptive.h"
#include "dpsynth/distribution.h"
#include "dpsynth/domain.h"
#include "dpsynth/evaluation.h"
#include "dpsynth/gem.h"
#include "dpsynth/io.h"
#include "dpsynth/marginals.h"
#include "dpsynth/mwem.h"
#include "dpsynth/pep.h"
#include "dpsynth/privacy.h"
#include "dpsynth/public_assist.h"
#include "dpsynth/rap_softmax.h"
#include "dpsynth/toy_data.h"
#include "testing/oracles.h"
#include "testing/test_util.h"

namespace dpsynth {
namespace {

// Tolerances and limits.
constexpr int kQueryInstances = 200;
constexpr std::uint64_t kQueryMaxCells = 10000;
constexpr std::size_t kQueryMaxRecords = 1000;

constexpr int kProjectionInstances = 1000;
constexpr double kProjectionTol = 1e-12;
constexpr int kMaxEntInstances = 50;
constexpr std::uint64_t kMaxEntMaxCells = 64;
constexpr double kMaxEntTv = 1e-3;

constexpr int kMwemInstances = 20;
constexpr std::uint64_t kMwemMaxCells = 16;
constexpr double kMwemKl = 1e-4;

constexpr int kGradientSeeds = 10;
constexpr double kGradientRelTol = 1e-4;
// Denominator floor of the relative error, so that entries that vanish
// analytically are compared in absolute terms.
constexpr double kGradientRelFloor = 1e-6;
constexpr double kFdStep = 1e-5;

constexpr double kEps0Expected = 0.447214;
constexpr double kEps0Tol = 1e-6;
constexpr double kEpsExpected = 7.0;
constexpr double kEpsTol = 1e-9;
constexpr double kRoundTripTol = 1e-9;

constexpr int kMechanismDraws = 100000;
constexpr double kEmStandardErrors = 3.0;
constexpr double kSigmaRelTol = 0.02;

constexpr int kToyAttributes = 4;
constexpr int kToySize = 8;
constexpr std::size_t kToyRecords = 2000;
constexpr std::uint64_t kToySeed = 0;
constexpr double kPepOverMwemSlack = 1.1;
constexpr double kMarginalTrickSlack = 1.05;

constexpr int kPublicRounds = 200;
constexpr double kPublicFloor = 0.1;
constexpr double kPublicSlack = 1e-3;
constexpr double kGemReach = 0.05;

constexpr double kLimit1 = 10, kLimit2 = 60, kLimit3 = 30, kLimit4 = 30, kLimit5 = 1,
                 kLimit6 = 30, kLimit7 = 900, kLimit8 = 900, kLimit9 = 300,
                 kLimit10 = 120;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

double Mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double MaxAbsError(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

// Mass vector whose entries are multiples of 2^-20 and sum to exactly one,
// so every summation order gives the same answer.
std::vector<double> DyadicMass(std::size_t cells, Rng& rng) {
  constexpr std::uint64_t kUnits = std::uint64_t{1} << 20;
  std::uniform_int_distribution<std::uint64_t> draw(0, 200);
  std::vector<std::uint64_t> raw(cells);
  std::uint64_t total = 0;
  for (auto& r : raw) total += (r = draw(rng));
  if (total == 0) raw[0] = total = 1;
  std::vector<std::uint64_t> units(cells);
  std::uint64_t used = 0;
  for (std::size_t c = 0; c < cells; ++c) used += (units[c] = raw[c] * kUnits / total);
  units[0] += kUnits - used;
  std::vector<double> mass(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    mass[c] = std::ldexp(static_cast<double>(units[c]), -20);
  }
  return mass;
}

Outcome QueryEvaluation() {
  Rng rng(101);
  int mismatches = 0;
  int checked = 0;
  for (int i = 0; i < kQueryInstances; ++i) {
    const Domain d = testing::RandomDomain(rng, 6, 12, kQueryMaxCells);
    const std::size_t n =
        std::uniform_int_distribution<std::size_t>(1, kQueryMaxRecords)(rng);
    const Dataset data = testing::RandomDataset(d, n, rng);
    const Histogram hist(d, DyadicMass(d.total_cells(), rng));
    const MarginalQuery q = testing::RandomQuery(d, rng);
    mismatches += AnswerHistogram(q, hist) !=
                  testing::CountHistogramAnswer(d, hist.mass(), q);
    mismatches += AnswerRecords(q, data) != testing::CountRecordAnswer(data, q);
    checked += 2;

    // The batched workload paths, on a few queries of one workload.
    const QuerySet qs(d, {q.features});
    const auto hist_all = qs.AnswerHistogram(hist);
    const auto rec_all = qs.AnswerRecords(data);
    std::uniform_int_distribution<std::size_t> pick(0, qs.size() - 1);
    for (int s = 0; s < 5; ++s) {
      const std::size_t j = pick(rng);
      const MarginalQuery qj = qs.Query(j);
      mismatches += hist_all[j] != testing::CountHistogramAnswer(d, hist.mass(), qj);
      mismatches += rec_all[j] != testing::CountRecordAnswer(data, qj);
      checked += 2;
    }
  }
  return {mismatches == 0,
          Fmt("%d instances, %d comparisons, %d mismatches", kQueryInstances, checked,
              mismatches)};
}

Outcome PepExactness() {
  Rng rng(202);
  std::uniform_real_distribution<double> target(1e-4, 1.0 - 1e-4);
  double worst_projection = 0.0;
  int refused = 0;
  for (int i = 0; i < kProjectionInstances; ++i) {
    const Domain d = testing::RandomDomain(rng, 4, 6, 256);
    SupportHistogram h(Histogram(d, testing::RandomSimplex(d.total_cells(), rng)));
    const MarginalQuery q = testing::RandomQuery(d, rng);
    const double a = target(rng);
    if (!PepProjectOnce(h, q, a)) {
      ++refused;
      continue;
    }
    worst_projection = std::max(worst_projection, std::abs(h.Answer(q) - a));
  }

  double worst_tv = 0.0;
  for (int i = 0; i < kMaxEntInstances; ++i) {
    const Domain d = testing::RandomDomain(rng, 3, 4, kMaxEntMaxCells);
    std::vector<double> truth = testing::RandomSimplex(d.total_cells(), rng);
    for (double& v : truth) v = 0.5 * v + 0.5 / static_cast<double>(truth.size());
    const int count = std::uniform_int_distribution<int>(1, 5)(rng);
    std::vector<Constraint> cons;
    for (int j = 0; j < count; ++j) {
      const MarginalQuery q = testing::RandomQuery(d, rng);
      cons.push_back({q, testing::CountHistogramAnswer(d, truth, q)});
    }
    SupportHistogram h = SupportHistogram::Uniform(d);
    PepUpdate(h, cons, {0.0, 100000, 1e-4});
    const std::vector<double> uniform(d.total_cells(), 1.0 / d.total_cells());
    const auto ref = testing::MaxEntropyDualSolve(d, cons, uniform);
    worst_tv = std::max(worst_tv, testing::TotalVariation(h.mass(), ref));
  }
  const bool pass = refused == 0 && worst_projection <= kProjectionTol &&
                    worst_tv <= kMaxEntTv;
  return {pass, Fmt("max projection residual %.3g (tol %.0e, %d refused); max TV to "
                    "max-entropy solve %.3g (tol %.0e)",
                    worst_projection, kProjectionTol, refused, worst_tv, kMaxEntTv)};
}

Outcome MwemLossMinimizer() {
  Rng rng(303);
  double worst = 0.0;
  for (int i = 0; i < kMwemInstances; ++i) {
    const Domain d = testing::RandomDomain(rng, 4, 4, kMwemMaxCells);
    const MwemOptions options;
    SupportHistogram iter = SupportHistogram::Uniform(d);
    std::vector<double> linear(d.total_cells(), 0.0);
    const int count = std::uniform_int_distribution<int>(1, 3)(rng);
    for (int j = 0; j < count; ++j) {
      const MarginalQuery q = testing::RandomQuery(d, rng);
      const double a = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const double before = MwemStep(iter, q, a, options.eta_divisor);
      for (std::uint64_t c = 0; c < d.total_cells(); ++c) {
        if (testing::CellSatisfies(d, c, q)) linear[c] -= (a - before) / options.eta_divisor;
      }
    }
    const auto argmin = testing::MinimizeLinearPlusNegEntropy(linear, 20000, 0.05);
    worst = std::max(worst, testing::KlDivergence(iter.mass(), argmin));
  }
  return {worst <= kMwemKl,
          Fmt("%d instances, max KL %.3g (tol %.0e)", kMwemInstances, worst, kMwemKl)};
}

Outcome GemGradientCheck() {
  const Domain d({{"a", 3}, {"b", 2}, {"c", 4}});
  double worst = 0.0;
  std::size_t entries = 0;
  for (std::uint64_t seed = 0; seed < kGradientSeeds; ++seed) {
    Rng rng(seed);
    const auto p = GeneratorParams::Random(3, {6, 5}, BlockSizes(d), rng);
    const LatentBatch z = SampleLatent(5, 3, rng);
    std::vector<Constraint> cons;
    for (int j = 0; j < 6; ++j) {
      cons.push_back({testing::RandomQuery(d, rng),
                      std::uniform_real_distribution<double>(0.0, 1.0)(rng)});
    }
    std::vector<std::size_t> active(cons.size());
    std::iota(active.begin(), active.end(), 0);
    for (GemLossKind kind : {GemLossKind::kL1, GemLossKind::kL2}) {
      const auto grad = GemGradient(p, z, cons, active, kind);
      const auto fd = testing::CentralDifferences(
          [&](std::span<const double> x) {
            GeneratorParams q = p;
            std::copy(x.begin(), x.end(), q.values().begin());
            return GemLoss(q, z, cons, active, kind);
          },
          p.values(), kFdStep);
      for (std::size_t i = 0; i < grad.size(); ++i) {
        const double scale =
            std::max({std::abs(grad[i]), std::abs(fd[i]), kGradientRelFloor});
        worst = std::max(worst, std::abs(grad[i] - fd[i]) / scale);
        ++entries;
      }
    }
  }
  return {worst < kGradientRelTol,
          Fmt("%zu gradient entries over %d networks, max relative error %.3g (tol %.0e)",
              entries, kGradientSeeds, worst, kGradientRelTol)};
}

Outcome AccountantValues() {
  const double eps0 = Accountant(0.5, 10, 1, 0.5, 1000).Eps0();
  const double eps = ZcdpToDp(1.0, std::exp(-9.0));
  Rng rng(505);
  std::uniform_real_distribution<double> log_eps(std::log(0.01), std::log(20.0));
  std::uniform_real_distribution<double> log_delta(std::log(1e-12), std::log(1e-2));
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double e = std::exp(log_eps(rng));
    const double dl = std::exp(log_delta(rng));
    worst = std::max(worst, std::abs(ZcdpToDp(DpToZcdp(e, dl), dl) - e));
  }
  const bool pass = std::abs(eps0 - kEps0Expected) <= kEps0Tol &&
                    std::abs(eps - kEpsExpected) <= kEpsTol && worst <= kRoundTripTol;
  return {pass, Fmt("eps0 %.9f, epsilon %.12f, max round-trip error %.3g", eps0, eps,
                    worst)};
}

Outcome MechanismStatistics() {
  Rng rng(606);
  const std::vector<double> scores = {0.1, 0.4, 0.25, 0.7};
  const double exponent = 3.0;
  const auto probs = ExpMechanismProbabilities(scores, exponent);
  std::vector<int> counts(scores.size(), 0);
  for (int i = 0; i < kMechanismDraws; ++i) ++counts[ExpMechanismSelect(scores, exponent, rng)];
  double worst_z = 0.0;
  for (std::size_t c = 0; c < scores.size(); ++c) {
    const double freq = static_cast<double>(counts[c]) / kMechanismDraws;
    const double se = std::sqrt(probs[c] * (1.0 - probs[c]) / kMechanismDraws);
    worst_z = std::max(worst_z, std::abs(freq - probs[c]) / se);
  }

  const double sigma = 0.37;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < kMechanismDraws; ++i) {
    const double x = GaussianMeasure(0.25, sigma, rng) - 0.25;
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / kMechanismDraws;
  const double sd = std::sqrt(sum_sq / kMechanismDraws - mean * mean);
  const double rel = std::abs(sd / sigma - 1.0);
  return {worst_z <= kEmStandardErrors && rel <= kSigmaRelTol,
          Fmt("EM max deviation %.2f standard errors; Gaussian sd %.5f vs %.5f (%.2f%%)",
              worst_z, sd, sigma, 100.0 * rel)};
}

// Shared toy setup for the end-to-end criteria.
struct ToySetup {
  Dataset data;
  QuerySet queries;
  std::vector<double> truth;
  double rho = 0.0;
};

ToySetup MakeToySetup(int k) {
  ToySetup s;
  s.data = GenerateToyData({kToyAttributes, kToySize, kToyRecords, kToySeed});
  Rng unused(0);
  s.queries = QuerySet::Build(s.data.domain(), k, std::nullopt, unused);
  s.truth = s.queries.AnswerRecords(s.data);
  const double n = static_cast<double>(kToyRecords);
  s.rho = DpToZcdp(1.0, 1.0 / (n * n));
  return s;
}

std::unique_ptr<Synthesizer> MakeSynth(const std::string& method, const Domain& domain,
                                       Rng& rng) {
  if (method == "mwem") {
    return std::make_unique<MwemSynthesizer>(SupportHistogram::Uniform(domain),
                                             MwemOptions{});
  }
  if (method == "pep") {
    return std::make_unique<PepSynthesizer>(SupportHistogram::Uniform(domain),
                                            PepOptions{});
  }
  if (method == "gem") {
    GemOptions o;
    o.lr = 1e-3;
    return std::make_unique<GemSynthesizer>(domain, o, rng);
  }
  RapOptions o;
  o.max_steps = 200;
  return std::make_unique<RapSoftmaxSynthesizer>(domain, o, rng);
}

Outcome EndToEndTrend() {
  const ToySetup s = MakeToySetup(3);
  const Domain& domain = s.data.domain();
  constexpr int kRounds = 20;
  constexpr double kAlpha = 0.67;
  const std::vector<std::string> methods = {"mwem", "pep", "gem", "rap-softmax"};

  std::vector<double> uniform(s.queries.size());
  for (std::size_t j = 0; j < s.queries.size(); ++j) {
    uniform[j] = 1.0 / static_cast<double>(
                           s.queries.workload(s.queries.Locate(j).workload).num_queries());
  }
  const double uniform_error = MaxAbsError(uniform, s.truth);

  // Every query measured once with the Gaussian mechanism at the same rho,
  // answers clipped to [0, 1].
  const double n = static_cast<double>(kToyRecords);
  const double sigma =
      std::sqrt(static_cast<double>(s.queries.size()) / (2.0 * s.rho)) / n;

  std::vector<double> gauss;
  std::vector<std::vector<double>> errors(methods.size());
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng grng(1000 + seed);
    std::vector<double> noisy(s.truth);
    for (double& v : noisy) v = std::clamp(GaussianMeasure(v, sigma, grng), 0.0, 1.0);
    gauss.push_back(MaxAbsError(noisy, s.truth));
    for (std::size_t m = 0; m < methods.size(); ++m) {
      Rng rng(seed);
      auto synth = MakeSynth(methods[m], domain, rng);
      const Accountant acct(s.rho, kRounds, 1, kAlpha, kToyRecords);
      const RunResult r = RunWithAnswers(s.truth, s.queries, *synth, acct, {}, rng);
      errors[m].push_back(MaxAbsError(r.output.Answers(s.queries), s.truth));
    }
  }
  const double gauss_error = Mean(gauss);
  bool pass = true;
  std::ostringstream detail;
  detail << Fmt("uniform %.4f, gaussian %.4f;", uniform_error, gauss_error);
  for (std::size_t m = 0; m < methods.size(); ++m) {
    const double e = Mean(errors[m]);
    pass = pass && e < uniform_error && e < gauss_error;
    detail << Fmt(" %s %.4f", methods[m].c_str(), e);
  }
  const double ratio = Mean(errors[1]) / Mean(errors[0]);
  pass = pass && ratio <= kPepOverMwemSlack;
  detail << Fmt("; pep/mwem %.3f (max %.2f)", ratio, kPepOverMwemSlack);
  return {pass, detail.str()};
}

double GemMaxError(const ToySetup& s, SelectionMode mode, int rounds, double alpha,
                   GemOptions options, std::uint64_t seed) {
  Rng rng(seed);
  GemSynthesizer g(s.data.domain(), options, rng);
  const Accountant acct(s.rho, rounds, 1, alpha, kToyRecords);
  RunConfig config;
  config.mode = mode;
  const RunResult r = RunWithAnswers(s.truth, s.queries, g, acct, config, rng);
  return MaxAbsError(r.output.Answers(s.queries), s.truth);
}

Outcome MarginalTrick() {
  const ToySetup s = MakeToySetup(3);
  // One configuration for both modes; only the selection unit differs.
  constexpr int kRounds = 10;
  constexpr double kAlpha = 0.5;
  GemOptions options;
  options.lr = 1e-3;
  options.loss = GemLossKind::kL2;

  std::vector<double> workload_errors, query_errors;
  for (std::uint64_t seed = 100; seed < 105; ++seed) {
    workload_errors.push_back(
        GemMaxError(s, SelectionMode::kPerWorkload, kRounds, kAlpha, options, seed));
    query_errors.push_back(
        GemMaxError(s, SelectionMode::kPerQuery, kRounds, kAlpha, options, seed));
  }
  const double w = Mean(workload_errors);
  const double q = Mean(query_errors);
  return {w <= kMarginalTrickSlack * q,
          Fmt("per-workload %.4f, per-query %.4f, ratio %.3f (max %.2f)", w, q, w / q,
              kMarginalTrickSlack)};
}

Outcome PublicLowerBound() {
  // Small instance: 3 attributes of size 4, all 2-way workloads.
  const Dataset data = GenerateToyData({3, 4, kToyRecords, 9});
  const Domain& domain = data.domain();
  Rng unused(0);
  const QuerySet qs = QuerySet::Build(domain, 2, std::nullopt, unused);
  const auto truth = qs.AnswerRecords(data);

  // The most common marginal cell is deleted from the public data.
  const std::size_t removed = static_cast<std::size_t>(
      std::max_element(truth.begin(), truth.end()) - truth.begin());
  const MarginalQuery target = qs.Query(removed);
  std::vector<int> kept;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto rec = data.record(i);
    if (!MatchesRecord(target, rec)) kept.insert(kept.end(), rec.begin(), rec.end());
  }
  const Dataset pub(domain, std::move(kept));
  const SupportHistogram init = PepPubInit(pub, domain);
  std::vector<std::uint64_t> support(init.size());
  for (std::size_t i = 0; i < init.size(); ++i) support[i] = init.cell(i);
  const BestMixtureResult best = BestMixtureError(support, qs, truth, 20000);

  const double rho = 1.0;
  RunConfig config;
  config.noiseless = true;
  config.audit_errors = true;
  PepSynthesizer pep(init, PepOptions{});
  Rng rng(9);
  const RunResult pr =
      RunWithAnswers(truth, qs, pep, Accountant(rho, kPublicRounds, 1, 0.5, kToyRecords),
                     config, rng);
  double pep_min = std::numeric_limits<double>::infinity();
  for (const auto& rec : pr.trace) pep_min = std::min(pep_min, *rec.max_err_all);
  pep_min = std::min(pep_min, MaxAbsError(pr.output.Answers(qs), truth));

  GemOptions o;
  o.hidden = {32, 32};
  o.lr = 1e-2;
  o.t_max = 2000;
  o.gamma_scale = 0.0;
  o.loss = GemLossKind::kL2;
  GemSynthesizer gem(domain, o, rng);
  RunConfig gconfig = config;
  gconfig.mode = SelectionMode::kPerWorkload;
  const RunResult gr = RunWithAnswers(
      truth, qs, gem, Accountant(rho, 2 * static_cast<int>(qs.num_workloads()), 1, 0.5,
                                 kToyRecords),
      gconfig, rng);
  const double gem_error = MaxAbsError(gr.output.Answers(qs), truth);

  const bool pass = best.lower_bound >= kPublicFloor &&
                    pep_min >= best.lower_bound - kPublicSlack && gem_error < kGemReach;
  return {pass, Fmt("best-mixture error in [%.4f, %.4f] (deleted answer %.4f); PEP^Pub "
                    "min max-error %.4f over %d rounds; GEM %.4f (max %.2f)",
                    best.lower_bound, best.value, truth[removed], pep_min, kPublicRounds,
                    gem_error, kGemReach)};
}

int CallCli(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"dpsynth"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return cli::RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
}

Outcome Determinism() {
  testing::TempDir dir;
  const Dataset data = GenerateToyData({kToyAttributes, kToySize, kToyRecords, kToySeed});
  SaveDomain(data.domain(), dir.File("domain.json"));
  WriteDatasetCsv(data, dir.File("data.csv"));
  int mismatches = 0;
  std::string methods;
  for (const std::string method : {"mwem", "pep", "gem", "rap-softmax"}) {
    std::string report[2], csv[2];
    for (int run = 0; run < 2; ++run) {
      const std::string tag = method + std::to_string(run);
      const int code = CallCli(
          {"synth", "--domain", dir.File("domain.json"), "--data", dir.File("data.csv"),
           "--method", method, "--epsilon", "1", "--delta", "2.5e-7", "--T", "8",
           "--seed", "42", "--marginal-k", "3", "--gem-lr", "1e-3", "--rap-steps", "100",
           "--out-csv", dir.File(tag + ".csv"), "--report", dir.File(tag + ".json")});
      if (code != 0) return {false, method + " run failed with exit code " +
                                        std::to_string(code)};
      report[run] = ReportToJson(ReadReport(dir.File(tag + ".json")), true);
      csv[run] = testing::ReadText(dir.File(tag + ".csv"));
    }
    const bool same = report[0] == report[1] && csv[0] == csv[1] && !csv[0].empty();
    mismatches += !same;
    methods += (methods.empty() ? "" : ", ") + method + (same ? " identical" : " DIFFER");
  }
  return {mismatches == 0, methods};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace dpsynth

int main(int argc, char** argv) {
  using namespace dpsynth;
  CLI::App app{"dpsynth acceptance suite"};
  std::vector<int> only;
  app.add_option("criteria", only, "Run only these criteria (default: all)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "query evaluation oracle", kLimit1, QueryEvaluation},
      {2, "PEP projection exactness", kLimit2, PepExactness},
      {3, "MWEM loss minimizer", kLimit3, MwemLossMinimizer},
      {4, "GEM gradient check", kLimit4, GemGradientCheck},
      {5, "accountant", kLimit5, AccountantValues},
      {6, "mechanism statistics", kLimit6, MechanismStatistics},
      {7, "end-to-end trend", kLimit7, EndToEndTrend},
      {8, "marginal trick", kLimit8, MarginalTrick},
      {9, "public-data lower bound", kLimit9, PublicLowerBound},
      {10, "determinism", kLimit10, Determinism},
  };
  const std::set<int> selected(only.begin(), only.end());
  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("%s criterion %d (%s): %s [%.2fs, limit %.0fs%s]\n",
                pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                c.limit_seconds, in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
