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

#include "dpsynth/public_assist.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "dpsynth/error.h"

namespace dpsynth {

SupportHistogram PepPubInit(const Dataset& public_data, const Domain& domain) {
  Require(!public_data.empty(), "empty public dataset");
  if (!(public_data.domain() == domain)) {
    Fail(ErrorCode::kDomainMismatch,
         "public data must cover the private domain for a support restriction");
  }
  return SupportHistogram::Empirical(public_data);
}

std::vector<std::size_t> MapPublicAttributes(const Domain& public_domain,
                                             const Domain& domain) {
  std::vector<std::size_t> mapped;
  for (const auto& attr : public_domain.attributes()) {
    const auto idx = domain.IndexOf(attr.name);
    if (!idx || domain.size(*idx) != attr.size) {
      Fail(ErrorCode::kDomainMismatch,
           "public attribute '" + attr.name + "' does not match the domain");
    }
    mapped.push_back(*idx);
  }
  return mapped;
}

PretrainResult GemPubPretrain(const Dataset& public_data, const QuerySet& queries,
                              const GemOptions& options, int steps, Rng& rng) {
  Require(!public_data.empty(), "empty public dataset");
  Require(steps >= 0, "pretraining steps must be nonnegative");
  const Domain& domain = queries.domain();
  const auto mapped = MapPublicAttributes(public_data.domain(), domain);

  PretrainResult result;
  result.workloads = queries.WorkloadsWithin(mapped);
  Require(!result.workloads.empty(),
          "no workload is covered by the public attributes");

  std::vector<Constraint> constraints;
  for (std::size_t w : result.workloads) {
    const Workload& wl = queries.workload(w);
    for (std::size_t local = 0; local < wl.num_queries(); ++local) {
      const MarginalQuery q = wl.Query(local);
      // The same query over the public attribute order.
      std::vector<std::pair<int, int>> pub;
      for (std::size_t i = 0; i < q.features.size(); ++i) {
        const auto pos = std::find(mapped.begin(), mapped.end(),
                                   static_cast<std::size_t>(q.features[i])) -
                         mapped.begin();
        pub.emplace_back(static_cast<int>(pos), q.targets[i]);
      }
      std::sort(pub.begin(), pub.end());
      MarginalQuery pq;
      for (const auto& [f, y] : pub) {
        pq.features.push_back(f);
        pq.targets.push_back(y);
      }
      constraints.push_back({q, AnswerRecords(pq, public_data)});
    }
  }

  GemSynthesizer gen(domain, options, rng);
  const GemUpdateStats stats = gen.Fit(constraints, 0.0, steps, false);
  result.checkpoint = gen.Checkpoint();
  result.final_loss = stats.final_loss;
  return result;
}

BestMixtureResult BestMixtureError(std::span<const std::uint64_t> support,
                                   const QuerySet& queries,
                                   std::span<const double> targets,
                                   int iterations) {
  Require(!support.empty(), "support must be nonempty");
  Require(targets.size() == queries.size(), "targets must cover the query set");
  Require(iterations >= 1, "need at least one iteration");
  const Domain& domain = queries.domain();
  const std::size_t m = queries.size();
  const std::size_t nw = queries.num_workloads();

  // matches[s * nw + w]: the query of workload w that support point s hits.
  std::vector<std::size_t> matches(support.size() * nw);
  std::vector<int> record(domain.num_attributes());
  for (std::size_t s = 0; s < support.size(); ++s) {
    Require(support[s] < domain.total_cells(), "support cell out of range");
    domain.DecodeInto(support[s], record);
    queries.RecordMatches(record, std::span<std::size_t>(matches.data() + s * nw, nw));
  }

  const double lr = std::sqrt(2.0 * std::log(2.0 * static_cast<double>(m)) /
                              static_cast<double>(iterations));
  // log_w[j] for query j, log_w[m + j] for its complement.
  std::vector<double> log_w(2 * m, 0.0);
  std::vector<double> w(2 * m);
  std::vector<double> hits(m, 0.0);
  std::vector<double> picks(support.size(), 0.0);

  BestMixtureResult result;
  result.value = std::numeric_limits<double>::infinity();
  result.lower_bound = -std::numeric_limits<double>::infinity();
  for (int t = 1; t <= iterations; ++t) {
    const double top = *std::max_element(log_w.begin(), log_w.end());
    double total = 0.0;
    for (std::size_t j = 0; j < 2 * m; ++j) {
      w[j] = std::exp(log_w[j] - top);
      total += w[j];
    }
    // Expected signed error of x is sum_j w+_j (q_j(x) - a_j)
    // - sum_j w-_j (q_j(x) - a_j); only matched queries have q_j(x) = 1.
    double base = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      w[j] /= total;
      w[m + j] /= total;
      base -= (w[j] - w[m + j]) * targets[j];
    }
    std::size_t best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < support.size(); ++s) {
      double v = base;
      for (std::size_t k = 0; k < nw; ++k) {
        const std::size_t j = matches[s * nw + k];
        v += w[j] - w[m + j];
      }
      if (v < best_value) {
        best_value = v;
        best = s;
      }
    }
    result.lower_bound = std::max(result.lower_bound, best_value);

    picks[best] += 1.0;
    for (std::size_t k = 0; k < nw; ++k) hits[matches[best * nw + k]] += 1.0;
    double worst = 0.0;
    const double inv_t = 1.0 / static_cast<double>(t);
    for (std::size_t j = 0; j < m; ++j) {
      worst = std::max(worst, std::abs(hits[j] * inv_t - targets[j]));
    }
    if (worst < result.value) {
      result.value = worst;
      result.weights = picks;
      for (double& p : result.weights) p *= inv_t;
    }

    std::vector<char> hit_now(m, 0);
    for (std::size_t k = 0; k < nw; ++k) hit_now[matches[best * nw + k]] = 1;
    for (std::size_t j = 0; j < m; ++j) {
      const double gap = (hit_now[j] ? 1.0 : 0.0) - targets[j];
      log_w[j] += lr * gap;
      log_w[m + j] -= lr * gap;
    }
    result.iterations = t;
    if (result.value - result.lower_bound <= 1e-9) break;
  }
  result.lower_bound = std::max(result.lower_bound, 0.0);
  return result;
}

}  // namespace dpsynth
