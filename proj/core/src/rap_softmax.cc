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

#include "dpsynth/rap_softmax.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "dpsynth/error.h"
#include "dpsynth/gem.h"
#include "dpsynth/parallel.h"

namespace dpsynth {
namespace {

std::vector<double> Residuals(const ProbabilityBatch& batch,
                              std::span<const Constraint> constraints,
                              const std::vector<std::vector<std::size_t>>& idx) {
  std::vector<double> c(constraints.size());
  ParallelFor(constraints.size(), [&](std::size_t j) {
    double total = 0.0;
    for (std::size_t r = 0; r < batch.rows; ++r) {
      const double* p = batch.values.data() + r * batch.width;
      double prod = 1.0;
      for (std::size_t k : idx[j]) prod *= p[k];
      total += prod;
    }
    c[j] = total / static_cast<double>(batch.rows) - constraints[j].target;
  }, 16);
  return c;
}

double SquaredSum(std::span<const double> c) {
  double total = 0.0;
  for (double v : c) total += v * v;
  return total;
}

std::vector<double> Gradient(const RelaxedDataset& data, const ProbabilityBatch& batch,
                             const std::vector<std::vector<std::size_t>>& idx,
                             std::span<const double> c) {
  const Domain& domain = data.domain();
  const std::size_t width = batch.width;
  const double scale = 2.0 / static_cast<double>(batch.rows);
  std::vector<double> grad(batch.rows * width, 0.0);
  ParallelFor(batch.rows, [&](std::size_t r) {
    const double* p = batch.values.data() + r * width;
    double* g = grad.data() + r * width;
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (c[j] != 0.0) AccumulateProductGradient(p, idx[j], scale * c[j], g);
    }
    if (data.original()) return;
    std::vector<double> dp(g, g + width);
    for (std::size_t a = 0; a < domain.num_attributes(); ++a) {
      const std::size_t off = domain.onehot_offset(a);
      const auto size = static_cast<std::size_t>(domain.size(a));
      double dot = 0.0;
      for (std::size_t k = 0; k < size; ++k) dot += p[off + k] * dp[off + k];
      for (std::size_t k = 0; k < size; ++k) {
        g[off + k] = p[off + k] * (dp[off + k] - dot);
      }
    }
  });
  return grad;
}

}  // namespace

RelaxedDataset::RelaxedDataset(Domain domain, std::size_t rows, bool original)
    : domain_(std::move(domain)), rows_(rows), original_(original) {
  Require(rows_ >= 1, "relaxed dataset needs at least one row");
  params_.assign(rows_ * domain_.onehot_width(), original_ ? 0.5 : 0.0);
}

RelaxedDataset RelaxedDataset::Random(const Domain& domain, std::size_t rows,
                                      bool original, Rng& rng) {
  RelaxedDataset d(domain, rows, original);
  if (original) {
    std::uniform_real_distribution<double> init(0.0, 1.0);
    for (double& v : d.params_) v = init(rng);
  } else {
    std::normal_distribution<double> init(0.0, 1.0);
    for (double& v : d.params_) v = init(rng);
  }
  return d;
}

ProbabilityBatch RelaxedDataset::Relaxed() const {
  if (!original_) return Normalized();
  return {rows_, domain_.onehot_width(), params_};
}

ProbabilityBatch RelaxedDataset::Normalized() const {
  const std::size_t width = domain_.onehot_width();
  ProbabilityBatch out{rows_, width, params_};
  for (std::size_t r = 0; r < rows_; ++r) {
    double* x = out.values.data() + r * width;
    for (std::size_t a = 0; a < domain_.num_attributes(); ++a) {
      double* block = x + domain_.onehot_offset(a);
      const auto size = static_cast<std::size_t>(domain_.size(a));
      if (original_) {
        double sum = 0.0;
        for (std::size_t k = 0; k < size; ++k) sum += block[k];
        for (std::size_t k = 0; k < size; ++k) {
          block[k] = sum > 0.0 ? block[k] / sum : 1.0 / static_cast<double>(size);
        }
      } else {
        const double top = *std::max_element(block, block + size);
        double sum = 0.0;
        for (std::size_t k = 0; k < size; ++k) {
          block[k] = std::exp(block[k] - top);
          sum += block[k];
        }
        for (std::size_t k = 0; k < size; ++k) block[k] /= sum;
      }
    }
  }
  return out;
}

std::vector<double> RapAnswers(const RelaxedDataset& data, const QuerySet& queries) {
  Require(queries.domain() == data.domain(), "query and data domains differ");
  return queries.AnswerBatch(data.Relaxed());
}

double RapLoss(const RelaxedDataset& data, std::span<const Constraint> constraints) {
  std::vector<std::vector<std::size_t>> idx;
  for (const auto& con : constraints) idx.push_back(OnehotIndices(data.domain(), con.query));
  return SquaredSum(Residuals(data.Relaxed(), constraints, idx));
}

RapStats RapFit(RelaxedDataset& data, std::span<const Constraint> constraints,
                const RapOptions& options) {
  Require(!constraints.empty(), "RAP update needs at least one measurement");
  Require(options.lr > 0.0 && options.max_steps >= 0 && options.plateau_window >= 1,
          "invalid RAP optimizer settings");
  std::vector<std::vector<std::size_t>> idx;
  idx.reserve(constraints.size());
  for (const auto& con : constraints) idx.push_back(OnehotIndices(data.domain(), con.query));

  RapStats stats;
  AdamState adam;
  double lr = options.lr;
  ProbabilityBatch batch = data.Relaxed();
  std::vector<double> c = Residuals(batch, constraints, idx);
  double loss = SquaredSum(c);
  stats.loss_trace.push_back(loss);
  const auto window = static_cast<std::size_t>(options.plateau_window);
  for (int step = 0; step < options.max_steps && loss > 0.0 && lr > 1e-12; ++step) {
    const auto grad = Gradient(data, batch, idx, c);
    const std::vector<double> saved(data.params().begin(), data.params().end());
    AdamStep(data.params(), grad, adam, lr);
    if (data.original()) {
      for (double& v : data.params()) v = std::clamp(v, 0.0, 1.0);
    }
    ProbabilityBatch next = data.Relaxed();
    std::vector<double> next_c = Residuals(next, constraints, idx);
    const double next_loss = SquaredSum(next_c);
    if (!(next_loss <= loss)) {
      std::copy(saved.begin(), saved.end(), data.params().begin());
      // Stale momentum would propose the same bad direction again.
      adam = AdamState{};
      lr *= 0.5;
      ++stats.rejected;
      continue;
    }
    batch = std::move(next);
    c = std::move(next_c);
    loss = next_loss;
    ++stats.accepted;
    stats.loss_trace.push_back(loss);
    const auto& trace = stats.loss_trace;
    if (trace.size() > window) {
      const double before = trace[trace.size() - 1 - window];
      if (before - loss <= options.plateau_tol * before) break;
    }
  }
  return stats;
}

RapSoftmaxSynthesizer::RapSoftmaxSynthesizer(const Domain& domain, RapOptions options,
                                             Rng& rng)
    : options_(options),
      data_(RelaxedDataset::Random(domain, static_cast<std::size_t>(options.rows),
                                   options.original, rng)) {}

std::vector<double> RapSoftmaxSynthesizer::Answers(const QuerySet& queries) const {
  return RapAnswers(data_, queries);
}

void RapSoftmaxSynthesizer::Update(const MeasurementLedger& ledger,
                                   const QuerySet& queries, const RoundContext&) {
  Require(!ledger.empty(), "RAP update needs at least one measurement");
  std::vector<Constraint> constraints;
  constraints.reserve(ledger.size());
  for (const auto& m : ledger.entries()) {
    constraints.push_back({queries.Query(m.query), m.answer});
  }
  stats_ = RapFit(data_, constraints, options_);
}

Distribution RapSoftmaxSynthesizer::Current() const {
  return Distribution(data_.domain(), data_.Normalized());
}

}  // namespace dpsynth
