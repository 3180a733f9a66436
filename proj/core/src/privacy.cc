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

#include "dpsynth/privacy.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dpsynth/error.h"

namespace dpsynth {

Accountant::Accountant(double rho, int rounds, int per_round, double alpha,
                       std::size_t n)
    : Accountant(rho, rounds, per_round, alpha, n, false) {}

Accountant::Accountant(double rho, int rounds, int per_round, double alpha,
                       std::size_t n, bool allow_selection_only)
    : rho_(rho), rounds_(rounds), per_round_(per_round), alpha_(alpha), n_(n) {
  Require(std::isfinite(rho) && rho > 0.0, "rho must be positive");
  Require(rounds >= 1, "T must be at least 1");
  Require(per_round >= 1, "k must be at least 1");
  Require(alpha > 0.0 && (alpha < 1.0 || (allow_selection_only && alpha == 1.0)),
          "alpha must lie in (0, 1)");
  Require(n >= 1, "record count must be positive");
  const double split = alpha * alpha + (1.0 - alpha) * (1.0 - alpha);
  eps0_ = std::sqrt(2.0 * rho / (static_cast<double>(per_round) * rounds * split));
}

Accountant Accountant::SelectionOnly(double rho, int rounds, int per_round,
                                     std::size_t n) {
  return Accountant(rho, rounds, per_round, 1.0, n, true);
}

double Accountant::SelectionExponent(bool halved) const {
  const double e = alpha_ * eps0_ * static_cast<double>(n_);
  return halved ? e / 2.0 : e;
}

double Accountant::NoiseSigma(double sensitivity_scale) const {
  Require(!selection_only(), "selection-only budget has no measurement noise");
  return sensitivity_scale / (static_cast<double>(n_) * (1.0 - alpha_) * eps0_);
}

double Accountant::SpentRho() const {
  const double a = alpha_ * eps0_;
  const double b = (1.0 - alpha_) * eps0_;
  return static_cast<double>(per_round_) * rounds_ * 0.5 * (a * a + b * b);
}

double ZcdpToDp(double rho, double delta) {
  Require(rho >= 0.0 && std::isfinite(rho), "rho must be nonnegative");
  Require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
  return rho + 2.0 * std::sqrt(rho * std::log(1.0 / delta));
}

double DpToZcdp(double epsilon, double delta) {
  Require(epsilon > 0.0 && std::isfinite(epsilon), "epsilon must be positive");
  Require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
  const double l = std::log(1.0 / delta);
  // Positive root of rho + 2 sqrt(rho l) = eps, rewritten to avoid
  // cancellation when l is large.
  const double root = epsilon / (std::sqrt(l + epsilon) + std::sqrt(l));
  return root * root;
}

std::vector<double> ExpMechanismProbabilities(std::span<const double> scores,
                                              double exponent) {
  Require(!scores.empty(), "no candidates to select from");
  Require(exponent >= 0.0 && std::isfinite(exponent),
          "selection exponent must be finite and nonnegative");
  double top = -std::numeric_limits<double>::infinity();
  for (double s : scores) {
    if (!std::isnan(s)) top = std::max(top, s);
  }
  Require(std::isfinite(top), "no finite candidate score");
  std::vector<double> p(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    // -inf marks an excluded candidate.
    p[i] = std::isfinite(scores[i]) ? std::exp(exponent * (scores[i] - top)) : 0.0;
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

std::size_t ExpMechanismSelect(std::span<const double> scores, double exponent,
                               Rng& rng) {
  const auto p = ExpMechanismProbabilities(scores, exponent);
  std::discrete_distribution<std::size_t> dist(p.begin(), p.end());
  return dist(rng);
}

double GaussianMeasure(double true_answer, double sigma, Rng& rng) {
  Require(sigma >= 0.0 && std::isfinite(sigma), "sigma must be nonnegative");
  if (sigma == 0.0) return true_answer;
  std::normal_distribution<double> noise(0.0, sigma);
  return true_answer + noise(rng);
}

void MeasurementLedger::Record(std::size_t query, double answer, int round) {
  Require(entries_.empty() || round >= entries_.back().round,
          "ledger rounds must be nondecreasing");
  if (auto it = position_.find(query); it != position_.end()) {
    entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(it->second));
    position_.clear();
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      position_[entries_[i].query] = i;
    }
  }
  position_[query] = entries_.size();
  entries_.push_back({query, answer, round});
  ++total_recorded_;
}

const Measurement* MeasurementLedger::Lookup(std::size_t query) const {
  const auto it = position_.find(query);
  return it == position_.end() ? nullptr : &entries_[it->second];
}

RoundSelection SelectAndMeasureRound(MeasurementLedger& ledger,
                                     const QuerySet& queries,
                                     std::span<const double> current_answers,
                                     std::span<const double> private_answers,
                                     const Accountant& acct,
                                     const RoundOptions& options, int round,
                                     Rng& rng) {
  Require(current_answers.size() == queries.size() &&
              private_answers.size() == queries.size(),
          "answer vectors must cover the query set");
  const bool per_workload = options.mode == SelectionMode::kPerWorkload;
  const std::size_t candidates =
      per_workload ? queries.num_workloads() : queries.size();
  const auto k = static_cast<std::size_t>(acct.per_round());
  Require(k <= candidates, "k exceeds the number of selectable candidates");

  std::vector<double> scores(candidates, 0.0);
  for (std::size_t w = 0; w < queries.num_workloads(); ++w) {
    const std::size_t begin = queries.workload_offset(w);
    const std::size_t end = begin + queries.workload(w).num_queries();
    for (std::size_t j = begin; j < end; ++j) {
      const double err = std::abs(private_answers[j] - current_answers[j]);
      if (per_workload) {
        scores[w] = std::max(scores[w], err);
      } else {
        scores[j] = err;
      }
    }
  }

  RoundSelection out;
  const double exponent = acct.SelectionExponent(options.em_score_halved);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t pick;
    if (options.noiseless) {
      pick = static_cast<std::size_t>(
          std::max_element(scores.begin(), scores.end()) - scores.begin());
    } else {
      pick = ExpMechanismSelect(scores, exponent, rng);
    }
    out.selected.push_back(pick);
    scores[pick] = -std::numeric_limits<double>::infinity();
  }

  const double sigma =
      options.noiseless ? 0.0 : acct.NoiseSigma(per_workload ? std::sqrt(2.0) : 1.0);
  for (std::size_t pick : out.selected) {
    std::size_t begin = pick;
    std::size_t end = pick + 1;
    if (per_workload) {
      begin = queries.workload_offset(pick);
      end = begin + queries.workload(pick).num_queries();
    }
    for (std::size_t j = begin; j < end; ++j) {
      const double noisy = GaussianMeasure(private_answers[j], sigma, rng);
      ledger.Record(j, noisy, round);
      out.measured.push_back(j);
      out.noisy_answers.push_back(noisy);
    }
  }
  return out;
}

}  // namespace dpsynth
