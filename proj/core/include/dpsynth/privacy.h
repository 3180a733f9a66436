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

#ifndef DPSYNTH_PRIVACY_H_
#define DPSYNTH_PRIVACY_H_

#include <cstddef>
#include <span>
#include <unordered_map>
#include <vector>

#include "dpsynth/domain.h"
#include "dpsynth/marginals.h"

namespace dpsynth {

// zCDP budget split over `rounds` rounds of `per_round` selections, each
// followed by a measurement. A fraction `alpha` of every round's per-step
// privacy parameter eps0 goes to selection and the rest to measurement, so
// that per_round * rounds * (alpha^2 + (1 - alpha)^2) * eps0^2 / 2 = rho.
class Accountant {
 public:
  Accountant(double rho, int rounds, int per_round, double alpha,
             std::size_t n);

  // Selection-only budget: every step is an exponential mechanism.
  static Accountant SelectionOnly(double rho, int rounds, int per_round,
                                  std::size_t n);

  double rho() const { return rho_; }
  int rounds() const { return rounds_; }
  int per_round() const { return per_round_; }
  double alpha() const { return alpha_; }
  std::size_t n() const { return n_; }
  bool selection_only() const { return alpha_ == 1.0; }

  double Eps0() const { return eps0_; }
  // Multiplier of a score in the exponential mechanism's exponent.
  double SelectionExponent(bool halved = false) const;
  // Gaussian noise scale for a measurement with l2 sensitivity scale / n.
  double NoiseSigma(double sensitivity_scale = 1.0) const;
  // Budget implied by eps0, for checking that the split is exhaustive.
  double SpentRho() const;

 private:
  Accountant(double rho, int rounds, int per_round, double alpha,
             std::size_t n, bool allow_selection_only);

  double rho_;
  int rounds_;
  int per_round_;
  double alpha_;
  std::size_t n_;
  double eps0_;
};

double ZcdpToDp(double rho, double delta);
double DpToZcdp(double epsilon, double delta);

// Softmax of exponent * scores, shifted by the max for stability.
std::vector<double> ExpMechanismProbabilities(std::span<const double> scores,
                                              double exponent);
std::size_t ExpMechanismSelect(std::span<const double> scores, double exponent,
                               Rng& rng);
double GaussianMeasure(double true_answer, double sigma, Rng& rng);

struct Measurement {
  std::size_t query = 0;
  double answer = 0.0;
  int round = 0;
};

// Selected queries and their noisy answers. Measuring a query again replaces
// its entry, which moves to the end.
class MeasurementLedger {
 public:
  void Record(std::size_t query, double answer, int round);
  const Measurement* Lookup(std::size_t query) const;

  const std::vector<Measurement>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  // Number of Record calls, including replaced ones.
  std::size_t total_recorded() const { return total_recorded_; }

 private:
  std::vector<Measurement> entries_;
  std::unordered_map<std::size_t, std::size_t> position_;
  std::size_t total_recorded_ = 0;
};

enum class SelectionMode { kPerQuery, kPerWorkload };

struct RoundOptions {
  SelectionMode mode = SelectionMode::kPerQuery;
  bool em_score_halved = false;
  // Exact argmax selection and noise-free measurement. Not private.
  bool noiseless = false;
};

struct RoundSelection {
  // Query indices, or workload indices in per-workload mode.
  std::vector<std::size_t> selected;
  std::vector<std::size_t> measured;
  std::vector<double> noisy_answers;
};

// Selects acct.per_round() distinct candidates by the exponential mechanism
// on the current errors, then measures every selected query with Gaussian
// noise and records it in the ledger. All selection draws precede the
// measurement draws.
RoundSelection SelectAndMeasureRound(MeasurementLedger& ledger,
                                     const QuerySet& queries,
                                     std::span<const double> current_answers,
                                     std::span<const double> private_answers,
                                     const Accountant& acct,
                                     const RoundOptions& options, int round,
                                     Rng& rng);

}  // namespace dpsynth

#endif  // DPSYNTH_PRIVACY_H_
