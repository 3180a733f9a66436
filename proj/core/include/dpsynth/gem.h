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

#ifndef DPSYNTH_GEM_H_
#define DPSYNTH_GEM_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpsynth/adaptive.h"
#include "dpsynth/distribution.h"
#include "dpsynth/marginals.h"

namespace dpsynth {

// Fully connected generator: ReLU hidden layers and a softmax over each
// attribute block of the output. Parameters live in one flat array; layer l
// stores its out x in weight matrix (row-major) followed by its bias.
class GeneratorParams {
 public:
  GeneratorParams() = default;
  // All-zero parameters.
  GeneratorParams(int input_dim, std::vector<int> hidden, std::vector<int> blocks);
  // Weights and biases uniform in +-1/sqrt(fan_in).
  static GeneratorParams Random(int input_dim, std::vector<int> hidden,
                                std::vector<int> blocks, Rng& rng);

  int input_dim() const { return input_dim_; }
  const std::vector<int>& hidden() const { return hidden_; }
  const std::vector<int>& blocks() const { return blocks_; }
  std::size_t output_dim() const { return output_dim_; }

  std::size_t num_layers() const { return hidden_.size() + 1; }
  std::size_t layer_in(std::size_t l) const;
  std::size_t layer_out(std::size_t l) const;
  std::size_t weight_offset(std::size_t l) const { return offsets_[l]; }
  std::size_t bias_offset(std::size_t l) const {
    return offsets_[l] + layer_in(l) * layer_out(l);
  }

  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  bool SameShape(const GeneratorParams& other) const;
  bool operator==(const GeneratorParams& other) const = default;

 private:
  int input_dim_ = 0;
  std::vector<int> hidden_;
  std::vector<int> blocks_;
  std::size_t output_dim_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<double> values_;
};

// Attribute sizes of a domain, the generator's output blocks.
std::vector<int> BlockSizes(const Domain& domain);

// Rows of seed vectors z.
struct LatentBatch {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * dim, dim};
  }
  bool operator==(const LatentBatch&) const = default;
};

LatentBatch SampleLatent(std::size_t rows, std::size_t dim, Rng& rng);

std::vector<double> Forward(const GeneratorParams& params, std::span<const double> z);
ProbabilityBatch ForwardBatch(const GeneratorParams& params, const LatentBatch& z);

enum class GemLossKind { kL1, kL2 };

// Mean of |c_j| (or c_j^2) over the active constraints, where c_j is the
// batch answer minus the target.
double GemLoss(const GeneratorParams& params, const LatentBatch& z,
               std::span<const Constraint> constraints,
               std::span<const std::size_t> active,
               GemLossKind kind = GemLossKind::kL1);
std::vector<double> GemGradient(const GeneratorParams& params,
                                const LatentBatch& z,
                                std::span<const Constraint> constraints,
                                std::span<const std::size_t> active,
                                GemLossKind kind = GemLossKind::kL1);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long step = 0;
};

void AdamStep(std::span<double> params, std::span<const double> grad,
              AdamState& state, double lr, double beta1 = 0.9,
              double beta2 = 0.999, double epsilon = 1e-8);

// ema = beta * ema + (1 - beta) * current.
void EmaUpdate(std::span<double> ema, std::span<const double> current, double beta);

struct GemOptions {
  std::vector<int> hidden = {64, 128};
  int z_dim = 16;
  int batch = 100;
  double lr = 1e-4;
  int t_max = 100;
  GemLossKind loss = GemLossKind::kL1;
  // Draw fresh seed vectors every step instead of fixing them.
  bool resample_z = false;
  double ema_beta = 0.9;
  // The stopping threshold is gamma_scale times an EMA of the per-round
  // max error of new measurements.
  double gamma_beta = 0.5;
  double gamma_scale = 0.5;
};

// A trained generator together with the seed vectors it was trained on.
struct GemCheckpoint {
  GeneratorParams params;
  LatentBatch z;
};

// JSON container: shapes, the domain, and flat parameter and seed arrays.
// Doubles are written in shortest round-trip form, so loading is exact.
void SaveGemCheckpoint(const GemCheckpoint& ckpt, const Domain& domain,
                       const std::string& path);
GemCheckpoint LoadGemCheckpoint(const std::string& path, const Domain& domain);

struct GemUpdateStats {
  int steps = 0;
  double gamma = 0.0;
  double final_loss = 0.0;
};

class GemSynthesizer : public Synthesizer {
 public:
  GemSynthesizer(const Domain& domain, GemOptions options, Rng& rng);
  // Warm start from a checkpoint, keeping its seed vectors.
  GemSynthesizer(const Domain& domain, GemOptions options, GemCheckpoint init,
                 Rng& rng);

  std::string name() const override { return "gem"; }
  std::vector<double> Answers(const QuerySet& queries) const override;
  void Update(const MeasurementLedger& ledger, const QuerySet& queries,
              const RoundContext& ctx) override;
  Distribution Current() const override;
  // Generator output under the weight EMA once it has started.
  Distribution Finalize() const override;

  const GeneratorParams& params() const { return params_; }
  const LatentBatch& latent() const { return z_; }
  GemCheckpoint Checkpoint() const;
  // The parameters Finalize uses.
  GemCheckpoint OutputCheckpoint() const;
  const GemUpdateStats& last_stats() const { return stats_; }

  // Runs the inner loop on explicit constraints. Exposed for pretraining.
  GemUpdateStats Fit(std::span<const Constraint> constraints, double gamma,
                     int max_steps, bool update_ema);

 private:
  Domain domain_;
  GemOptions options_;
  GeneratorParams params_;
  LatentBatch z_;
  AdamState adam_;
  std::optional<GeneratorParams> ema_;
  std::optional<double> gamma_ema_;
  GemUpdateStats stats_;
  Rng rng_;
};

}  // namespace dpsynth

#endif  // DPSYNTH_GEM_H_
