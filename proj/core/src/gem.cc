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

#include "dpsynth/gem.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "dpsynth/error.h"
#include "dpsynth/io.h"
#include "dpsynth/parallel.h"
#include "json.hpp"

namespace dpsynth {
namespace {

constexpr char kCheckpointFormat[] = "dpsynth-gem-checkpoint";
constexpr int kCheckpointVersion = 1;

// Layer inputs saved by the forward pass: acts[0] is z, acts[l] the ReLU
// output feeding layer l.
struct Tape {
  std::vector<std::vector<double>> acts;
  ProbabilityBatch probs;
};

void BlockSoftmax(const std::vector<int>& blocks, double* x) {
  for (int size : blocks) {
    const double top = *std::max_element(x, x + size);
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
      x[i] = std::exp(x[i] - top);
      sum += x[i];
    }
    for (int i = 0; i < size; ++i) x[i] /= sum;
    x += size;
  }
}

Tape RunForward(const GeneratorParams& params, const LatentBatch& z) {
  Require(z.rows >= 1, "latent batch is empty");
  Require(z.dim == static_cast<std::size_t>(params.input_dim()),
          "latent dimension does not match the generator");
  const std::size_t layers = params.num_layers();
  const std::size_t rows = z.rows;
  Tape tape;
  tape.acts.resize(layers);
  tape.acts[0] = z.values;
  for (std::size_t l = 1; l < layers; ++l) {
    tape.acts[l].assign(rows * params.layer_in(l), 0.0);
  }
  tape.probs.rows = rows;
  tape.probs.width = params.output_dim();
  tape.probs.values.assign(rows * params.output_dim(), 0.0);
  const auto theta = params.values();
  ParallelFor(rows, [&](std::size_t b) {
    for (std::size_t l = 0; l < layers; ++l) {
      const std::size_t in = params.layer_in(l);
      const std::size_t out = params.layer_out(l);
      const double* a = tape.acts[l].data() + b * in;
      const double* w = theta.data() + params.weight_offset(l);
      const double* bias = theta.data() + params.bias_offset(l);
      const bool last = l + 1 == layers;
      double* o = last ? tape.probs.values.data() + b * out
                       : tape.acts[l + 1].data() + b * out;
      for (std::size_t r = 0; r < out; ++r) {
        double s = bias[r];
        const double* wr = w + r * in;
        for (std::size_t i = 0; i < in; ++i) s += wr[i] * a[i];
        o[r] = last ? s : std::max(0.0, s);
      }
      if (last) BlockSoftmax(params.blocks(), o);
    }
  });
  return tape;
}

std::vector<std::vector<std::size_t>> IndexSets(
    const GeneratorParams& params, std::span<const Constraint> constraints) {
  std::vector<std::size_t> offsets(params.blocks().size());
  std::size_t acc = 0;
  for (std::size_t a = 0; a < offsets.size(); ++a) {
    offsets[a] = acc;
    acc += static_cast<std::size_t>(params.blocks()[a]);
  }
  std::vector<std::vector<std::size_t>> idx(constraints.size());
  for (std::size_t j = 0; j < constraints.size(); ++j) {
    const auto& q = constraints[j].query;
    Require(!q.features.empty() && q.features.size() == q.targets.size(),
            "malformed constraint query");
    for (std::size_t i = 0; i < q.features.size(); ++i) {
      const auto f = static_cast<std::size_t>(q.features[i]);
      Require(f < offsets.size() && q.targets[i] >= 0 &&
                  q.targets[i] < params.blocks()[f],
              "constraint query does not fit the generator output");
      idx[j].push_back(offsets[f] + static_cast<std::size_t>(q.targets[i]));
    }
  }
  return idx;
}

// Batch answer minus target for every constraint.
std::vector<double> Residuals(const ProbabilityBatch& probs,
                              std::span<const Constraint> constraints,
                              const std::vector<std::vector<std::size_t>>& idx) {
  std::vector<double> c(constraints.size());
  ParallelFor(constraints.size(), [&](std::size_t j) {
    double total = 0.0;
    for (std::size_t b = 0; b < probs.rows; ++b) {
      const double* p = probs.values.data() + b * probs.width;
      double prod = 1.0;
      for (std::size_t k : idx[j]) prod *= p[k];
      total += prod;
    }
    c[j] = total / static_cast<double>(probs.rows) - constraints[j].target;
  }, 16);
  return c;
}

double LossValue(std::span<const double> c, std::span<const std::size_t> active,
                 GemLossKind kind) {
  Require(!active.empty(), "active constraint set is empty");
  double total = 0.0;
  for (std::size_t j : active) {
    total += kind == GemLossKind::kL1 ? std::abs(c[j]) : c[j] * c[j];
  }
  return total / static_cast<double>(active.size());
}

std::vector<double> Backward(const GeneratorParams& params, const Tape& tape,
                             const std::vector<std::vector<std::size_t>>& idx,
                             std::span<const double> c,
                             std::span<const std::size_t> active,
                             GemLossKind kind) {
  Require(!active.empty(), "active constraint set is empty");
  const std::size_t rows = tape.probs.rows;
  const std::size_t width = tape.probs.width;
  const double scale = 1.0 / (static_cast<double>(active.size()) *
                              static_cast<double>(rows));
  std::vector<double> coef(c.size(), 0.0);
  for (std::size_t j : active) {
    Require(j < c.size(), "active index out of range");
    if (kind == GemLossKind::kL1) {
      coef[j] = c[j] > 0.0 ? scale : (c[j] < 0.0 ? -scale : 0.0);
    } else {
      coef[j] = 2.0 * c[j] * scale;
    }
  }

  // Gradient with respect to the output logits.
  std::vector<double> delta(rows * width, 0.0);
  ParallelFor(rows, [&](std::size_t b) {
    const double* p = tape.probs.values.data() + b * width;
    std::vector<double> dp(width, 0.0);
    for (std::size_t j : active) {
      if (coef[j] != 0.0) AccumulateProductGradient(p, idx[j], coef[j], dp.data());
    }
    double* d = delta.data() + b * width;
    std::size_t off = 0;
    for (int size : params.blocks()) {
      double dot = 0.0;
      for (int k = 0; k < size; ++k) dot += p[off + k] * dp[off + k];
      for (int k = 0; k < size; ++k) d[off + k] = p[off + k] * (dp[off + k] - dot);
      off += static_cast<std::size_t>(size);
    }
  });

  std::vector<double> grad(params.size(), 0.0);
  const auto theta = params.values();
  for (std::size_t l = params.num_layers(); l-- > 0;) {
    const std::size_t in = params.layer_in(l);
    const std::size_t out = params.layer_out(l);
    const std::vector<double>& a = tape.acts[l];
    double* gw = grad.data() + params.weight_offset(l);
    double* gb = grad.data() + params.bias_offset(l);
    ParallelFor(out, [&](std::size_t r) {
      double* gwr = gw + r * in;
      for (std::size_t b = 0; b < rows; ++b) {
        const double d = delta[b * out + r];
        if (d == 0.0) continue;
        gb[r] += d;
        const double* ab = a.data() + b * in;
        for (std::size_t i = 0; i < in; ++i) gwr[i] += d * ab[i];
      }
    });
    if (l == 0) break;
    std::vector<double> next(rows * in, 0.0);
    const double* w = theta.data() + params.weight_offset(l);
    ParallelFor(rows, [&](std::size_t b) {
      const double* db = delta.data() + b * out;
      const double* ab = a.data() + b * in;
      double* nb = next.data() + b * in;
      for (std::size_t r = 0; r < out; ++r) {
        const double d = db[r];
        if (d == 0.0) continue;
        const double* wr = w + r * in;
        for (std::size_t i = 0; i < in; ++i) nb[i] += wr[i] * d;
      }
      for (std::size_t i = 0; i < in; ++i) {
        if (ab[i] <= 0.0) nb[i] = 0.0;
      }
    });
    delta = std::move(next);
  }
  return grad;
}

}  // namespace

GeneratorParams::GeneratorParams(int input_dim, std::vector<int> hidden,
                                 std::vector<int> blocks)
    : input_dim_(input_dim), hidden_(std::move(hidden)), blocks_(std::move(blocks)) {
  Require(input_dim_ >= 1, "generator input dimension must be positive");
  Require(!blocks_.empty(), "generator needs at least one output block");
  for (int h : hidden_) Require(h >= 1, "hidden layer sizes must be positive");
  for (int b : blocks_) {
    Require(b >= 1, "output block sizes must be positive");
    output_dim_ += static_cast<std::size_t>(b);
  }
  std::size_t total = 0;
  for (std::size_t l = 0; l < num_layers(); ++l) {
    offsets_.push_back(total);
    total += (layer_in(l) + 1) * layer_out(l);
  }
  values_.assign(total, 0.0);
}

GeneratorParams GeneratorParams::Random(int input_dim, std::vector<int> hidden,
                                        std::vector<int> blocks, Rng& rng) {
  GeneratorParams p(input_dim, std::move(hidden), std::move(blocks));
  for (std::size_t l = 0; l < p.num_layers(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(p.layer_in(l)));
    std::uniform_real_distribution<double> init(-bound, bound);
    const std::size_t end = p.bias_offset(l) + p.layer_out(l);
    for (std::size_t i = p.weight_offset(l); i < end; ++i) p.values_[i] = init(rng);
  }
  return p;
}

std::size_t GeneratorParams::layer_in(std::size_t l) const {
  return l == 0 ? static_cast<std::size_t>(input_dim_)
                : static_cast<std::size_t>(hidden_[l - 1]);
}

std::size_t GeneratorParams::layer_out(std::size_t l) const {
  return l < hidden_.size() ? static_cast<std::size_t>(hidden_[l]) : output_dim_;
}

bool GeneratorParams::SameShape(const GeneratorParams& other) const {
  return input_dim_ == other.input_dim_ && hidden_ == other.hidden_ &&
         blocks_ == other.blocks_;
}

std::vector<int> BlockSizes(const Domain& domain) {
  std::vector<int> blocks;
  for (const auto& a : domain.attributes()) blocks.push_back(a.size);
  return blocks;
}

LatentBatch SampleLatent(std::size_t rows, std::size_t dim, Rng& rng) {
  Require(rows >= 1 && dim >= 1, "latent batch needs positive shape");
  LatentBatch z{rows, dim, std::vector<double>(rows * dim)};
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : z.values) v = normal(rng);
  return z;
}

std::vector<double> Forward(const GeneratorParams& params, std::span<const double> z) {
  LatentBatch one{1, z.size(), std::vector<double>(z.begin(), z.end())};
  return RunForward(params, one).probs.values;
}

ProbabilityBatch ForwardBatch(const GeneratorParams& params, const LatentBatch& z) {
  return RunForward(params, z).probs;
}

double GemLoss(const GeneratorParams& params, const LatentBatch& z,
               std::span<const Constraint> constraints,
               std::span<const std::size_t> active, GemLossKind kind) {
  const auto idx = IndexSets(params, constraints);
  const Tape tape = RunForward(params, z);
  return LossValue(Residuals(tape.probs, constraints, idx), active, kind);
}

std::vector<double> GemGradient(const GeneratorParams& params,
                                const LatentBatch& z,
                                std::span<const Constraint> constraints,
                                std::span<const std::size_t> active,
                                GemLossKind kind) {
  const auto idx = IndexSets(params, constraints);
  const Tape tape = RunForward(params, z);
  const auto c = Residuals(tape.probs, constraints, idx);
  return Backward(params, tape, idx, c, active, kind);
}

void AdamStep(std::span<double> params, std::span<const double> grad,
              AdamState& state, double lr, double beta1, double beta2,
              double epsilon) {
  Require(params.size() == grad.size(), "gradient shape mismatch");
  if (state.m.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  Require(state.m.size() == params.size(), "optimizer state shape mismatch");
  ++state.step;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * grad[i];
    state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * grad[i] * grad[i];
    params[i] -= lr * (state.m[i] / c1) / (std::sqrt(state.v[i] / c2) + epsilon);
  }
}

void EmaUpdate(std::span<double> ema, std::span<const double> current, double beta) {
  Require(ema.size() == current.size(), "EMA shape mismatch");
  Require(beta >= 0.0 && beta <= 1.0, "EMA beta must lie in [0, 1]");
  for (std::size_t i = 0; i < ema.size(); ++i) {
    ema[i] = beta * ema[i] + (1.0 - beta) * current[i];
  }
}

void SaveGemCheckpoint(const GemCheckpoint& ckpt, const Domain& domain,
                       const std::string& path) {
  Require(ckpt.params.blocks() == BlockSizes(domain),
          "checkpoint does not match the domain");
  nlohmann::json j;
  j["format"] = kCheckpointFormat;
  j["version"] = kCheckpointVersion;
  j["domain"] = nlohmann::json::parse(DomainToJson(domain));
  j["input_dim"] = ckpt.params.input_dim();
  j["hidden"] = ckpt.params.hidden();
  j["blocks"] = ckpt.params.blocks();
  j["params"] = std::vector<double>(ckpt.params.values().begin(),
                                    ckpt.params.values().end());
  j["z_rows"] = ckpt.z.rows;
  j["z_dim"] = ckpt.z.dim;
  j["z"] = ckpt.z.values;
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIo, "cannot open checkpoint file " + path);
  out << j.dump() << '\n';
  if (!out) Fail(ErrorCode::kIo, "failed writing checkpoint file " + path);
}

GemCheckpoint LoadGemCheckpoint(const std::string& path, const Domain& domain) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open checkpoint file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kIo, "malformed checkpoint " + path + ": " + e.what());
  }
  GemCheckpoint ckpt;
  try {
    if (j.at("format").get<std::string>() != kCheckpointFormat ||
        j.at("version").get<int>() != kCheckpointVersion) {
      Fail(ErrorCode::kIo, "unsupported checkpoint format in " + path);
    }
    if (!(ParseDomainJson(j.at("domain").dump()) == domain)) {
      Fail(ErrorCode::kDomainMismatch, "checkpoint domain differs from " + path);
    }
    ckpt.params = GeneratorParams(j.at("input_dim").get<int>(),
                                  j.at("hidden").get<std::vector<int>>(),
                                  j.at("blocks").get<std::vector<int>>());
    const auto values = j.at("params").get<std::vector<double>>();
    if (values.size() != ckpt.params.size() ||
        ckpt.params.blocks() != BlockSizes(domain)) {
      Fail(ErrorCode::kIo, "checkpoint parameter shape mismatch in " + path);
    }
    std::copy(values.begin(), values.end(), ckpt.params.values().begin());
    ckpt.z.rows = j.at("z_rows").get<std::size_t>();
    ckpt.z.dim = j.at("z_dim").get<std::size_t>();
    ckpt.z.values = j.at("z").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kIo, "malformed checkpoint " + path + ": " + e.what());
  }
  if (ckpt.z.rows < 1 || ckpt.z.dim != static_cast<std::size_t>(ckpt.params.input_dim()) ||
      ckpt.z.values.size() != ckpt.z.rows * ckpt.z.dim) {
    Fail(ErrorCode::kIo, "checkpoint seed batch has the wrong shape in " + path);
  }
  return ckpt;
}

GemSynthesizer::GemSynthesizer(const Domain& domain, GemOptions options, Rng& rng)
    : domain_(domain), options_(std::move(options)) {
  Require(options_.z_dim >= 1 && options_.batch >= 1,
          "GEM needs positive seed dimension and batch size");
  params_ = GeneratorParams::Random(options_.z_dim, options_.hidden,
                                    BlockSizes(domain_), rng);
  z_ = SampleLatent(static_cast<std::size_t>(options_.batch),
                    static_cast<std::size_t>(options_.z_dim), rng);
  rng_.seed(rng());
}

GemSynthesizer::GemSynthesizer(const Domain& domain, GemOptions options,
                               GemCheckpoint init, Rng& rng)
    : domain_(domain),
      options_(std::move(options)),
      params_(std::move(init.params)),
      z_(std::move(init.z)) {
  if (params_.blocks() != BlockSizes(domain_)) {
    Fail(ErrorCode::kDomainMismatch, "checkpoint does not match the domain");
  }
  options_.hidden = params_.hidden();
  options_.z_dim = params_.input_dim();
  options_.batch = static_cast<int>(z_.rows);
  rng_.seed(rng());
}

std::vector<double> GemSynthesizer::Answers(const QuerySet& queries) const {
  return queries.AnswerBatch(ForwardBatch(params_, z_));
}

Distribution GemSynthesizer::Current() const {
  return Distribution(domain_, ForwardBatch(params_, z_));
}

Distribution GemSynthesizer::Finalize() const {
  return Distribution(domain_, ForwardBatch(ema_ ? *ema_ : params_, z_));
}

GemCheckpoint GemSynthesizer::Checkpoint() const { return {params_, z_}; }

GemCheckpoint GemSynthesizer::OutputCheckpoint() const {
  return {ema_ ? *ema_ : params_, z_};
}

GemUpdateStats GemSynthesizer::Fit(std::span<const Constraint> constraints,
                                   double gamma, int max_steps, bool update_ema) {
  Require(!constraints.empty(), "GEM update needs at least one measurement");
  Require(max_steps >= 0, "T_max must be nonnegative");
  const auto idx = IndexSets(params_, constraints);
  GemUpdateStats stats;
  stats.gamma = gamma;
  std::vector<std::size_t> active;
  if (update_ema && !ema_) ema_ = params_;
  while (true) {
    const Tape tape = RunForward(params_, z_);
    const auto c = Residuals(tape.probs, constraints, idx);
    double worst = 0.0;
    active.clear();
    for (std::size_t j = 0; j < c.size(); ++j) {
      worst = std::max(worst, std::abs(c[j]));
      if (std::abs(c[j]) >= gamma) active.push_back(j);
    }
    if (!active.empty()) stats.final_loss = LossValue(c, active, options_.loss);
    if (stats.steps >= max_steps || worst < gamma || active.empty()) break;
    const auto grad = Backward(params_, tape, idx, c, active, options_.loss);
    AdamStep(params_.values(), grad, adam_, options_.lr);
    ++stats.steps;
    if (update_ema) EmaUpdate(ema_->values(), params_.values(), options_.ema_beta);
    if (options_.resample_z) z_ = SampleLatent(z_.rows, z_.dim, rng_);
  }
  return stats;
}

void GemSynthesizer::Update(const MeasurementLedger& ledger,
                            const QuerySet& queries, const RoundContext& ctx) {
  Require(!ledger.empty(), "GEM update needs at least one measurement");
  std::vector<Constraint> constraints;
  constraints.reserve(ledger.size());
  for (const auto& m : ledger.entries()) {
    constraints.push_back({queries.Query(m.query), m.answer});
  }
  double round_max = 0.0;
  for (std::size_t j : ctx.new_measurements) {
    if (const Measurement* m = ledger.Lookup(j)) {
      round_max = std::max(round_max, std::abs(m->answer - ctx.answers_before[j]));
    }
  }
  gamma_ema_ = gamma_ema_ ? options_.gamma_beta * *gamma_ema_ +
                                (1.0 - options_.gamma_beta) * round_max
                          : round_max;
  const bool update_ema = ctx.round > (ctx.total_rounds + 1) / 2;
  stats_ = Fit(constraints, options_.gamma_scale * *gamma_ema_, options_.t_max,
               update_ema);
}

}  // namespace dpsynth
