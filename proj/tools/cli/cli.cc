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

#include "cli.h"

#include <charconv>
#include <chrono>
#include <filesystem>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dpsynth/adaptive.h"
#include "dpsynth/distribution.h"
#include "dpsynth/error.h"
#include "dpsynth/evaluation.h"
#include "dpsynth/gem.h"
#include "dpsynth/io.h"
#include "dpsynth/marginals.h"
#include "dpsynth/mwem.h"
#include "dpsynth/parallel.h"
#include "dpsynth/pep.h"
#include "dpsynth/privacy.h"
#include "dpsynth/public_assist.h"
#include "dpsynth/rap_softmax.h"
#include "dpsynth/search_baselines.h"
#include "dpsynth/toy_data.h"

namespace dpsynth::cli {
namespace {

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return kExitUsage;
    case ErrorCode::kCapacity:
      return kExitCapacity;
    case ErrorCode::kIo:
      return kExitIo;
    case ErrorCode::kDomainMismatch:
      return kExitDomainMismatch;
    case ErrorCode::kNumerical:
      break;
  }
  return kExitFailure;
}

// Shortest text that parses back to the same double.
std::string Str(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<int> ParseIntList(const std::string& text) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      Require(used == item.size(), "bad integer '" + item + "'");
    } catch (const std::logic_error&) {
      Fail(ErrorCode::kInvalidArgument, "bad integer list '" + text + "'");
    }
  }
  return out;
}

struct WorkloadFlags {
  int k = 3;
  std::string count = "all";
  std::uint64_t seed = 0;
};

void AddWorkloadFlags(CLI::App* app, WorkloadFlags& f) {
  app->add_option("--marginal-k", f.k, "Marginal order k")->capture_default_str();
  app->add_option("--workload-count", f.count,
                  "Number of feature subsets, or 'all'")
      ->capture_default_str();
  app->add_option("--workload-seed", f.seed, "Seed for sampling feature subsets")
      ->capture_default_str();
}

QuerySet BuildQueries(const Domain& domain, const WorkloadFlags& f) {
  std::optional<std::size_t> count;
  if (f.count != "all") {
    const auto parsed = ParseIntList(f.count);
    Require(parsed.size() == 1 && parsed[0] >= 1,
            "--workload-count must be a positive integer or 'all'");
    count = static_cast<std::size_t>(parsed[0]);
  }
  Rng rng(f.seed);
  return QuerySet::Build(domain, f.k, count, rng);
}

struct BudgetFlags {
  std::optional<double> rho;
  std::optional<double> epsilon;
  std::optional<double> delta;
};

void AddBudgetFlags(CLI::App* app, BudgetFlags& f) {
  auto* rho = app->add_option("--rho", f.rho, "zCDP budget");
  auto* eps = app->add_option("--epsilon", f.epsilon,
                              "(epsilon, delta)-DP budget, converted to zCDP");
  app->add_option("--delta", f.delta, "delta for --epsilon, or for reporting");
  rho->excludes(eps);
}

double ResolveRho(const BudgetFlags& f) {
  if (f.rho) {
    Require(*f.rho > 0.0, "--rho must be positive");
    return *f.rho;
  }
  Require(f.epsilon.has_value(), "a budget is required: --rho or --epsilon/--delta");
  Require(f.delta.has_value(), "--epsilon needs --delta");
  return DpToZcdp(*f.epsilon, *f.delta);
}

struct GemFlags {
  std::string hidden = "64,128";
  int zdim = 16;
  int batch = 100;
  double lr = 1e-4;
  int tmax = 100;
  std::string loss = "l1";
  bool resample_z = false;
  double ema_beta = 0.9;
  double gamma_scale = 0.5;
};

void AddGemFlags(CLI::App* app, GemFlags& f) {
  app->add_option("--gem-hidden", f.hidden, "Hidden layer sizes")->capture_default_str();
  app->add_option("--gem-zdim", f.zdim, "Seed vector dimension")->capture_default_str();
  app->add_option("--gem-batch", f.batch, "Seed batch size B")->capture_default_str();
  app->add_option("--gem-lr", f.lr, "Learning rate")->capture_default_str();
  app->add_option("--gem-tmax", f.tmax, "Optimizer steps per round")->capture_default_str();
  app->add_option("--gem-loss", f.loss, "l1 or l2")
      ->check(CLI::IsMember({"l1", "l2"}))
      ->capture_default_str();
  app->add_flag("--gem-resample-z", f.resample_z, "Draw fresh seeds every step");
  app->add_option("--gem-ema-beta", f.ema_beta, "Weight EMA factor")
      ->capture_default_str();
  app->add_option("--gem-gamma-scale", f.gamma_scale,
                  "Stopping threshold as a fraction of the error EMA")
      ->capture_default_str();
}

GemOptions ToGemOptions(const GemFlags& f) {
  GemOptions o;
  o.hidden = ParseIntList(f.hidden);
  o.z_dim = f.zdim;
  o.batch = f.batch;
  o.lr = f.lr;
  o.t_max = f.tmax;
  o.loss = f.loss == "l2" ? GemLossKind::kL2 : GemLossKind::kL1;
  o.resample_z = f.resample_z;
  o.ema_beta = f.ema_beta;
  o.gamma_scale = f.gamma_scale;
  return o;
}

void EchoGem(const GemFlags& f, std::map<std::string, std::string>& params) {
  params["gem_hidden"] = f.hidden;
  params["gem_zdim"] = std::to_string(f.zdim);
  params["gem_batch"] = std::to_string(f.batch);
  params["gem_lr"] = Str(f.lr);
  params["gem_tmax"] = std::to_string(f.tmax);
  params["gem_loss"] = f.loss;
  params["gem_resample_z"] = f.resample_z ? "true" : "false";
  params["gem_ema_beta"] = Str(f.ema_beta);
  params["gem_gamma_scale"] = Str(f.gamma_scale);
}

struct SynthFlags {
  std::string domain;
  std::string data;
  std::string method = "pep";
  BudgetFlags budget;
  int rounds = 10;
  int per_round = 1;
  double alpha = 0.67;
  bool marginal_trick = false;
  std::uint64_t seed = 0;
  WorkloadFlags workloads;
  bool em_halved = false;
  bool no_noise = false;
  bool audit_errors = false;
  std::string output_rule = "last";
  std::string out_csv;
  std::optional<std::size_t> samples;
  std::string out_dist;
  std::string report;
  std::string trace;
  std::string dump_errors;
  std::string public_csv;
  int pretrain_steps = 2000;
  std::string gem_init;
  double mwem_eta = 2.0;
  int mwem_cycles = 10;
  double pep_gamma = 0.0;
  int pep_tmax = 25;
  double pep_clip = 1e-4;
  GemFlags gem;
  int rap_rows = 1000;
  double rap_lr = 0.1;
  int rap_steps = 1000;
  bool rap_original = false;
  double dq_eta = 2.0;
  int dq_samples = 100;
  double fem_sigma = 1.0;
  int fem_samples = 100;
};

// Fails before any work is done when an output path cannot be created.
void CheckOutputPath(const std::string& path) {
  if (path.empty()) return;
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent)) {
    Fail(ErrorCode::kIo, "output directory does not exist: " + parent.string());
  }
}

bool IsHistogramMethod(const std::string& method) {
  return method == "mwem" || method == "pep" || method == "dualquery" ||
         method == "fem";
}

int CmdSynth(const SynthFlags& f, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const double rho = ResolveRho(f.budget);
  if (!f.public_csv.empty()) {
    Require(f.method == "pep" || f.method == "gem" || f.method == "mwem",
            "--public applies to pep, mwem and gem");
  }
  Require(f.gem_init.empty() || f.method == "gem", "--gem-init applies to gem");
  Require(f.gem_init.empty() || f.public_csv.empty(),
          "--gem-init and --public are mutually exclusive");
  Require(f.output_rule == "last" || f.output_rule == "average",
          "--output-rule must be 'last' or 'average'");
  if (f.no_noise) {
    err << "WARNING: --no-noise disables every privacy mechanism. The output is "
           "NOT differentially private.\n";
  }

  for (const auto* path : {&f.out_csv, &f.out_dist, &f.report, &f.trace, &f.dump_errors}) {
    CheckOutputPath(*path);
  }
  const Domain domain = LoadDomain(f.domain);
  if (IsHistogramMethod(f.method)) RequireHistogramCapacity(domain, kDefaultCellCap);
  const Dataset data = LoadDataset(f.data, domain);
  Require(!data.empty(), "empty dataset");
  const QuerySet queries = BuildQueries(domain, f.workloads);
  const std::vector<double> truth = queries.AnswerRecords(data);
  Rng rng(f.seed);

  RunReport report;
  report.method = f.method;
  report.is_private = !f.no_noise;
  report.rho = rho;
  report.delta = f.budget.delta;
  if (f.budget.delta) report.epsilon = ZcdpToDp(rho, *f.budget.delta);
  report.rounds = f.rounds;
  report.per_round = f.per_round;
  report.alpha = f.alpha;
  report.seed = f.seed;
  report.marginal_trick = f.marginal_trick;
  report.marginal_k = f.workloads.k;
  report.num_workloads = queries.num_workloads();
  report.num_queries = queries.size();
  report.num_records = data.size();
  report.params["workload_count"] = f.workloads.count;
  report.params["workload_seed"] = std::to_string(f.workloads.seed);
  report.params["output_rule"] = f.output_rule;
  report.params["em_score_halved"] = f.em_halved ? "true" : "false";
  if (!f.public_csv.empty()) report.params["public"] = f.public_csv;

  Distribution output;
  std::vector<RoundRecord> trace;
  std::optional<GemCheckpoint> gem_output;
  if (f.method == "dualquery" || f.method == "fem") {
    SearchRunResult result;
    if (f.method == "dualquery") {
      Require(!f.no_noise, "--no-noise is not supported for dualquery");
      result = RunDualQuery(truth, queries, rho, f.rounds, data.size(),
                            {f.dq_eta, f.dq_samples}, f.audit_errors, rng);
      report.params["dq_eta"] = Str(f.dq_eta);
      report.params["dq_eta_used"] = Str(result.eta);
      report.params["dq_samples"] = std::to_string(f.dq_samples);
    } else {
      result = RunFem(truth, queries, rho, f.rounds, data.size(),
                      {f.fem_sigma, f.fem_samples}, f.no_noise, f.audit_errors, rng);
      report.params["fem_sigma"] = Str(f.fem_sigma);
      report.params["fem_samples"] = std::to_string(f.fem_samples);
    }
    output = std::move(result.output);
    trace = std::move(result.trace);
  } else {
    const Accountant acct(rho, f.rounds, f.per_round, f.alpha, data.size());
    std::unique_ptr<Synthesizer> synth;
    GemSynthesizer* gem = nullptr;
    auto initial = [&]() {
      if (f.public_csv.empty()) return SupportHistogram::Uniform(domain);
      return PepPubInit(LoadDataset(f.public_csv, domain), domain);
    };
    if (f.method == "mwem") {
      synth = std::make_unique<MwemSynthesizer>(initial(),
                                                MwemOptions{f.mwem_eta, f.mwem_cycles});
      report.params["mwem_eta"] = Str(f.mwem_eta);
      report.params["mwem_cycles"] = std::to_string(f.mwem_cycles);
    } else if (f.method == "pep") {
      synth = std::make_unique<PepSynthesizer>(
          initial(), PepOptions{f.pep_gamma, f.pep_tmax, f.pep_clip});
      report.params["pep_gamma"] = Str(f.pep_gamma);
      report.params["pep_tmax"] = std::to_string(f.pep_tmax);
      report.params["pep_clip"] = Str(f.pep_clip);
    } else if (f.method == "gem") {
      const GemOptions options = ToGemOptions(f.gem);
      std::unique_ptr<GemSynthesizer> g;
      if (!f.gem_init.empty()) {
        g = std::make_unique<GemSynthesizer>(domain, options,
                                             LoadGemCheckpoint(f.gem_init, domain), rng);
        report.params["gem_init"] = f.gem_init;
        std::string shape;
        for (int h : g->params().hidden()) shape += (shape.empty() ? "" : ",") + std::to_string(h);
        report.params["gem_hidden"] = shape;
        report.params["gem_zdim"] = std::to_string(g->params().input_dim());
        report.params["gem_batch"] = std::to_string(g->latent().rows);
      } else if (!f.public_csv.empty()) {
        const Dataset pub = LoadDatasetSubset(f.public_csv, domain);
        PretrainResult pre = GemPubPretrain(pub, queries, options, f.pretrain_steps, rng);
        g = std::make_unique<GemSynthesizer>(domain, options, std::move(pre.checkpoint),
                                             rng);
        report.params["pretrain_steps"] = std::to_string(f.pretrain_steps);
      } else {
        g = std::make_unique<GemSynthesizer>(domain, options, rng);
      }
      EchoGem(f.gem, report.params);
      gem = g.get();
      synth = std::move(g);
    } else if (f.method == "rap-softmax") {
      synth = std::make_unique<RapSoftmaxSynthesizer>(
          domain, RapOptions{f.rap_rows, f.rap_lr, f.rap_steps, 10, 1e-6, f.rap_original},
          rng);
      report.params["rap_rows"] = std::to_string(f.rap_rows);
      report.params["rap_lr"] = Str(f.rap_lr);
      report.params["rap_steps"] = std::to_string(f.rap_steps);
      report.params["rap_original"] = f.rap_original ? "true" : "false";
    } else {
      Fail(ErrorCode::kInvalidArgument, "unknown method '" + f.method + "'");
    }
    RunConfig config;
    config.mode = f.marginal_trick ? SelectionMode::kPerWorkload : SelectionMode::kPerQuery;
    config.em_score_halved = f.em_halved;
    config.noiseless = f.no_noise;
    config.output = f.output_rule == "average" ? OutputRule::kAverage
                                               : OutputRule::kLastIterate;
    config.audit_errors = f.audit_errors;
    RunResult result = RunWithAnswers(truth, queries, *synth, acct, config, rng);
    output = std::move(result.output);
    trace = std::move(result.trace);
    if (gem != nullptr && config.output == OutputRule::kLastIterate) {
      gem_output = gem->OutputCheckpoint();
    }
  }

  const std::vector<double> synth_answers = output.Answers(queries);
  report.errors = ComputeErrors(truth, synth_answers);
  report.workloads = PerWorkloadErrors(queries, truth, synth_answers);
  for (const auto& rec : trace) report.max_err_measured.push_back(rec.max_err_measured);

  if (!f.out_csv.empty()) {
    WriteDatasetCsv(output.Sample(f.samples.value_or(data.size()), rng), f.out_csv);
  }
  if (!f.out_dist.empty()) {
    if (output.is_histogram()) {
      const SupportHistogram& h = output.histogram();
      std::vector<std::uint64_t> cells(h.size());
      for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = h.cell(i);
      WriteHistogramBinary(domain, cells, h.mass(), f.out_dist);
    } else if (gem_output) {
      SaveGemCheckpoint(*gem_output, domain, f.out_dist);
    } else {
      Fail(ErrorCode::kInvalidArgument,
           "--out-dist supports histogram methods and gem with the last iterate");
    }
  }
  if (!f.trace.empty()) WriteTraceJsonl(trace, f.trace);
  if (!f.dump_errors.empty()) WriteErrorCsv(f.dump_errors, queries, truth, synth_answers);
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!f.report.empty()) WriteReport(report, f.report);

  out << "method=" << f.method << " rho=" << Str(rho)
      << " max_error=" << Str(report.errors.max) << " mean_error=" << Str(report.errors.mean)
      << " rmse=" << Str(report.errors.rmse) << '\n';
  return kExitOk;
}

struct EvaluateFlags {
  std::string domain;
  std::string data;
  std::string synthetic;
  std::string dist;
  std::string checkpoint;
  WorkloadFlags workloads;
  std::string out;
};

int CmdEvaluate(const EvaluateFlags& f, std::ostream& out) {
  const int sources = !f.synthetic.empty() + !f.dist.empty() + !f.checkpoint.empty();
  Require(sources == 1, "give exactly one of --synthetic, --dist, --checkpoint");
  const Domain domain = LoadDomain(f.domain);
  const Dataset data = LoadDataset(f.data, domain);
  const QuerySet queries = BuildQueries(domain, f.workloads);
  std::vector<double> synth;
  if (!f.synthetic.empty()) {
    synth = queries.AnswerRecords(LoadDataset(f.synthetic, domain));
  } else if (!f.dist.empty()) {
    const Histogram hist = ReadHistogramBinary(f.dist);
    if (!(hist.domain() == domain)) {
      Fail(ErrorCode::kDomainMismatch, "distribution domain differs from " + f.domain);
    }
    synth = queries.AnswerHistogram(hist);
  } else {
    const GemCheckpoint ckpt = LoadGemCheckpoint(f.checkpoint, domain);
    synth = queries.AnswerBatch(ForwardBatch(ckpt.params, ckpt.z));
  }
  const ErrorMetrics m = ComputeErrors(queries.AnswerRecords(data), synth);
  out << "max_error=" << Str(m.max) << " mean_error=" << Str(m.mean)
      << " rmse=" << Str(m.rmse) << '\n';
  if (!f.out.empty()) {
    RunReport r;
    r.method = "evaluate";
    r.marginal_k = f.workloads.k;
    r.num_workloads = queries.num_workloads();
    r.num_queries = queries.size();
    r.num_records = data.size();
    r.errors = m;
    r.workloads = PerWorkloadErrors(queries, queries.AnswerRecords(data), synth);
    WriteReport(r, f.out);
  }
  return kExitOk;
}

struct AccountantFlags {
  BudgetFlags budget;
  int rounds = 10;
  int per_round = 1;
  double alpha = 0.67;
  std::size_t n = 1000;
};

int CmdAccountant(const AccountantFlags& f, std::ostream& out) {
  const double rho = ResolveRho(f.budget);
  const Accountant acct(rho, f.rounds, f.per_round, f.alpha, f.n);
  out.precision(6);
  out << std::fixed;
  out << "rho " << rho << '\n';
  out << "eps0 " << acct.Eps0() << '\n';
  out << "selection_exponent " << acct.SelectionExponent() << '\n';
  out << "sigma_query " << acct.NoiseSigma(1.0) << '\n';
  out << "sigma_workload " << acct.NoiseSigma(std::sqrt(2.0)) << '\n';
  if (f.budget.delta) {
    out << "epsilon " << ZcdpToDp(rho, *f.budget.delta) << " (delta "
        << std::defaultfloat << *f.budget.delta << ")\n";
  }
  return kExitOk;
}

struct PretrainFlags {
  std::string domain;
  std::string public_csv;
  std::string out;
  WorkloadFlags workloads;
  GemFlags gem;
  int steps = 2000;
  std::uint64_t seed = 0;
};

int CmdPretrain(const PretrainFlags& f, std::ostream& out) {
  const Domain domain = LoadDomain(f.domain);
  const Dataset pub = LoadDatasetSubset(f.public_csv, domain);
  const QuerySet queries = BuildQueries(domain, f.workloads);
  Rng rng(f.seed);
  const PretrainResult result =
      GemPubPretrain(pub, queries, ToGemOptions(f.gem), f.steps, rng);
  SaveGemCheckpoint(result.checkpoint, domain, f.out);
  out << "workloads=" << result.workloads.size() << " final_loss=" << Str(result.final_loss)
      << '\n';
  return kExitOk;
}

struct BestMixtureFlags {
  std::string domain;
  std::string public_csv;
  std::string data;
  WorkloadFlags workloads;
  int iterations = 2000;
};

int CmdBestMixture(const BestMixtureFlags& f, std::ostream& out) {
  const Domain domain = LoadDomain(f.domain);
  const Dataset pub = LoadDataset(f.public_csv, domain);
  const Dataset data = LoadDataset(f.data, domain);
  const QuerySet queries = BuildQueries(domain, f.workloads);
  const SupportHistogram support = SupportHistogram::Empirical(pub);
  std::vector<std::uint64_t> cells(support.size());
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = support.cell(i);
  const BestMixtureResult r =
      BestMixtureError(cells, queries, queries.AnswerRecords(data), f.iterations);
  out << Str(r.value) << '\n';
  return kExitOk;
}

struct GenToyFlags {
  int attrs = 4;
  int sizes = 8;
  std::size_t n = 2000;
  std::uint64_t seed = 0;
  std::string out_csv;
  std::string out_domain;
};

int CmdGenToy(const GenToyFlags& f, std::ostream& out) {
  ToyDataOptions options;
  options.attributes = f.attrs;
  options.size = f.sizes;
  options.n = f.n;
  options.seed = f.seed;
  const Dataset data = GenerateToyData(options);
  WriteDatasetCsv(data, f.out_csv);
  SaveDomain(data.domain(), f.out_domain);
  out << "records=" << data.size() << " attributes=" << f.attrs << '\n';
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Differentially private synthetic data from marginal measurements"};
  app.name("dpsynth");
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: all cores)");
  std::function<int()> action;

  SynthFlags synth;
  auto* s = app.add_subcommand("synth", "Run a synthesizer on private data");
  s->add_option("--domain", synth.domain, "Domain JSON")->required();
  s->add_option("--data", synth.data, "Private CSV")->required();
  s->add_option("--method", synth.method, "Synthesizer")
      ->check(CLI::IsMember({"mwem", "pep", "gem", "rap-softmax", "dualquery", "fem"}))
      ->capture_default_str();
  AddBudgetFlags(s, synth.budget);
  s->add_option("--T", synth.rounds, "Rounds")->capture_default_str();
  s->add_option("--k", synth.per_round, "Selections per round")->capture_default_str();
  s->add_option("--alpha", synth.alpha, "Share of each step spent on selection")
      ->capture_default_str();
  s->add_flag("--marginal-trick", synth.marginal_trick,
              "Select and measure whole workloads");
  s->add_option("--seed", synth.seed, "Run seed")->capture_default_str();
  AddWorkloadFlags(s, synth.workloads);
  s->add_flag("--em-score-halved", synth.em_halved,
              "Halve the exponential mechanism's exponent");
  s->add_flag("--no-noise", synth.no_noise,
              "Exact selection and measurement (NOT private; for testing)");
  s->add_flag("--audit-errors", synth.audit_errors,
              "Record the error on all queries in the trace");
  s->add_option("--output-rule", synth.output_rule, "last or average")
      ->capture_default_str();
  s->add_option("--out-csv", synth.out_csv, "Write sampled synthetic records");
  s->add_option("--samples", synth.samples, "Synthetic record count (default n)");
  s->add_option("--out-dist", synth.out_dist,
                "Write the histogram (binary) or GEM checkpoint");
  s->add_option("--report", synth.report, "Write the JSON run report");
  s->add_option("--trace", synth.trace, "Write the per-round trace (JSON lines)");
  s->add_option("--dump-errors", synth.dump_errors, "Write per-query errors (CSV)");
  s->add_option("--public", synth.public_csv, "Public CSV");
  s->add_option("--pretrain-steps", synth.pretrain_steps,
                "GEM pretraining steps on public data")
      ->capture_default_str();
  s->add_option("--gem-init", synth.gem_init, "Start GEM from a checkpoint");
  s->add_option("--mwem-eta", synth.mwem_eta, "MWEM step divisor")->capture_default_str();
  s->add_option("--mwem-cycles", synth.mwem_cycles, "MWEM passes per round")
      ->capture_default_str();
  s->add_option("--pep-gamma", synth.pep_gamma, "PEP tolerance")->capture_default_str();
  s->add_option("--pep-tmax", synth.pep_tmax, "PEP projections per round")
      ->capture_default_str();
  s->add_option("--pep-clip", synth.pep_clip, "PEP target clipping")->capture_default_str();
  AddGemFlags(s, synth.gem);
  s->add_option("--rap-rows", synth.rap_rows, "Relaxed rows n'")->capture_default_str();
  s->add_option("--rap-lr", synth.rap_lr, "RAP learning rate")->capture_default_str();
  s->add_option("--rap-steps", synth.rap_steps, "RAP steps per round")
      ->capture_default_str();
  s->add_flag("--rap-original", synth.rap_original, "Clipped rows instead of softmax");
  s->add_option("--dq-eta", synth.dq_eta, "DualQuery step size")->capture_default_str();
  s->add_option("--dq-samples", synth.dq_samples, "DualQuery samples per round")
      ->capture_default_str();
  s->add_option("--fem-sigma", synth.fem_sigma, "FEM perturbation scale")
      ->capture_default_str();
  s->add_option("--fem-samples", synth.fem_samples, "FEM samples per round")
      ->capture_default_str();
  s->callback([&] { action = [&] { return CmdSynth(synth, out, err); }; });

  EvaluateFlags eval;
  auto* e = app.add_subcommand("evaluate", "Compare synthetic output with private data");
  e->add_option("--domain", eval.domain, "Domain JSON")->required();
  e->add_option("--data", eval.data, "Private CSV")->required();
  e->add_option("--synthetic", eval.synthetic, "Synthetic CSV");
  e->add_option("--dist", eval.dist, "Histogram binary");
  e->add_option("--checkpoint", eval.checkpoint, "GEM checkpoint");
  AddWorkloadFlags(e, eval.workloads);
  e->add_option("--out", eval.out, "Write the metrics as a JSON report");
  e->callback([&] { action = [&] { return CmdEvaluate(eval, out); }; });

  AccountantFlags acct;
  auto* a = app.add_subcommand("accountant", "Print the budget split");
  AddBudgetFlags(a, acct.budget);
  a->add_option("--T", acct.rounds, "Rounds")->capture_default_str();
  a->add_option("--k", acct.per_round, "Selections per round")->capture_default_str();
  a->add_option("--alpha", acct.alpha, "Selection share")->capture_default_str();
  a->add_option("--n", acct.n, "Record count")->capture_default_str();
  a->callback([&] { action = [&] { return CmdAccountant(acct, out); }; });

  PretrainFlags pre;
  auto* p = app.add_subcommand("pretrain", "Fit a GEM generator to public data");
  p->add_option("--domain", pre.domain, "Private domain JSON")->required();
  p->add_option("--public", pre.public_csv, "Public CSV")->required();
  p->add_option("--out", pre.out, "Checkpoint path")->required();
  p->add_option("--steps", pre.steps, "Optimizer steps")->capture_default_str();
  p->add_option("--seed", pre.seed, "Seed")->capture_default_str();
  AddWorkloadFlags(p, pre.workloads);
  AddGemFlags(p, pre.gem);
  p->callback([&] { action = [&] { return CmdPretrain(pre, out); }; });

  BestMixtureFlags bme;
  auto* b = app.add_subcommand("best-mixture-error",
                               "Error floor of reweighting the public records");
  b->add_option("--domain", bme.domain, "Domain JSON")->required();
  b->add_option("--public", bme.public_csv, "Public CSV")->required();
  b->add_option("--data", bme.data, "Private CSV")->required();
  b->add_option("--iterations", bme.iterations, "Solver iterations")
      ->capture_default_str();
  AddWorkloadFlags(b, bme.workloads);
  b->callback([&] { action = [&] { return CmdBestMixture(bme, out); }; });

  GenToyFlags toy;
  auto* g = app.add_subcommand("gen-toy", "Generate the correlated toy dataset");
  g->add_option("--attrs", toy.attrs, "Attributes")->capture_default_str();
  g->add_option("--sizes", toy.sizes, "Values per attribute")->capture_default_str();
  g->add_option("--n", toy.n, "Records")->capture_default_str();
  g->add_option("--seed", toy.seed, "Seed")->capture_default_str();
  g->add_option("--out-csv", toy.out_csv, "CSV path")->required();
  g->add_option("--out-domain", toy.out_domain, "Domain JSON path")->required();
  g->callback([&] { action = [&] { return CmdGenToy(toy, out); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    return app.exit(ex, out, err) == 0 ? kExitOk : kExitUsage;
  }
  if (threads > 0) SetMaxThreads(threads);
  try {
    return action ? action() : kExitUsage;
  } catch (const Error& ex) {
    err << "error (" << ErrorCodeName(ex.code()) << "): " << ex.what() << '\n';
    return ExitCodeFor(ex.code());
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace dpsynth::cli
