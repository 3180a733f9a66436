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

#include "dpsynth/evaluation.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dpsynth/error.h"
#include "json.hpp"

namespace dpsynth {
namespace {

using nlohmann::json;

json MetricsJson(const ErrorMetrics& m) {
  return json{{"max", m.max}, {"mean", m.mean}, {"rmse", m.rmse}};
}

ErrorMetrics MetricsFromJson(const json& j) {
  return {j.at("max").get<double>(), j.at("mean").get<double>(),
          j.at("rmse").get<double>()};
}

void RequireParentDirectory(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent)) {
    Fail(ErrorCode::kIo, "output directory does not exist: " + parent.string());
  }
}

}  // namespace

ErrorMetrics ComputeErrors(std::span<const double> true_answers,
                           std::span<const double> synth_answers) {
  Require(!true_answers.empty(), "no answers to compare");
  Require(true_answers.size() == synth_answers.size(),
          "answer vectors differ in length");
  ErrorMetrics m;
  double sq = 0.0;
  for (std::size_t i = 0; i < true_answers.size(); ++i) {
    const double d = std::abs(true_answers[i] - synth_answers[i]);
    m.max = std::max(m.max, d);
    m.mean += d;
    sq += d * d;
  }
  const auto n = static_cast<double>(true_answers.size());
  m.mean /= n;
  m.rmse = std::sqrt(sq / n);
  return m;
}

std::vector<WorkloadError> PerWorkloadErrors(const QuerySet& queries,
                                             std::span<const double> true_answers,
                                             std::span<const double> synth_answers) {
  Require(true_answers.size() == queries.size() &&
              synth_answers.size() == queries.size(),
          "answer vectors must cover the query set");
  std::vector<WorkloadError> out;
  for (std::size_t w = 0; w < queries.num_workloads(); ++w) {
    const std::size_t begin = queries.workload_offset(w);
    const std::size_t len = queries.workload(w).num_queries();
    out.push_back({queries.workload(w).features(),
                   ComputeErrors(true_answers.subspan(begin, len),
                                 synth_answers.subspan(begin, len))});
  }
  return out;
}

std::string ReportToJson(const RunReport& r, bool canonical) {
  json j;
  j["schema_version"] = r.schema_version;
  j["method"] = r.method;
  j["private"] = r.is_private;
  json budget{{"rho", r.rho}};
  if (r.delta) budget["delta"] = *r.delta;
  if (r.epsilon) budget["epsilon"] = *r.epsilon;
  j["budget"] = budget;
  j["T"] = r.rounds;
  j["k"] = r.per_round;
  j["alpha"] = r.alpha;
  j["seed"] = r.seed;
  j["marginal_trick"] = r.marginal_trick;
  j["marginal_k"] = r.marginal_k;
  j["num_workloads"] = r.num_workloads;
  j["num_queries"] = r.num_queries;
  j["num_records"] = r.num_records;
  j["params"] = r.params;
  j["errors"] = MetricsJson(r.errors);
  json per = json::array();
  for (const auto& w : r.workloads) {
    per.push_back({{"features", w.features}, {"errors", MetricsJson(w.errors)}});
  }
  j["workloads"] = per;
  j["max_err_measured"] = r.max_err_measured;
  if (!canonical) j["wall_time_seconds"] = r.wall_time_seconds;
  return j.dump(2) + "\n";
}

RunReport ReportFromJson(const std::string& text) {
  RunReport r;
  try {
    const json j = json::parse(text);
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kReportSchemaVersion) {
      Fail(ErrorCode::kIo, "unsupported report schema version");
    }
    r.method = j.at("method").get<std::string>();
    r.is_private = j.at("private").get<bool>();
    const json& budget = j.at("budget");
    r.rho = budget.at("rho").get<double>();
    if (budget.contains("delta")) r.delta = budget.at("delta").get<double>();
    if (budget.contains("epsilon")) r.epsilon = budget.at("epsilon").get<double>();
    r.rounds = j.at("T").get<int>();
    r.per_round = j.at("k").get<int>();
    r.alpha = j.at("alpha").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.marginal_trick = j.at("marginal_trick").get<bool>();
    r.marginal_k = j.at("marginal_k").get<int>();
    r.num_workloads = j.at("num_workloads").get<std::size_t>();
    r.num_queries = j.at("num_queries").get<std::size_t>();
    r.num_records = j.at("num_records").get<std::size_t>();
    r.params = j.at("params").get<std::map<std::string, std::string>>();
    r.errors = MetricsFromJson(j.at("errors"));
    for (const auto& w : j.at("workloads")) {
      r.workloads.push_back({w.at("features").get<std::vector<int>>(),
                             MetricsFromJson(w.at("errors"))});
    }
    r.max_err_measured = j.at("max_err_measured").get<std::vector<double>>();
    if (j.contains("wall_time_seconds")) {
      r.wall_time_seconds = j.at("wall_time_seconds").get<double>();
    }
  } catch (const json::exception& e) {
    Fail(ErrorCode::kIo, std::string("malformed report: ") + e.what());
  }
  return r;
}

void WriteReport(const RunReport& report, const std::string& path) {
  RequireParentDirectory(path);
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIo, "cannot open report file " + path);
  out << ReportToJson(report);
  if (!out) Fail(ErrorCode::kIo, "failed writing report file " + path);
}

RunReport ReadReport(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open report file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return ReportFromJson(buf.str());
}

void WriteErrorCsv(const std::string& path, const QuerySet& queries,
                   std::span<const double> true_answers,
                   std::span<const double> synth_answers) {
  Require(true_answers.size() == queries.size() &&
              synth_answers.size() == queries.size(),
          "answer vectors must cover the query set");
  RequireParentDirectory(path);
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIo, "cannot open error file " + path);
  out.precision(17);
  out << "query,features,targets,true_answer,synthetic_answer,abs_error\n";
  for (std::size_t j = 0; j < queries.size(); ++j) {
    const MarginalQuery q = queries.Query(j);
    std::string features;
    std::string targets;
    for (std::size_t i = 0; i < q.features.size(); ++i) {
      if (i > 0) {
        features += ' ';
        targets += ' ';
      }
      features += std::to_string(q.features[i]);
      targets += std::to_string(q.targets[i]);
    }
    out << j << ',' << features << ',' << targets << ',' << true_answers[j] << ','
        << synth_answers[j] << ',' << std::abs(true_answers[j] - synth_answers[j])
        << '\n';
  }
  if (!out) Fail(ErrorCode::kIo, "failed writing error file " + path);
}

}  // namespace dpsynth
