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

#ifndef DPSYNTH_EVALUATION_H_
#define DPSYNTH_EVALUATION_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpsynth/marginals.h"

namespace dpsynth {

struct ErrorMetrics {
  double max = 0.0;
  double mean = 0.0;
  double rmse = 0.0;

  bool operator==(const ErrorMetrics&) const = default;
};

// Max, mean and root mean square of the absolute differences.
ErrorMetrics ComputeErrors(std::span<const double> true_answers,
                           std::span<const double> synth_answers);

struct WorkloadError {
  std::vector<int> features;
  ErrorMetrics errors;

  bool operator==(const WorkloadError&) const = default;
};

std::vector<WorkloadError> PerWorkloadErrors(const QuerySet& queries,
                                             std::span<const double> true_answers,
                                             std::span<const double> synth_answers);

inline constexpr int kReportSchemaVersion = 1;

struct RunReport {
  int schema_version = kReportSchemaVersion;
  std::string method;
  bool is_private = true;
  double rho = 0.0;
  std::optional<double> delta;
  // Implied by rho and delta.
  std::optional<double> epsilon;
  int rounds = 0;
  int per_round = 0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  bool marginal_trick = false;
  int marginal_k = 0;
  std::size_t num_workloads = 0;
  std::size_t num_queries = 0;
  std::size_t num_records = 0;
  // Method settings, echoed as strings.
  std::map<std::string, std::string> params;
  ErrorMetrics errors;
  std::vector<WorkloadError> workloads;
  std::vector<double> max_err_measured;
  double wall_time_seconds = 0.0;

  bool operator==(const RunReport&) const = default;
};

// Pretty-printed JSON with sorted keys. The canonical form drops the wall
// time so that repeated runs compare equal byte for byte.
std::string ReportToJson(const RunReport& report, bool canonical = false);
RunReport ReportFromJson(const std::string& text);
void WriteReport(const RunReport& report, const std::string& path);
RunReport ReadReport(const std::string& path);

// One row per query: index, workload features, targets, true and synthetic
// answers, absolute error.
void WriteErrorCsv(const std::string& path, const QuerySet& queries,
                   std::span<const double> true_answers,
                   std::span<const double> synth_answers);

}  // namespace dpsynth

#endif  // DPSYNTH_EVALUATION_H_
