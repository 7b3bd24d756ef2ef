// Copyright 2026 The mrfopt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment configuration, seeded orchestration and report emission.

#ifndef MRFOPT_HARNESS_HPP_
#define MRFOPT_HARNESS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "mrfopt/mrf.hpp"

namespace mrfopt {

const char* version_string();

enum class ExperimentKind {
  kMinPipeline,
  kMaxXos,
  kMaxMatching,
  kVerifyMrf,
  kHardnessProphet,
  kHardnessDiamond,
};

const char* experiment_kind_name(ExperimentKind kind);
// Throws kConfig for unknown names.
ExperimentKind experiment_kind_from_name(const std::string& name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kVerifyMrf;
  nlohmann::json instance;  // resolved inline JSON, null if absent
  std::string instance_file;  // as written in the config, informational
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool exact = true;  // "mode": "exact" or "monte-carlo"
  std::size_t enumeration_cap = kDefaultEnumerationCap;
  GibbsOptions gibbs;
  nlohmann::json params = nlohmann::json::object();

  // Echo written into reports. Excludes thread count, which never changes
  // results.
  nlohmann::json to_json() const;
};

// `base_dir` resolves a relative "instance_file". Throws kConfig or kIo.
ExperimentConfig config_from_json(const nlohmann::json& j,
                                  const std::string& base_dir = ".");
ExperimentConfig load_config_file(const std::string& path);

struct RunReport {
  std::string kind;
  nlohmann::json config;
  std::vector<std::string> columns;
  nlohmann::json trials = nlohmann::json::array();  // one object per trial
  nlohmann::json aggregates = nlohmann::json::object();
  bool passed = true;  // false on infeasible trials or violated bounds
  double wall_clock_seconds = 0.0;
  std::string version;
};

RunReport run_experiment(const ExperimentConfig& config);

// Statistics that are pure functions of the per-trial records.
nlohmann::json recompute_statistics(const std::string& kind,
                                    const nlohmann::json& trials);
// Compares recomputed statistics with the stored aggregates. Returns an
// empty string when consistent, otherwise the first mismatching field.
std::string check_report_consistency(const RunReport& report,
                                     double tol = 1e-12);

enum class ReportFormat { kJson, kCsv };
ReportFormat report_format_from_name(const std::string& name);

nlohmann::json report_to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& j);
std::string emit_report(const RunReport& report, ReportFormat format);

}  // namespace mrfopt

#endif  // MRFOPT_HARNESS_HPP_
