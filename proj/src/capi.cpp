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

#include "mrfopt.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>

#include "mrfopt/common.hpp"
#include "mrfopt/harness.hpp"

struct mrfopt_config {
  mrfopt::ExperimentConfig config;
};

struct mrfopt_report {
  mrfopt::RunReport report;
};

namespace {

thread_local std::string g_last_error;

mrfopt_status status_of(mrfopt::ErrorCode code) {
  using mrfopt::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return MRFOPT_E_INVALID_ARGUMENT;
    case ErrorCode::kEnumerationCapExceeded:
      return MRFOPT_E_ENUMERATION_CAP;
    case ErrorCode::kZeroProbabilityConditioning:
      return MRFOPT_E_ZERO_PROBABILITY;
    case ErrorCode::kUnknownIdentifier:
      return MRFOPT_E_UNKNOWN_IDENTIFIER;
    case ErrorCode::kInfeasibleDemand:
      return MRFOPT_E_INFEASIBLE_DEMAND;
    case ErrorCode::kConditionalBelowP:
      return MRFOPT_E_CONDITIONAL_BELOW_P;
    case ErrorCode::kConfig:
      return MRFOPT_E_CONFIG;
    case ErrorCode::kIo:
      return MRFOPT_E_IO;
    case ErrorCode::kNumeric:
      return MRFOPT_E_NUMERIC;
  }
  return MRFOPT_E_INTERNAL;
}

mrfopt_status fail(mrfopt_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Runs f and converts exceptions into status codes.
template <class F>
mrfopt_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const mrfopt::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(MRFOPT_E_CONFIG, e.what());
  } catch (const std::bad_alloc&) {
    return fail(MRFOPT_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MRFOPT_E_INTERNAL, e.what());
  }
}

mrfopt_status null_argument(const char* name) {
  return fail(MRFOPT_E_INVALID_ARGUMENT, std::string(name) + " is NULL");
}

}  // namespace

extern "C" {

const char* mrfopt_version(void) { return mrfopt::version_string(); }

const char* mrfopt_last_error(void) { return g_last_error.c_str(); }

const char* mrfopt_status_name(mrfopt_status status) {
  switch (status) {
    case MRFOPT_OK:
      return "ok";
    case MRFOPT_E_INVALID_ARGUMENT:
      return "invalid_argument";
    case MRFOPT_E_ENUMERATION_CAP:
      return "enumeration_cap_exceeded";
    case MRFOPT_E_ZERO_PROBABILITY:
      return "zero_probability_conditioning";
    case MRFOPT_E_UNKNOWN_IDENTIFIER:
      return "unknown_identifier";
    case MRFOPT_E_INFEASIBLE_DEMAND:
      return "infeasible_demand";
    case MRFOPT_E_CONDITIONAL_BELOW_P:
      return "conditional_below_p";
    case MRFOPT_E_CONFIG:
      return "config";
    case MRFOPT_E_IO:
      return "io";
    case MRFOPT_E_NUMERIC:
      return "numeric";
    case MRFOPT_E_INTERNAL:
      return "internal";
  }
  return "unknown";
}

int mrfopt_exit_code(mrfopt_status status) {
  switch (status) {
    case MRFOPT_OK:
      return 0;
    case MRFOPT_E_CONFIG:
    case MRFOPT_E_IO:
    case MRFOPT_E_INVALID_ARGUMENT:
    case MRFOPT_E_UNKNOWN_IDENTIFIER:
      return 1;
    default:
      return 2;
  }
}

mrfopt_status mrfopt_config_from_file(const char* path, mrfopt_config** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new mrfopt_config{mrfopt::load_config_file(path)};
    return MRFOPT_OK;
  });
}

mrfopt_status mrfopt_config_from_json(const char* json_text,
                                      const char* base_dir,
                                      mrfopt_config** out) {
  if (!json_text) return null_argument("json_text");
  if (!out) return null_argument("out");
  return guarded([&] {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
      return fail(MRFOPT_E_CONFIG, std::string("invalid JSON: ") + e.what());
    }
    *out = new mrfopt_config{
        mrfopt::config_from_json(j, base_dir ? base_dir : ".")};
    return MRFOPT_OK;
  });
}

mrfopt_status mrfopt_config_set_seed(mrfopt_config* config, uint64_t seed) {
  if (!config) return null_argument("config");
  config->config.seed = seed;
  return MRFOPT_OK;
}

mrfopt_status mrfopt_config_set_trials(mrfopt_config* config,
                                       uint64_t trials) {
  if (!config) return null_argument("config");
  if (trials < 1) return fail(MRFOPT_E_CONFIG, "trials must be >= 1");
  config->config.trials = static_cast<std::size_t>(trials);
  return MRFOPT_OK;
}

mrfopt_status mrfopt_config_set_threads(mrfopt_config* config,
                                        unsigned threads) {
  if (!config) return null_argument("config");
  if (threads < 1) return fail(MRFOPT_E_CONFIG, "threads must be >= 1");
  config->config.threads = threads;
  return MRFOPT_OK;
}

const char* mrfopt_config_kind(const mrfopt_config* config) {
  return config ? mrfopt::experiment_kind_name(config->config.kind) : "";
}

void mrfopt_config_free(mrfopt_config* config) { delete config; }

mrfopt_status mrfopt_run(const mrfopt_config* config, mrfopt_report** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new mrfopt_report{mrfopt::run_experiment(config->config)};
    return MRFOPT_OK;
  });
}

mrfopt_status mrfopt_report_from_file(const char* path, mrfopt_report** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  return guarded([&] {
    std::ifstream in(path);
    if (!in) return fail(MRFOPT_E_IO, std::string("cannot open '") + path + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      return fail(MRFOPT_E_CONFIG, std::string("invalid JSON: ") + e.what());
    }
    *out = new mrfopt_report{mrfopt::report_from_json(j)};
    return MRFOPT_OK;
  });
}

int mrfopt_report_passed(const mrfopt_report* report) {
  return report && report->report.passed ? 1 : 0;
}

size_t mrfopt_report_trial_count(const mrfopt_report* report) {
  return report ? report->report.trials.size() : 0;
}

mrfopt_status mrfopt_report_aggregate(const mrfopt_report* report,
                                      const char* name, double* value) {
  if (!report) return null_argument("report");
  if (!name) return null_argument("name");
  if (!value) return null_argument("value");
  const auto& a = report->report.aggregates;
  if (!a.contains(name)) {
    return fail(MRFOPT_E_UNKNOWN_IDENTIFIER,
                std::string("no aggregate named '") + name + "'");
  }
  const auto& v = a.at(name);
  if (v.is_boolean()) {
    *value = v.get<bool>() ? 1.0 : 0.0;
  } else if (v.is_number()) {
    *value = v.get<double>();
  } else if (v.is_null()) {
    *value = std::numeric_limits<double>::quiet_NaN();
  } else {
    return fail(MRFOPT_E_INVALID_ARGUMENT,
                std::string("aggregate '") + name + "' is not a number");
  }
  return MRFOPT_OK;
}

mrfopt_status mrfopt_report_check(const mrfopt_report* report) {
  if (!report) return null_argument("report");
  return guarded([&] {
    const std::string bad = mrfopt::check_report_consistency(report->report);
    if (!bad.empty()) {
      return fail(MRFOPT_E_NUMERIC,
                  "aggregate '" + bad + "' does not match the trial records");
    }
    return MRFOPT_OK;
  });
}

mrfopt_status mrfopt_report_emit(const mrfopt_report* report,
                                 mrfopt_format format, char** text,
                                 size_t* length) {
  if (!report) return null_argument("report");
  if (!text) return null_argument("text");
  if (format != MRFOPT_FORMAT_JSON && format != MRFOPT_FORMAT_CSV) {
    return fail(MRFOPT_E_INVALID_ARGUMENT, "unknown format");
  }
  return guarded([&] {
    const std::string s = mrfopt::emit_report(
        report->report, format == MRFOPT_FORMAT_JSON
                            ? mrfopt::ReportFormat::kJson
                            : mrfopt::ReportFormat::kCsv);
    char* buf = static_cast<char*>(std::malloc(s.size() + 1));
    if (!buf) return fail(MRFOPT_E_INTERNAL, "out of memory");
    std::memcpy(buf, s.c_str(), s.size() + 1);
    *text = buf;
    if (length) *length = s.size();
    return MRFOPT_OK;
  });
}

void mrfopt_report_free(mrfopt_report* report) { delete report; }

void mrfopt_string_free(char* text) { std::free(text); }

}  // extern "C"
