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

// Command-line front end. Talks to the library only through mrfopt.h.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mrfopt.h"

namespace {

constexpr const char* kConfigHelp = R"(Config file (JSON object, see schema/config.json):
  kind             min-pipeline | max-xos | max-matching | verify-mrf |
                   hardness-prophet | hardness-diamond
  instance         inline instance object, or
  instance_file    path to one (relative to the config file)
  trials           number of trials (>= 1, default 1)
  seed             base seed; trial t uses seed + t (default 0)
  threads          worker threads (default 1)
  mode             "exact" or "monte-carlo" (default exact)
  enumeration_cap  joint-table size limit (default 1048576)
  gibbs            {"burn_in": 500, "thin": 5}
  params           kind-specific numbers (n, M, p, k, epsilon, base_samples)
verify-mrf also accepts a bare MRF file as --config.
Exit codes: 0 ok, 1 configuration or I/O error, 2 numeric or feasibility
failure.)";

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<unsigned> threads;
  std::string out;
  std::string format = "json";
};

int report_error(mrfopt_status s) {
  std::cerr << "mrfopt: " << mrfopt_status_name(s) << ": "
            << mrfopt_last_error() << "\n";
  return mrfopt_exit_code(s);
}

int write_output(const Options& o, const std::string& text) {
  if (o.out.empty() || o.out == "-") {
    std::cout << text;
    return 0;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f || !(f << text)) {
    std::cerr << "mrfopt: io: cannot write '" << o.out << "'\n";
    return 1;
  }
  return 0;
}

int emit(const Options& o, const mrfopt_report* report) {
  char* text = nullptr;
  size_t len = 0;
  const mrfopt_format fmt =
      o.format == "csv" ? MRFOPT_FORMAT_CSV : MRFOPT_FORMAT_JSON;
  if (mrfopt_status s = mrfopt_report_emit(report, fmt, &text, &len)) {
    return report_error(s);
  }
  const int rc = write_output(o, std::string(text, len));
  mrfopt_string_free(text);
  return rc;
}

// Loads the config. A bare MRF file is wrapped into a verify-mrf config.
mrfopt_status load_config(const Options& o, bool allow_bare_mrf,
                          mrfopt_config** cfg) {
  if (!allow_bare_mrf) return mrfopt_config_from_file(o.config.c_str(), cfg);
  std::ifstream in(o.config);
  if (!in) return mrfopt_config_from_file(o.config.c_str(), cfg);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object() || j.contains("kind")) {
    return mrfopt_config_from_file(o.config.c_str(), cfg);
  }
  const nlohmann::json wrapped = {{"kind", "verify-mrf"}, {"instance", j}};
  return mrfopt_config_from_json(wrapped.dump().c_str(), ".", cfg);
}

int run(const Options& o, const std::set<std::string>& kinds,
        bool allow_bare_mrf) {
  mrfopt_config* cfg = nullptr;
  if (mrfopt_status s = load_config(o, allow_bare_mrf, &cfg)) {
    return report_error(s);
  }
  const std::string kind = mrfopt_config_kind(cfg);
  if (!kinds.count(kind)) {
    std::cerr << "mrfopt: config: experiment kind '" << kind
              << "' does not belong to this subcommand\n";
    mrfopt_config_free(cfg);
    return 1;
  }
  mrfopt_status s = MRFOPT_OK;
  if (o.seed) s = mrfopt_config_set_seed(cfg, *o.seed);
  if (!s && o.trials) s = mrfopt_config_set_trials(cfg, *o.trials);
  if (!s && o.threads) s = mrfopt_config_set_threads(cfg, *o.threads);
  mrfopt_report* report = nullptr;
  if (!s) s = mrfopt_run(cfg, &report);
  mrfopt_config_free(cfg);
  if (s) return report_error(s);
  int rc = emit(o, report);
  if (rc == 0 && !mrfopt_report_passed(report)) {
    std::cerr << "mrfopt: numeric: a checked bound or feasibility test "
                 "failed; see the report\n";
    rc = 2;
  }
  mrfopt_report_free(report);
  return rc;
}

int rerender(const Options& o) {
  mrfopt_report* report = nullptr;
  if (mrfopt_status s = mrfopt_report_from_file(o.config.c_str(), &report)) {
    return report_error(s);
  }
  int rc = 0;
  if (mrfopt_status s = mrfopt_report_check(report)) {
    rc = report_error(s);
  } else {
    rc = emit(o, report);
  }
  mrfopt_report_free(report);
  return rc;
}

void add_common(CLI::App* sub, Options& o, bool run_options) {
  sub->add_option("--config", o.config, "Config JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--out", o.out, "Output path (default stdout)");
  sub->add_option("--format", o.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  if (!run_options) return;
  sub->add_option("--seed", o.seed, "Base seed, overrides the config");
  sub->add_option("--trials", o.trials, "Trial count, overrides the config")
      ->check(CLI::PositiveNumber);
  sub->add_option("--threads", o.threads, "Worker threads")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online optimization experiments under MRF-correlated inputs"};
  app.footer(kConfigHelp);
  app.set_version_flag("--version", std::string(mrfopt_version()));
  app.require_subcommand(1);
  Options o;
  auto* min = app.add_subcommand("simulate-min", "Minimization pipeline");
  auto* max = app.add_subcommand("simulate-max", "Posted-price mechanisms");
  auto* verify = app.add_subcommand("verify-mrf", "Conditioning-bound check");
  auto* hard = app.add_subcommand("hardness", "Lower-bound instances");
  auto* rep = app.add_subcommand("report", "Check and re-render a report");
  for (auto* s : {min, max, verify, hard}) add_common(s, o, true);
  add_common(rep, o, false);
  for (auto* s : {min, max, verify, hard, rep}) s->footer(kConfigHelp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    // Missing files are configuration errors; exit 1 like other usage
    // errors after printing the help text.
    app.exit(e);
    std::cerr << "\n" << kConfigHelp << "\n";
    return 1;
  }
  if (min->parsed()) return run(o, {"min-pipeline"}, false);
  if (max->parsed()) return run(o, {"max-xos", "max-matching"}, false);
  if (verify->parsed()) return run(o, {"verify-mrf"}, true);
  if (hard->parsed()) {
    return run(o, {"hardness-prophet", "hardness-diamond"}, false);
  }
  return rerender(o);
}
