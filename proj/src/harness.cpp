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

#include "mrfopt/harness.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mrfopt/allocation.hpp"
#include "mrfopt/coverage.hpp"
#include "mrfopt/hardness.hpp"
#include "mrfopt/json_writer.hpp"
#include "mrfopt/min_algorithms.hpp"

#ifndef MRFOPT_VERSION_STRING
#define MRFOPT_VERSION_STRING "0.0.0"
#endif

namespace mrfopt {
namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& msg) {
  throw Error(ErrorCode::kConfig, msg);
}

struct KindName {
  ExperimentKind kind;
  const char* name;
};

constexpr KindName kKinds[] = {
    {ExperimentKind::kMinPipeline, "min-pipeline"},
    {ExperimentKind::kMaxXos, "max-xos"},
    {ExperimentKind::kMaxMatching, "max-matching"},
    {ExperimentKind::kVerifyMrf, "verify-mrf"},
    {ExperimentKind::kHardnessProphet, "hardness-prophet"},
    {ExperimentKind::kHardnessDiamond, "hardness-diamond"},
};

std::uint64_t get_u64(const json& j, const char* field) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  config_error(std::string("'") + field + "' must be a non-negative integer");
}

std::size_t get_positive(const json& j, const char* field) {
  const std::uint64_t v = get_u64(j, field);
  if (v < 1) config_error(std::string("'") + field + "' must be >= 1");
  return static_cast<std::size_t>(v);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    config_error("invalid JSON in '" + path + "': " + e.what());
  }
}

const json& require(const json& j, const char* field) {
  if (!j.is_object() || !j.contains(field)) {
    config_error(std::string("instance is missing '") + field + "'");
  }
  return j.at(field);
}

// Numeric parameter with a default.
double param(const json& params, const char* name, double fallback) {
  if (!params.contains(name)) return fallback;
  if (!params.at(name).is_number()) {
    config_error(std::string("parameter '") + name + "' must be a number");
  }
  return params.at(name).get<double>();
}

// ---------------------------------------------------------------------------
// Statistics recomputable from trial records

bool same_number(const json& a, const json& b, double tol) {
  const bool fa = a.is_number() && std::isfinite(a.get<double>());
  const bool fb = b.is_number() && std::isfinite(b.get<double>());
  if (!fa || !fb) return fa == fb;
  const double x = a.get<double>();
  const double y = b.get<double>();
  return std::abs(x - y) <= tol * std::max({1.0, std::abs(x), std::abs(y)});
}

json min_statistics(const MinRatioReport& r) {
  return {{"alg_mean", r.alg_mean},
          {"alg_stderr", r.alg_stderr},
          {"opt_r_mean", r.opt_r_mean},
          {"opt_v_mean", r.opt_v_mean},
          {"ratio_r", r.ratio_r},
          {"ratio_r_stderr", r.ratio_r_stderr},
          {"ratio_v", r.ratio_v},
          {"ratio_v_stderr", r.ratio_v_stderr},
          {"all_feasible", r.all_feasible}};
}

json max_statistics(const MaxRatioReport& r) {
  return {{"welfare_mean", r.welfare_mean},
          {"welfare_stderr", r.welfare_stderr},
          {"opt_mean", r.opt_mean},
          {"revenue_mean", r.revenue_mean},
          {"ratio", r.ratio},
          {"ratio_stderr", r.ratio_stderr},
          {"tail_fraction", r.tail_fraction}};
}

double num(const json& j) {
  return j.is_number() ? j.get<double>()
                       : std::numeric_limits<double>::quiet_NaN();
}

MinRatioReport min_from_records(const json& trials) {
  MinRatioReport r;
  for (const auto& t : trials) {
    MinTrialRecord rec;
    rec.seed = get_u64(t.at("seed"), "seed");
    rec.alg_cost = num(t.at("alg_cost"));
    rec.opt_r = num(t.at("opt_r"));
    rec.opt_v = num(t.at("opt_v"));
    rec.phase1_cost = num(t.at("phase1_cost"));
    rec.n_opened = t.at("n_opened").get<int>();
    rec.feasible = t.at("feasible").get<bool>();
    r.trials.push_back(rec);
  }
  aggregate_min(r);
  return r;
}

MaxRatioReport max_from_records(const json& trials) {
  MaxRatioReport r;
  for (const auto& t : trials) {
    MaxTrialRecord rec;
    rec.seed = get_u64(t.at("seed"), "seed");
    rec.branch = t.at("branch").get<std::string>() == "tail" ? Branch::kTail
                                                             : Branch::kCore;
    rec.welfare = num(t.at("welfare"));
    rec.revenue = num(t.at("revenue"));
    rec.opt = num(t.at("opt"));
    r.trials.push_back(rec);
  }
  aggregate_max(r);
  return r;
}

json mean_stderr(const json& trials, const char* field, const char* prefix) {
  RunningStats s;
  for (const auto& t : trials) s.add(num(t.at(field)));
  return {{std::string(prefix) + "_mean", s.mean()},
          {std::string(prefix) + "_stderr", s.stderr_mean()}};
}

json ratio_statistics(const json& trials, const char* top, const char* bottom) {
  std::vector<double> a, b;
  RunningStats sa, sb;
  for (const auto& t : trials) {
    a.push_back(num(t.at(top)));
    b.push_back(num(t.at(bottom)));
    sa.add(a.back());
    sb.add(b.back());
  }
  return {{"ratio", sb.mean() > 0.0 ? sa.mean() / sb.mean()
                                    : std::numeric_limits<double>::quiet_NaN()},
          {"ratio_stderr", ratio_stderr(a, b)}};
}

// ---------------------------------------------------------------------------
// Experiment runners

std::size_t sampling_cap(const ExperimentConfig& c) {
  return c.exact ? c.enumeration_cap : 0;
}

json trial_json(std::size_t t, std::uint64_t seed) {
  return {{"trial", t}, {"seed", seed}};
}

void run_min(const ExperimentConfig& c, RunReport& out) {
  const json& inst = c.instance;
  MinExperiment exp;
  exp.problem = coverage_from_json(require(inst, "problem"));
  exp.base = base_algorithm_from_name(inst.value("base", std::string("steiner")));
  exp.options.steiner.connect_to_arrived = inst.value("connect_to_arrived", false);
  exp.gibbs = c.gibbs;
  exp.enumeration_cap = sampling_cap(c);
  json constants;
  if (inst.contains("mrf")) {
    exp.mrf = mrf_from_json(inst.at("mrf"));
  } else if (inst.contains("chain")) {
    const MarkovChainSpec chain = chain_from_json(inst.at("chain"));
    if (inst.contains("chain_delta")) {
      exp.mrf = chain_to_mrf_clamped(chain, inst.at("chain_delta").get<double>()).mrf;
      constants["chain_delta"] = inst.at("chain_delta").get<double>();
    } else {
      const double eps = inst.value("chain_epsilon", 0.1);
      const ChainEmbedding e = chain_to_mrf(chain, eps);
      exp.mrf = e.mrf;
      constants["chain_delta"] = e.delta;
    }
  } else {
    config_error("min-pipeline instance needs 'mrf' or 'chain'");
  }
  const json& emb = require(inst, "embedding");
  exp.embedding.points = emb.get<std::vector<std::vector<int>>>();
  const MinRatioReport r =
      estimate_min_ratio(exp, c.trials, c.seed, c.threads);
  out.columns = {"trial",       "seed",     "alg_cost", "opt_r",
                 "opt_v",       "phase1_cost", "n_opened", "feasible"};
  for (std::size_t t = 0; t < r.trials.size(); ++t) {
    const auto& x = r.trials[t];
    json row = trial_json(t, x.seed);
    row["alg_cost"] = x.alg_cost;
    row["opt_r"] = x.opt_r;
    row["opt_v"] = x.opt_v;
    row["phase1_cost"] = x.phase1_cost;
    row["n_opened"] = x.n_opened;
    row["feasible"] = x.feasible;
    out.trials.push_back(row);
  }
  constants["delta"] = r.delta;
  constants["p"] = r.p;
  constants["exact_sampling"] = r.exact_sampling;
  constants["base"] = base_algorithm_name(exp.base);
  constants.update(min_statistics(r));
  out.aggregates = constants;
  out.passed = r.all_feasible;
}

void run_max(const ExperimentConfig& c, RunReport& out) {
  MaxExperiment exp;
  exp.auction = auction_from_json(c.instance);
  const ValuationClass want = c.kind == ExperimentKind::kMaxXos
                                  ? ValuationClass::kXos
                                  : ValuationClass::kMatching;
  if (exp.auction.valuation_class() != want) {
    config_error(std::string(experiment_kind_name(c.kind)) +
                 " needs an auction of the matching valuation class");
  }
  BasePrices base;
  if (c.exact) {
    base = base_prices_exact(exp.auction, c.enumeration_cap);
  } else {
    const double samples = param(c.params, "base_samples", 20000);
    if (!(samples >= 1.0)) config_error("'base_samples' must be >= 1");
    base = base_prices_monte_carlo(exp.auction,
                                   static_cast<std::size_t>(samples),
                                   derive_seed(c.seed, 1000), 0);
  }
  exp.mechanism = default_mechanism(exp.auction, base.b);
  exp.gibbs = c.gibbs;
  exp.enumeration_cap = sampling_cap(c);
  const MaxRatioReport r = evaluate_mechanism(exp, c.trials, c.seed, c.threads);
  out.columns = {"trial", "seed", "branch", "welfare", "revenue", "opt"};
  for (std::size_t t = 0; t < r.trials.size(); ++t) {
    const auto& x = r.trials[t];
    json row = trial_json(t, x.seed);
    row["branch"] = branch_name(x.branch);
    row["welfare"] = x.welfare;
    row["revenue"] = x.revenue;
    row["opt"] = x.opt;
    out.trials.push_back(row);
  }
  const Mechanism& m = exp.mechanism;
  json a = {{"guarantee", r.guarantee},
            {"gamma", m.gamma},
            {"epsilon", m.epsilon},
            {"alpha", m.certificate.alpha},
            {"beta", m.certificate.beta},
            {"delta", m.delta},
            {"tail_probability", m.tail_probability()},
            {"base_prices", base.b},
            {"base_prices_stderr", base.stderr_b},
            {"base_prices_exact", base.exact},
            {"exact_sampling", r.exact_sampling},
            {"meets_guarantee", r.ratio >= r.guarantee - 3.0 * r.ratio_stderr}};
  if (want == ValuationClass::kMatching) a["k"] = m.k;
  a.update(max_statistics(r));
  out.aggregates = a;
}

void run_verify(const ExperimentConfig& c, RunReport& out) {
  const MrfSpec mrf = mrf_from_json(c.instance);
  const ConditioningReport r = verify_conditioning_bound(mrf, c.enumeration_cap);
  out.aggregates = conditioning_report_to_json(r);
  out.passed = r.within_bound;
}

void run_prophet(const ExperimentConfig& c, RunReport& out) {
  const int n = static_cast<int>(param(c.params, "n", 20));
  const double M = param(c.params, "M", 1e6);
  const double p = param(c.params, "p", 0.1);
  const ProphetHardInstance inst = prophet_instance(n, M);
  const ProphetDpResult dp = optimal_online_psample_value(inst, p);
  out.columns = {"trial", "seed", "value"};
  std::vector<double> values(c.trials);
  parallel_for(c.trials, c.threads, [&](std::size_t t) {
    Rng rng(derive_seed(c.seed + t, 10));
    values[t] = simulate_prophet_policy(inst, p, rng);
  });
  for (std::size_t t = 0; t < c.trials; ++t) {
    json row = trial_json(t, c.seed + t);
    row["value"] = values[t];
    out.trials.push_back(row);
  }
  json a = prophet_dp_to_json(dp);
  a["pn_bound"] = p * n;
  a["dp_within_pn_bound"] = dp.dp_value <= p * n;
  a.update(recompute_statistics("hardness-prophet", out.trials));
  out.aggregates = a;
}

void run_diamond(const ExperimentConfig& c, RunReport& out) {
  const int k = static_cast<int>(param(c.params, "k", 2));
  const double eps = param(c.params, "epsilon", 0.1);
  const DiamondSteinerInstance inst = gen_diamond(k);
  json a = {{"k", k},
            {"vertices", inst.num_vertices()},
            {"edges", inst.graph.edges().size()},
            {"arrivals", inst.arrivals},
            {"epsilon", eps}};
  a["markov_audit"] = k <= kDiamondAuditMaxDepth
                          ? json(audit_diamond_chain(inst).markov)
                          : json(nullptr);
  const MarkovChainSpec chain = diamond_arrival_chain(inst);
  if (chain.type_space().num_states() <= c.enumeration_cap) {
    a["transfer_delta"] = transfer_hardness(chain, eps, c.enumeration_cap).delta;
  } else {
    a["transfer_delta"] = nullptr;
  }
  struct Row {
    double alg = 0.0;
    double opt = 0.0;
    bool approximate = false;
    int arrivals = 0;
  };
  std::vector<Row> rows(c.trials);
  parallel_for(c.trials, c.threads, [&](std::size_t t) {
    Rng rng(derive_seed(c.seed + t, 10));
    const std::vector<int> seq = sample_diamond_arrivals(inst, rng);
    SteinerOnline online(inst.graph, {}, SteinerOptions{true});
    Row r;
    for (int x : seq) r.alg += online.serve(x);
    const CoverageSolution opt = offline_opt_steiner(inst.graph, seq);
    r.opt = opt.cost;
    r.approximate = opt.approximate;
    r.arrivals = static_cast<int>(seq.size());
    rows[t] = r;
  });
  out.columns = {"trial", "seed", "alg_cost", "opt_cost", "opt_approximate",
                 "arrivals"};
  for (std::size_t t = 0; t < c.trials; ++t) {
    json row = trial_json(t, c.seed + t);
    row["alg_cost"] = rows[t].alg;
    row["opt_cost"] = rows[t].opt;
    row["opt_approximate"] = rows[t].approximate;
    row["arrivals"] = rows[t].arrivals;
    out.trials.push_back(row);
  }
  a.update(recompute_statistics("hardness-diamond", out.trials));
  out.aggregates = a;
  out.passed = a["markov_audit"] != json(false);
}

std::string csv_field(const json& v) {
  if (v.is_null()) return "";
  if (v.is_number_float()) {
    const double x = v.get<double>();
    return std::isfinite(x) ? format_number(x) : "";
  }
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

const char* version_string() { return MRFOPT_VERSION_STRING; }

const char* experiment_kind_name(ExperimentKind kind) {
  for (const auto& k : kKinds) {
    if (k.kind == kind) return k.name;
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_name(const std::string& name) {
  for (const auto& k : kKinds) {
    if (name == k.name) return k.kind;
  }
  config_error("unknown experiment kind '" + name + "'");
}

json ExperimentConfig::to_json() const {
  json j = {{"kind", experiment_kind_name(kind)},
            {"trials", trials},
            {"seed", seed},
            {"mode", exact ? "exact" : "monte-carlo"},
            {"enumeration_cap", enumeration_cap},
            {"gibbs", {{"burn_in", gibbs.burn_in}, {"thin", gibbs.thin}}},
            {"params", params},
            {"instance", instance}};
  if (!instance_file.empty()) j["instance_file"] = instance_file;
  return j;
}

ExperimentConfig config_from_json(const json& j, const std::string& base_dir) {
  if (!j.is_object()) config_error("config must be a JSON object");
  static const char* const kKnown[] = {
      "kind",  "instance", "instance_file",   "trials", "seed",   "threads",
      "mode",  "enumeration_cap", "gibbs", "params", "description"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : kKnown) ok = ok || it.key() == k;
    if (!ok) config_error("unknown config field '" + it.key() + "'");
  }
  ExperimentConfig c;
  if (!j.contains("kind") || !j.at("kind").is_string()) {
    config_error("config needs a string 'kind'");
  }
  c.kind = experiment_kind_from_name(j.at("kind").get<std::string>());
  if (j.contains("instance") && j.contains("instance_file")) {
    config_error("give either 'instance' or 'instance_file', not both");
  }
  if (j.contains("instance")) {
    c.instance = j.at("instance");
  } else if (j.contains("instance_file")) {
    if (!j.at("instance_file").is_string()) {
      config_error("'instance_file' must be a string");
    }
    c.instance_file = j.at("instance_file").get<std::string>();
    std::filesystem::path p(c.instance_file);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    if (!std::filesystem::exists(p)) {
      throw Error(ErrorCode::kIo, "instance file '" + p.string() + "' not found");
    }
    c.instance = read_json_file(p.string());
  }
  if (j.contains("trials")) c.trials = get_positive(j.at("trials"), "trials");
  if (j.contains("seed")) c.seed = get_u64(j.at("seed"), "seed");
  if (j.contains("threads")) {
    c.threads = static_cast<unsigned>(get_positive(j.at("threads"), "threads"));
  }
  if (j.contains("mode")) {
    const std::string m = j.at("mode").is_string() ? j.at("mode").get<std::string>() : "";
    if (m == "exact") {
      c.exact = true;
    } else if (m == "monte-carlo") {
      c.exact = false;
    } else {
      config_error("'mode' must be \"exact\" or \"monte-carlo\"");
    }
  }
  if (j.contains("enumeration_cap")) {
    c.enumeration_cap = get_positive(j.at("enumeration_cap"), "enumeration_cap");
  }
  if (j.contains("gibbs")) {
    const json& g = j.at("gibbs");
    if (!g.is_object()) config_error("'gibbs' must be an object");
    if (g.contains("burn_in")) c.gibbs.burn_in = get_u64(g.at("burn_in"), "burn_in");
    if (g.contains("thin")) c.gibbs.thin = get_positive(g.at("thin"), "thin");
  }
  if (j.contains("params")) {
    if (!j.at("params").is_object()) config_error("'params' must be an object");
    c.params = j.at("params");
  }
  const bool needs_instance = c.kind == ExperimentKind::kMinPipeline ||
                              c.kind == ExperimentKind::kMaxXos ||
                              c.kind == ExperimentKind::kMaxMatching ||
                              c.kind == ExperimentKind::kVerifyMrf;
  if (needs_instance && c.instance.is_null()) {
    config_error(std::string(experiment_kind_name(c.kind)) +
                 " needs 'instance' or 'instance_file'");
  }
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kIo, "config file '" + path + "' not found");
  }
  const json j = read_json_file(path);
  return config_from_json(
      j, std::filesystem::path(path).parent_path().string().empty()
             ? "."
             : std::filesystem::path(path).parent_path().string());
}

RunReport run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  RunReport out;
  out.kind = experiment_kind_name(config.kind);
  out.config = config.to_json();
  out.version = version_string();
  try {
    switch (config.kind) {
      case ExperimentKind::kMinPipeline:
        run_min(config, out);
        break;
      case ExperimentKind::kMaxXos:
      case ExperimentKind::kMaxMatching:
        run_max(config, out);
        break;
      case ExperimentKind::kVerifyMrf:
        run_verify(config, out);
        break;
      case ExperimentKind::kHardnessProphet:
        run_prophet(config, out);
        break;
      case ExperimentKind::kHardnessDiamond:
        run_diamond(config, out);
        break;
    }
  } catch (const json::exception& e) {
    config_error(std::string("malformed instance: ") + e.what());
  }
  out.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return out;
}

json recompute_statistics(const std::string& kind, const json& trials) {
  switch (experiment_kind_from_name(kind)) {
    case ExperimentKind::kMinPipeline:
      return min_statistics(min_from_records(trials));
    case ExperimentKind::kMaxXos:
    case ExperimentKind::kMaxMatching:
      return max_statistics(max_from_records(trials));
    case ExperimentKind::kVerifyMrf:
      return json::object();
    case ExperimentKind::kHardnessProphet:
      return mean_stderr(trials, "value", "value");
    case ExperimentKind::kHardnessDiamond: {
      json s = mean_stderr(trials, "alg_cost", "alg");
      s.update(mean_stderr(trials, "opt_cost", "opt"));
      s.update(ratio_statistics(trials, "alg_cost", "opt_cost"));
      return s;
    }
  }
  return json::object();
}

std::string check_report_consistency(const RunReport& report, double tol) {
  const json s = recompute_statistics(report.kind, report.trials);
  for (auto it = s.begin(); it != s.end(); ++it) {
    if (!report.aggregates.contains(it.key())) return it.key();
    const json& stored = report.aggregates.at(it.key());
    if (it.value().is_boolean()) {
      if (stored != it.value()) return it.key();
    } else if (!same_number(stored, it.value(), tol)) {
      return it.key();
    }
  }
  return "";
}

ReportFormat report_format_from_name(const std::string& name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "csv") return ReportFormat::kCsv;
  config_error("format must be json or csv");
}

json report_to_json(const RunReport& r) {
  return {{"kind", r.kind},
          {"config", r.config},
          {"columns", r.columns},
          {"trials", r.trials},
          {"aggregates", r.aggregates},
          {"passed", r.passed},
          {"wall_clock_seconds", r.wall_clock_seconds},
          {"version", r.version}};
}

RunReport report_from_json(const json& j) {
  RunReport r;
  try {
    r.kind = j.at("kind").get<std::string>();
    experiment_kind_from_name(r.kind);
    r.config = j.at("config");
    r.columns = j.at("columns").get<std::vector<std::string>>();
    r.trials = j.at("trials");
    r.aggregates = j.at("aggregates");
    r.passed = j.at("passed").get<bool>();
    r.wall_clock_seconds = j.value("wall_clock_seconds", 0.0);
    r.version = j.value("version", std::string());
  } catch (const json::exception& e) {
    config_error(std::string("malformed report: ") + e.what());
  }
  if (!r.trials.is_array()) config_error("report 'trials' must be an array");
  return r;
}

std::string emit_report(const RunReport& r, ReportFormat format) {
  if (format == ReportFormat::kJson) return write_json(report_to_json(r)) + "\n";
  std::ostringstream out;
  for (std::size_t i = 0; i < r.columns.size(); ++i) {
    out << (i ? "," : "") << r.columns[i];
  }
  out << "\n";
  for (const auto& t : r.trials) {
    for (std::size_t i = 0; i < r.columns.size(); ++i) {
      out << (i ? "," : "")
          << (t.contains(r.columns[i]) ? csv_field(t.at(r.columns[i])) : "");
    }
    out << "\n";
  }
  out << "# kind," << r.kind << "\n";
  for (auto it = r.aggregates.begin(); it != r.aggregates.end(); ++it) {
    const json& v = it.value();
    out << "# " << it.key() << ","
        << (v.is_structured() ? write_json(v, -1) : csv_field(v)) << "\n";
  }
  out << "# passed," << (r.passed ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace mrfopt
