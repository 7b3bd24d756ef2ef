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

#include "mrfopt/min_algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

namespace mrfopt {
namespace {

[[noreturn]] void invalid(const std::string& msg) {
  throw Error(ErrorCode::kInvalidArgument, msg);
}

void check_vertices(const SteinerInstance& inst, const std::vector<int>& v) {
  for (int x : v) {
    if (x < 0 || x >= inst.num_vertices()) {
      throw Error(ErrorCode::kUnknownIdentifier,
                  "vertex " + std::to_string(x) + " out of range");
    }
  }
}

void check_points(const FacilityLocationInstance& inst,
                  const std::vector<int>& v) {
  for (int x : v) {
    if (x < 0 || x >= static_cast<int>(inst.metric.size())) {
      throw Error(ErrorCode::kUnknownIdentifier,
                  "point " + std::to_string(x) + " out of range");
    }
  }
}

}  // namespace

double MinRunResult::total_cost() const {
  double t = phase1_cost;
  for (double c : incremental) t += c;
  return t;
}

// ---------------------------------------------------------------------------
// Steiner

SteinerOnline::SteinerOnline(const SteinerInstance& instance,
                             const std::vector<int>& sample,
                             SteinerOptions options)
    : inst_(&instance),
      options_(options),
      bought_(instance.edges().size(), 0) {
  check_vertices(instance, sample);
  targets_.push_back(instance.root());
  for (int s : sample) {
    if (std::find(targets_.begin(), targets_.end(), s) == targets_.end()) {
      targets_.push_back(s);
    }
  }
  // Prim over the metric closure on targets_, rooted at the root.
  const std::size_t t = targets_.size();
  std::vector<char> in(t, 0);
  std::vector<double> best(t, kInf);
  std::vector<std::size_t> from(t, 0);
  best[0] = 0.0;
  for (std::size_t it = 0; it < t; ++it) {
    std::size_t x = t;
    for (std::size_t i = 0; i < t; ++i) {
      if (!in[i] && (x == t || best[i] < best[x])) x = i;
    }
    in[x] = 1;
    if (it > 0) phase1_ += buy_path(targets_[from[x]], targets_[x]);
    for (std::size_t y = 0; y < t; ++y) {
      const double d = instance.dist(targets_[x], targets_[y]);
      if (!in[y] && d < best[y]) {
        best[y] = d;
        from[y] = x;
      }
    }
  }
}

double SteinerOnline::buy_path(int from, int to) {
  double cost = 0.0;
  for (int e : inst_->path_edges(from, to)) {
    if (!bought_[e]) {
      bought_[e] = 1;
      cost += inst_->edges()[e].cost;
    }
  }
  return cost;
}

double SteinerOnline::serve(int x, double* distance) {
  check_vertices(*inst_, {x});
  int target = targets_.front();
  for (int t : targets_) {
    const double d = inst_->dist(x, t);
    const double b = inst_->dist(x, target);
    if (d < b || (d == b && t < target)) target = t;
  }
  if (distance) *distance = inst_->dist(x, target);
  const double cost = buy_path(target, x);
  if (options_.connect_to_arrived &&
      std::find(targets_.begin(), targets_.end(), x) == targets_.end()) {
    targets_.push_back(x);
  }
  return cost;
}

CoverageSolution SteinerOnline::solution() const {
  CoverageSolution s;
  for (std::size_t e = 0; e < bought_.size(); ++e) {
    if (bought_[e]) {
      s.elements.push_back({ElementKind::kEdge, static_cast<int>(e), 0});
      s.cost += inst_->edges()[e].cost;
    }
  }
  return s;
}

MinRunResult steiner_psample(const SteinerInstance& instance,
                             const std::vector<int>& sample,
                             const std::vector<int>& arrivals,
                             SteinerOptions options, double p) {
  check_vertices(instance, arrivals);
  SteinerOnline alg(instance, sample, options);
  MinRunResult r;
  r.p = p;
  r.phase1_cost = alg.phase1_cost();
  for (int x : arrivals) {
    double d = 0.0;
    r.incremental.push_back(alg.serve(x, &d));
    r.connection_distance.push_back(d);
  }
  r.solution = alg.solution();
  return r;
}

// ---------------------------------------------------------------------------
// Facility location

std::vector<int> fl_offline_const(const FacilityLocationInstance& instance,
                                  const std::vector<int>& sample) {
  if (sample.empty()) return {};
  return fl_open_facilities(instance, sample);
}

FacilityOnline::FacilityOnline(const FacilityLocationInstance& instance,
                               const std::vector<int>& sample,
                               std::uint64_t seed)
    : inst_(&instance), rng_(seed) {
  instance.validate();
  check_points(instance, sample);
  open_ = fl_offline_const(instance, sample);
  phase1_ = instance.facility_cost * static_cast<double>(open_.size());
}

double FacilityOnline::serve(int x, double* open_probability) {
  check_points(*inst_, {x});
  double d = kInf;
  int nearest = -1;
  for (int y : open_) {
    const double dy = inst_->metric.d(x, y);
    if (dy < d) {
      d = dy;
      nearest = y;
    }
  }
  // The distance to an empty facility set is infinite.
  const double prob = std::min(d / inst_->facility_cost, 1.0);
  if (open_probability) *open_probability = prob;
  const double u = rng_.uniform();
  if (u < prob) {
    open_.push_back(x);
    connections_.push_back({ElementKind::kConnection, x, x});
    return inst_->facility_cost;
  }
  connections_.push_back({ElementKind::kConnection, x, nearest});
  return d;
}

CoverageSolution FacilityOnline::solution() const {
  CoverageSolution s;
  for (int y : open_) s.elements.push_back({ElementKind::kFacility, y, 0});
  s.elements.insert(s.elements.end(), connections_.begin(), connections_.end());
  std::sort(s.elements.begin(), s.elements.end());
  s.cost = inst_->facility_cost * static_cast<double>(open_.size());
  for (const auto& c : connections_) s.cost += inst_->metric.d(c.a, c.b);
  return s;
}

MinRunResult fl_psample(const FacilityLocationInstance& instance,
                        const std::vector<int>& sample,
                        const std::vector<int>& arrivals, std::uint64_t seed,
                        double p) {
  check_points(instance, arrivals);
  FacilityOnline alg(instance, sample, seed);
  MinRunResult r;
  r.p = p;
  r.phase1_cost = alg.phase1_cost();
  for (int x : arrivals) {
    double q = 0.0;
    r.incremental.push_back(alg.serve(x, &q));
    r.open_probability.push_back(q);
  }
  r.solution = alg.solution();
  r.n_opened = static_cast<int>(alg.open().size());
  return r;
}

// ---------------------------------------------------------------------------
// Pipeline

const char* base_algorithm_name(BaseAlgorithm a) {
  return a == BaseAlgorithm::kSteiner ? "steiner" : "facility_location";
}

BaseAlgorithm base_algorithm_from_name(const std::string& name) {
  if (name == "steiner") return BaseAlgorithm::kSteiner;
  if (name == "facility_location") return BaseAlgorithm::kFacilityLocation;
  throw Error(ErrorCode::kConfig, "unknown base algorithm '" + name + "'");
}

double pipeline_sample_rate(double delta) {
  return 0.5 * std::exp(-8.0 * delta);
}

namespace {

// Either base algorithm behind one interface for the interleaved loop.
class OnlineRun {
 public:
  OnlineRun(const CoverageProblem& problem, BaseAlgorithm base,
            const std::vector<int>& sample, std::uint64_t seed,
            const PipelineOptions& options, double p) {
    result_.p = p;
    if (base == BaseAlgorithm::kSteiner) {
      const auto* inst = std::get_if<SteinerInstance>(&problem);
      if (!inst) invalid("steiner base algorithm needs a graph instance");
      steiner_.emplace(*inst, sample, options.steiner);
      result_.phase1_cost = steiner_->phase1_cost();
    } else {
      const auto* inst = std::get_if<FacilityLocationInstance>(&problem);
      if (!inst) invalid("facility base algorithm needs a metric instance");
      facility_.emplace(*inst, sample, seed);
      result_.phase1_cost = facility_->phase1_cost();
    }
  }

  void serve(int x) {
    if (steiner_) {
      double d = 0.0;
      result_.incremental.push_back(steiner_->serve(x, &d));
      result_.connection_distance.push_back(d);
    } else {
      double q = 0.0;
      result_.incremental.push_back(facility_->serve(x, &q));
      result_.open_probability.push_back(q);
    }
  }

  MinRunResult finish() {
    if (steiner_) {
      result_.solution = steiner_->solution();
    } else {
      result_.solution = facility_->solution();
      result_.n_opened = static_cast<int>(facility_->open().size());
    }
    return result_;
  }

 private:
  std::optional<SteinerOnline> steiner_;
  std::optional<FacilityOnline> facility_;
  MinRunResult result_;
};

}  // namespace

PipelineResult mrf_min_pipeline(const CoverageProblem& problem,
                                const std::vector<int>& sample_vec,
                                const std::vector<int>& real_vec, double delta,
                                BaseAlgorithm base, std::uint64_t seed,
                                const PipelineOptions& options) {
  if (sample_vec.size() != real_vec.size()) {
    invalid("sample and real vectors must have equal length");
  }
  if (!(delta >= 0.0) || !std::isfinite(delta)) invalid("delta must be >= 0");
  const std::size_t n = real_vec.size();
  PipelineResult out;
  out.p = pipeline_sample_rate(delta);
  Rng coin_rng(derive_seed(seed, 0));
  out.coins.resize(n);
  out.owner.resize(n);
  std::vector<int> sample_first, sample_second;
  for (std::size_t i = 0; i < n; ++i) {
    out.coins[i] = coin_rng.bernoulli(0.5) ? 1 : -1;
    if (out.coins[i] == 1) {
      sample_first.push_back(sample_vec[i]);
      out.owner[i] = 1;
    } else {
      sample_second.push_back(sample_vec[i]);
      out.owner[i] = 0;
    }
  }
  OnlineRun first(problem, base, sample_first, derive_seed(seed, 1), options,
                  out.p);
  OnlineRun second(problem, base, sample_second, derive_seed(seed, 2), options,
                   out.p);
  for (std::size_t i = 0; i < n; ++i) {
    (out.owner[i] == 0 ? first : second).serve(real_vec[i]);
  }
  out.first = first.finish();
  out.second = second.finish();
  out.solution = unite(problem, out.first.solution, out.second.solution);
  out.phase1_cost = out.first.phase1_cost + out.second.phase1_cost;
  if (base == BaseAlgorithm::kFacilityLocation) {
    int opened = 0;
    for (const auto& e : out.solution.elements) {
      opened += e.kind == ElementKind::kFacility;
    }
    out.n_opened = opened;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo

std::vector<int> DemandEmbedding::embed(const Labels& labels) const {
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out[i] = points[i][labels[i]];
  }
  return out;
}

void DemandEmbedding::validate(const TypeSpace& space, int num_points) const {
  if (points.size() != space.num_coordinates()) {
    throw Error(ErrorCode::kConfig, "embedding needs one row per coordinate");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != static_cast<std::size_t>(space.size(i))) {
      throw Error(ErrorCode::kConfig, "embedding row " + std::to_string(i) +
                                          " must have one point per label");
    }
    for (int x : points[i]) {
      if (x < 0 || x >= num_points) {
        throw Error(ErrorCode::kUnknownIdentifier,
                    "embedding point " + std::to_string(x) + " out of range");
      }
    }
  }
}

namespace {

int problem_points(const CoverageProblem& problem) {
  if (const auto* s = std::get_if<SteinerInstance>(&problem)) {
    return s->num_vertices();
  }
  if (const auto* f = std::get_if<FacilityLocationInstance>(&problem)) {
    return static_cast<int>(f->metric.size());
  }
  return std::get<SetCoverInstance>(problem).universe;
}

Labels gibbs_draw(const MrfSpec& mrf, std::uint64_t seed,
                  const GibbsOptions& g) {
  GibbsSampler s(mrf, seed);
  for (std::size_t k = 0; k < g.burn_in; ++k) s.sweep();
  return s.state();
}

}  // namespace

MinTrialRecord run_min_trial(const MinExperiment& exp, double delta,
                             const ExactSampler* sampler, std::uint64_t seed) {
  Labels a, b;
  if (sampler) {
    Rng rng(derive_seed(seed, 10));
    a = sampler->draw(rng);
    b = sampler->draw(rng);
  } else {
    a = gibbs_draw(exp.mrf, derive_seed(seed, 10), exp.gibbs);
    b = gibbs_draw(exp.mrf, derive_seed(seed, 11), exp.gibbs);
  }
  const std::vector<int> sample = exp.embedding.embed(a);
  const std::vector<int> real = exp.embedding.embed(b);
  const PipelineResult run = mrf_min_pipeline(
      exp.problem, sample, real, delta, exp.base, derive_seed(seed, 20),
      exp.options);
  MinTrialRecord rec;
  rec.seed = seed;
  rec.alg_cost = run.solution.cost;
  rec.phase1_cost = run.phase1_cost;
  rec.n_opened = run.n_opened;
  rec.feasible = check_feasible(exp.problem, real, run.solution);
  rec.opt_r = offline_opt(exp.problem, real).cost;
  std::vector<int> all = sample;
  all.insert(all.end(), real.begin(), real.end());
  rec.opt_v = offline_opt(exp.problem, all).cost;
  return rec;
}

void aggregate_min(MinRatioReport& report) {
  RunningStats alg, opt_r, opt_v;
  std::vector<double> va, vr, vv;
  report.all_feasible = true;
  for (const auto& t : report.trials) {
    alg.add(t.alg_cost);
    opt_r.add(t.opt_r);
    opt_v.add(t.opt_v);
    va.push_back(t.alg_cost);
    vr.push_back(t.opt_r);
    vv.push_back(t.opt_v);
    report.all_feasible = report.all_feasible && t.feasible;
  }
  report.alg_mean = alg.mean();
  report.alg_stderr = alg.stderr_mean();
  report.opt_r_mean = opt_r.mean();
  report.opt_v_mean = opt_v.mean();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  report.ratio_r = opt_r.mean() > 0.0 ? alg.mean() / opt_r.mean() : nan;
  report.ratio_v = opt_v.mean() > 0.0 ? alg.mean() / opt_v.mean() : nan;
  report.ratio_r_stderr = ratio_stderr(va, vr);
  report.ratio_v_stderr = ratio_stderr(va, vv);
}

MinRatioReport estimate_min_ratio(const MinExperiment& exp, std::size_t trials,
                                  std::uint64_t base_seed, unsigned threads) {
  if (trials < 1) invalid("trials must be >= 1");
  exp.embedding.validate(exp.mrf.type_space(), problem_points(exp.problem));
  MinRatioReport report;
  report.delta = weighted_max_degree(exp.mrf);
  report.p = pipeline_sample_rate(report.delta);
  std::optional<ExactSampler> sampler;
  if (exp.mrf.type_space().num_states() <= exp.enumeration_cap) {
    sampler.emplace(exact_joint(exp.mrf, exp.enumeration_cap));
  }
  report.exact_sampling = sampler.has_value();
  report.trials.resize(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    try {
      report.trials[t] = run_min_trial(exp, report.delta,
                                       sampler ? &*sampler : nullptr,
                                       base_seed + t);
    } catch (const Error& e) {
      throw Error(e.code(), "trial " + std::to_string(t) + ": " + e.what());
    }
  });
  aggregate_min(report);
  return report;
}

}  // namespace mrfopt
