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

// Sample-based online algorithms for Steiner tree and facility location,
// and the pipeline that runs them on MRF-correlated demands.

#ifndef MRFOPT_MIN_ALGORITHMS_HPP_
#define MRFOPT_MIN_ALGORITHMS_HPP_

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "mrfopt/common.hpp"
#include "mrfopt/coverage.hpp"
#include "mrfopt/mrf.hpp"

namespace mrfopt {

struct MinRunResult {
  CoverageSolution solution;
  double phase1_cost = 0.0;
  std::vector<double> incremental;  // cost paid by each arrival
  // Steiner: distance from the arrival to its connection target.
  std::vector<double> connection_distance;
  // Facility location: open probability used for each arrival.
  std::vector<double> open_probability;
  int n_opened = 0;  // facility location: open facilities at the end
  double p = 0.0;    // sample rate the algorithm was configured with

  double total_cost() const;
};

struct SteinerOptions {
  // Also connect to earlier arrivals, not only to sample points and root.
  bool connect_to_arrived = false;
};

// Online state for the sample-based Steiner algorithm.
class SteinerOnline {
 public:
  SteinerOnline(const SteinerInstance& instance, const std::vector<int>& sample,
                SteinerOptions options = {});

  double phase1_cost() const { return phase1_; }
  // Connects one arrival; returns the marginal cost of the new edges.
  double serve(int x, double* distance = nullptr);
  const std::vector<char>& bought() const { return bought_; }
  CoverageSolution solution() const;

 private:
  double buy_path(int from, int to);

  const SteinerInstance* inst_;
  SteinerOptions options_;
  std::vector<int> targets_;
  std::vector<char> bought_;
  double phase1_ = 0.0;
};

// Online state for the sample-based facility location algorithm.
class FacilityOnline {
 public:
  FacilityOnline(const FacilityLocationInstance& instance,
                 const std::vector<int>& sample, std::uint64_t seed);

  double phase1_cost() const { return phase1_; }
  // Serves one arrival; returns the cost paid and the open probability.
  double serve(int x, double* open_probability = nullptr);
  const std::vector<int>& open() const { return open_; }
  CoverageSolution solution() const;

 private:
  const FacilityLocationInstance* inst_;
  Rng rng_;
  std::vector<int> open_;
  std::vector<SolutionElement> connections_;
  double phase1_ = 0.0;
};

MinRunResult steiner_psample(const SteinerInstance& instance,
                             const std::vector<int>& sample,
                             const std::vector<int>& arrivals,
                             SteinerOptions options = {}, double p = 0.0);

MinRunResult fl_psample(const FacilityLocationInstance& instance,
                        const std::vector<int>& sample,
                        const std::vector<int>& arrivals, std::uint64_t seed,
                        double p = 0.0);

// Offline facility choice for the sample phase.
std::vector<int> fl_offline_const(const FacilityLocationInstance& instance,
                                  const std::vector<int>& sample);

enum class BaseAlgorithm { kSteiner, kFacilityLocation };

const char* base_algorithm_name(BaseAlgorithm a);
BaseAlgorithm base_algorithm_from_name(const std::string& name);

struct PipelineOptions {
  SteinerOptions steiner;
};

struct PipelineResult {
  MinRunResult first;   // instance fed by row 1
  MinRunResult second;  // instance fed by row -1
  CoverageSolution solution;  // union of both
  std::vector<int> coins;     // +-1 per coordinate
  std::vector<int> owner;     // per coordinate: 0 first, 1 second
  double p = 0.0;
  double phase1_cost = 0.0;
  int n_opened = 0;
};

// p = e^{-8 delta} / 2.
double pipeline_sample_rate(double delta);

// One run of the composed reduction. Coordinate i with coin +1 sends its
// sample value to the first instance's sample and its real value to the
// second instance's arrivals; coin -1 does the reverse. Arrivals are served
// in coordinate order.
PipelineResult mrf_min_pipeline(const CoverageProblem& problem,
                                const std::vector<int>& sample_vec,
                                const std::vector<int>& real_vec, double delta,
                                BaseAlgorithm base, std::uint64_t seed,
                                const PipelineOptions& options = {});

// Maps label t of coordinate i to a demand point.
struct DemandEmbedding {
  std::vector<std::vector<int>> points;

  std::vector<int> embed(const Labels& labels) const;
  void validate(const TypeSpace& space, int num_points) const;
};

struct MinTrialRecord {
  std::uint64_t seed = 0;
  double alg_cost = 0.0;
  double opt_r = 0.0;
  double opt_v = 0.0;
  double phase1_cost = 0.0;
  int n_opened = 0;
  bool feasible = true;
};

struct MinRatioReport {
  std::vector<MinTrialRecord> trials;
  double delta = 0.0;
  double p = 0.0;
  double alg_mean = 0.0;
  double alg_stderr = 0.0;
  double opt_r_mean = 0.0;
  double opt_v_mean = 0.0;
  double ratio_r = 0.0;
  double ratio_r_stderr = 0.0;
  double ratio_v = 0.0;
  double ratio_v_stderr = 0.0;
  bool all_feasible = true;
  bool exact_sampling = true;
};

struct MinExperiment {
  CoverageProblem problem;
  MrfSpec mrf;
  DemandEmbedding embedding;
  BaseAlgorithm base = BaseAlgorithm::kSteiner;
  PipelineOptions options;
  GibbsOptions gibbs;
  std::size_t enumeration_cap = kDefaultEnumerationCap;
};

// Runs trial t with seed base_seed + t. Aggregates are recomputed from the
// records, so any subset of trials can be regenerated independently.
MinTrialRecord run_min_trial(const MinExperiment& exp, double delta,
                             const ExactSampler* sampler, std::uint64_t seed);
MinRatioReport estimate_min_ratio(const MinExperiment& exp, std::size_t trials,
                                  std::uint64_t base_seed,
                                  unsigned threads = 1);
void aggregate_min(MinRatioReport& report);

}  // namespace mrfopt

#endif  // MRFOPT_MIN_ALGORITHMS_HPP_
