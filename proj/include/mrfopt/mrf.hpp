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

// Finite-state Markov random fields: exact tables, conditionals, Gibbs
// sampling, and the embedding of time-dependent Markov chains.

#ifndef MRFOPT_MRF_HPP_
#define MRFOPT_MRF_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "mrfopt/common.hpp"

namespace mrfopt {

using Labels = std::vector<int>;

class TypeSpace {
 public:
  TypeSpace() = default;
  explicit TypeSpace(std::vector<int> sizes);

  std::size_t num_coordinates() const { return sizes_.size(); }
  int size(std::size_t i) const { return sizes_[i]; }
  const std::vector<int>& sizes() const { return sizes_; }
  int max_size() const;

  // Number of joint states, saturating at SIZE_MAX.
  std::size_t num_states() const;
  // Throws EnumerationCapExceeded when num_states() > cap.
  void require_enumerable(std::size_t cap) const;

  // Row-major: the last coordinate varies fastest.
  std::size_t index_of(std::span<const int> labels) const;
  void decode(std::size_t index, std::span<int> labels) const;

 private:
  std::vector<int> sizes_;
};

struct Hyperedge {
  std::vector<int> vertices;
  // Row-major over the edge's labels in `vertices` order.
  std::vector<double> table;
};

class MrfSpec {
 public:
  MrfSpec() = default;
  MrfSpec(TypeSpace space, std::vector<std::vector<double>> vertex_potentials,
          std::vector<Hyperedge> edges);

  // Zero potentials, no edges.
  static MrfSpec uniform(TypeSpace space);

  const TypeSpace& type_space() const { return space_; }
  std::size_t num_coordinates() const { return space_.num_coordinates(); }
  const std::vector<std::vector<double>>& vertex_potentials() const {
    return vertex_;
  }
  const std::vector<Hyperedge>& edges() const { return edges_; }
  const std::vector<std::size_t>& incident(std::size_t i) const {
    return incident_[i];
  }

  // psi_e evaluated on a full assignment.
  double edge_potential(std::size_t e, std::span<const int> labels) const;
  // Sum of all potentials at a full assignment (unnormalized log-probability).
  double log_weight(std::span<const int> labels) const;
  // Unnormalized log conditional of coordinate i given the rest of `labels`.
  // `labels[i]` is ignored; `out` has size(i) entries.
  void local_logits(std::size_t i, std::span<const int> labels,
                    std::span<double> out) const;

 private:
  TypeSpace space_;
  std::vector<std::vector<double>> vertex_;
  std::vector<Hyperedge> edges_;
  std::vector<std::vector<std::size_t>> strides_;
  std::vector<std::vector<std::size_t>> incident_;
};

nlohmann::json mrf_to_json(const MrfSpec& mrf);
MrfSpec mrf_from_json(const nlohmann::json& j);

// Max over coordinates and assignments of |sum of incident edge potentials|.
// Each vertex's neighbourhood is enumerated exactly; if a neighbourhood
// exceeds `local_cap` states the triangle-inequality bound is used instead.
double weighted_max_degree(const MrfSpec& mrf,
                           std::size_t local_cap = kDefaultEnumerationCap);

struct JointPmf {
  TypeSpace space;
  std::vector<double> probs;
  double log_partition = 0.0;

  std::vector<double> marginal(std::size_t i) const;
  // Row-stochastic Pr[V_{i+1} = t | V_i = s]; rows with zero mass stay zero.
  std::vector<std::vector<double>> transition(std::size_t i) const;
};

JointPmf exact_joint(const MrfSpec& mrf,
                     std::size_t cap = kDefaultEnumerationCap);

// Event on the coordinates other than the target: each coordinate is either
// free or restricted to a set of allowed labels.
class Conditioning {
 public:
  explicit Conditioning(const TypeSpace& space);

  Conditioning& fix(std::size_t i, int label);
  Conditioning& restrict_to(std::size_t i, const std::vector<int>& labels);
  bool constrains(std::size_t i) const { return !allowed_[i].empty(); }
  bool allows(std::size_t i, int label) const;

 private:
  std::vector<std::vector<char>> allowed_;
};

std::vector<double> conditional_marginal(
    const MrfSpec& mrf, std::size_t i, const Conditioning& given,
    std::size_t cap = kDefaultEnumerationCap);

struct ConditioningWitness {
  std::size_t coordinate = 0;
  int label = 0;
  Labels assignment;  // the conditioning assignment; entry `coordinate` unused
  double ratio = 1.0;
};

struct ConditioningReport {
  double delta = 0.0;
  double max_ratio = 1.0;
  double min_ratio = 1.0;
  ConditioningWitness max_witness;
  ConditioningWitness min_witness;
  bool within_bound = true;  // relative tolerance 1e-9 on e^{+-4 delta}
};

ConditioningReport verify_conditioning_bound(
    const MrfSpec& mrf, std::size_t cap = kDefaultEnumerationCap);
nlohmann::json conditioning_report_to_json(const ConditioningReport& r);

struct GibbsOptions {
  std::size_t burn_in = 500;
  std::size_t thin = 5;
};

// Systematic-scan single-site Gibbs sampler. One instance per thread.
class GibbsSampler {
 public:
  GibbsSampler(const MrfSpec& mrf, std::uint64_t seed);

  void sweep();
  const Labels& state() const { return state_; }

 private:
  const MrfSpec* mrf_;
  Rng rng_;
  Labels state_;
  std::vector<double> logits_;
  std::vector<double> probs_;
};

std::vector<Labels> gibbs_sample(const MrfSpec& mrf, std::uint64_t seed,
                                 std::size_t count,
                                 const GibbsOptions& options = {});

// Inverse-CDF sampler over a precomputed joint table.
class ExactSampler {
 public:
  explicit ExactSampler(const JointPmf& joint);
  Labels draw(Rng& rng) const;
  std::size_t draw_index(Rng& rng) const;

 private:
  TypeSpace space_;
  std::vector<double> cdf_;
};

struct StochasticMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;  // row-major

  double at(int r, int c) const { return data[r * cols + c]; }
};

struct MarkovChainSpec {
  std::vector<double> initial;
  // transitions[k] maps coordinate k to coordinate k + 1.
  std::vector<StochasticMatrix> transitions;

  std::size_t length() const { return transitions.size() + 1; }
  TypeSpace type_space() const;
  // Throws InvalidArgument on shape or stochasticity violations.
  void validate() const;
  double path_probability(std::span<const int> labels) const;
};

// Full joint table of the chain (same indexing as TypeSpace).
std::vector<double> chain_joint(const MarkovChainSpec& chain,
                                std::size_t cap = kDefaultEnumerationCap);

nlohmann::json chain_to_json(const MarkovChainSpec& chain);
MarkovChainSpec chain_from_json(const nlohmann::json& j);

struct ChainEmbedding {
  MrfSpec mrf;
  double delta = 0.0;
};

// Path MRF whose law dominates the chain's up to a factor (1 - epsilon).
ChainEmbedding chain_to_mrf(const MarkovChainSpec& chain, double epsilon);
// Same construction with an explicit clamp level: edge potentials are
// max(ln P, -delta / 2).
ChainEmbedding chain_to_mrf_clamped(const MarkovChainSpec& chain,
                                    double delta);

}  // namespace mrfopt

#endif  // MRFOPT_MRF_HPP_
