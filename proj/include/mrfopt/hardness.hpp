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

// Lower-bound constructions: the multiplicative prophet chain under
// p-sample revelation and the recursive diamond graph for online Steiner
// tree, with the transfer from Markov chains to MRFs.

#ifndef MRFOPT_HARDNESS_HPP_
#define MRFOPT_HARDNESS_HPP_

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "mrfopt/common.hpp"
#include "mrfopt/coverage.hpp"
#include "mrfopt/mrf.hpp"

namespace mrfopt {

// X_1 = 1 and X_{i+1} = M X_i with probability 1/M, else 0 forever after.
struct ProphetHardInstance {
  int n = 2;
  double M = 2.0;

  // Value of coordinate i (0-based) when alive: M^i.
  double alive_value(int i) const;
  // Pr[exactly t values are nonzero], t in [1, n].
  double level_probability(int t) const;
};

// Two labels per coordinate: 0 is the value 0 and 1 is alive_value(i).
MarkovChainSpec gen_prophet_hard(int n, double M);
ProphetHardInstance prophet_instance(int n, double M);

struct ProphetDpResult {
  double p = 0.0;
  int n = 0;
  double M = 0.0;
  double dp_value = 0.0;
  double opt_value = 0.0;
  double ratio = 0.0;  // opt_value / dp_value
};

// Optimal online value when every coordinate is independently revealed up
// front with probability p and all coordinates stay selectable. Backward
// induction over the information state (last live sample, first dead
// sample) in extended precision, values normalized per level.
ProphetDpResult optimal_online_psample_value(const ProphetHardInstance& inst,
                                             double p);
// Exact E[max_i X_i].
double prophet_expected_max(const ProphetHardInstance& inst);
nlohmann::json prophet_dp_to_json(const ProphetDpResult& r);

// One run of the optimal policy; returns the selected value.
double simulate_prophet_policy(const ProphetHardInstance& inst, double p,
                               Rng& rng);

// Edge of some G_j, j <= k, in the subdivision hierarchy.
struct DiamondTreeEdge {
  int u = 0;  // endpoint nearer the root
  int v = 0;
  int level = 0;
  int creator = -1;  // vertex whose insertion created the edge
  int pair = -1;     // first twin inserted on this edge, -1 at level k
};

struct DiamondSteinerInstance {
  int k = 0;
  SteinerInstance graph;  // unit costs, root 0
  std::vector<int> rank;
  std::vector<int> twin;  // -1 for rank-0 vertices
  // Endpoints of the edge whose subdivision created the vertex, oriented
  // away from the root. -1 for rank-0 vertices.
  std::vector<int> parent_u;
  std::vector<int> parent_v;
  std::vector<DiamondTreeEdge> tree;
  std::vector<int> home_edge;    // tree edge the vertex was inserted on
  std::vector<int> first_edge;   // tree edge (parent_u, x)
  std::vector<int> second_edge;  // tree edge (x, parent_v)
  int terminal = 1;  // the non-root rank-0 vertex
  int arrivals = 1;  // length of the arrival process

  int num_vertices() const { return graph.num_vertices(); }
};

DiamondSteinerInstance gen_diamond(int k);

// Depth-first arrival process on the twin pairs. Labels are vertex ids.
// Twins of the pair following vertex x, or empty if x is the last arrival.
std::vector<int> diamond_successor_pair(const DiamondSteinerInstance& inst,
                                        int x);
MarkovChainSpec diamond_arrival_chain(const DiamondSteinerInstance& inst);
std::vector<int> sample_diamond_arrivals(const DiamondSteinerInstance& inst,
                                         Rng& rng);

struct DiamondAudit {
  bool markov = true;       // next pair depends only on the previous arrival
  bool valid_order = true;  // parents arrive first, no repeats
  std::size_t paths = 0;
};

inline constexpr int kDiamondAuditMaxDepth = 4;

// Exhaustive comparison against a history-based rule (deepest eligible
// pair, nearest to the root first). Requires k <= 4.
DiamondAudit audit_diamond_chain(const DiamondSteinerInstance& inst);

nlohmann::json diamond_to_json(const DiamondSteinerInstance& inst);

// chain_to_mrf for a chain whose joint table is enumerable.
ChainEmbedding transfer_hardness(const MarkovChainSpec& chain, double epsilon,
                                 std::size_t cap = kDefaultEnumerationCap);

}  // namespace mrfopt

#endif  // MRFOPT_HARDNESS_HPP_
