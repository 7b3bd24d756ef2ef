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

// Coverage problems (Steiner tree, facility location, set cover) with
// feasibility checks and offline optimum oracles. All costs are additive.

#ifndef MRFOPT_COVERAGE_HPP_
#define MRFOPT_COVERAGE_HPP_

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "mrfopt/common.hpp"

namespace mrfopt {

class MetricSpace {
 public:
  MetricSpace() = default;
  // Validates symmetry, zero diagonal, non-negativity and the triangle
  // inequality (tolerance 1e-9).
  explicit MetricSpace(std::vector<std::vector<double>> distances);

  std::size_t size() const { return d_.size(); }
  double d(std::size_t x, std::size_t y) const { return d_[x][y]; }
  const std::vector<std::vector<double>>& matrix() const { return d_; }

 private:
  std::vector<std::vector<double>> d_;
};

struct GraphEdge {
  int u = 0;
  int v = 0;
  double cost = 0.0;
};

class SteinerInstance {
 public:
  SteinerInstance() = default;
  SteinerInstance(int num_vertices, std::vector<GraphEdge> edges, int root);

  int num_vertices() const { return n_; }
  int root() const { return root_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  // Shortest-path metric closure.
  double dist(int u, int v) const { return dist_[u][v]; }
  // Edge ids on a fixed shortest u-v path.
  std::vector<int> path_edges(int u, int v) const;

 private:
  int n_ = 0;
  int root_ = 0;
  std::vector<GraphEdge> edges_;
  std::vector<std::vector<double>> dist_;
  // pred_[s][v] is the edge used to enter v on the shortest path from s.
  std::vector<std::vector<int>> pred_;
};

struct FacilityLocationInstance {
  MetricSpace metric;
  double facility_cost = 1.0;

  void validate() const;
};

struct SetCoverInstance {
  int universe = 0;
  std::vector<std::vector<int>> sets;
  std::vector<double> costs;

  void validate() const;
};

using CoverageProblem =
    std::variant<SteinerInstance, FacilityLocationInstance, SetCoverInstance>;

enum class ElementKind { kEdge, kFacility, kConnection, kSet };

// kEdge: a = edge id. kFacility: a = site. kConnection: a = demand point,
// b = facility site. kSet: a = set index.
struct SolutionElement {
  ElementKind kind = ElementKind::kEdge;
  int a = 0;
  int b = 0;

  friend bool operator==(const SolutionElement&,
                         const SolutionElement&) = default;
  friend auto operator<=>(const SolutionElement&,
                          const SolutionElement&) = default;
};

struct CoverageSolution {
  std::vector<SolutionElement> elements;
  double cost = 0.0;
  bool approximate = false;
};

using Demands = std::vector<int>;

// Solutions are multisets: every element is charged, so a demand served
// twice pays twice.
double solution_cost(const CoverageProblem& problem, const CoverageSolution& s);
// Union; repeated edges, facilities and sets are bought once while
// connections keep their multiplicity. Cost recomputed.
CoverageSolution unite(const CoverageProblem& problem,
                       const CoverageSolution& a, const CoverageSolution& b);

bool check_feasible(const CoverageProblem& problem, const Demands& demands,
                    const CoverageSolution& solution);

inline constexpr std::size_t kSteinerExactTerminals = 12;
inline constexpr std::size_t kFacilityExactCandidates = 15;
inline constexpr std::size_t kSetCoverExactSets = 20;

CoverageSolution offline_opt_steiner(const SteinerInstance& instance,
                                     const Demands& demands);
CoverageSolution offline_opt_fl(const FacilityLocationInstance& instance,
                                const Demands& demands);
CoverageSolution offline_opt_setcover(const SetCoverInstance& instance,
                                      const Demands& demands);
CoverageSolution offline_opt(const CoverageProblem& problem,
                             const Demands& demands);

// Facility subset search over candidate sites. Exact for at most
// kFacilityExactCandidates candidates, local search otherwise. Returns
// the opened sites in increasing order.
std::vector<int> fl_open_facilities(const FacilityLocationInstance& instance,
                                    const Demands& demands,
                                    bool* approximate = nullptr);
// |F| f + sum_j d(x_j, F).
double fl_objective(const FacilityLocationInstance& instance,
                    const Demands& demands, const std::vector<int>& open);

CoverageProblem coverage_from_json(const nlohmann::json& j);
nlohmann::json coverage_to_json(const CoverageProblem& problem);
nlohmann::json solution_to_json(const CoverageSolution& solution);
CoverageSolution solution_from_json(const nlohmann::json& j);

}  // namespace mrfopt

#endif  // MRFOPT_COVERAGE_HPP_
