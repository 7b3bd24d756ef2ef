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

#include "mrfopt/coverage.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <queue>
#include <set>

namespace mrfopt {
namespace {

[[noreturn]] void invalid(const std::string& msg) {
  throw Error(ErrorCode::kInvalidArgument, msg);
}

[[noreturn]] void unknown(const std::string& msg) {
  throw Error(ErrorCode::kUnknownIdentifier, msg);
}

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int a, int b) { parent_[find(a)] = find(b); }

 private:
  std::vector<int> parent_;
};

std::vector<int> distinct(const Demands& d) {
  std::vector<int> out(d.begin(), d.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Instances

MetricSpace::MetricSpace(std::vector<std::vector<double>> distances)
    : d_(std::move(distances)) {
  const std::size_t n = d_.size();
  for (const auto& row : d_) {
    if (row.size() != n) invalid("distance matrix must be square");
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (d_[x][x] != 0.0) invalid("distance matrix diagonal must be zero");
    for (std::size_t y = 0; y < n; ++y) {
      const double v = d_[x][y];
      if (!std::isfinite(v) || v < 0.0) invalid("distances must be >= 0");
      if (v != d_[y][x]) invalid("distance matrix must be symmetric");
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      for (std::size_t z = 0; z < n; ++z) {
        if (d_[x][z] > d_[x][y] + d_[y][z] + 1e-9) {
          invalid("distance matrix violates the triangle inequality");
        }
      }
    }
  }
}

SteinerInstance::SteinerInstance(int num_vertices, std::vector<GraphEdge> edges,
                                 int root)
    : n_(num_vertices), root_(root), edges_(std::move(edges)) {
  if (n_ < 1) invalid("graph needs at least one vertex");
  if (root_ < 0 || root_ >= n_) invalid("root out of range");
  std::vector<std::vector<std::pair<int, int>>> adj(n_);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto& ed = edges_[e];
    if (ed.u < 0 || ed.u >= n_ || ed.v < 0 || ed.v >= n_ || ed.u == ed.v) {
      invalid("edge endpoints invalid");
    }
    if (!(ed.cost > 0.0) || !std::isfinite(ed.cost)) {
      invalid("edge costs must be positive");
    }
    adj[ed.u].push_back({ed.v, static_cast<int>(e)});
    adj[ed.v].push_back({ed.u, static_cast<int>(e)});
  }
  dist_.assign(n_, std::vector<double>(n_, kInf));
  pred_.assign(n_, std::vector<int>(n_, -1));
  using Item = std::pair<double, int>;
  for (int s = 0; s < n_; ++s) {
    auto& dist = dist_[s];
    auto& pred = pred_[s];
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[s] = 0.0;
    pq.push({0.0, s});
    while (!pq.empty()) {
      auto [d, x] = pq.top();
      pq.pop();
      if (d > dist[x]) continue;
      for (auto [y, e] : adj[x]) {
        const double nd = d + edges_[e].cost;
        // Ties broken toward the lower edge id so paths are reproducible.
        if (nd < dist[y] || (nd == dist[y] && pred[y] > e && y != s)) {
          const bool improved = nd < dist[y];
          dist[y] = nd;
          pred[y] = e;
          if (improved) pq.push({nd, y});
        }
      }
    }
    for (int v = 0; v < n_; ++v) {
      if (dist[v] == kInf) invalid("graph must be connected");
    }
  }
}

std::vector<int> SteinerInstance::path_edges(int u, int v) const {
  std::vector<int> out;
  int x = v;
  while (x != u) {
    const int e = pred_[u][x];
    out.push_back(e);
    x = edges_[e].u == x ? edges_[e].v : edges_[e].u;
  }
  return out;
}

void FacilityLocationInstance::validate() const {
  if (!(facility_cost > 0.0) || !std::isfinite(facility_cost)) {
    invalid("facility cost must be positive and finite");
  }
}

void SetCoverInstance::validate() const {
  if (universe < 0) invalid("universe size must be >= 0");
  if (sets.size() != costs.size()) invalid("one cost per set required");
  for (const auto& s : sets) {
    for (int x : s) {
      if (x < 0 || x >= universe) invalid("set member out of range");
    }
  }
  for (double c : costs) {
    if (!(c > 0.0) || !std::isfinite(c)) invalid("set costs must be positive");
  }
}

// ---------------------------------------------------------------------------
// Costs and feasibility

double solution_cost(const CoverageProblem& problem,
                     const CoverageSolution& s) {
  const std::vector<SolutionElement>& e = s.elements;
  double total = 0.0;
  std::visit(
      [&](const auto& inst) {
        using T = std::decay_t<decltype(inst)>;
        for (const auto& el : e) {
          if constexpr (std::is_same_v<T, SteinerInstance>) {
            if (el.kind != ElementKind::kEdge || el.a < 0 ||
                el.a >= static_cast<int>(inst.edges().size())) {
              unknown("bad Steiner solution element");
            }
            total += inst.edges()[el.a].cost;
          } else if constexpr (std::is_same_v<T, FacilityLocationInstance>) {
            const int n = static_cast<int>(inst.metric.size());
            if (el.a < 0 || el.a >= n) unknown("facility point out of range");
            if (el.kind == ElementKind::kFacility) {
              total += inst.facility_cost;
            } else if (el.kind == ElementKind::kConnection) {
              if (el.b < 0 || el.b >= n) unknown("facility out of range");
              total += inst.metric.d(el.a, el.b);
            } else {
              unknown("bad facility-location solution element");
            }
          } else {
            if (el.kind != ElementKind::kSet || el.a < 0 ||
                el.a >= static_cast<int>(inst.sets.size())) {
              unknown("bad set-cover solution element");
            }
            total += inst.costs[el.a];
          }
        }
      },
      problem);
  return total;
}

CoverageSolution unite(const CoverageProblem& problem,
                       const CoverageSolution& a, const CoverageSolution& b) {
  CoverageSolution out;
  out.elements = a.elements;
  out.elements.insert(out.elements.end(), b.elements.begin(),
                      b.elements.end());
  std::sort(out.elements.begin(), out.elements.end());
  // Infrastructure is bought once; connections keep their multiplicity.
  auto dup = [](const SolutionElement& x, const SolutionElement& y) {
    return x == y && x.kind != ElementKind::kConnection;
  };
  out.elements.erase(
      std::unique(out.elements.begin(), out.elements.end(), dup),
      out.elements.end());
  out.cost = solution_cost(problem, out);
  out.approximate = a.approximate || b.approximate;
  return out;
}

bool check_feasible(const CoverageProblem& problem, const Demands& demands,
                    const CoverageSolution& solution) {
  // Validates identifiers as a side effect.
  solution_cost(problem, solution);
  return std::visit(
      [&](const auto& inst) -> bool {
        using T = std::decay_t<decltype(inst)>;
        if constexpr (std::is_same_v<T, SteinerInstance>) {
          DisjointSets ds(inst.num_vertices());
          for (const auto& el : solution.elements) {
            const auto& e = inst.edges()[el.a];
            ds.unite(e.u, e.v);
          }
          for (int d : demands) {
            if (d < 0 || d >= inst.num_vertices()) unknown("demand vertex");
            if (ds.find(d) != ds.find(inst.root())) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, FacilityLocationInstance>) {
          const int n = static_cast<int>(inst.metric.size());
          std::vector<char> open(n, 0);
          for (const auto& el : solution.elements) {
            if (el.kind == ElementKind::kFacility) open[el.a] = 1;
          }
          std::vector<char> served(n, 0);
          for (const auto& el : solution.elements) {
            if (el.kind == ElementKind::kConnection && open[el.b]) {
              served[el.a] = 1;
            }
          }
          for (int d : demands) {
            if (d < 0 || d >= n) unknown("demand point");
            if (!served[d]) return false;
          }
          return true;
        } else {
          std::vector<char> covered(inst.universe, 0);
          for (const auto& el : solution.elements) {
            for (int x : inst.sets[el.a]) covered[x] = 1;
          }
          for (int d : demands) {
            if (d < 0 || d >= inst.universe) unknown("demand element");
            if (!covered[d]) return false;
          }
          return true;
        }
      },
      problem);
}

// ---------------------------------------------------------------------------
// Steiner

namespace {

CoverageSolution steiner_from_edges(const SteinerInstance& inst,
                                    std::vector<int> edges, bool approx) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  CoverageSolution s;
  s.approximate = approx;
  for (int e : edges) {
    s.elements.push_back({ElementKind::kEdge, e, 0});
    s.cost += inst.edges()[e].cost;
  }
  return s;
}

// Terminal MST in the metric closure, realized as shortest paths.
std::vector<int> terminal_mst_edges(const SteinerInstance& inst,
                                    const std::vector<int>& terms) {
  const std::size_t t = terms.size();
  std::vector<int> out;
  if (t < 2) return out;
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
    if (it > 0) {
      auto p = inst.path_edges(terms[from[x]], terms[x]);
      out.insert(out.end(), p.begin(), p.end());
    }
    for (std::size_t y = 0; y < t; ++y) {
      const double d = inst.dist(terms[x], terms[y]);
      if (!in[y] && d < best[y]) {
        best[y] = d;
        from[y] = x;
      }
    }
  }
  return out;
}

}  // namespace

CoverageSolution offline_opt_steiner(const SteinerInstance& inst,
                                     const Demands& demands) {
  std::vector<int> terms;
  for (int d : distinct(demands)) {
    if (d < 0 || d >= inst.num_vertices()) unknown("demand vertex");
    if (d != inst.root()) terms.push_back(d);
  }
  if (terms.empty()) return {};
  if (terms.size() > kSteinerExactTerminals) {
    std::vector<int> all = terms;
    all.insert(all.begin(), inst.root());
    return steiner_from_edges(inst, terminal_mst_edges(inst, all), true);
  }

  // Dreyfus-Wagner over graph edges. dp[S][v] is the cheapest tree spanning
  // terminal subset S and vertex v.
  const int n = inst.num_vertices();
  const std::size_t t = terms.size();
  const std::size_t full = (std::size_t{1} << t) - 1;
  std::vector<std::vector<double>> dp(full + 1, std::vector<double>(n, kInf));
  // back: >= 0 edge id used to reach v; < 0 encodes -(split mask) - 1.
  constexpr long kNone = std::numeric_limits<long>::min();
  std::vector<std::vector<long>> back(full + 1, std::vector<long>(n, kNone));
  std::vector<std::vector<std::pair<int, int>>> adj(n);
  for (std::size_t e = 0; e < inst.edges().size(); ++e) {
    const auto& ed = inst.edges()[e];
    adj[ed.u].push_back({ed.v, static_cast<int>(e)});
    adj[ed.v].push_back({ed.u, static_cast<int>(e)});
  }
  using Item = std::pair<double, int>;
  for (std::size_t mask = 1; mask <= full; ++mask) {
    auto& cur = dp[mask];
    auto& bk = back[mask];
    if (std::popcount(mask) == 1) {
      cur[terms[std::countr_zero(mask)]] = 0.0;
    } else {
      const std::size_t low = mask & (~mask + 1);
      for (std::size_t sub = (mask - 1) & mask; sub > 0;
           sub = (sub - 1) & mask) {
        // Each unordered split once: the part holding the lowest bit.
        if (!(sub & low)) continue;
        const auto& a = dp[sub];
        const auto& b = dp[mask ^ sub];
        for (int v = 0; v < n; ++v) {
          const double c = a[v] + b[v];
          if (c < cur[v]) {
            cur[v] = c;
            bk[v] = -static_cast<long>(sub) - 1;
          }
        }
      }
    }
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (int v = 0; v < n; ++v) {
      if (cur[v] < kInf) pq.push({cur[v], v});
    }
    while (!pq.empty()) {
      auto [d, x] = pq.top();
      pq.pop();
      if (d > cur[x]) continue;
      for (auto [y, e] : adj[x]) {
        const double nd = d + inst.edges()[e].cost;
        if (nd < cur[y]) {
          cur[y] = nd;
          bk[y] = e;
          pq.push({nd, y});
        }
      }
    }
  }

  std::vector<int> chosen;
  std::function<void(std::size_t, int)> collect = [&](std::size_t mask, int v) {
    while (true) {
      const long b = back[mask][v];
      if (b == kNone) return;  // v is the single terminal of mask
      if (b >= 0) {
        chosen.push_back(static_cast<int>(b));
        const auto& ed = inst.edges()[b];
        v = ed.u == v ? ed.v : ed.u;
        continue;
      }
      const auto sub = static_cast<std::size_t>(-(b + 1));
      collect(sub, v);
      mask ^= sub;
    }
  };
  collect(full, inst.root());
  return steiner_from_edges(inst, chosen, false);
}

// ---------------------------------------------------------------------------
// Facility location

double fl_objective(const FacilityLocationInstance& inst,
                    const Demands& demands, const std::vector<int>& open) {
  if (open.empty()) return demands.empty() ? 0.0 : kInf;
  double total = inst.facility_cost * static_cast<double>(open.size());
  for (int x : demands) {
    double best = kInf;
    for (int y : open) best = std::min(best, inst.metric.d(x, y));
    total += best;
  }
  return total;
}

std::vector<int> fl_open_facilities(const FacilityLocationInstance& inst,
                                    const Demands& demands,
                                    bool* approximate) {
  inst.validate();
  const int n = static_cast<int>(inst.metric.size());
  for (int d : demands) {
    if (d < 0 || d >= n) unknown("demand point");
  }
  const std::vector<int> cand = distinct(demands);
  if (approximate) *approximate = false;
  if (cand.empty()) return {};
  const std::size_t c = cand.size();

  if (c <= kFacilityExactCandidates) {
    // Precompute distances from each demand to each candidate.
    std::vector<std::vector<double>> dd(demands.size(),
                                        std::vector<double>(c));
    for (std::size_t j = 0; j < demands.size(); ++j) {
      for (std::size_t k = 0; k < c; ++k) {
        dd[j][k] = inst.metric.d(demands[j], cand[k]);
      }
    }
    double best = kInf;
    std::uint32_t best_mask = 0;
    for (std::uint32_t mask = 1; mask < (1u << c); ++mask) {
      double cost = inst.facility_cost * std::popcount(mask);
      if (cost >= best) continue;
      for (std::size_t j = 0; j < demands.size() && cost < best; ++j) {
        double m = kInf;
        for (std::uint32_t bits = mask; bits; bits &= bits - 1) {
          m = std::min(m, dd[j][std::countr_zero(bits)]);
        }
        cost += m;
      }
      if (cost < best) {
        best = cost;
        best_mask = mask;
      }
    }
    std::vector<int> open;
    for (std::size_t k = 0; k < c; ++k) {
      if (best_mask >> k & 1u) open.push_back(cand[k]);
    }
    return open;
  }

  if (approximate) *approximate = true;
  // Local search from the best single facility; moves are scanned in the
  // order open, close, swap and by increasing site index, best move wins.
  std::vector<char> in(c, 0);
  auto eval = [&](const std::vector<char>& flags) {
    std::vector<int> open;
    for (std::size_t k = 0; k < c; ++k) {
      if (flags[k]) open.push_back(cand[k]);
    }
    return fl_objective(inst, demands, open);
  };
  {
    double best = kInf;
    std::size_t arg = 0;
    for (std::size_t k = 0; k < c; ++k) {
      std::fill(in.begin(), in.end(), 0);
      in[k] = 1;
      const double v = eval(in);
      if (v < best) {
        best = v;
        arg = k;
      }
    }
    std::fill(in.begin(), in.end(), 0);
    in[arg] = 1;
  }
  double current = eval(in);
  while (true) {
    double best = current;
    std::vector<char> best_flags;
    auto consider = [&](std::vector<char>& f) {
      const double v = eval(f);
      if (v < best - 1e-12 * std::max(1.0, std::abs(best))) {
        best = v;
        best_flags = f;
      }
    };
    std::vector<char> f = in;
    for (std::size_t k = 0; k < c; ++k) {
      if (in[k]) continue;
      f[k] = 1;
      consider(f);
      f[k] = 0;
    }
    const long open_count = std::count(in.begin(), in.end(), 1);
    if (open_count > 1) {
      for (std::size_t k = 0; k < c; ++k) {
        if (!in[k]) continue;
        f[k] = 0;
        consider(f);
        f[k] = 1;
      }
    }
    for (std::size_t a = 0; a < c; ++a) {
      if (!in[a]) continue;
      for (std::size_t b = 0; b < c; ++b) {
        if (in[b]) continue;
        f[a] = 0;
        f[b] = 1;
        consider(f);
        f[a] = 1;
        f[b] = 0;
      }
    }
    if (best_flags.empty()) break;
    in = best_flags;
    current = best;
  }
  std::vector<int> open;
  for (std::size_t k = 0; k < c; ++k) {
    if (in[k]) open.push_back(cand[k]);
  }
  return open;
}

CoverageSolution offline_opt_fl(const FacilityLocationInstance& inst,
                                const Demands& demands) {
  bool approx = false;
  const std::vector<int> open = fl_open_facilities(inst, demands, &approx);
  CoverageSolution s;
  s.approximate = approx;
  for (int y : open) s.elements.push_back({ElementKind::kFacility, y, 0});
  // One connection per demand occurrence.
  for (int x : demands) {
    int arg = open.front();
    for (int y : open) {
      if (inst.metric.d(x, y) < inst.metric.d(x, arg)) arg = y;
    }
    s.elements.push_back({ElementKind::kConnection, x, arg});
  }
  std::sort(s.elements.begin(), s.elements.end());
  s.cost = fl_objective(inst, demands, open);
  return s;
}

// ---------------------------------------------------------------------------
// Set cover

CoverageSolution offline_opt_setcover(const SetCoverInstance& inst,
                                      const Demands& demands) {
  inst.validate();
  const std::vector<int> need = distinct(demands);
  for (int d : need) {
    if (d < 0 || d >= inst.universe) unknown("demand element");
  }
  if (need.empty()) return {};
  // Compact bitsets over the demanded elements.
  std::vector<int> pos(inst.universe, -1);
  for (std::size_t k = 0; k < need.size(); ++k) pos[need[k]] = static_cast<int>(k);
  const std::size_t words = (need.size() + 63) / 64;
  using Bits = std::vector<std::uint64_t>;
  const std::size_t m = inst.sets.size();
  std::vector<Bits> cover(m, Bits(words, 0));
  Bits any(words, 0);
  for (std::size_t s = 0; s < m; ++s) {
    for (int x : inst.sets[s]) {
      if (pos[x] >= 0) cover[s][pos[x] / 64] |= std::uint64_t{1} << (pos[x] % 64);
    }
    for (std::size_t w = 0; w < words; ++w) any[w] |= cover[s][w];
  }
  for (std::size_t k = 0; k < need.size(); ++k) {
    if (!(any[k / 64] >> (k % 64) & 1u)) {
      throw Error(ErrorCode::kInfeasibleDemand,
                  "demand " + std::to_string(need[k]) + " is in no set");
    }
  }
  auto first_uncovered = [&](const Bits& b) -> long {
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t miss = ~b[w];
      if (w + 1 == words && need.size() % 64) {
        miss &= (std::uint64_t{1} << (need.size() % 64)) - 1;
      }
      if (miss) return static_cast<long>(w * 64 + std::countr_zero(miss));
    }
    return -1;
  };
  auto new_count = [&](const Bits& have, std::size_t s) {
    int c = 0;
    for (std::size_t w = 0; w < words; ++w) c += std::popcount(cover[s][w] & ~have[w]);
    return c;
  };

  CoverageSolution sol;
  std::vector<int> chosen;
  if (m <= kSetCoverExactSets) {
    // Branch on the first uncovered demand: some chosen set must hold it.
    double best = kInf;
    std::vector<int> best_sets, stack;
    std::function<void(const Bits&, double)> go = [&](const Bits& have,
                                                      double cost) {
      if (cost >= best) return;
      const long k = first_uncovered(have);
      if (k < 0) {
        best = cost;
        best_sets = stack;
        return;
      }
      for (std::size_t s = 0; s < m; ++s) {
        if (!(cover[s][k / 64] >> (k % 64) & 1u)) continue;
        Bits next = have;
        for (std::size_t w = 0; w < words; ++w) next[w] |= cover[s][w];
        stack.push_back(static_cast<int>(s));
        go(next, cost + inst.costs[s]);
        stack.pop_back();
      }
    };
    go(Bits(words, 0), 0.0);
    chosen = best_sets;
  } else {
    sol.approximate = true;
    Bits have(words, 0);
    while (first_uncovered(have) >= 0) {
      double best = kInf;
      std::size_t arg = 0;
      for (std::size_t s = 0; s < m; ++s) {
        const int c = new_count(have, s);
        if (c == 0) continue;
        const double r = inst.costs[s] / c;
        if (r < best) {
          best = r;
          arg = s;
        }
      }
      chosen.push_back(static_cast<int>(arg));
      for (std::size_t w = 0; w < words; ++w) have[w] |= cover[arg][w];
    }
  }
  std::sort(chosen.begin(), chosen.end());
  for (int s : chosen) {
    sol.elements.push_back({ElementKind::kSet, s, 0});
    sol.cost += inst.costs[s];
  }
  return sol;
}

CoverageSolution offline_opt(const CoverageProblem& problem,
                             const Demands& demands) {
  return std::visit(
      [&](const auto& inst) -> CoverageSolution {
        using T = std::decay_t<decltype(inst)>;
        if constexpr (std::is_same_v<T, SteinerInstance>) {
          return offline_opt_steiner(inst, demands);
        } else if constexpr (std::is_same_v<T, FacilityLocationInstance>) {
          return offline_opt_fl(inst, demands);
        } else {
          return offline_opt_setcover(inst, demands);
        }
      },
      problem);
}

// ---------------------------------------------------------------------------
// JSON

CoverageProblem coverage_from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "graph") {
      std::vector<GraphEdge> edges;
      for (const auto& e : j.at("edges")) {
        edges.push_back(
            {e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
      }
      return SteinerInstance(j.at("vertices").get<int>(), std::move(edges),
                             j.value("root", 0));
    }
    if (kind == "metric") {
      FacilityLocationInstance fl{
          MetricSpace(
              j.at("distances").get<std::vector<std::vector<double>>>()),
          j.at("facility_cost").get<double>()};
      fl.validate();
      return fl;
    }
    if (kind == "sets") {
      SetCoverInstance sc;
      sc.universe = j.at("universe").get<int>();
      for (const auto& s : j.at("sets")) {
        sc.sets.push_back(s.at("members").get<std::vector<int>>());
        sc.costs.push_back(s.at("cost").get<double>());
      }
      sc.validate();
      return sc;
    }
    throw Error(ErrorCode::kConfig, "unknown coverage kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig,
                std::string("malformed coverage JSON: ") + e.what());
  }
}

nlohmann::json coverage_to_json(const CoverageProblem& problem) {
  return std::visit(
      [](const auto& inst) -> nlohmann::json {
        using T = std::decay_t<decltype(inst)>;
        if constexpr (std::is_same_v<T, SteinerInstance>) {
          auto edges = nlohmann::json::array();
          for (const auto& e : inst.edges()) edges.push_back({e.u, e.v, e.cost});
          return {{"kind", "graph"},
                  {"vertices", inst.num_vertices()},
                  {"edges", edges},
                  {"root", inst.root()}};
        } else if constexpr (std::is_same_v<T, FacilityLocationInstance>) {
          return {{"kind", "metric"},
                  {"distances", inst.metric.matrix()},
                  {"facility_cost", inst.facility_cost}};
        } else {
          auto sets = nlohmann::json::array();
          for (std::size_t s = 0; s < inst.sets.size(); ++s) {
            sets.push_back({{"members", inst.sets[s]}, {"cost", inst.costs[s]}});
          }
          return {{"kind", "sets"}, {"universe", inst.universe}, {"sets", sets}};
        }
      },
      problem);
}

nlohmann::json solution_to_json(const CoverageSolution& s) {
  auto elems = nlohmann::json::array();
  for (const auto& e : s.elements) {
    switch (e.kind) {
      case ElementKind::kEdge:
        elems.push_back({{"type", "edge"}, {"id", e.a}});
        break;
      case ElementKind::kFacility:
        elems.push_back({{"type", "facility"}, {"site", e.a}});
        break;
      case ElementKind::kConnection:
        elems.push_back(
            {{"type", "connection"}, {"demand", e.a}, {"facility", e.b}});
        break;
      case ElementKind::kSet:
        elems.push_back({{"type", "set"}, {"id", e.a}});
        break;
    }
  }
  return {{"elements", elems}, {"cost", s.cost}, {"approximate", s.approximate}};
}

CoverageSolution solution_from_json(const nlohmann::json& j) {
  CoverageSolution s;
  try {
    for (const auto& e : j.at("elements")) {
      const std::string t = e.at("type").get<std::string>();
      if (t == "edge") {
        s.elements.push_back({ElementKind::kEdge, e.at("id").get<int>(), 0});
      } else if (t == "facility") {
        s.elements.push_back(
            {ElementKind::kFacility, e.at("site").get<int>(), 0});
      } else if (t == "connection") {
        s.elements.push_back({ElementKind::kConnection,
                              e.at("demand").get<int>(),
                              e.at("facility").get<int>()});
      } else if (t == "set") {
        s.elements.push_back({ElementKind::kSet, e.at("id").get<int>(), 0});
      } else {
        throw Error(ErrorCode::kConfig, "unknown element type '" + t + "'");
      }
    }
    s.cost = j.value("cost", 0.0);
    s.approximate = j.value("approximate", false);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig,
                std::string("malformed solution JSON: ") + e.what());
  }
  return s;
}

}  // namespace mrfopt
