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

#include "mrfopt/hardness.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <string>
#include <tuple>

namespace mrfopt {
namespace {

[[noreturn]] void invalid(const std::string& msg) {
  throw Error(ErrorCode::kInvalidArgument, msg);
}

using Real = long double;

// Pr[T = t] * M^{t-1}: constant in t except at the last level.
Real level_weight(const ProphetHardInstance& inst, int t) {
  return t < inst.n ? 1.0L - 1.0L / static_cast<Real>(inst.M) : 1.0L;
}

// First position at which the optimal policy stops, given the last live
// sample K (0 if none) and the first dead sample J (n + 1 if none).
// Positions are 1-based. Values are normalized by M^{i-1} at position i.
int stop_index(const ProphetHardInstance& inst, int K, int J) {
  const Real M = static_cast<Real>(inst.M);
  const int start = std::max(K, 1);
  const int last = J - 1;
  std::vector<Real> value(inst.n + 2, 1.0L);
  std::vector<char> stop(inst.n + 2, 1);
  // suffix = S(i + 1) with S(i) = sum_{t=i}^{last} r(t) M^{-(t-i)}, so the
  // normalized continuation value at i is S(i + 1) / S(i) * value[i + 1].
  Real suffix = level_weight(inst, last);
  for (int i = last - 1; i >= start; --i) {
    const Real s_i = level_weight(inst, i) + suffix / M;
    const Real cont = suffix / s_i * value[i + 1];
    stop[i] = 1.0L >= cont;
    value[i] = std::max(1.0L, cont);
    suffix = s_i;
  }
  for (int i = start; i < last; ++i) {
    if (stop[i]) return i;
  }
  return last;
}

Real ipow(Real base, int e) {
  Real r = 1.0L;
  for (int k = 0; k < e; ++k) r *= base;
  return r;
}

}  // namespace

double ProphetHardInstance::alive_value(int i) const {
  return std::pow(M, static_cast<double>(i));
}

double ProphetHardInstance::level_probability(int t) const {
  if (t < 1 || t > n) return 0.0;
  const double lead = std::pow(1.0 / M, static_cast<double>(t - 1));
  return t < n ? lead * (1.0 - 1.0 / M) : lead;
}

ProphetHardInstance prophet_instance(int n, double M) {
  if (n < 2) invalid("prophet instance needs n >= 2");
  if (!(M >= 2.0) || !std::isfinite(M)) invalid("prophet instance needs M >= 2");
  return {n, M};
}

MarkovChainSpec gen_prophet_hard(int n, double M) {
  prophet_instance(n, M);
  MarkovChainSpec chain;
  chain.initial = {0.0, 1.0};
  for (int k = 0; k + 1 < n; ++k) {
    chain.transitions.push_back({2, 2, {1.0, 0.0, 1.0 - 1.0 / M, 1.0 / M}});
  }
  chain.validate();
  return chain;
}

double prophet_expected_max(const ProphetHardInstance& inst) {
  Real total = 0.0L;
  for (int t = 1; t <= inst.n; ++t) total += level_weight(inst, t);
  return static_cast<double>(total);
}

ProphetDpResult optimal_online_psample_value(const ProphetHardInstance& inst,
                                             double p) {
  prophet_instance(inst.n, inst.M);
  if (!(p >= 0.0 && p <= 1.0)) invalid("p must be in [0, 1]");
  const int n = inst.n;
  const Real M = static_cast<Real>(inst.M);
  const Real q = 1.0L - static_cast<Real>(p);
  Real total = 0.0L;
  for (int K = 0; K <= n; ++K) {
    for (int J = std::max(K + 1, 2); J <= n + 1; ++J) {
      const int s = stop_index(inst, K, J);
      for (int t = std::max(K, 1); t < J; ++t) {
        if (s > t) continue;
        const Real pk = K == 0 ? ipow(q, t) : static_cast<Real>(p) * ipow(q, t - K);
        const Real pj = J == n + 1 ? ipow(q, n - t)
                                   : static_cast<Real>(p) * ipow(q, J - t - 1);
        // Pr[T = t] M^{s-1} = r(t) M^{s-t}.
        total += pk * pj * level_weight(inst, t) / ipow(M, t - s);
      }
    }
  }
  ProphetDpResult r;
  r.p = p;
  r.n = n;
  r.M = inst.M;
  r.dp_value = static_cast<double>(total);
  r.opt_value = prophet_expected_max(inst);
  r.ratio = r.opt_value / r.dp_value;
  return r;
}

nlohmann::json prophet_dp_to_json(const ProphetDpResult& r) {
  return {{"p", r.p},
          {"n", r.n},
          {"M", r.M},
          {"dp_value", r.dp_value},
          {"opt_value", r.opt_value},
          {"ratio", r.ratio}};
}

double simulate_prophet_policy(const ProphetHardInstance& inst, double p,
                               Rng& rng) {
  int T = 1;
  while (T < inst.n && rng.uniform() < 1.0 / inst.M) ++T;
  int K = 0;
  int J = inst.n + 1;
  for (int i = 1; i <= inst.n; ++i) {
    if (!rng.bernoulli(p)) continue;
    if (i <= T) {
      K = i;
    } else if (J == inst.n + 1) {
      J = i;
    }
  }
  const int s = stop_index(inst, K, J);
  return s <= T ? inst.alive_value(s - 1) : 0.0;
}

// ---------------------------------------------------------------------------
// Diamond graphs

DiamondSteinerInstance gen_diamond(int k) {
  if (k < 0) invalid("diamond depth must be >= 0");
  if (k > 10) invalid("diamond depth above 10 is too large");
  DiamondSteinerInstance d;
  d.k = k;
  d.rank = {0, 0};
  d.twin = {-1, -1};
  d.parent_u = {-1, -1};
  d.parent_v = {-1, -1};
  d.home_edge = {-1, -1};
  d.first_edge = {-1, -1};
  d.second_edge = {-1, -1};
  d.tree.push_back({0, 1, 0, -1, -1});
  std::vector<int> frontier = {0};
  for (int level = 1; level <= k; ++level) {
    std::vector<int> next;
    for (int e : frontier) {
      const int u = d.tree[e].u;
      const int v = d.tree[e].v;
      const int a = static_cast<int>(d.rank.size());
      d.tree[e].pair = a;
      for (int x : {a, a + 1}) {
        d.rank.push_back(level);
        d.twin.push_back(x == a ? a + 1 : a);
        d.parent_u.push_back(u);
        d.parent_v.push_back(v);
        d.home_edge.push_back(e);
        d.first_edge.push_back(static_cast<int>(d.tree.size()));
        d.tree.push_back({u, x, level, x, -1});
        d.second_edge.push_back(static_cast<int>(d.tree.size()));
        d.tree.push_back({x, v, level, x, -1});
        next.push_back(d.first_edge.back());
        next.push_back(d.second_edge.back());
      }
    }
    frontier = std::move(next);
  }
  std::vector<GraphEdge> edges;
  for (int e : frontier) edges.push_back({d.tree[e].u, d.tree[e].v, 1.0});
  d.graph = SteinerInstance(static_cast<int>(d.rank.size()), std::move(edges), 0);
  // The process length does not depend on the coins; count it by walking
  // the first twin of every pair.
  d.arrivals = 1;
  for (int x = d.terminal;;) {
    const auto next = diamond_successor_pair(d, x);
    if (next.empty()) break;
    x = next.front();
    ++d.arrivals;
  }
  return d;
}

std::vector<int> diamond_successor_pair(const DiamondSteinerInstance& inst,
                                        int x) {
  auto pair_on = [&](int e) -> std::vector<int> {
    const int a = inst.tree[e].pair;
    if (a < 0) return {};
    return {a, a + 1};
  };
  if (x < 0 || x >= inst.num_vertices()) invalid("vertex out of range");
  if (x == 0) return {};
  if (x == inst.terminal) return pair_on(0);
  if (inst.rank[x] < inst.k) return pair_on(inst.first_edge[x]);
  // Leaf: climb until a pending second sub-edge is found.
  int e = inst.home_edge[x];
  while (inst.tree[e].level > 0) {
    const int y = inst.tree[e].creator;
    if (e == inst.first_edge[y]) return pair_on(inst.second_edge[y]);
    e = inst.home_edge[y];
  }
  return {};
}

MarkovChainSpec diamond_arrival_chain(const DiamondSteinerInstance& inst) {
  const int nv = inst.num_vertices();
  MarkovChainSpec chain;
  chain.initial.assign(nv, 0.0);
  chain.initial[inst.terminal] = 1.0;
  StochasticMatrix P{nv, nv, std::vector<double>(
                                 static_cast<std::size_t>(nv) * nv, 0.0)};
  for (int x = 0; x < nv; ++x) {
    const auto next = diamond_successor_pair(inst, x);
    if (next.empty()) {
      P.data[static_cast<std::size_t>(x) * nv + x] = 1.0;
    } else {
      for (int y : next) {
        P.data[static_cast<std::size_t>(x) * nv + y] = 1.0 / next.size();
      }
    }
  }
  for (int s = 1; s < inst.arrivals; ++s) chain.transitions.push_back(P);
  chain.validate();
  return chain;
}

std::vector<int> sample_diamond_arrivals(const DiamondSteinerInstance& inst,
                                         Rng& rng) {
  std::vector<int> seq = {inst.terminal};
  while (true) {
    const auto next = diamond_successor_pair(inst, seq.back());
    if (next.empty()) break;
    seq.push_back(next[rng.below(next.size())]);
  }
  return seq;
}

DiamondAudit audit_diamond_chain(const DiamondSteinerInstance& inst) {
  if (inst.k > kDiamondAuditMaxDepth) {
    throw Error(ErrorCode::kEnumerationCapExceeded,
                "diamond audit needs k <= 4");
  }
  const int nv = inst.num_vertices();
  // Hop distance from the root.
  std::vector<int> hop(nv, -1);
  {
    std::vector<std::vector<int>> adj(nv);
    for (const auto& e : inst.graph.edges()) {
      adj[e.u].push_back(e.v);
      adj[e.v].push_back(e.u);
    }
    std::deque<int> q = {0};
    hop[0] = 0;
    while (!q.empty()) {
      const int u = q.front();
      q.pop_front();
      for (int w : adj[u]) {
        if (hop[w] < 0) {
          hop[w] = hop[u] + 1;
          q.push_back(w);
        }
      }
    }
  }
  DiamondAudit audit;
  std::vector<char> arrived(nv, 0);
  arrived[0] = 1;
  std::vector<int> seq;
  std::function<void(int)> visit = [&](int x) {
    if (arrived[x] && x != 0) audit.valid_order = false;
    if (x != inst.terminal &&
        (!arrived[inst.parent_u[x]] || !arrived[inst.parent_v[x]])) {
      audit.valid_order = false;
    }
    arrived[x] = 1;
    seq.push_back(x);
    // History rule: deepest eligible pair, then nearest to the root.
    int best = -1;
    for (std::size_t e = 0; e < inst.tree.size(); ++e) {
      const auto& te = inst.tree[e];
      if (te.pair < 0 || !arrived[te.u] || !arrived[te.v]) continue;
      if (arrived[te.pair] || arrived[te.pair + 1]) continue;
      if (best < 0) {
        best = static_cast<int>(e);
        continue;
      }
      const auto& b = inst.tree[best];
      if (std::make_tuple(-te.level, hop[te.u], te.pair) <
          std::make_tuple(-b.level, hop[b.u], b.pair)) {
        best = static_cast<int>(e);
      }
    }
    const auto expect = diamond_successor_pair(inst, x);
    if (best < 0) {
      if (!expect.empty()) audit.markov = false;
      if (static_cast<int>(seq.size()) != inst.arrivals) {
        audit.valid_order = false;
      }
      ++audit.paths;
    } else {
      const int a = inst.tree[best].pair;
      if (expect != std::vector<int>{a, a + 1}) audit.markov = false;
      for (int y : {a, a + 1}) visit(y);
    }
    seq.pop_back();
    arrived[x] = 0;
  };
  visit(inst.terminal);
  return audit;
}

nlohmann::json diamond_to_json(const DiamondSteinerInstance& inst) {
  return {{"k", inst.k},
          {"graph", coverage_to_json(CoverageProblem(inst.graph))},
          {"rank", inst.rank},
          {"twin", inst.twin},
          {"parent_u", inst.parent_u},
          {"parent_v", inst.parent_v},
          {"terminal", inst.terminal},
          {"arrivals", inst.arrivals}};
}

ChainEmbedding transfer_hardness(const MarkovChainSpec& chain, double epsilon,
                                 std::size_t cap) {
  chain.validate();
  chain.type_space().require_enumerable(cap);
  return chain_to_mrf(chain, epsilon);
}

}  // namespace mrfopt
