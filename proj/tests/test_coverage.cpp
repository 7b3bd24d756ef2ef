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
#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "mrfopt/coverage.hpp"

using namespace mrfopt;

namespace {

struct Dsu {
  std::vector<int> p;
  explicit Dsu(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
  void join(int a, int b) { p[find(a)] = find(b); }
};

SteinerInstance random_graph(std::mt19937_64& g, int n, int m) {
  std::vector<GraphEdge> e;
  for (int v = 1; v < n; ++v) {
    e.push_back({static_cast<int>(g() % v), v, static_cast<double>(1 + g() % 5)});
  }
  while (static_cast<int>(e.size()) < m) {
    const int u = g() % n, v = g() % n;
    if (u != v) e.push_back({u, v, static_cast<double>(1 + g() % 5)});
  }
  return SteinerInstance(n, e, 0);
}

double brute_steiner(const SteinerInstance& s, const Demands& d) {
  const auto& e = s.edges();
  double best = kInf;
  for (std::uint32_t mask = 0; mask < (1u << e.size()); ++mask) {
    Dsu u(s.num_vertices());
    double c = 0;
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (mask >> k & 1) {
        u.join(e[k].u, e[k].v);
        c += e[k].cost;
      }
    }
    bool ok = true;
    for (int x : d) ok = ok && u.find(x) == u.find(s.root());
    if (ok) best = std::min(best, c);
  }
  return best;
}

FacilityLocationInstance random_metric(std::mt19937_64& g, int n, double f) {
  // Points on a plane with Euclidean distance form a metric.
  std::uniform_real_distribution<double> u(0, 10);
  std::vector<std::pair<double, double>> pts(n);
  for (auto& p : pts) p = {u(g), u(g)};
  std::vector<std::vector<double>> d(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      d[i][j] = std::hypot(pts[i].first - pts[j].first, pts[i].second - pts[j].second);
    }
  }
  return {MetricSpace(d), f};
}

double brute_fl(const FacilityLocationInstance& f, const Demands& d) {
  std::vector<int> cand = d;
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  double best = kInf;
  for (std::uint32_t mask = 1; mask < (1u << cand.size()); ++mask) {
    double c = f.facility_cost * std::popcount(mask);
    for (int x : d) {
      double m = kInf;
      for (std::size_t k = 0; k < cand.size(); ++k) {
        if (mask >> k & 1) m = std::min(m, f.metric.d(x, cand[k]));
      }
      c += m;
    }
    best = std::min(best, c);
  }
  return d.empty() ? 0.0 : best;
}

SetCoverInstance random_sets(std::mt19937_64& g, int universe, int sets) {
  SetCoverInstance s;
  s.universe = universe;
  for (int k = 0; k < sets; ++k) {
    std::vector<int> m;
    for (int x = 0; x < universe; ++x) {
      if (g() % 3 == 0) m.push_back(x);
    }
    if (m.empty()) m.push_back(static_cast<int>(g() % universe));
    s.sets.push_back(m);
    s.costs.push_back(static_cast<double>(1 + g() % 6));
  }
  // Make every element coverable.
  for (int x = 0; x < universe; ++x) s.sets[x % sets].push_back(x);
  for (auto& m : s.sets) {
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end());
  }
  return s;
}

double brute_setcover(const SetCoverInstance& s, const Demands& d) {
  double best = kInf;
  for (std::uint32_t mask = 0; mask < (1u << s.sets.size()); ++mask) {
    std::vector<char> cov(s.universe, 0);
    double c = 0;
    for (std::size_t k = 0; k < s.sets.size(); ++k) {
      if (mask >> k & 1) {
        c += s.costs[k];
        for (int x : s.sets[k]) cov[x] = 1;
      }
    }
    bool ok = true;
    for (int x : d) ok = ok && cov[x];
    if (ok) best = std::min(best, c);
  }
  return best;
}

Demands random_demands(std::mt19937_64& g, int n, int count, bool allow_root = true) {
  Demands d;
  for (int i = 0; i < count; ++i) {
    int x = static_cast<int>(g() % n);
    if (!allow_root && x == 0) x = 1;
    d.push_back(x);
  }
  return d;
}

}  // namespace

TEST_SUITE("coverage") {
  TEST_CASE("feasibility basics") {
    const SteinerInstance path(3, {{0, 1, 1.0}, {1, 2, 1.0}}, 0);
    const CoverageProblem p = path;
    CHECK(check_feasible(p, {}, {}));
    CoverageSolution ra;
    ra.elements = {{ElementKind::kEdge, 0, 0}};
    CHECK_FALSE(check_feasible(p, {2}, ra));
    ra.elements.push_back({ElementKind::kEdge, 1, 0});
    CHECK(check_feasible(p, {2}, ra));
    CoverageSolution bad;
    bad.elements = {{ElementKind::kEdge, 7, 0}};
    try {
      check_feasible(p, {2}, bad);
      FAIL("expected UnknownIdentifier");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kUnknownIdentifier);
    }
  }

  TEST_CASE("steiner exact equals brute force over edge subsets") {
    std::mt19937_64 g(1);
    for (int rep = 0; rep < 100; ++rep) {
      const int n = 4 + rep % 4;
      const SteinerInstance s = random_graph(g, n, std::min(8, n + 2));
      const Demands d = random_demands(g, n, 1 + rep % 4);
      const auto sol = offline_opt_steiner(s, d);
      CHECK_FALSE(sol.approximate);
      CHECK(sol.cost == doctest::Approx(brute_steiner(s, d)));
      CHECK(check_feasible(CoverageProblem(s), d, sol));
      CHECK(solution_cost(CoverageProblem(s), sol) == doctest::Approx(sol.cost));
    }
  }

  TEST_CASE("steiner single demand and star") {
    std::mt19937_64 g(2);
    const SteinerInstance s = random_graph(g, 6, 9);
    for (int x = 1; x < 6; ++x) {
      CHECK(offline_opt_steiner(s, {x}).cost == doctest::Approx(s.dist(0, x)));
    }
    // Root 0 at the end of one spoke; center 1; leaves 2..5.
    std::vector<GraphEdge> star = {{0, 1, 1}, {1, 2, 1}, {1, 3, 1}, {1, 4, 1}};
    const SteinerInstance st(5, star, 0);
    CHECK(offline_opt_steiner(st, {2, 3, 4}).cost == doctest::Approx(4.0));
  }

  TEST_CASE("steiner approximation above the exact terminal limit") {
    std::mt19937_64 g(3);
    const SteinerInstance s = random_graph(g, 20, 40);
    Demands d;
    for (int x = 1; x <= 14; ++x) d.push_back(x);
    const auto sol = offline_opt_steiner(s, d);
    CHECK(sol.approximate);
    CHECK(check_feasible(CoverageProblem(s), d, sol));
  }

  TEST_CASE("facility location exact equals brute force") {
    std::mt19937_64 g(4);
    for (int rep = 0; rep < 100; ++rep) {
      const int n = 2 + rep % 7;
      const auto f = random_metric(g, n, 0.5 + rep % 5);
      const Demands d = random_demands(g, n, 1 + rep % 6);
      const auto sol = offline_opt_fl(f, d);
      CHECK(sol.cost == doctest::Approx(brute_fl(f, d)));
      CHECK(check_feasible(CoverageProblem(f), d, sol));
      CHECK(solution_cost(CoverageProblem(f), sol) == doctest::Approx(sol.cost));
    }
  }

  TEST_CASE("facility location worked examples") {
    const FacilityLocationInstance one{MetricSpace(std::vector<std::vector<double>>{{0.0}}), 3.0};
    CHECK(offline_opt_fl(one, {0}).cost == doctest::Approx(3.0));
    const FacilityLocationInstance two{MetricSpace({{0, 10}, {10, 0}}), 1.0};
    CHECK(offline_opt_fl(two, {0, 1}).cost == doctest::Approx(2.0));
    CHECK(fl_open_facilities(two, {0, 1}).size() == 2);
  }

  TEST_CASE("facility location local search stays within 3x of exact") {
    std::mt19937_64 g(5);
    for (int rep = 0; rep < 4; ++rep) {
      const auto f = random_metric(g, 16, 2.0 + rep);
      Demands d(16);
      std::iota(d.begin(), d.end(), 0);
      bool approx = false;
      const auto open = fl_open_facilities(f, d, &approx);
      CHECK(approx);
      CHECK(fl_objective(f, d, open) <= 3.0 * brute_fl(f, d) + 1e-9);
    }
  }

  TEST_CASE("metric validation") {
    CHECK_THROWS_AS(MetricSpace({{0, 1}, {2, 0}}), Error);
    CHECK_THROWS_AS(MetricSpace({{0, 1, 5}, {1, 0, 1}, {5, 1, 0}}), Error);
    CHECK_THROWS_AS(MetricSpace(std::vector<std::vector<double>>{{1.0}}), Error);
  }

  TEST_CASE("set cover exact equals brute force") {
    std::mt19937_64 g(6);
    for (int rep = 0; rep < 100; ++rep) {
      const auto s = random_sets(g, 6 + rep % 4, 3 + rep % 8);
      const Demands d = random_demands(g, s.universe, 1 + rep % 5);
      const auto sol = offline_opt_setcover(s, d);
      CHECK(sol.cost == doctest::Approx(brute_setcover(s, d)));
      CHECK(check_feasible(CoverageProblem(s), d, sol));
    }
  }

  TEST_CASE("set cover examples and errors") {
    SetCoverInstance s;
    s.universe = 4;
    s.sets = {{0, 1, 2}, {0}, {1}, {2}};
    s.costs = {3, 5, 5, 5};
    CHECK(offline_opt_setcover(s, {0, 2}).cost == doctest::Approx(3.0));
    const auto empty = offline_opt_setcover(s, {});
    CHECK(empty.elements.empty());
    CHECK(empty.cost == 0.0);
    try {
      offline_opt_setcover(s, {3});
      FAIL("expected InfeasibleDemand");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kInfeasibleDemand);
    }
  }

  TEST_CASE("union feasibility, anti-monotonicity and subadditivity") {
    std::mt19937_64 g(7);
    for (int rep = 0; rep < 200; ++rep) {
      CoverageProblem p;
      int points = 0;
      switch (rep % 3) {
        case 0:
          p = random_graph(g, 7, 10);
          points = 7;
          break;
        case 1:
          p = random_metric(g, 7, 1.5);
          points = 7;
          break;
        default:
          p = random_sets(g, 7, 6);
          points = 7;
      }
      const Demands d1 = random_demands(g, points, 1 + rep % 3);
      const Demands d2 = random_demands(g, points, 1 + rep % 4);
      Demands both = d1;
      both.insert(both.end(), d2.begin(), d2.end());
      const auto s1 = offline_opt(p, d1);
      const auto s2 = offline_opt(p, d2);
      const auto u = unite(p, s1, s2);
      CHECK(check_feasible(p, both, u));
      // A solution for the union serves each part.
      const auto sb = offline_opt(p, both);
      CHECK(check_feasible(p, d1, sb));
      CHECK(sb.cost <= s1.cost + s2.cost + 1e-9);
    }
  }

  TEST_CASE("json round trip of problems and solutions") {
    std::mt19937_64 g(8);
    const CoverageProblem p = random_graph(g, 5, 7);
    const auto j = coverage_to_json(p);
    CHECK(coverage_to_json(coverage_from_json(j)) == j);
    const auto sol = offline_opt(p, {1, 3});
    CHECK(solution_to_json(solution_from_json(solution_to_json(sol))) ==
          solution_to_json(sol));
    CHECK_THROWS_AS(coverage_from_json(nlohmann::json{{"kind", "tsp"}}), Error);
  }
}
