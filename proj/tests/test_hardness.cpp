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
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "mrfopt/hardness.hpp"
#include "oracles.hpp"

using namespace mrfopt;

namespace {

// Optimal online value by backward induction on the posterior of the death
// time T for every sample set and every T. T is the number of live values.
double brute_prophet(int n, double M, double p) {
  std::vector<double> pt(n + 1, 0.0);
  for (int t = 1; t <= n; ++t) {
    pt[t] = std::pow(1 / M, t - 1) * (t < n ? 1 - 1 / M : 1.0);
  }
  double total = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    const int k = std::popcount(mask);
    const double ps = std::pow(p, k) * std::pow(1 - p, n - k);
    for (int T = 1; T <= n; ++T) {
      // Death times consistent with what the sample shows.
      std::vector<double> post(n + 1, 0.0);
      for (int t = 1; t <= n; ++t) {
        bool ok = true;
        for (int i = 1; i <= n; ++i) {
          if (mask >> (i - 1) & 1) ok = ok && ((i <= t) == (i <= T));
        }
        if (ok) post[t] = pt[t];
      }
      // W(i) = max(M^{i-1}, Pr[T >= i+1 | T >= i] W(i+1)).
      std::vector<double> tail(n + 2, 0.0);
      for (int t = n; t >= 1; --t) tail[t] = tail[t + 1] + post[t];
      std::vector<double> W(n + 2, 0.0);
      std::vector<char> stop(n + 2, 1);
      W[n] = std::pow(M, n - 1);
      for (int i = n - 1; i >= 1; --i) {
        const double cont = tail[i] > 0 ? tail[i + 1] / tail[i] * W[i + 1] : 0.0;
        const double now = std::pow(M, i - 1);
        stop[i] = now >= cont;
        W[i] = std::max(now, cont);
      }
      // Realized value of the policy on this T.
      int s = 1;
      while (s < n && !stop[s]) ++s;
      total += ps * pt[T] * (s <= T ? std::pow(M, s - 1) : 0.0);
    }
  }
  return total;
}

}  // namespace

TEST_SUITE("hardness") {
  TEST_CASE("prophet chain law") {
    const auto chain = gen_prophet_hard(5, 4.0);
    const auto inst = prophet_instance(5, 4.0);
    double sum = 0;
    for (int t = 1; t <= 5; ++t) {
      Labels x(5, 0);
      for (int i = 0; i < t; ++i) x[i] = 1;
      CHECK(oracle::chain_path_probability(chain, x) ==
            doctest::Approx(inst.level_probability(t)));
      sum += inst.level_probability(t);
    }
    CHECK(sum == doctest::Approx(1.0));
    CHECK(inst.alive_value(2) == doctest::Approx(16.0));
    double emax = 0;
    for (int t = 1; t <= 5; ++t) emax += inst.level_probability(t) * inst.alive_value(t - 1);
    CHECK(prophet_expected_max(inst) == doctest::Approx(emax));
    CHECK_THROWS_AS(prophet_instance(1, 4.0), Error);
    CHECK_THROWS_AS(prophet_instance(4, 1.5), Error);
  }

  TEST_CASE("prophet DP matches brute-force induction") {
    for (int n = 2; n <= 8; ++n) {
      for (double M : {2.0, 3.5, 10.0}) {
        for (double p : {0.0, 0.1, 0.35, 0.8, 1.0}) {
          const auto r = optimal_online_psample_value(prophet_instance(n, M), p);
          CHECK(r.dp_value == doctest::Approx(brute_prophet(n, M, p)).epsilon(1e-9));
        }
      }
    }
  }

  TEST_CASE("prophet DP extremes") {
    const auto inst = prophet_instance(20, 1e6);
    CHECK(optimal_online_psample_value(inst, 0.0).dp_value == doctest::Approx(1.0));
    const auto full = optimal_online_psample_value(inst, 1.0);
    CHECK(full.dp_value == doctest::Approx(full.opt_value));
    for (double p : {0.05, 0.1, 0.3}) {
      const auto r = optimal_online_psample_value(inst, p);
      CHECK(r.dp_value <= 1 + p * 19 + 1e-6);
      CHECK(r.ratio == doctest::Approx(r.opt_value / r.dp_value));
    }
    CHECK_THROWS_AS(optimal_online_psample_value(inst, 1.5), Error);
  }

  TEST_CASE("prophet policy simulation matches the DP") {
    const auto inst = prophet_instance(6, 3.0);
    const auto r = optimal_online_psample_value(inst, 0.4);
    Rng rng(17);
    RunningStats s;
    for (int t = 0; t < 200000; ++t) s.add(simulate_prophet_policy(inst, 0.4, rng));
    CHECK(std::abs(s.mean() - r.dp_value) < 4 * s.stderr_mean());
  }

  TEST_CASE("diamond counts and structure") {
    for (int k = 0; k <= 5; ++k) {
      const auto d = gen_diamond(k);
      const int pow4 = 1 << (2 * k);
      CHECK(d.graph.edges().size() == static_cast<std::size_t>(pow4));
      CHECK(d.num_vertices() == 2 + 2 * (pow4 - 1) / 3);
      CHECK(d.arrivals == (1 << k));
      CHECK(d.graph.dist(0, d.terminal) == doctest::Approx(1 << k));
      for (int x = 2; x < d.num_vertices(); ++x) {
        CHECK(d.twin[d.twin[x]] == x);
        CHECK(d.rank[d.twin[x]] == d.rank[x]);
        CHECK(d.parent_u[x] == d.parent_u[d.twin[x]]);
        CHECK(d.rank[d.parent_u[x]] < d.rank[x]);
      }
    }
    CHECK_THROWS_AS(gen_diamond(-1), Error);
    CHECK_THROWS_AS(gen_diamond(11), Error);
  }

  TEST_CASE("diamond sampled arrivals are valid and use fair coins") {
    const auto d = gen_diamond(3);
    Rng rng(5);
    int first = 0;
    const int trials = 20000;
    for (int t = 0; t < trials; ++t) {
      const auto seq = sample_diamond_arrivals(d, rng);
      REQUIRE(seq.size() == static_cast<std::size_t>(d.arrivals));
      std::set<int> seen = {0};
      for (int x : seq) {
        CHECK_FALSE(seen.count(x));
        if (x != d.terminal) {
          CHECK(seen.count(d.parent_u[x]));
          CHECK(seen.count(d.parent_v[x]));
          CHECK_FALSE(seen.count(d.twin[x]));
        }
        seen.insert(x);
      }
      first += seq[1] == 2;
    }
    CHECK(std::abs(first - trials / 2.0) < 4 * std::sqrt(trials / 4.0));
  }

  TEST_CASE("diamond arrival chain is Markov and agrees with the history rule") {
    for (int k = 0; k <= kDiamondAuditMaxDepth; ++k) {
      const auto d = gen_diamond(k);
      const auto a = audit_diamond_chain(d);
      CHECK(a.markov);
      CHECK(a.valid_order);
      CHECK(a.paths == (std::size_t{1} << ((1 << k) - 1)));
    }
    CHECK_THROWS_AS(audit_diamond_chain(gen_diamond(5)), Error);
  }

  TEST_CASE("diamond chain probabilities") {
    const auto d = gen_diamond(2);
    const auto chain = diamond_arrival_chain(d);
    CHECK(chain.length() == static_cast<std::size_t>(d.arrivals));
    Rng rng(1);
    const auto seq = sample_diamond_arrivals(d, rng);
    CHECK(chain.path_probability(seq) == doctest::Approx(std::pow(0.5, d.arrivals - 1)));
  }

  TEST_CASE("transfer to MRF") {
    const auto chain = gen_prophet_hard(4, 3.0);
    const auto emb = transfer_hardness(chain, 0.1);
    CHECK(emb.mrf.num_coordinates() == 4);
    CHECK(emb.delta > 0.0);
    const auto big = diamond_arrival_chain(gen_diamond(3));
    try {
      transfer_hardness(big, 0.1);
      FAIL("expected cap error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kEnumerationCapExceeded);
    }
  }
}
