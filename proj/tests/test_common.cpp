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
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "mrfopt/common.hpp"

using namespace mrfopt;

TEST_SUITE("common") {
  TEST_CASE("rng streams are reproducible and uniform lies in [0, 1)") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
      const double x = a.uniform();
      CHECK(x == b.uniform());
      CHECK(x >= 0.0);
      CHECK(x < 1.0);
    }
  }

  TEST_CASE("below covers its range without bias") {
    Rng r(7);
    std::vector<int> count(6, 0);
    const int n = 60000;
    for (int i = 0; i < n; ++i) {
      const auto k = r.below(6);
      REQUIRE(k < 6);
      ++count[k];
    }
    for (int c : count) CHECK(std::abs(c - n / 6.0) < 5 * std::sqrt(n / 6.0));
  }

  TEST_CASE("categorical follows weights and never picks zero weight") {
    Rng r(3);
    const std::vector<double> w = {1.0, 0.0, 3.0};
    std::vector<int> count(3, 0);
    for (int i = 0; i < 40000; ++i) ++count[r.categorical(w)];
    CHECK(count[1] == 0);
    CHECK(count[2] / 40000.0 == doctest::Approx(0.75).epsilon(0.02));
  }

  TEST_CASE("derived seeds differ across streams and seeds") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 50; ++s) {
      for (std::uint64_t k = 0; k < 30; ++k) seen.insert(derive_seed(s, k));
    }
    CHECK(seen.size() == 1500);
    CHECK(derive_seed(5, 1) == derive_seed(5, 1));
  }

  TEST_CASE("log-sum-exp is stable for large and tiny arguments") {
    const std::vector<double> big = {1000.0, 1000.0};
    CHECK(log_sum_exp(big) == doctest::Approx(1000.0 + std::log(2.0)));
    const std::vector<double> small = {-1000.0, -1001.0};
    CHECK(log_sum_exp(small) ==
          doctest::Approx(-1000.0 + std::log1p(std::exp(-1.0))));
    LogSumExp acc;
    for (double x : {3.0, -2.0, 7.5, 0.0}) acc.add(x);
    const std::vector<double> all = {3.0, -2.0, 7.5, 0.0};
    CHECK(acc.value() == doctest::Approx(log_sum_exp(all)));
  }

  TEST_CASE("softmax sums to one and matches direct evaluation") {
    const std::vector<double> l = {0.5, -1.0, 2.0};
    std::vector<double> p(3);
    softmax(l, p);
    const double z = std::exp(0.5) + std::exp(-1.0) + std::exp(2.0);
    CHECK(p[0] == doctest::Approx(std::exp(0.5) / z));
    CHECK(p[2] == doctest::Approx(std::exp(2.0) / z));
    CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0));
  }

  TEST_CASE("running stats agree with a two-pass computation") {
    const std::vector<double> x = {1.5, 2.0, -3.0, 4.25, 0.0, 10.0};
    RunningStats s;
    for (double v : x) s.add(v);
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    CHECK(s.mean() == doctest::Approx(mean));
    CHECK(s.variance() == doctest::Approx(ss / (x.size() - 1)));
    CHECK(s.stderr_mean() == doctest::Approx(std::sqrt(ss / (x.size() - 1) / x.size())));
    RunningStats one;
    one.add(3.0);
    CHECK(one.variance() == 0.0);
  }

  TEST_CASE("ratio standard error matches the delta method") {
    const std::vector<double> a = {1.0, 2.0, 3.0, 5.0};
    const std::vector<double> b = {2.0, 2.5, 3.5, 4.0};
    const double n = 4, ma = 2.75, mb = 3.0;
    double va = 0, vb = 0, c = 0;
    for (int i = 0; i < 4; ++i) {
      va += (a[i] - ma) * (a[i] - ma);
      vb += (b[i] - mb) * (b[i] - mb);
      c += (a[i] - ma) * (b[i] - mb);
    }
    va /= 3;
    vb /= 3;
    c /= 3;
    const double r = ma / mb;
    const double expect = std::sqrt((va - 2 * r * c + r * r * vb) / (mb * mb) / n);
    CHECK(ratio_stderr(a, b) == doctest::Approx(expect));
    // Proportional samples have zero ratio error.
    const std::vector<double> twice = {2.0, 4.0, 6.0, 10.0};
    CHECK(ratio_stderr(twice, a) == doctest::Approx(0.0).epsilon(1e-12));
  }

  TEST_CASE("parallel_for keeps index order and rethrows the lowest failure") {
    std::vector<int> out(1000, -1);
    parallel_for(out.size(), 8, [&](std::size_t i) { out[i] = static_cast<int>(i * i % 97); });
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i % 97));
    try {
      parallel_for(100, 4, [](std::size_t i) {
        if (i == 17 || i == 60) throw std::runtime_error(std::to_string(i));
      });
      FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "17");
    }
  }

  TEST_CASE("error codes carry their names") {
    Error e(ErrorCode::kConfig, "x");
    CHECK(e.code() == ErrorCode::kConfig);
    CHECK(std::string(error_code_name(ErrorCode::kInfeasibleDemand)).size() > 0);
  }
}
