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

#ifndef MRFOPT_COMMON_HPP_
#define MRFOPT_COMMON_HPP_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace mrfopt {

enum class ErrorCode {
  kInvalidArgument,
  kEnumerationCapExceeded,
  kZeroProbabilityConditioning,
  kUnknownIdentifier,
  kInfeasibleDemand,
  kConditionalBelowP,
  kConfig,
  kIo,
  kNumeric,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline constexpr std::size_t kDefaultEnumerationCap = std::size_t{1} << 20;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Thin wrapper over mt19937_64. The uniform mapping is done by hand so the
// stream of doubles does not depend on the standard library vendor.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  // Draws an index with probability proportional to weights.
  std::size_t categorical(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

// Deterministic 64-bit mixer used to derive independent sub-streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

double log_sum_exp(std::span<const double> values);

// Online log-sum-exp that never materializes exp of a large argument.
class LogSumExp {
 public:
  void add(double x);
  double value() const;

 private:
  double max_ = -kInf;
  double sum_ = 0.0;
};

// Numerically stable softmax of log-weights, written into `out`.
void softmax(std::span<const double> logits, std::span<double> out);

// Welford running mean and variance.
class RunningStats {
 public:
  void add(double x);
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  // Sample variance (n - 1 denominator); 0 for fewer than two samples.
  double variance() const;
  double stderr_mean() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Standard error of mean(a)/mean(b) from paired samples via the delta method.
double ratio_stderr(std::span<const double> a, std::span<const double> b);

// Runs f(i) for every i in [0, n) on up to `threads` workers. Work items are
// independent, so results written by index keep their order. If several
// items throw, the exception of the lowest index is rethrown.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_at = n;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t k = std::min<std::size_t>(threads, n);
  pool.reserve(k);
  for (std::size_t t = 0; t < k; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace mrfopt

#endif  // MRFOPT_COMMON_HPP_
