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

// Sample-revelation models: independent p-samples, the sign-paired game of
// Googol, and sample sets governed by an indicator MRF, plus the couplings
// that turn one into another.

#ifndef MRFOPT_SAMPLE_MODELS_HPP_
#define MRFOPT_SAMPLE_MODELS_HPP_

#include <cstdint>
#include <vector>

#include "mrfopt/common.hpp"
#include "mrfopt/mrf.hpp"

namespace mrfopt {

struct PSampleDraw {
  std::vector<int> values;
  double p = 0.0;
  std::vector<char> in_sample;  // parallel to `values`
  std::vector<int> arrivals;    // values not sampled, in original order

  std::vector<int> sample() const;
};

PSampleDraw draw_p_sample(const std::vector<int>& values, double p,
                          std::uint64_t seed);

// Row 1 holds v^{1}_i, row -1 holds v^{-1}_i.
struct GoogolPair {
  int plus = 0;
  int minus = 0;
};

struct GoogolInstance {
  std::vector<GoogolPair> pairs;
  std::vector<int> sigma;  // realized signs in {-1, +1}

  std::size_t size() const { return pairs.size(); }
  // The identifier v^{s}_i.
  int value(std::size_t i, int s) const {
    return s > 0 ? pairs[i].plus : pairs[i].minus;
  }
};

struct GoogolBuild {
  GoogolInstance instance;
  std::vector<int> coins;  // fair signs; equal to instance.sigma
};

// Pairs (s_i, r_i) if coin_i = 1 and (r_i, s_i) otherwise, so the sample is
// always v^{sigma_i}_i.
GoogolBuild build_googol_from_prophet(const std::vector<int>& sample_vec,
                                      const std::vector<int>& real_vec,
                                      std::uint64_t seed);
GoogolBuild build_googol_with_coins(const std::vector<int>& sample_vec,
                                    const std::vector<int>& real_vec,
                                    const std::vector<int>& coins);

// Sign label convention for sign MRFs: label 1 is +1, label 0 is -1.
inline int sign_of_label(int label) { return label == 1 ? 1 : -1; }
inline int label_of_sign(int sign) { return sign > 0 ? 1 : 0; }

// Law of the signs given the unordered pairs when samples and reals are two
// independent draws from `mrf`. `pairs` holds labels of each coordinate.
// Vertex potentials cancel; edges become psi(v^sigma) + psi(v^-sigma).
MrfSpec conditional_sign_mrf(const MrfSpec& mrf,
                             const std::vector<GoogolPair>& pairs);

// Pr[sigma] == Pr[-sigma] check by enumeration.
bool is_sign_symmetric(const MrfSpec& sign_mrf, double tol = 1e-12,
                       std::size_t cap = kDefaultEnumerationCap);

struct SplitSide {
  std::vector<int> sample;
  std::vector<int> real;  // original coordinate order
};

struct GoogolSplit {
  SplitSide first;   // row 1
  SplitSide second;  // row -1
};

GoogolSplit split_googol(const GoogolInstance& googol,
                         const std::vector<int>& sigma);

struct HalfPSampleSpec {
  std::vector<int> values;
  MrfSpec indicator;  // label 1 means the value is in the sample
  double p = 0.0;
};

// The two instances of the split share the sign law: instance 1 samples
// v^1_i when sigma_i = +1 and instance 2 samples v^-1_i when sigma_i = -1.
HalfPSampleSpec halfp_from_sign_mrf(const MrfSpec& sign_mrf,
                                    std::vector<int> values, bool second_row);

struct HalfPReport {
  bool pass = true;
  bool marginals_ok = true;
  bool conditionals_ok = true;
  double min_marginal = 1.0;
  std::size_t marginal_witness = 0;
  double min_conditional = 1.0;
  std::size_t conditional_witness = 0;
  Labels conditional_assignment;
};

HalfPReport verify_halfp_spec(const HalfPSampleSpec& spec,
                              std::size_t cap = kDefaultEnumerationCap);

// Keep probabilities p / Pr[sigma_i = 1 | sigma_<i] for sampled coordinates
// (0 for the others). Throws ConditionalBelowP if a conditional is below p.
std::vector<double> coupled_keep_probabilities(
    const HalfPSampleSpec& spec, const std::vector<char>& in_first,
    std::size_t cap = kDefaultEnumerationCap);

// Thins S_1 so that the result is distributed as independent Bernoulli(p).
std::vector<char> coupled_subsample(const HalfPSampleSpec& spec,
                                    const std::vector<char>& in_first,
                                    std::uint64_t seed,
                                    std::size_t cap = kDefaultEnumerationCap);

}  // namespace mrfopt

#endif  // MRFOPT_SAMPLE_MODELS_HPP_
