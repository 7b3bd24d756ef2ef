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

#include "mrfopt/sample_models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mrfopt {
namespace {

[[noreturn]] void invalid(const std::string& msg) {
  throw Error(ErrorCode::kInvalidArgument, msg);
}

void require_binary(const MrfSpec& mrf, const char* what) {
  for (int s : mrf.type_space().sizes()) {
    if (s != 2) invalid(std::string(what) + " must be binary");
  }
}

// Relabels every binary coordinate (0 <-> 1).
MrfSpec flip_labels(const MrfSpec& mrf) {
  std::vector<std::vector<double>> vp = mrf.vertex_potentials();
  for (auto& t : vp) std::swap(t[0], t[1]);
  std::vector<Hyperedge> edges = mrf.edges();
  for (auto& e : edges) {
    // Complementing every bit of a row-major binary index reverses the table.
    std::reverse(e.table.begin(), e.table.end());
  }
  return MrfSpec(mrf.type_space(), std::move(vp), std::move(edges));
}

}  // namespace

std::vector<int> PSampleDraw::sample() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (in_sample[i]) out.push_back(values[i]);
  }
  return out;
}

PSampleDraw draw_p_sample(const std::vector<int>& values, double p,
                          std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) invalid("p must be in [0,1]");
  Rng rng(seed);
  PSampleDraw d;
  d.values = values;
  d.p = p;
  d.in_sample.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    // Always consume one draw per value so streams line up across p.
    const double u = rng.uniform();
    d.in_sample[i] = u < p ? 1 : 0;
    if (!d.in_sample[i]) d.arrivals.push_back(values[i]);
  }
  return d;
}

GoogolBuild build_googol_with_coins(const std::vector<int>& sample_vec,
                                    const std::vector<int>& real_vec,
                                    const std::vector<int>& coins) {
  if (sample_vec.size() != real_vec.size() ||
      coins.size() != sample_vec.size()) {
    invalid("sample, real and coin vectors must have equal length");
  }
  GoogolBuild b;
  b.coins = coins;
  for (std::size_t i = 0; i < coins.size(); ++i) {
    if (coins[i] != 1 && coins[i] != -1) invalid("coins must be +-1");
    if (coins[i] == 1) {
      b.instance.pairs.push_back({sample_vec[i], real_vec[i]});
    } else {
      b.instance.pairs.push_back({real_vec[i], sample_vec[i]});
    }
  }
  b.instance.sigma = coins;
  return b;
}

GoogolBuild build_googol_from_prophet(const std::vector<int>& sample_vec,
                                      const std::vector<int>& real_vec,
                                      std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> coins(sample_vec.size());
  for (auto& c : coins) c = rng.bernoulli(0.5) ? 1 : -1;
  return build_googol_with_coins(sample_vec, real_vec, coins);
}

MrfSpec conditional_sign_mrf(const MrfSpec& mrf,
                             const std::vector<GoogolPair>& pairs) {
  const std::size_t n = mrf.num_coordinates();
  if (pairs.size() != n) invalid("one pair per coordinate required");
  for (std::size_t i = 0; i < n; ++i) {
    const int s = mrf.type_space().size(i);
    if (pairs[i].plus < 0 || pairs[i].plus >= s || pairs[i].minus < 0 ||
        pairs[i].minus >= s) {
      invalid("pair label out of range");
    }
  }
  std::vector<Hyperedge> edges;
  Labels a(n), b(n);
  for (std::size_t e = 0; e < mrf.edges().size(); ++e) {
    const auto& src = mrf.edges()[e];
    const std::size_t k = src.vertices.size();
    Hyperedge h{src.vertices, std::vector<double>(std::size_t{1} << k)};
    for (std::size_t idx = 0; idx < h.table.size(); ++idx) {
      for (std::size_t q = 0; q < k; ++q) {
        const int v = src.vertices[q];
        const bool plus = (idx >> (k - 1 - q)) & 1u;  // label 1 = +1
        a[v] = plus ? pairs[v].plus : pairs[v].minus;
        b[v] = plus ? pairs[v].minus : pairs[v].plus;
      }
      h.table[idx] = mrf.edge_potential(e, a) + mrf.edge_potential(e, b);
    }
    edges.push_back(std::move(h));
  }
  return MrfSpec(TypeSpace(std::vector<int>(n, 2)),
                 std::vector<std::vector<double>>(n, {0.0, 0.0}),
                 std::move(edges));
}

bool is_sign_symmetric(const MrfSpec& sign_mrf, double tol, std::size_t cap) {
  require_binary(sign_mrf, "sign MRF");
  const JointPmf joint = exact_joint(sign_mrf, cap);
  const std::size_t states = joint.probs.size();
  for (std::size_t idx = 0; idx < states; ++idx) {
    // Negating every sign complements every bit.
    if (std::abs(joint.probs[idx] - joint.probs[states - 1 - idx]) > tol) {
      return false;
    }
  }
  return true;
}

GoogolSplit split_googol(const GoogolInstance& googol,
                         const std::vector<int>& sigma) {
  if (sigma.size() != googol.size()) invalid("sigma length mismatch");
  if (sigma != googol.sigma) invalid("sigma does not match instance signs");
  GoogolSplit s;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (sigma[i] == 1) {
      s.first.sample.push_back(googol.pairs[i].plus);
      s.second.real.push_back(googol.pairs[i].minus);
    } else {
      s.first.real.push_back(googol.pairs[i].plus);
      s.second.sample.push_back(googol.pairs[i].minus);
    }
  }
  return s;
}

HalfPSampleSpec halfp_from_sign_mrf(const MrfSpec& sign_mrf,
                                    std::vector<int> values, bool second_row) {
  require_binary(sign_mrf, "sign MRF");
  if (values.size() != sign_mrf.num_coordinates()) {
    invalid("one value per coordinate required");
  }
  HalfPSampleSpec spec;
  spec.values = std::move(values);
  spec.indicator = second_row ? flip_labels(sign_mrf) : sign_mrf;
  spec.p = 0.5 * std::exp(-4.0 * weighted_max_degree(sign_mrf));
  return spec;
}

HalfPReport verify_halfp_spec(const HalfPSampleSpec& spec, std::size_t cap) {
  require_binary(spec.indicator, "indicator MRF");
  const auto& mrf = spec.indicator;
  const JointPmf joint = exact_joint(mrf, cap);
  const std::size_t n = mrf.num_coordinates();
  constexpr double kTol = 1e-12;
  HalfPReport r;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = joint.marginal(i)[1];
    if (m < r.min_marginal) {
      r.min_marginal = m;
      r.marginal_witness = i;
    }
  }
  r.marginals_ok = r.min_marginal >= 0.5 - kTol;
  Labels labels(n);
  double logits[2], cond[2];
  for (std::size_t idx = 0; idx < joint.probs.size(); ++idx) {
    joint.space.decode(idx, labels);
    for (std::size_t i = 0; i < n; ++i) {
      if (labels[i] != 0) continue;
      mrf.local_logits(i, labels, logits);
      softmax(logits, cond);
      if (cond[1] < r.min_conditional) {
        r.min_conditional = cond[1];
        r.conditional_witness = i;
        r.conditional_assignment = labels;
      }
    }
  }
  r.conditionals_ok = r.min_conditional >= spec.p - kTol;
  r.pass = r.marginals_ok && r.conditionals_ok;
  return r;
}

std::vector<double> coupled_keep_probabilities(
    const HalfPSampleSpec& spec, const std::vector<char>& in_first,
    std::size_t cap) {
  require_binary(spec.indicator, "indicator MRF");
  const std::size_t n = spec.indicator.num_coordinates();
  if (in_first.size() != n) invalid("sample indicator length mismatch");
  const JointPmf joint = exact_joint(spec.indicator, cap);
  // prefix[i] = Pr[sigma_<i realized]; hit[i] = Pr[sigma_<i realized, sigma_i = 1].
  std::vector<double> prefix(n + 1, 0.0), hit(n, 0.0);
  Labels labels(n);
  for (std::size_t idx = 0; idx < joint.probs.size(); ++idx) {
    joint.space.decode(idx, labels);
    const double p = joint.probs[idx];
    for (std::size_t i = 0; i <= n; ++i) {
      prefix[i] += p;
      if (i == n) break;
      if (labels[i] == 1) hit[i] += p;
      if ((labels[i] == 1) != (in_first[i] != 0)) break;
    }
  }
  std::vector<double> keep(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!in_first[i]) continue;
    if (!(prefix[i] > 0.0)) {
      throw Error(ErrorCode::kZeroProbabilityConditioning,
                  "realized sample prefix has probability zero");
    }
    const double cond = hit[i] / prefix[i];
    if (cond < spec.p * (1.0 - 1e-12)) {
      throw Error(ErrorCode::kConditionalBelowP,
                  "sequential conditional " + std::to_string(cond) +
                      " below p at coordinate " + std::to_string(i));
    }
    keep[i] = std::min(1.0, spec.p / cond);
  }
  return keep;
}

std::vector<char> coupled_subsample(const HalfPSampleSpec& spec,
                                    const std::vector<char>& in_first,
                                    std::uint64_t seed, std::size_t cap) {
  const std::vector<double> keep =
      coupled_keep_probabilities(spec, in_first, cap);
  Rng rng(seed);
  std::vector<char> out(keep.size(), 0);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const double u = rng.uniform();
    if (in_first[i] && u < keep[i]) out[i] = 1;
  }
  return out;
}

}  // namespace mrfopt
