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

#include "mrfopt/mrf.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace mrfopt {
namespace {

[[noreturn]] void invalid(const std::string& msg) {
  throw Error(ErrorCode::kInvalidArgument, msg);
}

void require_finite(double x, const std::string& what) {
  if (!std::isfinite(x)) invalid(what + " must be finite");
}

}  // namespace

// ---------------------------------------------------------------------------
// TypeSpace

TypeSpace::TypeSpace(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.empty()) invalid("type space needs at least one coordinate");
  for (int s : sizes_) {
    if (s < 1) invalid("type space sizes must be >= 1");
  }
}

int TypeSpace::max_size() const {
  int m = 0;
  for (int s : sizes_) m = std::max(m, s);
  return m;
}

std::size_t TypeSpace::num_states() const {
  std::size_t total = 1;
  for (int s : sizes_) {
    const auto us = static_cast<std::size_t>(s);
    if (total > std::numeric_limits<std::size_t>::max() / us) {
      return std::numeric_limits<std::size_t>::max();
    }
    total *= us;
  }
  return total;
}

void TypeSpace::require_enumerable(std::size_t cap) const {
  const std::size_t states = num_states();
  if (states > cap) {
    throw Error(ErrorCode::kEnumerationCapExceeded,
                "state space has " + std::to_string(states) +
                    " states, cap is " + std::to_string(cap));
  }
}

std::size_t TypeSpace::index_of(std::span<const int> labels) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    idx = idx * static_cast<std::size_t>(sizes_[i]) +
          static_cast<std::size_t>(labels[i]);
  }
  return idx;
}

void TypeSpace::decode(std::size_t index, std::span<int> labels) const {
  for (std::size_t i = sizes_.size(); i-- > 0;) {
    const auto s = static_cast<std::size_t>(sizes_[i]);
    labels[i] = static_cast<int>(index % s);
    index /= s;
  }
}

// ---------------------------------------------------------------------------
// MrfSpec

MrfSpec::MrfSpec(TypeSpace space,
                 std::vector<std::vector<double>> vertex_potentials,
                 std::vector<Hyperedge> edges)
    : space_(std::move(space)),
      vertex_(std::move(vertex_potentials)),
      edges_(std::move(edges)) {
  const std::size_t n = space_.num_coordinates();
  if (n == 0) invalid("MRF needs a non-empty type space");
  if (vertex_.size() != n) {
    invalid("vertex_potentials must have one table per coordinate");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (vertex_[i].size() != static_cast<std::size_t>(space_.size(i))) {
      invalid("vertex potential table " + std::to_string(i) +
              " has wrong size");
    }
    for (double x : vertex_[i]) require_finite(x, "vertex potential");
  }
  std::set<std::vector<int>> seen;
  incident_.assign(n, {});
  strides_.reserve(edges_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto& edge = edges_[e];
    if (edge.vertices.size() < 2) invalid("hyperedges need >= 2 vertices");
    std::vector<int> sorted = edge.vertices;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      invalid("hyperedge has repeated vertices");
    }
    if (sorted.front() < 0 || static_cast<std::size_t>(sorted.back()) >= n) {
      invalid("hyperedge vertex out of range");
    }
    if (!seen.insert(sorted).second) invalid("duplicate hyperedge");
    std::vector<std::size_t> stride(edge.vertices.size());
    std::size_t total = 1;
    for (std::size_t k = edge.vertices.size(); k-- > 0;) {
      stride[k] = total;
      total *= static_cast<std::size_t>(space_.size(edge.vertices[k]));
    }
    if (edge.table.size() != total) {
      invalid("hyperedge table " + std::to_string(e) + " has " +
              std::to_string(edge.table.size()) + " entries, expected " +
              std::to_string(total));
    }
    for (double x : edge.table) require_finite(x, "edge potential");
    strides_.push_back(std::move(stride));
    for (int v : edge.vertices) incident_[v].push_back(e);
  }
}

MrfSpec MrfSpec::uniform(TypeSpace space) {
  std::vector<std::vector<double>> vp;
  for (int s : space.sizes()) vp.emplace_back(s, 0.0);
  return MrfSpec(std::move(space), std::move(vp), {});
}

double MrfSpec::edge_potential(std::size_t e,
                               std::span<const int> labels) const {
  const auto& edge = edges_[e];
  const auto& stride = strides_[e];
  std::size_t idx = 0;
  for (std::size_t k = 0; k < edge.vertices.size(); ++k) {
    idx += stride[k] * static_cast<std::size_t>(labels[edge.vertices[k]]);
  }
  return edge.table[idx];
}

double MrfSpec::log_weight(std::span<const int> labels) const {
  double w = 0.0;
  for (std::size_t i = 0; i < vertex_.size(); ++i) w += vertex_[i][labels[i]];
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    w += edge_potential(e, labels);
  }
  return w;
}

void MrfSpec::local_logits(std::size_t i, std::span<const int> labels,
                           std::span<double> out) const {
  Labels work(labels.begin(), labels.end());
  for (int t = 0; t < space_.size(i); ++t) {
    work[i] = t;
    double w = vertex_[i][t];
    for (std::size_t e : incident_[i]) w += edge_potential(e, work);
    out[t] = w;
  }
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json mrf_to_json(const MrfSpec& mrf) {
  nlohmann::json j;
  j["sizes"] = mrf.type_space().sizes();
  j["vertex_potentials"] = mrf.vertex_potentials();
  auto edges = nlohmann::json::array();
  for (const auto& e : mrf.edges()) {
    edges.push_back({{"vertices", e.vertices}, {"table", e.table}});
  }
  j["edges"] = std::move(edges);
  return j;
}

MrfSpec mrf_from_json(const nlohmann::json& j) {
  try {
    auto sizes = j.at("sizes").get<std::vector<int>>();
    TypeSpace space(sizes);
    std::vector<std::vector<double>> vp;
    if (j.contains("vertex_potentials")) {
      vp = j.at("vertex_potentials").get<std::vector<std::vector<double>>>();
    } else {
      for (int s : sizes) vp.emplace_back(s, 0.0);
    }
    std::vector<Hyperedge> edges;
    if (j.contains("edges")) {
      for (const auto& e : j.at("edges")) {
        edges.push_back({e.at("vertices").get<std::vector<int>>(),
                         e.at("table").get<std::vector<double>>()});
      }
    }
    return MrfSpec(std::move(space), std::move(vp), std::move(edges));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("malformed MRF JSON: ") +
                                        e.what());
  }
}

// ---------------------------------------------------------------------------
// Degree

double weighted_max_degree(const MrfSpec& mrf, std::size_t local_cap) {
  const std::size_t n = mrf.num_coordinates();
  const auto& space = mrf.type_space();
  double best = 0.0;
  Labels labels(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& inc = mrf.incident(i);
    if (inc.empty()) continue;
    std::set<int> vars;
    for (std::size_t e : inc) {
      for (int v : mrf.edges()[e].vertices) vars.insert(v);
    }
    std::vector<int> local(vars.begin(), vars.end());
    std::size_t states = 1;
    bool overflow = false;
    for (int v : local) {
      const auto s = static_cast<std::size_t>(space.size(v));
      if (states > local_cap / s) {
        overflow = true;
        break;
      }
      states *= s;
    }
    if (overflow) {
      double bound = 0.0;
      for (std::size_t e : inc) {
        double m = 0.0;
        for (double x : mrf.edges()[e].table) m = std::max(m, std::abs(x));
        bound += m;
      }
      best = std::max(best, bound);
      continue;
    }
    std::fill(labels.begin(), labels.end(), 0);
    for (std::size_t s = 0; s < states; ++s) {
      std::size_t rest = s;
      for (std::size_t k = local.size(); k-- > 0;) {
        const auto sz = static_cast<std::size_t>(space.size(local[k]));
        labels[local[k]] = static_cast<int>(rest % sz);
        rest /= sz;
      }
      double sum = 0.0;
      for (std::size_t e : inc) sum += mrf.edge_potential(e, labels);
      best = std::max(best, std::abs(sum));
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Exact inference

std::vector<double> JointPmf::marginal(std::size_t i) const {
  std::vector<double> out(space.size(i), 0.0);
  Labels labels(space.num_coordinates());
  for (std::size_t idx = 0; idx < probs.size(); ++idx) {
    space.decode(idx, labels);
    out[labels[i]] += probs[idx];
  }
  return out;
}

std::vector<std::vector<double>> JointPmf::transition(std::size_t i) const {
  if (i + 1 >= space.num_coordinates()) invalid("transition index too large");
  std::vector<std::vector<double>> t(space.size(i),
                                     std::vector<double>(space.size(i + 1)));
  Labels labels(space.num_coordinates());
  for (std::size_t idx = 0; idx < probs.size(); ++idx) {
    space.decode(idx, labels);
    t[labels[i]][labels[i + 1]] += probs[idx];
  }
  for (auto& row : t) {
    double s = 0.0;
    for (double x : row) s += x;
    if (s > 0.0) {
      for (double& x : row) x /= s;
    }
  }
  return t;
}

JointPmf exact_joint(const MrfSpec& mrf, std::size_t cap) {
  const auto& space = mrf.type_space();
  space.require_enumerable(cap);
  const std::size_t states = space.num_states();
  JointPmf joint;
  joint.space = space;
  joint.probs.resize(states);
  Labels labels(space.num_coordinates());
  LogSumExp lse;
  for (std::size_t idx = 0; idx < states; ++idx) {
    space.decode(idx, labels);
    joint.probs[idx] = mrf.log_weight(labels);
    lse.add(joint.probs[idx]);
  }
  joint.log_partition = lse.value();
  double total = 0.0;
  for (double& p : joint.probs) {
    p = std::exp(p - joint.log_partition);
    total += p;
  }
  // Remove the last-ulp drift so the table sums to one as tightly as possible.
  for (double& p : joint.probs) p /= total;
  return joint;
}

Conditioning::Conditioning(const TypeSpace& space)
    : allowed_(space.num_coordinates()) {}

Conditioning& Conditioning::fix(std::size_t i, int label) {
  return restrict_to(i, {label});
}

Conditioning& Conditioning::restrict_to(std::size_t i,
                                        const std::vector<int>& labels) {
  if (i >= allowed_.size()) invalid("conditioning coordinate out of range");
  int top = 0;
  for (int l : labels) {
    if (l < 0) invalid("negative label in conditioning");
    top = std::max(top, l + 1);
  }
  allowed_[i].assign(std::max<std::size_t>(top, 1), 0);
  for (int l : labels) allowed_[i][l] = 1;
  if (labels.empty()) allowed_[i].assign(1, 0);
  return *this;
}

bool Conditioning::allows(std::size_t i, int label) const {
  const auto& a = allowed_[i];
  if (a.empty()) return true;
  return static_cast<std::size_t>(label) < a.size() && a[label] != 0;
}

std::vector<double> conditional_marginal(const MrfSpec& mrf, std::size_t i,
                                         const Conditioning& given,
                                         std::size_t cap) {
  const auto& space = mrf.type_space();
  if (i >= space.num_coordinates()) invalid("coordinate out of range");
  if (given.constrains(i)) {
    invalid("conditioning event must exclude the target coordinate");
  }
  space.require_enumerable(cap);
  const std::size_t n = space.num_coordinates();
  std::vector<LogSumExp> acc(space.size(i));
  Labels labels(n);
  bool any = false;
  for (std::size_t idx = 0; idx < space.num_states(); ++idx) {
    space.decode(idx, labels);
    bool ok = true;
    for (std::size_t c = 0; c < n && ok; ++c) ok = given.allows(c, labels[c]);
    if (!ok) continue;
    any = true;
    acc[labels[i]].add(mrf.log_weight(labels));
  }
  if (!any) {
    throw Error(ErrorCode::kZeroProbabilityConditioning,
                "conditioning event has probability zero");
  }
  std::vector<double> logits(acc.size());
  for (std::size_t t = 0; t < acc.size(); ++t) logits[t] = acc[t].value();
  std::vector<double> out(acc.size());
  softmax(logits, out);
  return out;
}

ConditioningReport verify_conditioning_bound(const MrfSpec& mrf,
                                             std::size_t cap) {
  const JointPmf joint = exact_joint(mrf, cap);
  const auto& space = mrf.type_space();
  const std::size_t n = space.num_coordinates();
  ConditioningReport report;
  report.delta = weighted_max_degree(mrf);
  std::vector<std::vector<double>> marg(n);
  for (std::size_t i = 0; i < n; ++i) marg[i] = joint.marginal(i);

  Labels labels(n);
  std::vector<double> logits, cond;
  bool first = true;
  for (std::size_t idx = 0; idx < joint.probs.size(); ++idx) {
    space.decode(idx, labels);
    for (std::size_t i = 0; i < n; ++i) {
      // Each assignment of the other coordinates is visited once.
      if (labels[i] != 0) continue;
      const int k = space.size(i);
      logits.resize(k);
      cond.resize(k);
      mrf.local_logits(i, labels, logits);
      softmax(logits, cond);
      for (int t = 0; t < k; ++t) {
        if (!(marg[i][t] > 0.0)) continue;
        const double r = cond[t] / marg[i][t];
        if (first || r > report.max_ratio) {
          report.max_ratio = r;
          report.max_witness = {i, t, labels, r};
        }
        if (first || r < report.min_ratio) {
          report.min_ratio = r;
          report.min_witness = {i, t, labels, r};
        }
        first = false;
      }
    }
  }
  const double hi = std::exp(4.0 * report.delta) * (1.0 + 1e-9);
  const double lo = std::exp(-4.0 * report.delta) * (1.0 - 1e-9);
  report.within_bound = report.max_ratio <= hi && report.min_ratio >= lo;
  return report;
}

nlohmann::json conditioning_report_to_json(const ConditioningReport& r) {
  auto witness = [](const ConditioningWitness& w) {
    Labels a = w.assignment;
    if (w.coordinate < a.size()) a[w.coordinate] = -1;
    return nlohmann::json{{"coordinate", w.coordinate},
                          {"label", w.label},
                          {"assignment", a},
                          {"ratio", w.ratio}};
  };
  return {{"delta", r.delta},
          {"max_ratio", r.max_ratio},
          {"min_ratio", r.min_ratio},
          {"bound_high", std::exp(4.0 * r.delta)},
          {"bound_low", std::exp(-4.0 * r.delta)},
          {"within_bound", r.within_bound},
          {"max_witness", witness(r.max_witness)},
          {"min_witness", witness(r.min_witness)}};
}

// ---------------------------------------------------------------------------
// Sampling

GibbsSampler::GibbsSampler(const MrfSpec& mrf, std::uint64_t seed)
    : mrf_(&mrf), rng_(seed), state_(mrf.num_coordinates()) {
  const auto& space = mrf.type_space();
  for (std::size_t i = 0; i < state_.size(); ++i) {
    state_[i] = static_cast<int>(rng_.below(space.size(i)));
  }
}

void GibbsSampler::sweep() {
  const auto& space = mrf_->type_space();
  for (std::size_t i = 0; i < state_.size(); ++i) {
    const int k = space.size(i);
    if (k == 1) continue;
    logits_.resize(k);
    probs_.resize(k);
    mrf_->local_logits(i, state_, logits_);
    softmax(logits_, probs_);
    state_[i] = static_cast<int>(rng_.categorical(probs_));
  }
}

std::vector<Labels> gibbs_sample(const MrfSpec& mrf, std::uint64_t seed,
                                 std::size_t count,
                                 const GibbsOptions& options) {
  if (count < 1) invalid("gibbs_sample needs count >= 1");
  GibbsSampler sampler(mrf, seed);
  for (std::size_t s = 0; s < options.burn_in; ++s) sampler.sweep();
  std::vector<Labels> out;
  out.reserve(count);
  const std::size_t thin = std::max<std::size_t>(options.thin, 1);
  for (std::size_t c = 0; c < count; ++c) {
    for (std::size_t s = 0; s < thin; ++s) sampler.sweep();
    out.push_back(sampler.state());
  }
  return out;
}

ExactSampler::ExactSampler(const JointPmf& joint) : space_(joint.space) {
  cdf_.resize(joint.probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < cdf_.size(); ++i) {
    acc += joint.probs[i];
    cdf_[i] = acc;
  }
}

std::size_t ExactSampler::draw_index(Rng& rng) const {
  const double u = rng.uniform() * cdf_.back();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return static_cast<std::size_t>(it - cdf_.begin());
}

Labels ExactSampler::draw(Rng& rng) const {
  Labels labels(space_.num_coordinates());
  space_.decode(draw_index(rng), labels);
  return labels;
}

// ---------------------------------------------------------------------------
// Markov chains

TypeSpace MarkovChainSpec::type_space() const {
  std::vector<int> sizes{static_cast<int>(initial.size())};
  for (const auto& t : transitions) sizes.push_back(t.cols);
  return TypeSpace(sizes);
}

void MarkovChainSpec::validate() const {
  constexpr double kTol = 1e-12;
  if (initial.empty()) invalid("chain initial distribution is empty");
  double s = 0.0;
  for (double x : initial) {
    if (!(x >= 0.0) || !std::isfinite(x)) invalid("initial entry invalid");
    s += x;
  }
  if (std::abs(s - 1.0) > kTol) invalid("initial distribution must sum to 1");
  int prev = static_cast<int>(initial.size());
  for (std::size_t k = 0; k < transitions.size(); ++k) {
    const auto& m = transitions[k];
    if (m.rows != prev || m.cols < 1 ||
        m.data.size() != static_cast<std::size_t>(m.rows) * m.cols) {
      invalid("transition " + std::to_string(k) + " has wrong shape");
    }
    for (int r = 0; r < m.rows; ++r) {
      double row = 0.0;
      for (int c = 0; c < m.cols; ++c) {
        const double x = m.at(r, c);
        if (!(x >= 0.0) || !std::isfinite(x)) invalid("transition entry < 0");
        row += x;
      }
      if (std::abs(row - 1.0) > kTol) {
        invalid("transition " + std::to_string(k) + " row " +
                std::to_string(r) + " does not sum to 1");
      }
    }
    prev = m.cols;
  }
}

double MarkovChainSpec::path_probability(std::span<const int> labels) const {
  double p = initial[labels[0]];
  for (std::size_t k = 0; k < transitions.size() && p > 0.0; ++k) {
    p *= transitions[k].at(labels[k], labels[k + 1]);
  }
  return p;
}

std::vector<double> chain_joint(const MarkovChainSpec& chain,
                                std::size_t cap) {
  chain.validate();
  const TypeSpace space = chain.type_space();
  space.require_enumerable(cap);
  std::vector<double> out(space.num_states());
  Labels labels(space.num_coordinates());
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    space.decode(idx, labels);
    out[idx] = chain.path_probability(labels);
  }
  return out;
}

nlohmann::json chain_to_json(const MarkovChainSpec& chain) {
  auto ts = nlohmann::json::array();
  for (const auto& m : chain.transitions) {
    auto rows = nlohmann::json::array();
    for (int r = 0; r < m.rows; ++r) {
      rows.push_back(std::vector<double>(m.data.begin() + r * m.cols,
                                         m.data.begin() + (r + 1) * m.cols));
    }
    ts.push_back(std::move(rows));
  }
  return {{"initial", chain.initial}, {"transitions", ts}};
}

MarkovChainSpec chain_from_json(const nlohmann::json& j) {
  MarkovChainSpec chain;
  try {
    chain.initial = j.at("initial").get<std::vector<double>>();
    for (const auto& t : j.at("transitions")) {
      auto rows = t.get<std::vector<std::vector<double>>>();
      StochasticMatrix m;
      m.rows = static_cast<int>(rows.size());
      m.cols = rows.empty() ? 0 : static_cast<int>(rows[0].size());
      for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != m.cols) invalid("ragged matrix");
        m.data.insert(m.data.end(), row.begin(), row.end());
      }
      chain.transitions.push_back(std::move(m));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig,
                std::string("malformed chain JSON: ") + e.what());
  }
  chain.validate();
  return chain;
}

ChainEmbedding chain_to_mrf_clamped(const MarkovChainSpec& chain,
                                    double delta) {
  chain.validate();
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    invalid("clamp level must be positive and finite");
  }
  const TypeSpace space = chain.type_space();
  const std::size_t n = space.num_coordinates();
  const double floor = -delta / 2.0;
  auto clamp_log = [floor](double p) {
    return p > 0.0 ? std::max(std::log(p), floor) : floor;
  };

  std::vector<Hyperedge> edges;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const auto& m = chain.transitions[k];
    Hyperedge e{{static_cast<int>(k), static_cast<int>(k + 1)}, {}};
    e.table.resize(m.data.size());
    for (std::size_t x = 0; x < m.data.size(); ++x) {
      e.table[x] = clamp_log(m.data[x]);
    }
    edges.push_back(std::move(e));
  }

  // Local normalizers: psi_k(t) = -ln sum_u exp(psi_{k,k+1}(t, u)). With
  // these, every forward conditional of the MRF is the softmax of its edge
  // row and the joint factorizes as initial times the clamped transitions.
  auto row_lse = [&](std::size_t k, int t) {
    const auto& e = edges[k];
    const int cols = chain.transitions[k].cols;
    return log_sum_exp(std::span<const double>(e.table).subspan(
        static_cast<std::size_t>(t) * cols, cols));
  };
  std::vector<std::vector<double>> vp(n);
  for (std::size_t k = 0; k < n; ++k) {
    vp[k].assign(space.size(k), 0.0);
    for (int t = 0; t < space.size(k); ++t) {
      double v = (k == 0) ? clamp_log(chain.initial[t]) : 0.0;
      if (k + 1 < n) v -= row_lse(k, t);
      vp[k][t] = v;
    }
  }
  return {MrfSpec(space, std::move(vp), std::move(edges)), delta};
}

ChainEmbedding chain_to_mrf(const MarkovChainSpec& chain, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) invalid("epsilon must be in (0,1)");
  chain.validate();
  const TypeSpace space = chain.type_space();
  const double n = static_cast<double>(space.num_coordinates());
  const double delta =
      2.0 * std::log(n * static_cast<double>(space.max_size()) / epsilon);
  return chain_to_mrf_clamped(chain, delta);
}

}  // namespace mrfopt
