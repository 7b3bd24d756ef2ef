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

#include "mrfopt/allocation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <optional>
#include <shared_mutex>

namespace mrfopt {
namespace {

[[noreturn]] void invalid(const std::string& msg) {
  throw Error(ErrorCode::kInvalidArgument, msg);
}

constexpr double kE = std::numbers::e;

double clause_sum(const std::vector<double>& a, ItemSet s) {
  double t = 0.0;
  for (ItemSet bits = s; bits; bits &= bits - 1) t += a[std::countr_zero(bits)];
  return t;
}

}  // namespace

ItemSet MatchingValuation::mask() const {
  ItemSet m = 0;
  for (int j : items) m |= ItemSet{1} << j;
  return m;
}

double price_of(const PriceVector& prices, ItemSet s) {
  double t = 0.0;
  for (ItemSet bits = s; bits; bits &= bits - 1) {
    t += prices[std::countr_zero(bits)];
  }
  return t;
}

double value_query(const Valuation& v, ItemSet s) {
  if (const auto* x = std::get_if<XosValuation>(&v)) {
    double best = 0.0;
    for (const auto& a : x->clauses) best = std::max(best, clause_sum(a, s));
    return best;
  }
  const auto& e = std::get<MatchingValuation>(v);
  const ItemSet need = e.mask();
  return (need & ~s) == 0 ? e.weight : 0.0;
}

ItemSet demand_query(const Valuation& v, const PriceVector& prices,
                     ItemSet available) {
  if (const auto* x = std::get_if<XosValuation>(&v)) {
    // For a fixed clause the best bundle takes every item with a_j >= p_j;
    // the best clause then gives the exact optimum.
    ItemSet best_set = 0;
    double best_util = -kInf;
    for (const auto& a : x->clauses) {
      ItemSet s = 0;
      double u = 0.0;
      for (ItemSet bits = available; bits; bits &= bits - 1) {
        const int j = std::countr_zero(bits);
        if (a[j] >= prices[j]) {
          s |= ItemSet{1} << j;
          u += a[j] - prices[j];
        }
      }
      if (u > best_util) {
        best_util = u;
        best_set = s;
      }
    }
    return best_set;
  }
  const auto& e = std::get<MatchingValuation>(v);
  const ItemSet need = e.mask();
  if ((need & ~available) != 0) return 0;
  return e.weight >= price_of(prices, need) ? need : 0;
}

// ---------------------------------------------------------------------------
// AuctionSpec

void AuctionSpec::validate() const {
  if (items < 1 || items > kMaxItems) invalid("items must be in [1, 64]");
  if (types.empty()) invalid("auction needs at least one buyer");
  if (mrf.num_coordinates() != types.size()) {
    invalid("MRF must have one coordinate per buyer");
  }
  std::optional<std::size_t> cls;
  for (std::size_t i = 0; i < types.size(); ++i) {
    if (types[i].empty()) invalid("every buyer needs at least one type");
    if (mrf.type_space().size(i) != static_cast<int>(types[i].size())) {
      invalid("MRF coordinate " + std::to_string(i) +
              " must have one label per type");
    }
    for (const auto& v : types[i]) {
      if (!cls) cls = v.index();
      if (*cls != v.index()) invalid("buyers must all be XOS or all matching");
      if (const auto* x = std::get_if<XosValuation>(&v)) {
        if (x->clauses.empty()) invalid("XOS valuation needs a clause");
        for (const auto& a : x->clauses) {
          if (a.size() != static_cast<std::size_t>(items)) {
            invalid("XOS clause length must equal item count");
          }
          for (double z : a) {
            if (!(z >= 0.0) || !std::isfinite(z)) {
              invalid("XOS clause entries must be finite and >= 0");
            }
          }
        }
      } else {
        const auto& e = std::get<MatchingValuation>(v);
        if (e.items.empty()) invalid("hyperedge needs at least one item");
        std::vector<int> s = e.items;
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end()) {
          invalid("hyperedge items must be distinct");
        }
        if (s.front() < 0 || s.back() >= items) invalid("hyperedge item range");
        if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
          invalid("edge weight must be finite and >= 0");
        }
      }
    }
  }
}

ValuationClass AuctionSpec::valuation_class() const {
  return std::holds_alternative<XosValuation>(types.at(0).at(0))
             ? ValuationClass::kXos
             : ValuationClass::kMatching;
}

int AuctionSpec::max_edge_size() const {
  int k = 0;
  for (const auto& ts : types) {
    for (const auto& v : ts) {
      if (const auto* e = std::get_if<MatchingValuation>(&v)) {
        k = std::max(k, static_cast<int>(e->items.size()));
      }
    }
  }
  return k;
}

Profile AuctionSpec::profile(const Labels& labels) const {
  Profile p(types.size());
  for (std::size_t i = 0; i < types.size(); ++i) p[i] = &types[i][labels[i]];
  return p;
}

nlohmann::json valuation_to_json(const Valuation& v) {
  if (const auto* x = std::get_if<XosValuation>(&v)) {
    return {{"kind", "xos"}, {"clauses", x->clauses}};
  }
  const auto& e = std::get<MatchingValuation>(v);
  return {{"kind", "edge"}, {"vertices", e.items}, {"weight", e.weight}};
}

Valuation valuation_from_json(const nlohmann::json& j, int m) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "xos") {
    return XosValuation{
        j.at("clauses").get<std::vector<std::vector<double>>>()};
  }
  if (kind == "edge") {
    return MatchingValuation{j.at("vertices").get<std::vector<int>>(),
                             j.at("weight").get<double>()};
  }
  (void)m;
  throw Error(ErrorCode::kConfig, "unknown valuation kind '" + kind + "'");
}

AuctionSpec auction_from_json(const nlohmann::json& j) {
  AuctionSpec a;
  try {
    a.items = j.at("items").get<int>();
    for (const auto& b : j.at("buyers")) {
      std::vector<Valuation> ts;
      for (const auto& t : b.at("types")) {
        ts.push_back(valuation_from_json(t, a.items));
      }
      a.types.push_back(std::move(ts));
    }
    if (j.contains("mrf")) {
      a.mrf = mrf_from_json(j.at("mrf"));
    } else {
      std::vector<int> sizes;
      for (const auto& ts : a.types) sizes.push_back(static_cast<int>(ts.size()));
      a.mrf = MrfSpec::uniform(TypeSpace(sizes));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig,
                std::string("malformed auction JSON: ") + e.what());
  }
  a.validate();
  return a;
}

nlohmann::json auction_to_json(const AuctionSpec& a) {
  auto buyers = nlohmann::json::array();
  for (const auto& ts : a.types) {
    auto arr = nlohmann::json::array();
    for (const auto& v : ts) arr.push_back(valuation_to_json(v));
    buyers.push_back({{"types", arr}});
  }
  return {{"items", a.items}, {"buyers", buyers}, {"mrf", mrf_to_json(a.mrf)}};
}

// ---------------------------------------------------------------------------
// Hindsight optimum

namespace {

AllocationResult opt_xos(const Profile& profile, int m, std::size_t cap) {
  const std::size_t n = profile.size();
  double states = 1.0;
  for (int j = 0; j < m; ++j) states *= static_cast<double>(n);
  if (states > static_cast<double>(cap)) {
    throw Error(ErrorCode::kEnumerationCapExceeded,
                "XOS hindsight enumeration needs n^m <= cap");
  }
  std::vector<int> assign(m, 0);
  std::vector<ItemSet> sets(n, 0);
  AllocationResult best;
  best.welfare = -kInf;
  while (true) {
    std::fill(sets.begin(), sets.end(), 0);
    for (int j = 0; j < m; ++j) sets[assign[j]] |= ItemSet{1} << j;
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i) w += value_query(*profile[i], sets[i]);
    if (w > best.welfare) {
      best.welfare = w;
      best.sets = sets;
    }
    // Odometer with the last item varying fastest keeps lexicographic order.
    int j = m - 1;
    while (j >= 0 && assign[j] == static_cast<int>(n) - 1) assign[j--] = 0;
    if (j < 0) break;
    ++assign[j];
  }
  return best;
}

AllocationResult opt_matching(const Profile& profile) {
  const std::size_t n = profile.size();
  std::vector<ItemSet> masks(n);
  std::vector<double> w(n), suffix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = std::get<MatchingValuation>(*profile[i]);
    masks[i] = e.mask();
    w[i] = e.weight;
  }
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + w[i];
  std::vector<char> take(n, 0), best_take(n, 0);
  double best = -1.0;
  std::function<void(std::size_t, ItemSet, double)> go =
      [&](std::size_t i, ItemSet used, double val) {
        if (val + suffix[i] <= best) return;
        if (i == n) {
          best = val;
          best_take = take;
          return;
        }
        if ((masks[i] & used) == 0) {
          take[i] = 1;
          go(i + 1, used | masks[i], val + w[i]);
          take[i] = 0;
        }
        go(i + 1, used, val);
      };
  go(0, 0, 0.0);
  AllocationResult r;
  r.sets.assign(n, 0);
  r.welfare = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (best_take[i]) {
      r.sets[i] = masks[i];
      r.welfare += w[i];
    }
  }
  return r;
}

}  // namespace

AllocationResult hindsight_opt(const Profile& profile, int m,
                               std::size_t cap) {
  if (profile.empty()) return {};
  if (std::holds_alternative<XosValuation>(*profile[0])) {
    return opt_xos(profile, m, cap);
  }
  return opt_matching(profile);
}

PriceVector balanced_prices_xos(const Profile& profile,
                                const AllocationResult& opt, int m) {
  PriceVector p(m, 0.0);
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const auto& x = std::get<XosValuation>(*profile[i]);
    const ItemSet o = opt.sets[i];
    std::size_t arg = 0;
    double best = -kInf;
    for (std::size_t c = 0; c < x.clauses.size(); ++c) {
      const double s = clause_sum(x.clauses[c], o);
      if (s > best) {
        best = s;
        arg = c;
      }
    }
    for (ItemSet bits = o; bits; bits &= bits - 1) {
      const int j = std::countr_zero(bits);
      p[j] = x.clauses[arg][j];
    }
  }
  return p;
}

PriceVector balanced_prices_matching(const Profile& profile,
                                     const AllocationResult& opt, int m) {
  PriceVector p(m, 0.0);
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const auto& e = std::get<MatchingValuation>(*profile[i]);
    for (ItemSet bits = opt.sets[i]; bits; bits &= bits - 1) {
      p[std::countr_zero(bits)] = e.weight;
    }
  }
  return p;
}

PriceVector balanced_prices(const Profile& profile,
                            const AllocationResult& opt, int m) {
  if (profile.empty()) return PriceVector(m, 0.0);
  return std::holds_alternative<XosValuation>(*profile[0])
             ? balanced_prices_xos(profile, opt, m)
             : balanced_prices_matching(profile, opt, m);
}

BalancedCheck check_balanced(const PriceVector& prices, const Profile& profile,
                             const AllocationResult& opt, int m, double alpha,
                             double beta) {
  if (m > kBalancedCheckMaxItems) {
    throw Error(ErrorCode::kEnumerationCapExceeded,
                "balancedness brute force needs m <= 12");
  }
  const double tol = 1e-9;
  BalancedCheck out;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const ItemSet o = opt.sets[i];
    const double vo = value_query(*profile[i], o);
    const double po = price_of(prices, o);
    if (po > beta * vo + tol * std::max(1.0, std::abs(beta * vo))) {
      return {false, 2, static_cast<int>(i), o, po, beta * vo};
    }
    for (ItemSet s = 0; s <= all_items(m); ++s) {
      const double lhs = price_of(prices, o & ~s);
      const double rhs = (vo - value_query(*profile[i], o & s)) / alpha;
      if (lhs < rhs - tol * std::max(1.0, std::abs(rhs))) {
        return {false, 1, static_cast<int>(i), s, lhs, rhs};
      }
      if (s == all_items(m)) break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Base prices

ProfileTable enumerate_profiles(const AuctionSpec& auction, std::size_t cap) {
  auction.validate();
  const JointPmf joint = exact_joint(auction.mrf, cap);
  ProfileTable t;
  t.probs = joint.probs;
  t.opt.resize(joint.probs.size());
  t.balanced.resize(joint.probs.size());
  Labels labels(auction.num_buyers());
  for (std::size_t idx = 0; idx < joint.probs.size(); ++idx) {
    joint.space.decode(idx, labels);
    const Profile prof = auction.profile(labels);
    t.opt[idx] = hindsight_opt(prof, auction.items);
    t.balanced[idx] = balanced_prices(prof, t.opt[idx], auction.items);
  }
  return t;
}

BasePrices base_prices_exact(const ProfileTable& table, int m) {
  BasePrices out;
  out.b.assign(m, 0.0);
  out.stderr_b.assign(m, 0.0);
  for (std::size_t idx = 0; idx < table.probs.size(); ++idx) {
    for (int j = 0; j < m; ++j) {
      out.b[j] += table.probs[idx] * table.balanced[idx][j];
    }
  }
  return out;
}

BasePrices base_prices_exact(const AuctionSpec& auction, std::size_t cap) {
  return base_prices_exact(enumerate_profiles(auction, cap), auction.items);
}

BasePrices base_prices_monte_carlo(const AuctionSpec& auction,
                                   std::size_t samples, std::uint64_t seed,
                                   std::size_t cap) {
  auction.validate();
  if (samples < 1) invalid("monte carlo base prices need samples >= 1");
  const int m = auction.items;
  std::vector<RunningStats> stats(m);
  std::optional<ExactSampler> sampler;
  if (auction.mrf.type_space().num_states() <= cap) {
    sampler.emplace(exact_joint(auction.mrf, cap));
  }
  Rng rng(seed);
  std::optional<GibbsSampler> gibbs;
  if (!sampler) {
    gibbs.emplace(auction.mrf, seed);
    for (int s = 0; s < 500; ++s) gibbs->sweep();
  }
  for (std::size_t s = 0; s < samples; ++s) {
    Labels labels;
    if (sampler) {
      labels = sampler->draw(rng);
    } else {
      for (int k = 0; k < 5; ++k) gibbs->sweep();
      labels = gibbs->state();
    }
    const Profile prof = auction.profile(labels);
    const AllocationResult opt = hindsight_opt(prof, m);
    const PriceVector p = balanced_prices(prof, opt, m);
    for (int j = 0; j < m; ++j) stats[j].add(p[j]);
  }
  BasePrices out;
  out.exact = false;
  for (int j = 0; j < m; ++j) {
    out.b.push_back(stats[j].mean());
    out.stderr_b.push_back(stats[j].stderr_mean());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pricing schemes

PriceVector tail_prices(const PriceVector& b, double alpha, double delta) {
  if (!(alpha >= 1.0)) invalid("alpha must be >= 1");
  if (!(delta >= 0.0)) invalid("delta must be >= 0");
  PriceVector p(b.size());
  const double f = alpha * std::exp(4.0 * delta);
  for (std::size_t j = 0; j < b.size(); ++j) p[j] = b[j] > 0.0 ? f * b[j] : 0.0;
  return p;
}

int xos_core_top_level(double delta) {
  if (!(delta >= 0.0)) invalid("delta must be >= 0");
  // Guard against 4 * delta landing one ulp above an integer.
  return static_cast<int>(std::ceil(4.0 * delta - 1e-9));
}

XosCoreDraw core_prices_xos(const PriceVector& b, double delta, Rng& rng) {
  XosCoreDraw d;
  const int top = std::max(0, xos_core_top_level(delta));
  d.levels = top + 2;
  d.tau = -1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(d.levels)));
  d.prices.resize(b.size());
  const double f = std::exp(static_cast<double>(d.tau) - 1.0);
  for (std::size_t j = 0; j < b.size(); ++j) {
    d.prices[j] = b[j] > 0.0 ? f * b[j] : 0.0;
  }
  return d;
}

XosCoreDraw core_prices_xos(const PriceVector& b, double delta,
                            std::uint64_t seed) {
  Rng rng(seed);
  return core_prices_xos(b, delta, rng);
}

MatchingCoreDraw core_prices_matching(const PriceVector& b, double delta,
                                      int k, Rng& rng) {
  if (k < 2) invalid("matching core prices need k >= 2");
  if (!(delta >= 0.0)) invalid("delta must be >= 0");
  const double lnk = std::log(static_cast<double>(k));
  const double width = 4.0 * delta + lnk + 2.0;
  MatchingCoreDraw d;
  do {
    d.tau = rng.uniform() * width;
    if (d.tau == 0.0) ++d.resamples;
  } while (d.tau == 0.0);
  const std::size_t m = b.size();
  d.prices.assign(m, 0.0);
  d.level.assign(m, 0);
  d.multiplicity.assign(m, 0);
  d.high.assign(m, 0);
  for (std::size_t j = 0; j < m; ++j) {
    if (!(b[j] > 0.0)) continue;
    const double hi = std::log(b[j]) + 4.0 * delta;
    const double lo = std::log(b[j]) - 2.0 - lnk;
    // Largest l with tau * l < hi.
    long l = static_cast<long>(std::ceil(hi / d.tau)) - 1;
    while (d.tau * static_cast<double>(l + 1) < hi) ++l;
    while (d.tau * static_cast<double>(l) >= hi) --l;
    if (d.tau * static_cast<double>(l) < lo) {
      throw Error(ErrorCode::kNumeric, "no price level inside the band");
    }
    long low_l = static_cast<long>(std::ceil(lo / d.tau));
    while (d.tau * static_cast<double>(low_l - 1) >= lo) --low_l;
    while (d.tau * static_cast<double>(low_l) < lo) ++low_l;
    d.level[j] = l;
    d.multiplicity[j] = l - low_l + 1;
    d.coins.emplace(l, 0);
  }
  // One coin per distinct level, drawn in increasing level order.
  for (auto& [l, x] : d.coins) x = rng.bernoulli(1.0 / k) ? 1 : 0;
  for (std::size_t j = 0; j < m; ++j) {
    if (!(b[j] > 0.0)) continue;
    if (d.coins.at(d.level[j]) == 0) {
      d.high[j] = 1;
      d.prices[j] = std::exp(4.0 * delta - 1.0) * b[j];
    } else {
      d.prices[j] = std::exp(d.tau * static_cast<double>(d.level[j]) - 1.0);
    }
  }
  return d;
}

MatchingCoreDraw core_prices_matching(const PriceVector& b, double delta,
                                      int k, std::uint64_t seed) {
  Rng rng(seed);
  return core_prices_matching(b, delta, k, rng);
}

double xos_core_gamma(double delta) {
  return kE * kE * (xos_core_top_level(delta) + 2);
}

double matching_core_gamma(double delta, int k) {
  const double kk = static_cast<double>(k);
  const double r = kE / (kE - 1.0);
  return kE * kE * kE * kk * kk * r * r * (4.0 * delta + std::log(kk) + 2.0);
}

double Mechanism::tail_probability() const {
  return 1.0 / (1.0 + certificate.alpha * gamma);
}

double Mechanism::guarantee() const {
  return (1.0 - epsilon * certificate.alpha * certificate.beta) /
         (1.0 + certificate.alpha * gamma);
}

Mechanism combined_mechanism(const AuctionSpec& auction,
                             const BalancedCertificate& certificate,
                             double gamma, double epsilon) {
  if (!(gamma >= 0.0)) invalid("gamma must be >= 0");
  if (!(epsilon >= 0.0)) invalid("epsilon must be >= 0");
  if (certificate.b.size() != static_cast<std::size_t>(auction.items)) {
    invalid("base price vector length must equal item count");
  }
  Mechanism m;
  m.cls = auction.valuation_class();
  m.certificate = certificate;
  m.delta = weighted_max_degree(auction.mrf);
  m.gamma = gamma;
  m.epsilon = epsilon;
  m.k = std::max(2, auction.max_edge_size());
  return m;
}

Mechanism default_mechanism(const AuctionSpec& auction, const PriceVector& b) {
  const double delta = weighted_max_degree(auction.mrf);
  if (auction.valuation_class() == ValuationClass::kXos) {
    return combined_mechanism(auction, {b, 1.0, 1.0}, xos_core_gamma(delta),
                              1.0 / kE);
  }
  const int k = std::max(2, auction.max_edge_size());
  return combined_mechanism(auction, {b, 1.0, static_cast<double>(k)},
                            matching_core_gamma(delta, k),
                            matching_core_epsilon(k));
}

const char* branch_name(Branch b) {
  return b == Branch::kTail ? "tail" : "core";
}

PostedPrices draw_mechanism_prices(const Mechanism& mech, Rng& rng) {
  PostedPrices out;
  if (rng.uniform() < mech.tail_probability()) {
    out.branch = Branch::kTail;
    out.prices =
        tail_prices(mech.certificate.b, mech.certificate.alpha, mech.delta);
    return out;
  }
  out.branch = Branch::kCore;
  if (mech.cls == ValuationClass::kXos) {
    out.prices = core_prices_xos(mech.certificate.b, mech.delta, rng).prices;
  } else {
    out.prices =
        core_prices_matching(mech.certificate.b, mech.delta, mech.k, rng)
            .prices;
  }
  return out;
}

AllocationResult simulate_posted_price(const Profile& profile,
                                       const std::vector<int>& order,
                                       const PriceVector& prices, int m) {
  AllocationResult r;
  r.sets.assign(profile.size(), 0);
  ItemSet remaining = all_items(m);
  for (int i : order) {
    const ItemSet s = demand_query(*profile[i], prices, remaining);
    r.sets[i] = s;
    remaining &= ~s;
    const double v = value_query(*profile[i], s);
    const double pay = price_of(prices, s);
    r.welfare += v;
    r.revenue += pay;
    r.utility += v - pay;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Monte Carlo evaluation

void aggregate_max(MaxRatioReport& report) {
  RunningStats w, o, rev;
  std::vector<double> vw, vo;
  std::size_t tails = 0;
  for (const auto& t : report.trials) {
    w.add(t.welfare);
    o.add(t.opt);
    rev.add(t.revenue);
    vw.push_back(t.welfare);
    vo.push_back(t.opt);
    tails += t.branch == Branch::kTail;
  }
  report.welfare_mean = w.mean();
  report.welfare_stderr = w.stderr_mean();
  report.opt_mean = o.mean();
  report.revenue_mean = rev.mean();
  report.ratio = o.mean() > 0.0 ? w.mean() / o.mean()
                                : std::numeric_limits<double>::quiet_NaN();
  report.ratio_stderr = ratio_stderr(vw, vo);
  report.tail_fraction =
      report.trials.empty()
          ? 0.0
          : static_cast<double>(tails) / static_cast<double>(report.trials.size());
}

MaxRatioReport evaluate_mechanism(const MaxExperiment& exp, std::size_t trials,
                                  std::uint64_t base_seed, unsigned threads) {
  if (trials < 1) invalid("trials must be >= 1");
  const AuctionSpec& auction = exp.auction;
  auction.validate();
  MaxRatioReport report;
  report.guarantee = exp.mechanism.guarantee();
  std::optional<ExactSampler> sampler;
  if (auction.mrf.type_space().num_states() <= exp.enumeration_cap) {
    sampler.emplace(exact_joint(auction.mrf, exp.enumeration_cap));
  }
  report.exact_sampling = sampler.has_value();

  // Hindsight optima are pure functions of the profile, so share them.
  std::map<Labels, double> cache;
  std::shared_mutex mu;
  auto opt_of = [&](const Labels& labels) {
    {
      std::shared_lock lock(mu);
      auto it = cache.find(labels);
      if (it != cache.end()) return it->second;
    }
    const double w =
        hindsight_opt(auction.profile(labels), auction.items).welfare;
    std::unique_lock lock(mu);
    cache.emplace(labels, w);
    return w;
  };

  std::vector<int> order(auction.num_buyers());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  report.trials.resize(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    const std::uint64_t seed = base_seed + t;
    try {
      Labels labels;
      if (sampler) {
        Rng rng(derive_seed(seed, 10));
        labels = sampler->draw(rng);
      } else {
        GibbsSampler g(auction.mrf, derive_seed(seed, 10));
        for (std::size_t s = 0; s < exp.gibbs.burn_in; ++s) g.sweep();
        labels = g.state();
      }
      Rng price_rng(derive_seed(seed, 20));
      const PostedPrices posted =
          draw_mechanism_prices(exp.mechanism, price_rng);
      const AllocationResult r = simulate_posted_price(
          auction.profile(labels), order, posted.prices, auction.items);
      report.trials[t] = {seed, posted.branch, r.welfare, r.revenue,
                          opt_of(labels)};
    } catch (const Error& e) {
      throw Error(e.code(), "trial " + std::to_string(t) + ": " + e.what());
    }
  });
  aggregate_max(report);
  return report;
}

}  // namespace mrfopt
