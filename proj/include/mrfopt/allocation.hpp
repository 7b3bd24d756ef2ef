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

// Posted-price mechanisms for online combinatorial auctions whose buyer
// types follow an MRF.

#ifndef MRFOPT_ALLOCATION_HPP_
#define MRFOPT_ALLOCATION_HPP_

#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "mrfopt/common.hpp"
#include "mrfopt/mrf.hpp"

namespace mrfopt {

// Bit j set means item j is in the set. At most 64 items.
using ItemSet = std::uint64_t;
inline constexpr int kMaxItems = 64;

inline ItemSet all_items(int m) {
  return m >= 64 ? ~ItemSet{0} : (ItemSet{1} << m) - 1;
}
inline bool has_item(ItemSet s, int j) { return (s >> j) & 1u; }

struct XosValuation {
  std::vector<std::vector<double>> clauses;  // each of length m
};

struct MatchingValuation {
  std::vector<int> items;  // the hyperedge
  double weight = 0.0;

  ItemSet mask() const;
};

using Valuation = std::variant<XosValuation, MatchingValuation>;
using PriceVector = std::vector<double>;
using Profile = std::vector<const Valuation*>;

enum class ValuationClass { kXos, kMatching };

double value_query(const Valuation& v, ItemSet s);
// Utility-maximizing bundle within `available`. Weak comparisons buy.
ItemSet demand_query(const Valuation& v, const PriceVector& prices,
                     ItemSet available);
double price_of(const PriceVector& prices, ItemSet s);

struct AuctionSpec {
  int items = 0;
  std::vector<std::vector<Valuation>> types;  // types[i][label]
  MrfSpec mrf;

  std::size_t num_buyers() const { return types.size(); }
  // Throws InvalidArgument on any structural violation.
  void validate() const;
  ValuationClass valuation_class() const;
  // Largest hyperedge size (matching auctions only, else 0).
  int max_edge_size() const;
  Profile profile(const Labels& labels) const;
};

AuctionSpec auction_from_json(const nlohmann::json& j);
nlohmann::json auction_to_json(const AuctionSpec& a);
nlohmann::json valuation_to_json(const Valuation& v);
Valuation valuation_from_json(const nlohmann::json& j, int m);

struct AllocationResult {
  std::vector<ItemSet> sets;  // per buyer
  double welfare = 0.0;
  double revenue = 0.0;
  double utility = 0.0;
};

inline constexpr std::size_t kHindsightCap = 10'000'000;

// Welfare-maximizing allocation. XOS: enumeration of item-to-buyer
// assignments in lexicographic order, first optimum kept. Matching:
// include-first branch and bound over buyers, first optimum kept.
AllocationResult hindsight_opt(const Profile& profile, int m,
                               std::size_t cap = kHindsightCap);

PriceVector balanced_prices_xos(const Profile& profile,
                                const AllocationResult& opt, int m);
PriceVector balanced_prices_matching(const Profile& profile,
                                     const AllocationResult& opt, int m);
PriceVector balanced_prices(const Profile& profile,
                            const AllocationResult& opt, int m);

struct BalancedCheck {
  bool ok = true;
  int property = 0;  // 1 or 2 when violated
  int buyer = -1;
  ItemSet witness = 0;
  double lhs = 0.0;
  double rhs = 0.0;
};

inline constexpr int kBalancedCheckMaxItems = 12;

BalancedCheck check_balanced(const PriceVector& prices, const Profile& profile,
                             const AllocationResult& opt, int m, double alpha,
                             double beta);

// Exact per-profile quantities over the support of the auction's MRF.
struct ProfileTable {
  std::vector<double> probs;
  std::vector<AllocationResult> opt;
  std::vector<PriceVector> balanced;
};

ProfileTable enumerate_profiles(const AuctionSpec& auction,
                                std::size_t cap = kDefaultEnumerationCap);

struct BasePrices {
  PriceVector b;
  PriceVector stderr_b;  // zero in exact mode
  bool exact = true;
};

BasePrices base_prices_exact(const AuctionSpec& auction,
                             std::size_t cap = kDefaultEnumerationCap);
BasePrices base_prices_exact(const ProfileTable& table, int m);
BasePrices base_prices_monte_carlo(const AuctionSpec& auction,
                                   std::size_t samples, std::uint64_t seed,
                                   std::size_t cap = kDefaultEnumerationCap);

struct BalancedCertificate {
  PriceVector b;
  double alpha = 1.0;
  double beta = 1.0;
};

PriceVector tail_prices(const PriceVector& b, double alpha, double delta);

struct XosCoreDraw {
  PriceVector prices;
  int tau = 0;
  int levels = 0;  // N + 2
};

XosCoreDraw core_prices_xos(const PriceVector& b, double delta, Rng& rng);
XosCoreDraw core_prices_xos(const PriceVector& b, double delta,
                            std::uint64_t seed);

struct MatchingCoreDraw {
  PriceVector prices;
  double tau = 0.0;
  std::vector<long> level;         // per item; meaningless when b_j = 0
  std::vector<long> multiplicity;  // integers inside the band per item
  std::map<long, int> coins;       // X_l per assigned level
  std::vector<char> high;          // X_{l_j} = 0
  int resamples = 0;               // tau == 0 redraws
};

MatchingCoreDraw core_prices_matching(const PriceVector& b, double delta,
                                      int k, Rng& rng);
MatchingCoreDraw core_prices_matching(const PriceVector& b, double delta,
                                      int k, std::uint64_t seed);

// gamma and epsilon constants of the core schemes.
double xos_core_gamma(double delta);
double matching_core_gamma(double delta, int k);
inline double matching_core_epsilon(int k) {
  return 1.0 / (std::numbers::e * k);
}
// N = ceil(4 delta), so tau takes N + 2 values.
int xos_core_top_level(double delta);

struct Mechanism {
  ValuationClass cls = ValuationClass::kXos;
  BalancedCertificate certificate;
  double delta = 0.0;
  double gamma = 0.0;
  double epsilon = 0.0;
  int k = 2;

  double tail_probability() const;
  double guarantee() const;
};

Mechanism combined_mechanism(const AuctionSpec& auction,
                             const BalancedCertificate& certificate,
                             double gamma, double epsilon);
// Standard constants: XOS (1,1) with gamma = e^2 (ceil(4 delta) + 2),
// epsilon = 1/e; matching (1,k) with the matching core gamma.
Mechanism default_mechanism(const AuctionSpec& auction, const PriceVector& b);

enum class Branch { kTail, kCore };
const char* branch_name(Branch b);

struct PostedPrices {
  Branch branch = Branch::kTail;
  PriceVector prices;
};

PostedPrices draw_mechanism_prices(const Mechanism& mech, Rng& rng);

AllocationResult simulate_posted_price(const Profile& profile,
                                       const std::vector<int>& order,
                                       const PriceVector& prices, int m);

struct MaxTrialRecord {
  std::uint64_t seed = 0;
  Branch branch = Branch::kTail;
  double welfare = 0.0;
  double revenue = 0.0;
  double opt = 0.0;
};

struct MaxRatioReport {
  std::vector<MaxTrialRecord> trials;
  double welfare_mean = 0.0;
  double welfare_stderr = 0.0;
  double opt_mean = 0.0;
  double revenue_mean = 0.0;
  double ratio = 0.0;
  double ratio_stderr = 0.0;
  double guarantee = 0.0;
  double tail_fraction = 0.0;
  bool exact_sampling = true;
};

struct MaxExperiment {
  AuctionSpec auction;
  Mechanism mechanism;
  GibbsOptions gibbs;
  std::size_t enumeration_cap = kDefaultEnumerationCap;
};

MaxRatioReport evaluate_mechanism(const MaxExperiment& exp, std::size_t trials,
                                  std::uint64_t base_seed,
                                  unsigned threads = 1);
void aggregate_max(MaxRatioReport& report);

}  // namespace mrfopt

#endif  // MRFOPT_ALLOCATION_HPP_
