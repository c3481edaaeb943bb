#pragma once

// Independent oracles for the tests. Nothing here calls into the library's
// solvers or engines.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "adwords/engines.hpp"
#include "adwords/instance.hpp"

namespace testing {

using adwords::BidderId;
using adwords::Edge;
using adwords::Instance;
using adwords::Money;
using adwords::QueryId;

// Best total bid over every assignment whose per-bidder bid sum fits the
// budget. For OBM and single-valued instances the budget test is the match
// cap, since B_j = k_j b_j and every bid is b_j.
inline Money enumerate_optimum(const Instance& inst) {
  std::vector<Money> spent(inst.num_bidders(), 0);
  Money best = 0;
  const auto n = inst.num_queries();
  std::vector<std::size_t> pick(n, 0);  // 0 = unassigned, t + 1 = edge t
  // Odometer over all (deg + 1)^n choices.
  while (true) {
    std::fill(spent.begin(), spent.end(), 0);
    Money value = 0;
    bool feasible = true;
    for (std::size_t q = 0; q < n && feasible; ++q) {
      if (pick[q] == 0) continue;
      const Edge& e = inst.edges[q][pick[q] - 1];
      spent[e.bidder] += e.bid;
      value += e.bid;
      feasible = spent[e.bidder] <= inst.bidders[e.bidder].budget;
    }
    if (feasible) best = std::max(best, value);
    std::size_t q = 0;
    while (q < n && pick[q] == inst.edges[q].size()) pick[q++] = 0;
    if (q == n) break;
    ++pick[q];
  }
  return best;
}

struct Reference {
  std::vector<std::pair<QueryId, BidderId>> matching;
  Money real = 0;
  Money fake = 0;
  std::vector<double> u, r;
};

// Direct transcription of the fake-money update rules: j bids while L_j > 0,
// the query takes the largest bid (1 - p_j) with ties to the lower id.
inline Reference reference_general(const Instance& inst, const std::vector<double>& price) {
  Reference out;
  std::vector<Money> left;
  for (const auto& b : inst.bidders) left.push_back(b.budget);
  out.u.assign(inst.num_queries(), 0.0);
  out.r.assign(inst.num_bidders(), 0.0);
  for (QueryId i = 0; i < static_cast<QueryId>(inst.num_queries()); ++i) {
    int best = -1;
    double best_value = -1.0;
    Money best_bid = 0;
    for (const Edge& e : inst.edges[i]) {
      if (left[e.bidder] <= 0) continue;
      const double v = e.bid * (1.0 - price[e.bidder]);
      if (v > best_value || (v == best_value && e.bidder < best)) {
        best = e.bidder;
        best_value = v;
        best_bid = e.bid;
      }
    }
    if (best < 0) continue;
    out.matching.emplace_back(i, best);
    out.u[i] = best_bid * (1.0 - price[best]);
    out.r[best] += best_bid * price[best];
    const Money real = std::min(left[best], best_bid);
    out.real += real;
    out.fake += best_bid - real;
    left[best] -= real;
  }
  return out;
}

inline std::vector<std::pair<QueryId, BidderId>> pairs(const adwords::RunOutcome& o) {
  std::vector<std::pair<QueryId, BidderId>> p;
  for (const auto& e : o.matching) p.emplace_back(e.query, e.bidder);
  return p;
}

inline adwords::Bidder bidder(BidderId id, Money budget) {
  return adwords::Bidder{id, budget, std::nullopt, std::nullopt};
}

inline adwords::Bidder sv_bidder(BidderId id, Money value, Money cap) {
  return adwords::Bidder{id, value * cap, value, cap};
}

}  // namespace testing
