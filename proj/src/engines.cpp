#include "adwords/engines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adwords/rng.hpp"

namespace adwords {

double price_of_rank(double w) { return std::exp(w - 1.0); }

RankAssignment draw_ranks(std::size_t num_bidders, std::uint64_t seed) {
  Rng rng(seed);
  RankAssignment out;
  out.rank.resize(num_bidders);
  out.price.resize(num_bidders);
  for (std::size_t j = 0; j < num_bidders; ++j) {
    out.rank[j] = rng.uniform();
    out.price[j] = price_of_rank(out.rank[j]);
  }
  out.seed = seed;
  return out;
}

RankAssignment draw_ranks(const Instance& instance, std::uint64_t seed) {
  return draw_ranks(instance.num_bidders(), seed);
}

RankAssignment ranks_from(std::vector<double> ranks) {
  RankAssignment out;
  for (double w : ranks) {
    if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("ranks must lie in [0, 1]");
  }
  out.price.resize(ranks.size());
  std::transform(ranks.begin(), ranks.end(), out.price.begin(), price_of_rank);
  out.rank = std::move(ranks);
  return out;
}

std::vector<BidderId> price_order(const RankAssignment& ranks) {
  std::vector<BidderId> order(ranks.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](BidderId a, BidderId b) {
    return ranks.price[a] < ranks.price[b];
  });
  return order;
}

std::optional<Offer> best_offer(std::span<const Edge> edges, std::span<const double> prices,
                                const Availability& availability, std::vector<Offer>* offers) {
  std::optional<Offer> best;
  for (const Edge& e : edges) {
    if (!availability.available(e.bidder)) continue;
    const Offer offer{e.bidder, e.bid, static_cast<double>(e.bid) * (1.0 - prices[e.bidder])};
    if (offers) offers->push_back(offer);
    if (!best || offer.effective > best->effective ||
        (offer.effective == best->effective && offer.bidder < best->bidder)) {
      best = offer;
    }
  }
  return best;
}

std::vector<BidderId> RunOutcome::match_of_query() const {
  std::vector<BidderId> out(utility.size(), -1);
  for (const MatchedEdge& e : matching) out[e.query] = e.bidder;
  return out;
}

Money RunOutcome::matched_weight() const {
  Money total = 0;
  for (const MatchedEdge& e : matching) total += e.bid;
  return total;
}

namespace {

// Copies of each bidder still available: one per good (OBM), k_j - d_j
// (single-valued) or L_j (fake-money engine).
class CopyLedger final : public Availability {
 public:
  CopyLedger(std::vector<Money> copies, std::optional<BidderId> removed)
      : copies_(std::move(copies)) {
    if (removed) copies_.at(*removed) = 0;
  }

  bool available(BidderId j) const override { return copies_[j] > 0; }

  Money copies(BidderId j) const { return copies_[j]; }
  const std::vector<Money>& all() const { return copies_; }

  // Removes up to `amount` copies and returns how many were removed.
  Money take(BidderId j, Money amount) {
    const Money taken = std::min(copies_[j], amount);
    copies_[j] -= taken;
    return taken;
  }

 private:
  std::vector<Money> copies_;
};

enum class Accounting { kUnitCopies, kBudget };

RunOutcome start_outcome(const Instance& instance) {
  RunOutcome out;
  out.utility.assign(instance.num_queries(), 0.0);
  out.revenue.assign(instance.num_bidders(), 0.0);
  out.degree.assign(instance.num_bidders(), 0);
  return out;
}

TraceStep trace_step(const CopyLedger& ledger, std::span<const Edge> edges) {
  TraceStep step;
  step.available = ledger.all();
  step.neighbours.assign(step.available.size(), 0);
  for (const Edge& e : edges) step.neighbours[e.bidder] = ledger.copies(e.bidder);
  return step;
}

// Shared loop of the three price-based engines. The decision step sees only
// the ledger's Availability interface; the ledger's magnitudes are used for
// bookkeeping after a bid has been accepted.
RunOutcome run_priced(const Instance& instance, const RankAssignment& ranks,
                      std::vector<Money> initial_copies, Accounting accounting,
                      const RunOptions& options) {
  if (ranks.size() != instance.num_bidders()) {
    throw std::invalid_argument("rank assignment does not match the number of bidders");
  }
  CopyLedger ledger(std::move(initial_copies), options.removed);
  RunOutcome out = start_outcome(instance);
  if (options.trace) out.trace.emplace();

  for (QueryId i = 0; i < static_cast<QueryId>(instance.num_queries()); ++i) {
    const std::span<const Edge> edges(instance.edges[i]);
    TraceStep step;
    if (options.trace) step = trace_step(ledger, edges);
    const auto best = best_offer(edges, ranks.price, ledger, options.trace ? &step.offers : nullptr);
    if (best) {
      const BidderId j = best->bidder;
      const double p = ranks.price[j];
      out.utility[i] = static_cast<double>(best->bid) * (1.0 - p);
      out.revenue[j] += static_cast<double>(best->bid) * p;
      out.degree[j] += 1;
      out.matching.push_back(MatchedEdge{i, j, best->bid});
      if (accounting == Accounting::kBudget) {
        const Money real = ledger.take(j, best->bid);
        out.real_money += real;
        out.fake_money += best->bid - real;
      } else {
        ledger.take(j, 1);
        out.real_money += best->bid;
      }
    }
    if (options.trace) {
      step.accepted = best;
      out.trace->steps.push_back(std::move(step));
    }
  }
  out.leftover = ledger.all();
  return out;
}

void require_class(const Instance& instance, std::initializer_list<ProblemClass> allowed,
                   const char* engine) {
  for (ProblemClass c : allowed) {
    if (instance.problem_class == c) return;
  }
  throw ClassMismatch(std::string(engine) + " cannot run on a " +
                      to_string(instance.problem_class) + " instance");
}

}  // namespace

RunOutcome run_ranking_permutation(const Instance& instance, std::span<const BidderId> order,
                                   const RunOptions& options) {
  require_class(instance, {ProblemClass::kObm}, "permutation RANKING");
  const auto m = instance.num_bidders();
  if (order.size() != m) throw std::invalid_argument("permutation must cover every good");
  std::vector<std::size_t> position(m, m);
  for (std::size_t t = 0; t < m; ++t) {
    const BidderId g = order[t];
    if (g < 0 || static_cast<std::size_t>(g) >= m || position[g] != m) {
      throw std::invalid_argument("order is not a permutation of the goods");
    }
    position[g] = t;
  }

  CopyLedger ledger(std::vector<Money>(m, 1), options.removed);
  RunOutcome out = start_outcome(instance);
  if (options.trace) out.trace.emplace();
  for (QueryId i = 0; i < static_cast<QueryId>(instance.num_queries()); ++i) {
    TraceStep step;
    if (options.trace) step = trace_step(ledger, instance.edges[i]);
    std::optional<BidderId> first;
    for (const Edge& e : instance.edges[i]) {
      if (!ledger.available(e.bidder)) continue;
      if (!first || position[e.bidder] < position[*first]) first = e.bidder;
    }
    if (first) {
      ledger.take(*first, 1);
      out.degree[*first] += 1;
      out.real_money += 1;
      out.matching.push_back(MatchedEdge{i, *first, 1});
      step.accepted = Offer{*first, 1, 0.0};
    }
    if (options.trace) out.trace->steps.push_back(std::move(step));
  }
  out.leftover = ledger.all();
  return out;
}

RunOutcome run_ranking(const Instance& instance, const RankAssignment& ranks,
                       const RunOptions& options) {
  require_class(instance, {ProblemClass::kObm}, "RANKING");
  return run_priced(instance, ranks, std::vector<Money>(instance.num_bidders(), 1),
                    Accounting::kUnitCopies, options);
}

RunOutcome run_single_valued(const Instance& instance, const RankAssignment& ranks,
                             const RunOptions& options) {
  require_class(instance, {ProblemClass::kSingleValued, ProblemClass::kObm},
                "single-valued engine");
  std::vector<Money> caps(instance.num_bidders());
  for (BidderId j = 0; j < static_cast<BidderId>(caps.size()); ++j) {
    caps[j] = match_cap(instance, j);
  }
  return run_priced(instance, ranks, std::move(caps), Accounting::kUnitCopies, options);
}

RunOutcome run_general(const Instance& instance, const RankAssignment& ranks,
                       const RunOptions& options) {
  std::vector<Money> budgets(instance.num_bidders());
  for (std::size_t j = 0; j < budgets.size(); ++j) budgets[j] = instance.bidders[j].budget;
  return run_priced(instance, ranks, std::move(budgets), Accounting::kBudget, options);
}

double msvv_discount(double spent_fraction) {
  return 1.0 - std::exp(-(1.0 - spent_fraction));
}

namespace {

// Budget-aware deterministic baseline. `score(bid, j)` ranks offers; the
// winner pays min(L_j, bid).
template <class Score>
RunOutcome run_budgeted_baseline(const Instance& instance, const RunOptions& options,
                                 Score score) {
  std::vector<Money> budgets(instance.num_bidders());
  for (std::size_t j = 0; j < budgets.size(); ++j) budgets[j] = instance.bidders[j].budget;
  CopyLedger ledger(std::move(budgets), options.removed);
  RunOutcome out = start_outcome(instance);
  if (options.trace) out.trace.emplace();

  for (QueryId i = 0; i < static_cast<QueryId>(instance.num_queries()); ++i) {
    TraceStep step;
    if (options.trace) step = trace_step(ledger, instance.edges[i]);
    std::optional<Offer> best;
    for (const Edge& e : instance.edges[i]) {
      if (!ledger.available(e.bidder)) continue;
      const Offer offer{e.bidder, std::min(e.bid, ledger.copies(e.bidder)),
                        score(e, ledger.copies(e.bidder))};
      if (options.trace) step.offers.push_back(offer);
      if (!best || offer.effective > best->effective ||
          (offer.effective == best->effective && offer.bidder < best->bidder)) {
        best = offer;
      }
    }
    if (best) {
      const Money paid = ledger.take(best->bidder, best->bid);
      out.real_money += paid;
      out.degree[best->bidder] += 1;
      out.matching.push_back(MatchedEdge{i, best->bidder, paid});
    }
    if (options.trace) {
      step.accepted = best;
      out.trace->steps.push_back(std::move(step));
    }
  }
  out.leftover = ledger.all();
  return out;
}

}  // namespace

RunOutcome run_greedy(const Instance& instance, const RunOptions& options) {
  return run_budgeted_baseline(instance, options, [](const Edge& e, Money left) {
    return static_cast<double>(std::min(e.bid, left));
  });
}

RunOutcome run_msvv(const Instance& instance, const RunOptions& options) {
  return run_budgeted_baseline(instance, options, [&](const Edge& e, Money left) {
    const double budget = static_cast<double>(instance.bidders[e.bidder].budget);
    const double spent = budget - static_cast<double>(left);
    return static_cast<double>(e.bid) * msvv_discount(spent / budget);
  });
}

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kRanking:
      return "ranking";
    case Algorithm::kSingleValued:
      return "single_valued";
    case Algorithm::kGeneral:
      return "general";
    case Algorithm::kGreedy:
      return "greedy";
    case Algorithm::kMsvv:
      return "msvv";
  }
  return "general";
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "ranking") return Algorithm::kRanking;
  if (name == "single_valued") return Algorithm::kSingleValued;
  if (name == "general") return Algorithm::kGeneral;
  if (name == "greedy") return Algorithm::kGreedy;
  if (name == "msvv") return Algorithm::kMsvv;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

bool is_randomized(Algorithm algorithm) {
  return algorithm == Algorithm::kRanking || algorithm == Algorithm::kSingleValued ||
         algorithm == Algorithm::kGeneral;
}

Algorithm native_algorithm(ProblemClass cls) {
  switch (cls) {
    case ProblemClass::kObm:
      return Algorithm::kRanking;
    case ProblemClass::kSingleValued:
      return Algorithm::kSingleValued;
    case ProblemClass::kGeneral:
      return Algorithm::kGeneral;
  }
  return Algorithm::kGeneral;
}

RunOutcome run(Algorithm algorithm, const Instance& instance, const RankAssignment& ranks,
               const RunOptions& options) {
  switch (algorithm) {
    case Algorithm::kRanking:
      return run_ranking(instance, ranks, options);
    case Algorithm::kSingleValued:
      return run_single_valued(instance, ranks, options);
    case Algorithm::kGeneral:
      return run_general(instance, ranks, options);
    case Algorithm::kGreedy:
      return run_greedy(instance, options);
    case Algorithm::kMsvv:
      return run_msvv(instance, options);
  }
  throw std::invalid_argument("unknown algorithm");
}

}  // namespace adwords
