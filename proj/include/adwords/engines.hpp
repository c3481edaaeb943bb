#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adwords/instance.hpp"

namespace adwords {

// One draw of bidder ranks w_j ~ U[0,1] and the derived prices
// p_j = exp(w_j - 1) in [1/e, 1]. Shared by a run and all of its
// bidder-removed counterparts.
struct RankAssignment {
  std::vector<double> rank;
  std::vector<double> price;
  std::optional<std::uint64_t> seed;

  std::size_t size() const { return rank.size(); }
};

double price_of_rank(double w);

// Uniform ranks for every bidder of the instance, deterministic in the seed.
RankAssignment draw_ranks(const Instance& instance, std::uint64_t seed);
RankAssignment draw_ranks(std::size_t num_bidders, std::uint64_t seed);
// Injected ranks. Throws std::invalid_argument unless every w lies in [0, 1].
RankAssignment ranks_from(std::vector<double> ranks);

// Goods ordered by increasing price; ties by lower id.
std::vector<BidderId> price_order(const RankAssignment& ranks);

struct Offer {
  BidderId bidder = 0;
  Money bid = 0;
  double effective = 0.0;

  friend bool operator==(const Offer&, const Offer&) = default;
};

// The only view of bidder state the budget-oblivious engines' decision step
// gets: whether a bidder can still be matched.
class Availability {
 public:
  virtual ~Availability() = default;
  virtual bool available(BidderId j) const = 0;
};

// Largest effective bid bid * (1 - p_j) among available neighbours; ties go to
// the lowest bidder id. Every offer considered is appended to `offers` when
// non-null.
std::optional<Offer> best_offer(std::span<const Edge> edges, std::span<const double> prices,
                                const Availability& availability,
                                std::vector<Offer>* offers = nullptr);

struct MatchedEdge {
  QueryId query = 0;
  BidderId bidder = 0;
  Money bid = 0;

  friend bool operator==(const MatchedEdge&, const MatchedEdge&) = default;
};

// Multiset of bidder copies: entry j is the multiplicity of bidder j.
using CopyMultiset = std::vector<Money>;

struct TraceStep {
  CopyMultiset available;   // T(i): copies per bidder, indexed by bidder id
  CopyMultiset neighbours;  // S(i): T(i) restricted to i's neighbours
  std::vector<Offer> offers;
  std::optional<Offer> accepted;
};

struct RunTrace {
  std::vector<TraceStep> steps;
};

struct RunOutcome {
  std::vector<MatchedEdge> matching;
  std::vector<double> utility;  // u_i per query
  std::vector<double> revenue;  // r_j per bidder
  Money real_money = 0;         // W
  Money fake_money = 0;         // W_f
  std::vector<Money> leftover;  // L_j (budget units left)
  std::vector<Money> degree;    // d_j (number of matches)
  std::optional<RunTrace> trace;

  // Matched bidder per query, -1 when unmatched.
  std::vector<BidderId> match_of_query() const;
  Money matched_weight() const;
};

struct RunOptions {
  bool trace = false;
  // Run on G with this bidder removed (the bidder has no copies and never
  // bids). Bidder ids and ranks are kept, so runs stay aligned.
  std::optional<BidderId> removed;
};

class ClassMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Permutation RANKING: each query takes the first unmatched liked good in
// `order`. Carries no prices, so utilities and revenues stay zero.
RunOutcome run_ranking_permutation(const Instance& instance, std::span<const BidderId> order,
                                   const RunOptions& options = {});

// Price RANKING on OBM: each query takes the cheapest unmatched liked good;
// u_i = 1 - p_j, r_j = p_j.
RunOutcome run_ranking(const Instance& instance, const RankAssignment& ranks,
                       const RunOptions& options = {});

// Single-valued engine: bidder j offers b_j (1 - p_j) while d_j < k_j.
// Accepts SINGLE_VALUED and OBM instances (OBM goods are b = k = 1).
RunOutcome run_single_valued(const Instance& instance, const RankAssignment& ranks,
                             const RunOptions& options = {});

// Fake-money engine: bidder j offers bid(i,j) (1 - p_j) while L_j > 0; a
// winning bid above L_j is paid L_j real and the remainder fake. Accepts every
// class (all are GENERAL instances).
RunOutcome run_general(const Instance& instance, const RankAssignment& ranks,
                       const RunOptions& options = {});

// Deterministic baselines. Both bid min(L_j, bid) and never use fake money;
// the matched weight is the real amount charged.
RunOutcome run_greedy(const Instance& instance, const RunOptions& options = {});
RunOutcome run_msvv(const Instance& instance, const RunOptions& options = {});

// MSVV trade-off function 1 - exp(-(1 - f)) of the spent fraction f.
double msvv_discount(double spent_fraction);

enum class Algorithm { kRanking, kSingleValued, kGeneral, kGreedy, kMsvv };

std::string to_string(Algorithm algorithm);
Algorithm algorithm_from_string(const std::string& name);
bool is_randomized(Algorithm algorithm);
// The engine whose analysis matches the instance's class.
Algorithm native_algorithm(ProblemClass cls);

RunOutcome run(Algorithm algorithm, const Instance& instance, const RankAssignment& ranks,
               const RunOptions& options = {});

}  // namespace adwords
