#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace adwords {

// Money is integral everywhere: bids, budgets, real and fake spend.
using Money = std::int64_t;
using QueryId = std::int32_t;
using BidderId = std::int32_t;

enum class ProblemClass { kObm, kSingleValued, kGeneral };

std::string to_string(ProblemClass cls);
ProblemClass problem_class_from_string(const std::string& name);

struct Bidder {
  BidderId id = 0;
  Money budget = 1;
  // Only meaningful for single-valued bidders: budget == value * cap.
  std::optional<Money> value;
  std::optional<Money> cap;

  friend bool operator==(const Bidder&, const Bidder&) = default;
};

struct Edge {
  BidderId bidder = 0;
  Money bid = 1;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// One query -> bidder pair of an offline assignment.
struct Assignment {
  QueryId query = 0;
  BidderId bidder = 0;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct PlantedSolution {
  std::vector<Assignment> assignment;

  friend bool operator==(const PlantedSolution&, const PlantedSolution&) = default;
};

// A bipartite market. Queries arrive in index order 0..n-1; that order is the
// adversary's arrival order and is fixed before any randomness is drawn.
struct Instance {
  ProblemClass problem_class = ProblemClass::kGeneral;
  std::vector<Bidder> bidders;
  std::vector<std::vector<Edge>> edges;  // edges[q] lists q's interested bidders
  std::optional<PlantedSolution> planted_opt;

  std::size_t num_queries() const { return edges.size(); }
  std::size_t num_bidders() const { return bidders.size(); }

  friend bool operator==(const Instance&, const Instance&) = default;
};

// Per-bidder cap on the number of matches (k_j); 1 for OBM goods.
Money match_cap(const Instance& instance, BidderId j);
// Per-bidder single bid value (b_j); 1 for OBM goods.
Money single_value(const Instance& instance, BidderId j);

Money total_budget(const Instance& instance);
// Bid of bidder j for query q, or nullopt when (q, j) is not an edge.
std::optional<Money> find_bid(const Instance& instance, QueryId q, BidderId j);

struct Violation {
  std::optional<QueryId> query;
  std::optional<BidderId> bidder;
  std::string message;
};

// Every invariant violation for the instance's problem class. Empty means
// well-formed.
std::vector<Violation> validate(const Instance& instance);

// Throws std::invalid_argument listing the violations, if any.
void require_valid(const Instance& instance);

// Checks a query -> bidder assignment against query uniqueness, edge
// existence and budgets. Returns the violations (empty when feasible).
std::vector<Violation> check_assignment(const Instance& instance,
                                        const std::vector<Assignment>& assignment);

// Sum of assigned bids; assumes the assignment references existing edges.
Money assignment_value(const Instance& instance,
                       const std::vector<Assignment>& assignment);

// Re-tags an instance with a narrower or wider class. Narrowing requires the
// instance to satisfy the target class's invariants (e.g. a general instance
// with unit bids and budgets becomes OBM); throws std::invalid_argument
// otherwise.
Instance as_class(const Instance& instance, ProblemClass target);

struct Ratio {
  Money numerator = 0;
  Money denominator = 1;

  double value() const {
    return static_cast<double>(numerator) / static_cast<double>(denominator);
  }
  // Exact comparison by cross multiplication.
  friend bool operator<(const Ratio& a, const Ratio& b) {
    return static_cast<__int128>(a.numerator) * b.denominator <
           static_cast<__int128>(b.numerator) * a.denominator;
  }
  friend bool operator==(const Ratio& a, const Ratio& b) {
    return static_cast<__int128>(a.numerator) * b.denominator ==
           static_cast<__int128>(b.numerator) * a.denominator;
  }
};

// mu(I) = max_j (max_{(i,j)} bid(i,j) - 1) / B_j. Bidders without edges
// contribute 0.
Ratio mu(const Instance& instance);

// Sum over bidders of max_{(i,j)} (bid(i,j) - 1); the per-run fake money
// ceiling of the fake-money engine.
Money fake_money_ceiling(const Instance& instance);

// --- generators -------------------------------------------------------------

// Query i likes goods i..n-1. Planted perfect matching i <-> i.
Instance gen_upper_triangular(int n);

// The three two-bidder instances with budgets W each. First bidder has id 0.
std::tuple<Instance, Instance, Instance> gen_example_three(Money w);

// Two bidders j (id 0) and j' (id 1), k queries. Bidder j bids alpha on every
// query; j' bids alpha-1 on the first k-1 and (alpha-1)(k-1) on the last.
// B_j = alpha*k, B_j' = (alpha-1)(k-1).
Instance gen_example_no_surpass(Money alpha, int k);

enum class BudgetPolicy {
  kFixed,             // GENERAL: B_j = value; SINGLE_VALUED: k_j = value
  kFractionOfDemand,  // GENERAL: B_j = ceil(value * sum of j's bids);
                      // SINGLE_VALUED: k_j = ceil(value * degree)
};

struct RandomParams {
  ProblemClass problem_class = ProblemClass::kGeneral;
  int n = 10;
  int m = 4;
  double density = 0.5;
  Money bid_lo = 1;
  Money bid_hi = 5;
  BudgetPolicy budget_policy = BudgetPolicy::kFractionOfDemand;
  double budget_value = 0.5;
  std::uint64_t seed = 0;
};

// Random instance. Every query has at least one edge. Deterministic in the
// seed.
Instance gen_random(const RandomParams& params);

struct PlantedParams {
  ProblemClass problem_class = ProblemClass::kGeneral;
  // Minimum number of queries. OBM and SINGLE_VALUED use exactly n; GENERAL
  // pads with distractor-only queries up to n.
  int n = 20;
  int m = 4;
  // GENERAL only: bids are capped so that mu(I) <= mu_target.
  double mu_target = 0.1;
  // GENERAL: budgets are drawn from [budget / 2, budget].
  Money budget = 100;
  // SINGLE_VALUED: b_j is drawn from [1, value_hi].
  Money value_hi = 5;
  // Extra non-planted edges per query.
  int distractors = 2;
  std::uint64_t seed = 0;
};

// Instance carrying a planted assignment that spends every budget exactly, so
// the offline optimum equals the sum of budgets. Queries are shuffled into a
// seed-determined arrival order.
Instance gen_planted(const PlantedParams& params);

// --- file format ------------------------------------------------------------

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string to_json_text(const Instance& instance);
Instance from_json_text(const std::string& text);

Instance read_instance(const std::filesystem::path& path);
void write_instance(const Instance& instance, const std::filesystem::path& path);

// Content hash of the canonical serialization, e.g. "inst-3f2a...".
std::string instance_id(const Instance& instance);

}  // namespace adwords
