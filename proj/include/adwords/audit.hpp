#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adwords/engines.hpp"
#include "adwords/instance.hpp"

namespace adwords {

// A traced run of the class-appropriate engine on G with bidder j removed,
// under the same rank assignment as the full run.
struct RemovalRun {
  BidderId removed = 0;
  RunOutcome outcome;
};

// Engine matching the instance's class, always traced.
RunOutcome audited_run(const Instance& instance, const RankAssignment& ranks,
                       std::optional<BidderId> removed = std::nullopt);

// Throws std::out_of_range for an unknown bidder.
RemovalRun run_with_removal(const Instance& instance, const RankAssignment& ranks, BidderId j);

struct ThresholdRow {
  QueryId query = 0;
  BidderId bidder = 0;
  double removal_utility = 0.0;  // utility of the query in the bidder-removed run
  double cap = 0.0;              // bid(i,j) (1 - 1/e)
  double threshold = 0.0;        // min(removal_utility, cap)
};

// Thresholds u_e for every edge of bidder j. For OBM the cap never binds
// (a unit utility is at most 1 - 1/e).
std::vector<ThresholdRow> thresholds(const Instance& instance, const RankAssignment& ranks,
                                     BidderId j);
std::vector<ThresholdRow> thresholds(const Instance& instance, const RemovalRun& removal);

struct NoSurpassViolation {
  QueryId query = 0;
  BidderId bidder = 0;            // j
  double effective_bid = 0.0;     // bid(i,j) (1 - p_j)
  double removal_best = 0.0;      // best effective bid offered to i in R_j (0 if none)
  double surpassing_bid = 0.0;    // an offer to i in R exceeding effective_bid
  BidderId surpassing_bidder = 0;
};

struct NoSurpassReport {
  std::vector<NoSurpassViolation> violations;
  std::int64_t edges_tested = 0;
  std::int64_t antecedent_true = 0;
  std::int64_t queries = 0;
  std::int64_t queries_violated = 0;

  double edge_rate() const;
  double query_rate() const;
};

struct MultisetVerdict {
  BidderId removed = 0;
  std::int64_t steps = 0;
  std::vector<QueryId> upper_equal_failures;   // T_j(i) ∩ F1 != T(i) ∩ F1
  std::vector<QueryId> lower_subset_failures;  // T_j(i) ∩ F2 not ⊆ T(i) ∩ F2
  std::vector<QueryId> neighbour_failures;     // S_j(i) not ⊆ S(i)

  bool ok() const {
    return upper_equal_failures.empty() && lower_subset_failures.empty() &&
           neighbour_failures.empty();
  }
};

struct ThresholdFailure {
  QueryId query = 0;
  BidderId bidder = 0;
  double utility = 0.0;
  double threshold = 0.0;
  double price = 0.0;
};

struct ThresholdVerdict {
  std::int64_t edges_checked = 0;
  std::vector<ThresholdFailure> dominance_failures;  // u_i < u_e
  std::int64_t cheap_edges = 0;                      // OBM edges with p_j < 1 - u_e
  std::vector<ThresholdFailure> unmatched_when_cheap;

  bool ok() const { return dominance_failures.empty() && unmatched_when_cheap.empty(); }
};

// R and every R_j for one rank assignment: m + 1 traced engine runs.
class AuditContext {
 public:
  AuditContext(const Instance& instance, RankAssignment ranks);

  const Instance& instance() const { return *instance_; }
  const RankAssignment& ranks() const { return ranks_; }
  const RunOutcome& full() const { return full_; }
  const RunOutcome& removal(BidderId j) const { return removals_.at(j); }

 private:
  const Instance* instance_;
  RankAssignment ranks_;
  RunOutcome full_;
  std::vector<RunOutcome> removals_;
};

NoSurpassReport check_no_surpassing(const AuditContext& context);
NoSurpassReport check_no_surpassing(const Instance& instance, const RankAssignment& ranks);

// F1/F2 follow each class's definition: OBM and GENERAL split other bidders
// by price (cheaper goes to F1), SINGLE_VALUED by effective bid b_l (1 - p_l)
// (larger goes to F1). Multiplicities are 1, B_l and k_l respectively.
MultisetVerdict check_multiset_lemmas(const AuditContext& context, BidderId j);
MultisetVerdict check_multiset_lemmas(const Instance& instance, const RankAssignment& ranks,
                                      BidderId j);

// u_i >= u_e on every edge; for OBM also: p_j < 1 - u_e implies j is matched.
ThresholdVerdict check_threshold_dominance(const AuditContext& context);
ThresholdVerdict check_threshold_dominance(const Instance& instance, const RankAssignment& ranks);

// Replays R and R_j and confirms the cited bids exactly.
bool recheck_violation(const Instance& instance, const RankAssignment& ranks,
                       const NoSurpassViolation& violation);

struct AuditChecks {
  bool no_surpassing = true;
  bool multiset = true;
  bool thresholds = true;
};

struct AuditReport {
  std::optional<std::uint64_t> seed;
  std::vector<double> ranks;
  std::optional<NoSurpassReport> no_surpassing;
  std::vector<MultisetVerdict> multiset;
  std::optional<ThresholdVerdict> thresholds;

  bool run_violated() const { return no_surpassing && !no_surpassing->violations.empty(); }
  bool lemmas_ok() const;
};

AuditReport audit(const Instance& instance, const RankAssignment& ranks,
                  const AuditChecks& checks = {});

}  // namespace adwords
