#include "adwords/audit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adwords {

namespace {

const double kOneMinusInvE = 1.0 - std::exp(-1.0);

double best_effective(const TraceStep& step) {
  double best = 0.0;
  for (const Offer& o : step.offers) best = std::max(best, o.effective);
  return best;
}

void require_bidder(const Instance& instance, BidderId j) {
  if (j < 0 || static_cast<std::size_t>(j) >= instance.num_bidders()) {
    throw std::out_of_range("unknown bidder " + std::to_string(j));
  }
}

}  // namespace

RunOutcome audited_run(const Instance& instance, const RankAssignment& ranks,
                       std::optional<BidderId> removed) {
  RunOptions options;
  options.trace = true;
  options.removed = removed;
  return run(native_algorithm(instance.problem_class), instance, ranks, options);
}

RemovalRun run_with_removal(const Instance& instance, const RankAssignment& ranks, BidderId j) {
  require_bidder(instance, j);
  return RemovalRun{j, audited_run(instance, ranks, j)};
}

std::vector<ThresholdRow> thresholds(const Instance& instance, const RemovalRun& removal) {
  std::vector<ThresholdRow> rows;
  const BidderId j = removal.removed;
  for (QueryId i = 0; i < static_cast<QueryId>(instance.num_queries()); ++i) {
    for (const Edge& e : instance.edges[i]) {
      if (e.bidder != j) continue;
      ThresholdRow row;
      row.query = i;
      row.bidder = j;
      row.removal_utility = removal.outcome.utility[i];
      row.cap = static_cast<double>(e.bid) * kOneMinusInvE;
      row.threshold = std::min(row.removal_utility, row.cap);
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<ThresholdRow> thresholds(const Instance& instance, const RankAssignment& ranks,
                                     BidderId j) {
  return thresholds(instance, run_with_removal(instance, ranks, j));
}

double NoSurpassReport::edge_rate() const {
  return edges_tested ? static_cast<double>(violations.size()) / static_cast<double>(edges_tested)
                      : 0.0;
}

double NoSurpassReport::query_rate() const {
  return queries ? static_cast<double>(queries_violated) / static_cast<double>(queries) : 0.0;
}

AuditContext::AuditContext(const Instance& instance, RankAssignment ranks)
    : instance_(&instance), ranks_(std::move(ranks)) {
  full_ = audited_run(instance, ranks_);
  removals_.reserve(instance.num_bidders());
  for (BidderId j = 0; j < static_cast<BidderId>(instance.num_bidders()); ++j) {
    removals_.push_back(audited_run(instance, ranks_, j));
  }
}

NoSurpassReport check_no_surpassing(const AuditContext& context) {
  const Instance& instance = context.instance();
  const auto& price = context.ranks().price;
  NoSurpassReport report;
  report.queries = static_cast<std::int64_t>(instance.num_queries());
  for (QueryId i = 0; i < static_cast<QueryId>(instance.num_queries()); ++i) {
    const TraceStep& full_step = context.full().trace->steps[i];
    bool violated = false;
    for (const Edge& e : instance.edges[i]) {
      ++report.edges_tested;
      const double ebid = static_cast<double>(e.bid) * (1.0 - price[e.bidder]);
      const double beta = best_effective(context.removal(e.bidder).trace->steps[i]);
      if (!(ebid > beta)) continue;
      ++report.antecedent_true;
      const Offer* surpass = nullptr;
      for (const Offer& o : full_step.offers) {
        if (o.effective > ebid && (!surpass || o.effective > surpass->effective)) surpass = &o;
      }
      if (!surpass) continue;
      violated = true;
      report.violations.push_back(
          NoSurpassViolation{i, e.bidder, ebid, beta, surpass->effective, surpass->bidder});
    }
    if (violated) ++report.queries_violated;
  }
  return report;
}

NoSurpassReport check_no_surpassing(const Instance& instance, const RankAssignment& ranks) {
  return check_no_surpassing(AuditContext(instance, ranks));
}

MultisetVerdict check_multiset_lemmas(const AuditContext& context, BidderId j) {
  const Instance& instance = context.instance();
  require_bidder(instance, j);
  const auto m = static_cast<BidderId>(instance.num_bidders());
  const auto& price = context.ranks().price;

  // Multiplicity of each bidder in F1 and F2.
  std::vector<Money> upper(m, 0), lower(m, 0);
  const bool by_effective_bid = instance.problem_class == ProblemClass::kSingleValued;
  const double key_j = by_effective_bid
                           ? static_cast<double>(single_value(instance, j)) * (1.0 - price[j])
                           : price[j];
  for (BidderId l = 0; l < m; ++l) {
    if (l == j) continue;
    const Money copies = match_cap(instance, l);
    if (by_effective_bid) {
      const double key = static_cast<double>(single_value(instance, l)) * (1.0 - price[l]);
      if (key > key_j) upper[l] = copies;
      if (key < key_j) lower[l] = copies;
    } else {
      if (price[l] < key_j) upper[l] = copies;
      if (price[l] > key_j) lower[l] = copies;
    }
  }

  MultisetVerdict verdict;
  verdict.removed = j;
  const auto& full = context.full().trace->steps;
  const auto& removal = context.removal(j).trace->steps;
  for (QueryId i = 0; i < static_cast<QueryId>(full.size()); ++i) {
    ++verdict.steps;
    const CopyMultiset& t = full[i].available;
    const CopyMultiset& tj = removal[i].available;
    bool upper_ok = true, lower_ok = true, neighbour_ok = true;
    for (BidderId l = 0; l < m; ++l) {
      if (std::min(tj[l], upper[l]) != std::min(t[l], upper[l])) upper_ok = false;
      if (std::min(tj[l], lower[l]) > std::min(t[l], lower[l])) lower_ok = false;
      if (removal[i].neighbours[l] > full[i].neighbours[l]) neighbour_ok = false;
    }
    if (!upper_ok) verdict.upper_equal_failures.push_back(i);
    if (!lower_ok) verdict.lower_subset_failures.push_back(i);
    if (!neighbour_ok) verdict.neighbour_failures.push_back(i);
  }
  return verdict;
}

MultisetVerdict check_multiset_lemmas(const Instance& instance, const RankAssignment& ranks,
                                      BidderId j) {
  return check_multiset_lemmas(AuditContext(instance, ranks), j);
}

ThresholdVerdict check_threshold_dominance(const AuditContext& context) {
  const Instance& instance = context.instance();
  const auto& price = context.ranks().price;
  const RunOutcome& full = context.full();
  ThresholdVerdict verdict;
  for (BidderId j = 0; j < static_cast<BidderId>(instance.num_bidders()); ++j) {
    const RemovalRun removal{j, context.removal(j)};
    for (const ThresholdRow& row : thresholds(instance, removal)) {
      ++verdict.edges_checked;
      const double u = full.utility[row.query];
      const ThresholdFailure record{row.query, j, u, row.threshold, price[j]};
      if (u < row.threshold) verdict.dominance_failures.push_back(record);
      if (instance.problem_class == ProblemClass::kObm && price[j] < 1.0 - row.threshold) {
        ++verdict.cheap_edges;
        if (full.degree[j] == 0) verdict.unmatched_when_cheap.push_back(record);
      }
    }
  }
  return verdict;
}

ThresholdVerdict check_threshold_dominance(const Instance& instance, const RankAssignment& ranks) {
  return check_threshold_dominance(AuditContext(instance, ranks));
}

bool recheck_violation(const Instance& instance, const RankAssignment& ranks,
                       const NoSurpassViolation& v) {
  if (v.query < 0 || static_cast<std::size_t>(v.query) >= instance.num_queries()) return false;
  const auto bid = find_bid(instance, v.query, v.bidder);
  if (!bid) return false;
  if (static_cast<double>(*bid) * (1.0 - ranks.price.at(v.bidder)) != v.effective_bid) {
    return false;
  }
  const RunOutcome removal = audited_run(instance, ranks, v.bidder);
  if (best_effective(removal.trace->steps[v.query]) != v.removal_best) return false;
  if (!(v.effective_bid > v.removal_best)) return false;
  const RunOutcome full = audited_run(instance, ranks);
  const auto& offers = full.trace->steps[v.query].offers;
  return std::any_of(offers.begin(), offers.end(), [&](const Offer& o) {
    return o.bidder == v.surpassing_bidder && o.effective == v.surpassing_bid &&
           o.effective > v.effective_bid;
  });
}

bool AuditReport::lemmas_ok() const {
  for (const MultisetVerdict& v : multiset) {
    if (!v.ok()) return false;
  }
  return !thresholds || thresholds->ok();
}

AuditReport audit(const Instance& instance, const RankAssignment& ranks,
                  const AuditChecks& checks) {
  const AuditContext context(instance, ranks);
  AuditReport report;
  report.seed = ranks.seed;
  report.ranks = ranks.rank;
  if (checks.no_surpassing) report.no_surpassing = check_no_surpassing(context);
  if (checks.multiset) {
    for (BidderId j = 0; j < static_cast<BidderId>(instance.num_bidders()); ++j) {
      report.multiset.push_back(check_multiset_lemmas(context, j));
    }
  }
  if (checks.thresholds) report.thresholds = check_threshold_dominance(context);
  return report;
}

}  // namespace adwords
