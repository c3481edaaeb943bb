#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "adwords/engines.hpp"
#include "adwords/instance.hpp"
#include "adwords/oracle.hpp"

namespace adwords {

// 1 - 1/e.
double one_minus_inv_e();

// Mean and standard error of a sample, summed in index order.
struct SampleStats {
  double mean = 0.0;
  double se = 0.0;
  double max = 0.0;
  std::int64_t count = 0;
};
SampleStats sample_stats(const std::vector<double>& values);

// Calls fn(t) for t in [0, trials) on up to `jobs` worker threads. Lane k
// owns trials k, k + jobs, ...; callers store results by trial index, so the
// reduction order does not depend on scheduling.
void for_each_trial(std::int64_t trials, int jobs, const std::function<void(std::int64_t)>& fn);

// Rank draw of trial t under a master seed.
RankAssignment trial_ranks(const Instance& instance, std::uint64_t master_seed, std::int64_t t);

struct RatioEstimate {
  std::string algorithm;
  std::string instance_id;
  std::int64_t trials = 0;
  double mean_real = 0.0;    // E[W]
  double mean_fake = 0.0;    // E[W_f]
  Money opt = 0;
  OptimumKind opt_kind = OptimumKind::kExact;
  double ratio = 0.0;        // E[W] / opt
  double se = 0.0;
  double ci_lo = 0.0;        // normal-approximation 95% interval
  double ci_hi = 0.0;
  double total_ratio = 0.0;  // E[W + W_f] / opt
  double total_se = 0.0;
  std::uint64_t seed = 0;
};

struct EstimateOptions {
  int jobs = 1;
  bool allow_upper_bound = false;
  // Skip the oracle and use this optimum instead.
  std::optional<OfflineOptimum> opt;
};

RatioEstimate estimate_ratio(const Instance& instance, Algorithm algorithm, std::int64_t trials,
                             std::uint64_t seed, const EstimateOptions& options = {});

// A bidder together with some of its neighbouring queries: an edge (OBM), a
// j-star (k_j queries) or a B_j-star (bids summing to B_j).
struct Star {
  BidderId bidder = 0;
  std::vector<QueryId> queries;
};

struct ContributionEstimate {
  Star target;
  double mean = 0.0;  // E[r_j + sum of u_i over the star's queries]
  double se = 0.0;
  double bound = 0.0;
  std::int64_t trials = 0;
  double margin = 0.0;       // mean - bound
  bool conditional = false;  // GENERAL: bound assumes no-surpassing
};

// Bound the analysis gives the star: (1 - 1/e) times k_j b_j, B_j, or 1.
double star_bound(const Instance& instance, const Star& star);

// Throws std::invalid_argument if the star is not a valid edge / j-star /
// B_j-star of the instance's class.
void validate_star(const Instance& instance, const Star& star);

// Groups an assignment by bidder, one star per bidder with queries.
std::vector<Star> stars_from_assignment(const Instance& instance,
                                        const std::vector<Assignment>& assignment);

// Per edge (i, j) of `edges` (default: the optimum's witness), the Monte-Carlo
// mean of u_i + r_j under RANKING.
std::vector<ContributionEstimate> estimate_edge_contributions(
    const Instance& instance, std::int64_t trials, std::uint64_t seed,
    std::optional<std::vector<Assignment>> edges = std::nullopt, int jobs = 1);

// Monte-Carlo mean of r_j + sum_l u_{i_l} under the class's engine.
std::vector<ContributionEstimate> estimate_star_contributions(const Instance& instance,
                                                              const std::vector<Star>& stars,
                                                              std::int64_t trials,
                                                              std::uint64_t seed, int jobs = 1);

class FakeMoneyBoundViolated : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct FakeMoneyReport {
  std::int64_t trials = 0;
  std::vector<Money> fake;   // per trial
  Money ceiling = 0;         // sum_j max (bid - 1)
  Money total_budget = 0;
  double mean_fraction = 0.0;  // E[W_f] / sum_j B_j
  double max_fraction = 0.0;
  Ratio mu;
  bool within_mu = true;       // max W_f / sum_j B_j <= mu(I)
  std::uint64_t seed = 0;
};

// Runs the fake-money engine; throws FakeMoneyBoundViolated if any trial
// spends more fake money than the ceiling.
FakeMoneyReport fake_money_report(const Instance& instance, std::int64_t trials,
                                  std::uint64_t seed, int jobs = 1);

struct SweepParams {
  int m = 8;
  Money budget = 1000;
  int distractors = 2;
  int instances_per_cell = 2;
  // Trials per instance whose rank draws are audited for no-surpassing.
  int audited_trials = 20;
  int jobs = 1;
};

struct SweepRow {
  double mu_target = 0.0;
  double mu_actual = 0.0;       // max mu(I) over the cell's instances
  double ratio = 0.0;           // mean W / w(P)
  double ratio_se = 0.0;
  double total_ratio = 0.0;     // mean (W + W_f) / w(P)
  double total_se = 0.0;
  double wf_fraction = 0.0;     // mean W_f / w(P)
  double wf_fraction_max = 0.0;
  std::int64_t violations_sampled = 0;
  std::int64_t audited_runs = 0;
  std::int64_t trials = 0;
  std::int64_t queries = 0;     // mean number of queries per instance
  bool wf_within_mu = true;     // W_f / w(P) <= mu(I) on every run
  // Audited runs without a no-surpassing violation, and their
  // (W + W_f) / w(P).
  std::int64_t clean_runs = 0;
  double clean_total_ratio = 0.0;
  double clean_total_se = 0.0;

  bool audit_clean() const { return violations_sampled == 0; }
};

std::vector<SweepRow> sweep_mu(const std::vector<double>& mu_targets, const SweepParams& params,
                               std::int64_t trials, std::uint64_t seed);

}  // namespace adwords
