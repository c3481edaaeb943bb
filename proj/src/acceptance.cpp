#include "adwords/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "adwords/audit.hpp"
#include "adwords/engines.hpp"
#include "adwords/harness.hpp"
#include "adwords/oracle.hpp"
#include "adwords/rng.hpp"

namespace adwords {

Scale scale_from_string(const std::string& name) {
  if (name == "smoke") return Scale::kSmoke;
  if (name == "full") return Scale::kFull;
  throw std::invalid_argument("unknown scale \"" + name + "\" (expected smoke or full)");
}

std::string to_string(Scale scale) { return scale == Scale::kSmoke ? "smoke" : "full"; }

std::string format_result(const CriterionResult& r) {
  std::ostringstream out;
  out << (r.passed ? "PASS" : "FAIL") << "  " << std::setw(2) << r.id << "  " << r.name << "  ("
      << std::fixed << std::setprecision(1) << r.seconds << " s)  " << r.detail;
  return out.str();
}

Money brute_force_optimum(const Instance& instance) {
  std::vector<Money> left;
  for (const Bidder& b : instance.bidders) left.push_back(b.budget);
  Money best = 0;
  auto search = [&](auto&& self, std::size_t q, Money value) -> void {
    if (q == instance.num_queries()) {
      best = std::max(best, value);
      return;
    }
    self(self, q + 1, value);
    for (const Edge& e : instance.edges[q]) {
      if (e.bid > left[e.bidder]) continue;
      left[e.bidder] -= e.bid;
      self(self, q + 1, value + e.bid);
      left[e.bidder] += e.bid;
    }
  };
  search(search, 0, 0);
  return best;
}

namespace {

// Drops a trailing "; " left by per-class detail loops.
std::string trim_separator(std::string s) {
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "; ") == 0) s.resize(s.size() - 2);
  return s;
}

const double kBound = 1.0 - std::exp(-1.0);

struct Context {
  Scale scale;
  int jobs;
  std::uint64_t seed;

  std::int64_t trials(std::int64_t full, std::int64_t smoke) const {
    return scale == Scale::kFull ? full : smoke;
  }
  std::uint64_t sub_seed(int criterion, std::uint64_t index = 0) const {
    return derive_seed(derive_seed(seed, static_cast<std::uint64_t>(criterion)), index);
  }
};

std::string fmt(double x, int digits = 4) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << x;
  return out.str();
}

std::vector<std::pair<QueryId, BidderId>> pairs_of(const RunOutcome& out) {
  std::vector<std::pair<QueryId, BidderId>> p;
  for (const MatchedEdge& e : out.matching) p.emplace_back(e.query, e.bidder);
  return p;
}

// (instance, ranks) pairs for the audit criteria: `instances` random
// instances of the class, each under `draws` rank draws.
std::vector<std::pair<Instance, RankAssignment>> audit_pairs(ProblemClass cls, int instances,
                                                             int draws, std::uint64_t seed) {
  std::vector<std::pair<Instance, RankAssignment>> out;
  Rng rng(seed);
  for (int k = 0; k < instances; ++k) {
    RandomParams p;
    p.problem_class = cls;
    p.n = static_cast<int>(rng.uniform_int(3, 12));
    p.m = static_cast<int>(rng.uniform_int(2, 6));
    p.density = 0.25 + 0.15 * static_cast<double>(rng.uniform_int(0, 4));
    p.bid_lo = 1;
    p.bid_hi = 4;
    p.budget_policy = BudgetPolicy::kFractionOfDemand;
    p.budget_value = 0.3 + 0.1 * static_cast<double>(rng.uniform_int(0, 3));
    p.seed = rng.next();
    const Instance inst = gen_random(p);
    for (int d = 0; d < draws; ++d) out.emplace_back(inst, draw_ranks(inst, rng.next()));
  }
  return out;
}

// Runs fn over the pairs on ctx.jobs lanes; results land by index.
template <class Result, class Fn>
std::vector<Result> over_pairs(const Context& ctx,
                               const std::vector<std::pair<Instance, RankAssignment>>& pairs,
                               Fn fn) {
  std::vector<Result> out(pairs.size());
  for_each_trial(static_cast<std::int64_t>(pairs.size()), ctx.jobs, [&](std::int64_t t) {
    out[t] = fn(AuditContext(pairs[t].first, pairs[t].second));
  });
  return out;
}

// --- 1 ----------------------------------------------------------------------

CriterionResult ranking_tightness(const Context& ctx) {
  CriterionResult r{1, "RANKING tightness on upper-triangular instances", false, {}, 0.0};
  const std::int64_t t = ctx.trials(20000, 2000);
  std::ostringstream detail;
  bool ok = true;
  double previous = 2.0;
  const auto start = std::chrono::steady_clock::now();
  for (int n : {50, 100, 200}) {
    EstimateOptions opts;
    opts.jobs = ctx.jobs;
    const RatioEstimate e =
        estimate_ratio(gen_upper_triangular(n), Algorithm::kRanking, t, ctx.sub_seed(1, n), opts);
    const bool in_band = e.ratio >= kBound - 0.02 && e.ratio <= kBound + 0.06;
    const bool decreasing = e.ratio < previous;
    ok = ok && in_band && decreasing;
    detail << "n=" << n << " ratio=" << fmt(e.ratio) << "±" << fmt(e.se) << (in_band ? "" : " OUT-OF-BAND")
           << (decreasing ? "" : " NOT-DECREASING") << "; ";
    previous = e.ratio;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  detail << "t=" << t << ", runtime " << fmt(secs, 1) << " s (target < 30 s)";
  r.passed = ok;
  r.detail = trim_separator(detail.str());
  return r;
}

// --- 2 ----------------------------------------------------------------------

CriterionResult edge_bound(const Context& ctx) {
  CriterionResult r{2, "per-edge contribution bound on random OBM instances", false, {}, 0.0};
  const std::int64_t t = ctx.trials(10000, 1000);
  Rng rng(ctx.sub_seed(2));
  std::int64_t edges = 0, failures = 0;
  double worst_z = 1e300;
  for (int k = 0; k < 20; ++k) {
    PlantedParams p;
    p.problem_class = ProblemClass::kObm;
    p.n = p.m = static_cast<int>(rng.uniform_int(5, 30));
    p.distractors = static_cast<int>(rng.uniform_int(1, 3));
    p.seed = rng.next();
    const Instance inst = gen_planted(p);
    const OfflineOptimum opt = best_optimum(inst);
    if (opt.value != static_cast<Money>(inst.num_queries())) {
      throw std::logic_error("planted OBM instance lacks a perfect matching");
    }
    for (const ContributionEstimate& c :
         estimate_edge_contributions(inst, t, rng.next(), opt.witness, ctx.jobs)) {
      ++edges;
      if (c.mean < c.bound - 3.0 * c.se) ++failures;
      if (c.se > 0) worst_z = std::min(worst_z, c.margin / c.se);
    }
  }
  r.passed = failures == 0;
  r.detail = std::to_string(edges) + " edges, " + std::to_string(failures) +
             " below 1-1/e - 3 SE; smallest margin " +
             (worst_z > 1e299 ? std::string("n/a") : fmt(worst_z, 2) + " SE") +
             "; t=" + std::to_string(t);
  return r;
}

// --- 3 ----------------------------------------------------------------------

CriterionResult single_valued_guarantee(const Context& ctx) {
  CriterionResult r{3, "single-valued ratio and j-star bounds on planted instances", false, {}, 0.0};
  const std::int64_t t = ctx.trials(10000, 1000);
  Rng rng(ctx.sub_seed(3));
  int ratio_failures = 0, star_failures = 0, stars = 0;
  double worst_ratio = 2.0;
  for (int k = 0; k < 20; ++k) {
    PlantedParams p;
    p.problem_class = ProblemClass::kSingleValued;
    p.m = static_cast<int>(rng.uniform_int(3, 8));
    p.n = static_cast<int>(rng.uniform_int(p.m, 4 * p.m));
    p.value_hi = 5;
    p.distractors = static_cast<int>(rng.uniform_int(1, 3));
    p.seed = rng.next();
    const Instance inst = gen_planted(p);
    const std::uint64_t seed = rng.next();
    EstimateOptions opts;
    opts.jobs = ctx.jobs;
    const RatioEstimate e = estimate_ratio(inst, Algorithm::kSingleValued, t, seed, opts);
    if (e.opt_kind != OptimumKind::kPlantedCertificate) {
      throw std::logic_error("planted single-valued instance lost its certificate");
    }
    if (e.ratio < kBound - 3.0 * e.se) ++ratio_failures;
    worst_ratio = std::min(worst_ratio, e.ratio);
    const auto star_list = stars_from_assignment(inst, inst.planted_opt->assignment);
    for (const ContributionEstimate& c :
         estimate_star_contributions(inst, star_list, t, seed, ctx.jobs)) {
      ++stars;
      if (c.mean < c.bound - 3.0 * c.se) ++star_failures;
    }
  }
  r.passed = ratio_failures == 0 && star_failures == 0;
  r.detail = "20 instances, smallest ratio " + fmt(worst_ratio) + ", " +
             std::to_string(ratio_failures) + " ratio failures; " + std::to_string(stars) +
             " j-stars, " + std::to_string(star_failures) + " below bound - 3 SE; t=" +
             std::to_string(t);
  return r;
}

// --- 4 ----------------------------------------------------------------------

CriterionResult no_surpassing(const Context& ctx) {
  CriterionResult r{4, "no-surpassing property", false, {}, 0.0};
  std::ostringstream detail;
  bool ok = true;
  for (ProblemClass cls : {ProblemClass::kObm, ProblemClass::kSingleValued}) {
    const auto pairs = audit_pairs(cls, 100, 10, ctx.sub_seed(4, static_cast<int>(cls)));
    const auto reports = over_pairs<NoSurpassReport>(
        ctx, pairs, [](const AuditContext& c) { return check_no_surpassing(c); });
    std::int64_t violations = 0, edges = 0;
    for (const auto& rep : reports) {
      violations += static_cast<std::int64_t>(rep.violations.size());
      edges += rep.edges_tested;
    }
    ok = ok && violations == 0;
    detail << to_string(cls) << ": " << violations << " violations over " << pairs.size()
           << " pairs (" << edges << " edges); ";
  }

  const Instance example = gen_example_no_surpass(2, 5);
  const RankAssignment equal = ranks_from({0.5, 0.5});
  const NoSurpassReport rep = check_no_surpassing(example, equal);
  bool certified = true;
  for (const auto& v : rep.violations) certified = certified && recheck_violation(example, equal, v);
  ok = ok && !rep.violations.empty() && certified;
  detail << "example(2,5) with equal prices: " << rep.violations.size() << " violation(s)";
  if (!rep.violations.empty()) detail << " on query " << rep.violations.front().query;
  detail << (certified ? ", re-checked" : ", RE-CHECK FAILED");

  // Reported only: random GENERAL instances.
  const auto general = audit_pairs(ProblemClass::kGeneral, 50, 4, ctx.sub_seed(4, 99));
  const auto greports = over_pairs<NoSurpassReport>(
      ctx, general, [](const AuditContext& c) { return check_no_surpassing(c); });
  std::int64_t gv = 0, runs = 0, ge = 0, gq = 0, gqv = 0;
  for (const auto& g : greports) {
    gv += static_cast<std::int64_t>(g.violations.size());
    ge += g.edges_tested;
    gq += g.queries;
    gqv += g.queries_violated;
    if (!g.violations.empty()) ++runs;
  }
  detail << "; general (reported): edge rate " << fmt(ge ? double(gv) / double(ge) : 0.0)
         << ", query rate " << fmt(gq ? double(gqv) / double(gq) : 0.0) << ", run rate "
         << fmt(double(runs) / double(general.size()));
  r.passed = ok;
  r.detail = trim_separator(detail.str());
  return r;
}

// --- 5 ----------------------------------------------------------------------

CriterionResult multiset_lemmas(const Context& ctx) {
  CriterionResult r{5, "multiset containment lemmas", false, {}, 0.0};
  std::ostringstream detail;
  bool ok = true;
  for (ProblemClass cls : {ProblemClass::kObm, ProblemClass::kSingleValued}) {
    const auto pairs = audit_pairs(cls, 100, 10, ctx.sub_seed(5, static_cast<int>(cls)));
    const auto failures = over_pairs<std::int64_t>(ctx, pairs, [](const AuditContext& c) {
      std::int64_t f = 0;
      for (BidderId j = 0; j < static_cast<BidderId>(c.instance().num_bidders()); ++j) {
        const MultisetVerdict v = check_multiset_lemmas(c, j);
        f += static_cast<std::int64_t>(v.upper_equal_failures.size() +
                                       v.lower_subset_failures.size() +
                                       v.neighbour_failures.size());
      }
      return f;
    });
    std::int64_t total = 0;
    for (auto f : failures) total += f;
    ok = ok && total == 0;
    detail << to_string(cls) << ": " << total << " failed steps over " << pairs.size() << " runs; ";
  }
  r.passed = ok;
  r.detail = trim_separator(detail.str());
  return r;
}

// --- 6 ----------------------------------------------------------------------

CriterionResult threshold_dominance(const Context& ctx) {
  CriterionResult r{6, "threshold dominance and matched-when-cheap", false, {}, 0.0};
  std::ostringstream detail;
  bool ok = true;
  for (ProblemClass cls : {ProblemClass::kObm, ProblemClass::kSingleValued}) {
    const auto pairs = audit_pairs(cls, 100, 10, ctx.sub_seed(6, static_cast<int>(cls)));
    const auto verdicts = over_pairs<ThresholdVerdict>(
        ctx, pairs, [](const AuditContext& c) { return check_threshold_dominance(c); });
    std::int64_t edges = 0, dominance = 0, cheap = 0, unmatched = 0;
    for (const auto& v : verdicts) {
      edges += v.edges_checked;
      dominance += static_cast<std::int64_t>(v.dominance_failures.size());
      cheap += v.cheap_edges;
      unmatched += static_cast<std::int64_t>(v.unmatched_when_cheap.size());
    }
    ok = ok && dominance == 0 && unmatched == 0;
    detail << to_string(cls) << ": " << pairs.size() << " runs, " << edges << " edges, "
           << dominance << " dominance failures";
    if (cls == ProblemClass::kObm) {
      detail << ", " << cheap << " cheap edges, " << unmatched << " unmatched";
    }
    detail << "; ";
  }
  r.passed = ok;
  r.detail = trim_separator(detail.str());
  return r;
}

// --- 7 ----------------------------------------------------------------------

CriterionResult fake_money(const Context& ctx) {
  CriterionResult r{7, "fake-money accounting", false, {}, 0.0};
  const std::int64_t t = ctx.trials(1000, 200);
  Rng rng(ctx.sub_seed(7));
  std::int64_t runs = 0;
  int mu_failures = 0, unit_failures = 0;
  std::string error;
  try {
    for (int k = 0; k < 20; ++k) {
      RandomParams p;
      p.problem_class = ProblemClass::kGeneral;
      p.n = static_cast<int>(rng.uniform_int(10, 30));
      p.m = static_cast<int>(rng.uniform_int(2, 6));
      p.bid_hi = 8;
      p.budget_value = 0.3;
      p.seed = rng.next();
      runs += fake_money_report(gen_random(p), t, rng.next(), ctx.jobs).trials;
    }
    for (Money alpha : {2, 3, 5}) {
      for (int kq : {3, 5, 8}) {
        runs += fake_money_report(gen_example_no_surpass(alpha, kq), t, rng.next(), ctx.jobs).trials;
      }
    }
    for (double target : {0.2, 0.1, 0.05, 0.01}) {
      for (int k = 0; k < 3; ++k) {
        PlantedParams p;
        p.problem_class = ProblemClass::kGeneral;
        p.m = 6;
        p.mu_target = target;
        p.budget = 500;
        p.seed = rng.next();
        const FakeMoneyReport rep = fake_money_report(gen_planted(p), t, rng.next(), ctx.jobs);
        runs += rep.trials;
        if (!rep.within_mu) ++mu_failures;
      }
    }
    // All bids 1: OBM-shaped instances and mu = 0 planted instances.
    for (int k = 0; k < 10; ++k) {
      RandomParams p;
      p.problem_class = ProblemClass::kObm;
      p.n = 15;
      p.m = 6;
      p.seed = rng.next();
      PlantedParams q;
      q.problem_class = ProblemClass::kGeneral;
      q.m = 5;
      q.mu_target = 0.0;
      q.budget = 40;
      q.seed = rng.next();
      for (const Instance& inst : {as_class(gen_random(p), ProblemClass::kGeneral), gen_planted(q)}) {
        const FakeMoneyReport rep = fake_money_report(inst, t, rng.next(), ctx.jobs);
        runs += rep.trials;
        for (Money f : rep.fake) {
          if (f != 0) ++unit_failures;
        }
      }
    }
  } catch (const FakeMoneyBoundViolated& e) {
    error = e.what();
  }
  r.passed = error.empty() && mu_failures == 0 && unit_failures == 0;
  r.detail = error.empty() ? std::to_string(runs) + " runs within the per-run ceiling; " +
                                 std::to_string(mu_failures) + " planted instances above mu; " +
                                 std::to_string(unit_failures) + " unit-bid runs with W_f > 0"
                           : "ceiling violated: " + error;
  return r;
}

// --- 8 ----------------------------------------------------------------------

CriterionResult small_convergence(const Context& ctx) {
  CriterionResult r{8, "small-bid conditional convergence", false, {}, 0.0};
  SweepParams params;
  params.jobs = ctx.jobs;
  params.instances_per_cell = 2;
  params.audited_trials = ctx.scale == Scale::kFull ? 200 : 20;
  const std::int64_t t = ctx.trials(2000, 200);
  const std::vector<double> targets{0.2, 0.1, 0.05, 0.01};
  const auto rows = sweep_mu(targets, params, t, ctx.sub_seed(8));
  std::ostringstream detail;
  bool ok = true;
  int clean_cells = 0, gated_cells = 0;
  for (const SweepRow& row : rows) {
    // Unconditional in every cell: W_f / w(P) <= mu, hence W within mu of W + W_f.
    bool cell_ok = row.wf_within_mu && row.total_ratio - row.ratio <= row.mu_target;
    detail << "mu=" << row.mu_target << ": (W+Wf)/w(P)=" << fmt(row.total_ratio)
           << " W/w(P)=" << fmt(row.ratio) << " Wf/w(P)=" << fmt(row.wf_fraction);
    if (row.audit_clean()) {
      ++clean_cells;
      cell_ok = cell_ok && row.total_ratio >= kBound - 3.0 * row.total_se;
    } else {
      detail << " [" << row.violations_sampled << " violations in " << row.audited_runs
             << " audited runs; " << row.clean_runs << " clean";
      if (row.clean_runs >= 2) {
        ++gated_cells;
        cell_ok = cell_ok && row.clean_total_ratio >= kBound - 3.0 * row.clean_total_se;
        detail << ", clean (W+Wf)/w(P)=" << fmt(row.clean_total_ratio);
      }
      detail << "]";
    }
    detail << (cell_ok ? " ok; " : " FAILED; ");
    ok = ok && cell_ok;
  }
  detail << clean_cells << " of " << rows.size() << " cells audit-clean, " << gated_cells
         << " asserted on clean seeds only; t=" << t;
  r.passed = ok;
  r.detail = trim_separator(detail.str());
  return r;
}

// --- 9 ----------------------------------------------------------------------

CriterionResult reductions(const Context& ctx) {
  CriterionResult r{9, "engine reductions and equivalences", false, {}, 0.0};
  Rng rng(ctx.sub_seed(9));
  int general = 0, single = 0, permutation = 0, compared = 0;
  for (int k = 0; k < 100; ++k) {
    RandomParams p;
    p.problem_class = ProblemClass::kObm;
    p.n = static_cast<int>(rng.uniform_int(1, 40));
    p.m = static_cast<int>(rng.uniform_int(1, 15));
    p.density = 0.1 + 0.1 * static_cast<double>(rng.uniform_int(0, 8));
    p.seed = rng.next();
    const Instance obm = gen_random(p);
    const Instance as_general = as_class(obm, ProblemClass::kGeneral);
    const Instance as_single = as_class(obm, ProblemClass::kSingleValued);
    for (int d = 0; d < 10; ++d) {
      const RankAssignment ranks = draw_ranks(obm, rng.next());
      const auto reference = pairs_of(run_ranking(obm, ranks));
      ++compared;
      if (pairs_of(run_general(as_general, ranks)) != reference) ++general;
      if (pairs_of(run_single_valued(as_single, ranks)) != reference) ++single;
      const auto order = price_order(ranks);
      if (pairs_of(run_ranking_permutation(obm, order)) != reference) ++permutation;
    }
  }
  r.passed = general == 0 && single == 0 && permutation == 0;
  r.detail = std::to_string(compared) + " (instance, ranks) pairs; mismatches: general " +
             std::to_string(general) + ", single-valued " + std::to_string(single) +
             ", permutation " + std::to_string(permutation);
  return r;
}

// --- 10 ---------------------------------------------------------------------

CriterionResult oracles(const Context& ctx) {
  CriterionResult r{10, "offline oracles", false, {}, 0.0};
  Rng rng(ctx.sub_seed(10));
  int mismatches = 0;
  for (int k = 0; k < 200; ++k) {
    RandomParams p;
    p.problem_class = k % 2 ? ProblemClass::kSingleValued : ProblemClass::kObm;
    p.n = static_cast<int>(rng.uniform_int(1, 8));
    p.m = static_cast<int>(rng.uniform_int(1, 5));
    p.density = 0.2 + 0.2 * static_cast<double>(rng.uniform_int(0, 3));
    p.bid_hi = 5;
    p.budget_value = 0.4;
    p.seed = rng.next();
    const Instance inst = gen_random(p);
    const Money solved =
        p.problem_class == ProblemClass::kObm ? opt_obm(inst).value : opt_single_valued(inst).value;
    if (solved != brute_force_optimum(inst)) ++mismatches;
  }
  int example_failures = 0, greedy_failures = 0;
  for (Money w = 1; w <= 6; ++w) {
    const auto [i1, i2, i3] = gen_example_three(w);
    bool greedy_half = false;
    for (const Instance* inst : {&i1, &i2, &i3}) {
      const Money opt = opt_general_exact(*inst).value;
      if (opt != 2 * w) ++example_failures;
      // greedy <= (1/2 + 1/W) OPT, in integers: 2W * greedy <= (W + 2) * OPT.
      if (2 * w * run_greedy(*inst).real_money <= (w + 2) * opt) greedy_half = true;
    }
    if (!greedy_half) ++greedy_failures;
  }
  r.passed = mismatches == 0 && example_failures == 0 && greedy_failures == 0;
  r.detail = "200 random instances: " + std::to_string(mismatches) +
             " disagreements with enumeration; example-three optima off 2W: " +
             std::to_string(example_failures) + "; W values with no instance inside the greedy bound: " +
             std::to_string(greedy_failures);
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  const Context ctx{options.scale, std::max(1, options.jobs), options.seed};
  using Check = CriterionResult (*)(const Context&);
  const Check checks[] = {ranking_tightness,   edge_bound, single_valued_guarantee,
                          no_surpassing,       multiset_lemmas, threshold_dominance,
                          fake_money,          small_convergence, reductions, oracles};
  std::vector<CriterionResult> results;
  int id = 0;
  for (Check check : checks) {
    ++id;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = check(ctx);
    } catch (const std::exception& e) {
      r.id = id;
      r.name = "criterion " + std::to_string(id);
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (options.on_result) options.on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace adwords
