#include "adwords/harness.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <thread>

#include "adwords/audit.hpp"
#include "adwords/rng.hpp"

namespace adwords {

double one_minus_inv_e() { return 1.0 - std::exp(-1.0); }

SampleStats sample_stats(const std::vector<double>& values) {
  SampleStats s;
  s.count = static_cast<std::int64_t>(values.size());
  if (values.empty()) return s;
  double sum = 0.0;
  s.max = values.front();
  for (double v : values) {
    sum += v;
    s.max = std::max(s.max, v);
  }
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    const double var = ss / static_cast<double>(values.size() - 1);
    s.se = std::sqrt(var / static_cast<double>(values.size()));
  }
  return s;
}

void for_each_trial(std::int64_t trials, int jobs, const std::function<void(std::int64_t)>& fn) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || trials < 2) {
    for (std::int64_t t = 0; t < trials; ++t) fn(t);
    return;
  }
  const auto lanes = static_cast<int>(std::min<std::int64_t>(jobs, trials));
  std::vector<std::exception_ptr> errors(lanes);
  {
    std::vector<std::jthread> workers;
    for (int lane = 0; lane < lanes; ++lane) {
      workers.emplace_back([&, lane] {
        try {
          for (std::int64_t t = lane; t < trials; t += lanes) fn(t);
        } catch (...) {
          errors[lane] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

RankAssignment trial_ranks(const Instance& instance, std::uint64_t master_seed, std::int64_t t) {
  return draw_ranks(instance, derive_seed(master_seed, static_cast<std::uint64_t>(t)));
}

RatioEstimate estimate_ratio(const Instance& instance, Algorithm algorithm, std::int64_t trials,
                             std::uint64_t seed, const EstimateOptions& options) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const OfflineOptimum opt =
      options.opt ? *options.opt : best_optimum(instance, options.allow_upper_bound);
  if (opt.value <= 0) throw std::invalid_argument("offline optimum is zero; ratio undefined");

  std::vector<double> real(trials), fake(trials);
  for_each_trial(trials, options.jobs, [&](std::int64_t t) {
    const RunOutcome out = run(algorithm, instance, trial_ranks(instance, seed, t));
    real[t] = static_cast<double>(out.real_money);
    fake[t] = static_cast<double>(out.fake_money);
  });

  const double denom = static_cast<double>(opt.value);
  std::vector<double> ratio(trials), total(trials);
  for (std::int64_t t = 0; t < trials; ++t) {
    ratio[t] = real[t] / denom;
    total[t] = (real[t] + fake[t]) / denom;
  }
  const SampleStats r = sample_stats(ratio);
  const SampleStats tot = sample_stats(total);

  RatioEstimate est;
  est.algorithm = to_string(algorithm);
  est.instance_id = instance_id(instance);
  est.trials = trials;
  est.mean_real = sample_stats(real).mean;
  est.mean_fake = sample_stats(fake).mean;
  est.opt = opt.value;
  est.opt_kind = opt.kind;
  est.ratio = r.mean;
  est.se = r.se;
  est.ci_lo = r.mean - 1.96 * r.se;
  est.ci_hi = r.mean + 1.96 * r.se;
  est.total_ratio = tot.mean;
  est.total_se = tot.se;
  est.seed = seed;
  return est;
}

double star_bound(const Instance& instance, const Star& star) {
  switch (instance.problem_class) {
    case ProblemClass::kObm:
      return one_minus_inv_e();
    case ProblemClass::kSingleValued:
      return static_cast<double>(match_cap(instance, star.bidder) *
                                 single_value(instance, star.bidder)) *
             one_minus_inv_e();
    case ProblemClass::kGeneral:
      return static_cast<double>(instance.bidders.at(star.bidder).budget) * one_minus_inv_e();
  }
  return 0.0;
}

void validate_star(const Instance& instance, const Star& star) {
  const auto fail = [&](const std::string& why) {
    throw std::invalid_argument("malformed star for bidder " + std::to_string(star.bidder) +
                                ": " + why);
  };
  if (star.bidder < 0 || static_cast<std::size_t>(star.bidder) >= instance.num_bidders()) {
    fail("unknown bidder");
  }
  std::set<QueryId> seen;
  Money bids = 0;
  for (QueryId q : star.queries) {
    if (q < 0 || static_cast<std::size_t>(q) >= instance.num_queries()) fail("unknown query");
    if (!seen.insert(q).second) fail("repeated query " + std::to_string(q));
    const auto bid = find_bid(instance, q, star.bidder);
    if (!bid) fail("query " + std::to_string(q) + " is not a neighbour");
    bids += *bid;
  }
  switch (instance.problem_class) {
    case ProblemClass::kObm:
    case ProblemClass::kSingleValued:
      if (static_cast<Money>(star.queries.size()) != match_cap(instance, star.bidder)) {
        fail("needs exactly k_j queries");
      }
      break;
    case ProblemClass::kGeneral:
      if (bids != instance.bidders[star.bidder].budget) fail("bids must sum to B_j");
      break;
  }
}

std::vector<Star> stars_from_assignment(const Instance& instance,
                                        const std::vector<Assignment>& assignment) {
  std::vector<Star> by_bidder(instance.num_bidders());
  for (BidderId j = 0; j < static_cast<BidderId>(by_bidder.size()); ++j) by_bidder[j].bidder = j;
  for (const Assignment& a : assignment) by_bidder.at(a.bidder).queries.push_back(a.query);
  std::vector<Star> out;
  for (Star& s : by_bidder) {
    if (s.queries.empty()) continue;
    std::sort(s.queries.begin(), s.queries.end());
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

std::vector<ContributionEstimate> estimate_targets(const Instance& instance,
                                                   const std::vector<Star>& stars,
                                                   std::int64_t trials, std::uint64_t seed,
                                                   int jobs) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const Algorithm engine = native_algorithm(instance.problem_class);
  // samples[s][t]: contribution of star s in trial t.
  std::vector<std::vector<double>> samples(stars.size(), std::vector<double>(trials));
  for_each_trial(trials, jobs, [&](std::int64_t t) {
    const RunOutcome out = run(engine, instance, trial_ranks(instance, seed, t));
    for (std::size_t s = 0; s < stars.size(); ++s) {
      double x = out.revenue[stars[s].bidder];
      for (QueryId q : stars[s].queries) x += out.utility[q];
      samples[s][t] = x;
    }
  });
  std::vector<ContributionEstimate> out;
  for (std::size_t s = 0; s < stars.size(); ++s) {
    const SampleStats st = sample_stats(samples[s]);
    ContributionEstimate c;
    c.target = stars[s];
    c.mean = st.mean;
    c.se = st.se;
    c.bound = star_bound(instance, stars[s]);
    c.trials = trials;
    c.margin = c.mean - c.bound;
    c.conditional = instance.problem_class == ProblemClass::kGeneral;
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

std::vector<ContributionEstimate> estimate_edge_contributions(
    const Instance& instance, std::int64_t trials, std::uint64_t seed,
    std::optional<std::vector<Assignment>> edges, int jobs) {
  if (instance.problem_class != ProblemClass::kObm) {
    throw std::invalid_argument("edge contributions are defined for OBM instances");
  }
  if (!edges) edges = *best_optimum(instance).witness;
  std::vector<Star> stars;
  for (const Assignment& a : *edges) {
    if (!find_bid(instance, a.query, a.bidder)) {
      throw std::invalid_argument("(" + std::to_string(a.query) + ", " +
                                  std::to_string(a.bidder) + ") is not an edge");
    }
    stars.push_back(Star{a.bidder, {a.query}});
  }
  return estimate_targets(instance, stars, trials, seed, jobs);
}

std::vector<ContributionEstimate> estimate_star_contributions(const Instance& instance,
                                                              const std::vector<Star>& stars,
                                                              std::int64_t trials,
                                                              std::uint64_t seed, int jobs) {
  for (const Star& s : stars) validate_star(instance, s);
  return estimate_targets(instance, stars, trials, seed, jobs);
}

FakeMoneyReport fake_money_report(const Instance& instance, std::int64_t trials,
                                  std::uint64_t seed, int jobs) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  FakeMoneyReport report;
  report.trials = trials;
  report.seed = seed;
  report.ceiling = fake_money_ceiling(instance);
  report.total_budget = total_budget(instance);
  report.mu = mu(instance);
  report.fake.assign(trials, 0);
  for_each_trial(trials, jobs, [&](std::int64_t t) {
    report.fake[t] = run_general(instance, trial_ranks(instance, seed, t)).fake_money;
  });

  Money worst = 0;
  double sum = 0.0;
  for (std::int64_t t = 0; t < trials; ++t) {
    if (report.fake[t] > report.ceiling) {
      throw FakeMoneyBoundViolated("trial " + std::to_string(t) + " spent " +
                                   std::to_string(report.fake[t]) + " fake money; ceiling is " +
                                   std::to_string(report.ceiling));
    }
    worst = std::max(worst, report.fake[t]);
    sum += static_cast<double>(report.fake[t]);
  }
  const double budget = static_cast<double>(std::max<Money>(report.total_budget, 1));
  report.mean_fraction = sum / static_cast<double>(trials) / budget;
  report.max_fraction = static_cast<double>(worst) / budget;
  report.within_mu = !(report.mu < Ratio{worst, std::max<Money>(report.total_budget, 1)});
  return report;
}

std::vector<SweepRow> sweep_mu(const std::vector<double>& mu_targets, const SweepParams& params,
                               std::int64_t trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (params.instances_per_cell < 1) throw std::invalid_argument("instances_per_cell must be >= 1");
  std::vector<SweepRow> rows;
  for (std::size_t c = 0; c < mu_targets.size(); ++c) {
    SweepRow row;
    row.mu_target = mu_targets[c];
    std::vector<double> ratio, total, fraction, clean;
    std::int64_t queries = 0;
    for (int k = 0; k < params.instances_per_cell; ++k) {
      PlantedParams pp;
      pp.problem_class = ProblemClass::kGeneral;
      pp.n = 0;
      pp.m = params.m;
      pp.mu_target = mu_targets[c];
      pp.budget = params.budget;
      pp.distractors = params.distractors;
      pp.seed = derive_seed(seed, c * 1000003 + static_cast<std::uint64_t>(k));
      const Instance instance = gen_planted(pp);
      const Money wp = planted_certificate(instance).value().value;
      const Ratio mu_i = mu(instance);
      row.mu_actual = std::max(row.mu_actual, mu_i.value());
      queries += static_cast<std::int64_t>(instance.num_queries());

      const std::uint64_t instance_seed = derive_seed(pp.seed, 0x5eedULL);
      const FakeMoneyReport fm = fake_money_report(instance, trials, instance_seed, params.jobs);
      std::vector<RunOutcome> outcomes(trials);
      for_each_trial(trials, params.jobs, [&](std::int64_t t) {
        outcomes[t] = run_general(instance, trial_ranks(instance, instance_seed, t));
      });
      for (const RunOutcome& out : outcomes) {
        const double w = static_cast<double>(out.real_money) / static_cast<double>(wp);
        const double f = static_cast<double>(out.fake_money) / static_cast<double>(wp);
        ratio.push_back(w);
        total.push_back(w + f);
        fraction.push_back(f);
        if (mu_i < Ratio{out.fake_money, wp}) row.wf_within_mu = false;
      }
      row.wf_within_mu = row.wf_within_mu && fm.within_mu;

      const std::int64_t audited = std::min<std::int64_t>(params.audited_trials, trials);
      std::vector<std::int64_t> found(audited, 0);
      for_each_trial(audited, params.jobs, [&](std::int64_t t) {
        found[t] = static_cast<std::int64_t>(
            check_no_surpassing(instance, trial_ranks(instance, instance_seed, t))
                .violations.size());
      });
      for (std::int64_t t = 0; t < audited; ++t) {
        row.violations_sampled += found[t];
        if (found[t] == 0) clean.push_back(total[total.size() - trials + t]);
      }
      row.audited_runs += audited;
    }
    const SampleStats r = sample_stats(ratio), tot = sample_stats(total),
                      fr = sample_stats(fraction);
    row.ratio = r.mean;
    row.ratio_se = r.se;
    row.total_ratio = tot.mean;
    row.total_se = tot.se;
    row.wf_fraction = fr.mean;
    row.wf_fraction_max = fr.max;
    row.trials = r.count;
    row.queries = queries / params.instances_per_cell;
    const SampleStats cl = sample_stats(clean);
    row.clean_runs = cl.count;
    row.clean_total_ratio = cl.mean;
    row.clean_total_se = cl.se;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace adwords
