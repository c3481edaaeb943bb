#include <doctest.h>

#include <atomic>
#include <cmath>

#include "adwords/harness.hpp"
#include "adwords/report_io.hpp"
#include "support.hpp"

using namespace adwords;
using testing::bidder;
using testing::sv_bidder;

TEST_CASE("sample statistics") {
  const SampleStats s = sample_stats({1.0, 2.0, 3.0, 4.0});
  CHECK(s.mean == doctest::Approx(2.5));
  // sd = sqrt(5/3), se = sd / 2
  CHECK(s.se == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(s.max == 4.0);
  CHECK(s.count == 4);
  CHECK(sample_stats({7.0}).se == 0.0);
  CHECK(sample_stats({}).count == 0);
}

TEST_CASE("for_each_trial visits every index once") {
  std::vector<std::atomic<int>> hits(101);
  for_each_trial(101, 4, [&](std::int64_t t) { ++hits[t]; });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(for_each_trial(10, 3,
                                 [](std::int64_t t) {
                                   if (t == 7) throw std::runtime_error("boom");
                                 }),
                  std::runtime_error);
}

TEST_CASE("estimates do not depend on the number of jobs") {
  const Instance ut = gen_upper_triangular(30);
  EstimateOptions one, four;
  four.jobs = 4;
  const RatioEstimate a = estimate_ratio(ut, Algorithm::kRanking, 500, 9, one);
  const RatioEstimate b = estimate_ratio(ut, Algorithm::kRanking, 500, 9, four);
  CHECK(dump(to_json(a)) == dump(to_json(b)));
}

TEST_CASE("ratio estimates") {
  SUBCASE("deterministic engines have zero variance") {
    const auto [i1, i2, i3] = gen_example_three(4);
    const RatioEstimate g = estimate_ratio(i1, Algorithm::kGreedy, 50, 1);
    CHECK(g.se == 0.0);
    CHECK(g.ratio == doctest::Approx(0.5));
  }
  SUBCASE("a single edge is always matched") {
    const RatioEstimate e = estimate_ratio(gen_upper_triangular(1), Algorithm::kRanking, 100, 2);
    CHECK(e.ratio == 1.0);
    CHECK(e.ci_lo == 1.0);
  }
  SUBCASE("upper-triangular n = 100 lands near 1 - 1/e") {
    const RatioEstimate e =
        estimate_ratio(gen_upper_triangular(100), Algorithm::kRanking, 10000, 3);
    CHECK(e.ratio >= 0.62);
    CHECK(e.ratio <= 0.70);
    CHECK(e.ci_lo < e.ratio);
    CHECK(e.ci_hi > e.ratio);
    CHECK(e.total_ratio == e.ratio);
  }
  SUBCASE("empty instances have no ratio") {
    Instance empty;
    empty.bidders = {bidder(0, 1)};
    CHECK_THROWS(estimate_ratio(empty, Algorithm::kGeneral, 10, 1));
  }
}

TEST_CASE("edge contributions") {
  const auto one = estimate_edge_contributions(gen_upper_triangular(1), 50, 4);
  REQUIRE(one.size() == 1);
  CHECK(one[0].mean == doctest::Approx(1.0));
  CHECK(one[0].bound == doctest::Approx(one_minus_inv_e()));

  // The first query to arrive at a good is always taken by it or a cheaper good.
  Instance star;
  star.problem_class = ProblemClass::kObm;
  star.bidders = {bidder(0, 1)};
  star.edges = {{Edge{0, 1}}, {Edge{0, 1}}};
  const auto first = estimate_edge_contributions(star, 50, 5, std::vector<Assignment>{{0, 0}});
  CHECK(first[0].mean == doctest::Approx(1.0));
  const auto second = estimate_edge_contributions(star, 2000, 5, std::vector<Assignment>{{1, 0}});
  CHECK(second[0].mean < 1.0);
  CHECK(second[0].mean > 0.0);
}

TEST_CASE("a unit single-valued star matches the edge estimate") {
  Instance obm;
  obm.problem_class = ProblemClass::kObm;
  obm.bidders = {bidder(0, 1), bidder(1, 1)};
  obm.edges = {{Edge{0, 1}, Edge{1, 1}}, {Edge{0, 1}}};
  Instance sv = obm;
  sv.problem_class = ProblemClass::kSingleValued;
  sv.bidders = {sv_bidder(0, 1, 1), sv_bidder(1, 1, 1)};
  const auto edge = estimate_edge_contributions(obm, 400, 6, std::vector<Assignment>{{1, 0}});
  const auto star = estimate_star_contributions(sv, {Star{0, {1}}}, 400, 6);
  CHECK(edge[0].mean == doctest::Approx(star[0].mean));
  CHECK(edge[0].bound == doctest::Approx(star[0].bound));
}

TEST_CASE("star validation") {
  Instance sv;
  sv.problem_class = ProblemClass::kSingleValued;
  sv.bidders = {sv_bidder(0, 2, 2)};
  sv.edges = {{Edge{0, 2}}, {Edge{0, 2}}, {Edge{0, 2}}};
  CHECK_NOTHROW(validate_star(sv, Star{0, {0, 2}}));
  CHECK_THROWS_AS(validate_star(sv, Star{0, {0}}), std::invalid_argument);
  CHECK_THROWS_AS(validate_star(sv, Star{0, {0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(validate_star(sv, Star{1, {0, 1}}), std::invalid_argument);
  CHECK(star_bound(sv, Star{0, {0, 2}}) == doctest::Approx(4 * one_minus_inv_e()));

  Instance gen;
  gen.bidders = {bidder(0, 5)};
  gen.edges = {{Edge{0, 2}}, {Edge{0, 3}}, {Edge{0, 4}}};
  CHECK_NOTHROW(validate_star(gen, Star{0, {0, 1}}));
  CHECK_THROWS_AS(validate_star(gen, Star{0, {0, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(validate_star(gen, Star{0, {2}}), std::invalid_argument);
}

TEST_CASE("stars from an assignment") {
  const auto stars = stars_from_assignment(
      gen_upper_triangular(3), std::vector<Assignment>{{2, 2}, {0, 0}, {1, 1}});
  REQUIRE(stars.size() == 3);
  for (int j = 0; j < 3; ++j) {
    CHECK(stars[j].bidder == j);
    CHECK(stars[j].queries == std::vector<QueryId>{j});
  }
}

TEST_CASE("star contributions sum to the expected total") {
  // Every query's utility and every bidder's revenue is counted once when the
  // stars cover all matched queries, so the star means add up to E[W + W_f].
  PlantedParams p;
  p.n = 12;
  p.m = 3;
  p.budget = 20;
  p.distractors = 1;
  p.seed = 8;
  const Instance inst = gen_planted(p);
  const auto stars = stars_from_assignment(inst, planted_certificate(inst)->witness.value());
  const auto est = estimate_star_contributions(inst, stars, 300, 12);
  double sum = 0.0;
  for (const auto& e : est) {
    CHECK(e.conditional);
    sum += e.mean;
  }
  EstimateOptions options;
  const RatioEstimate r = estimate_ratio(inst, Algorithm::kGeneral, 300, 12, options);
  // Queries outside the planted stars (distractor padding) add their
  // utility to the total but to no star.
  CHECK(sum <= r.total_ratio * static_cast<double>(r.opt) + 1e-9);
}

TEST_CASE("fake money") {
  SUBCASE("unit bids never use fake money") {
    const FakeMoneyReport rep = fake_money_report(gen_upper_triangular(20), 50, 1);
    CHECK(rep.ceiling == 0);
    CHECK(rep.max_fraction == 0.0);
    CHECK(rep.within_mu);
    for (Money f : rep.fake) CHECK(f == 0);
  }
  SUBCASE("the ceiling bounds every run") {
    const Instance ex = gen_example_no_surpass(3, 6);
    const FakeMoneyReport rep = fake_money_report(ex, 200, 2);
    CHECK(rep.ceiling == fake_money_ceiling(ex));
    for (Money f : rep.fake) CHECK(f <= rep.ceiling);
  }
}

TEST_CASE("mu sweep") {
  SweepParams params;
  params.m = 4;
  params.budget = 200;
  params.instances_per_cell = 1;
  params.audited_trials = 5;
  const auto rows = sweep_mu({0.0, 0.1}, params, 40, 3);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].mu_actual == 0.0);
  CHECK(rows[0].wf_fraction_max == 0.0);
  CHECK(rows[0].total_ratio == doctest::Approx(rows[0].ratio));
  for (const auto& r : rows) {
    CHECK(r.wf_within_mu);
    CHECK(r.ratio > 0.0);
    CHECK(r.ratio <= 1.0);
    CHECK(r.audited_runs == 5);
    CHECK(r.clean_runs <= r.audited_runs);
  }
  const auto again = sweep_mu({0.0, 0.1}, params, 40, 3);
  CHECK(sweep_csv(rows, 3) == sweep_csv(again, 3));
}
