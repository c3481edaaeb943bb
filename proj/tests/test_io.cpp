#include <doctest.h>

#include "adwords/report_io.hpp"
#include "support.hpp"

using namespace adwords;

TEST_CASE("run outcomes round-trip") {
  const Instance ex = gen_example_no_surpass(2, 4);
  RunOptions options;
  options.trace = true;
  const RunOutcome o = run_general(ex, ranks_from({0.5, 0.5}), options);
  const Json doc = to_json(o, 17);
  CHECK(doc["seed"] == 17);
  const RunOutcome back = outcome_from_json(doc);
  CHECK(back.matching == o.matching);
  CHECK(back.real_money == o.real_money);
  CHECK(back.fake_money == o.fake_money);
  CHECK(back.utility == o.utility);
  CHECK(back.revenue == o.revenue);
  CHECK(back.leftover == o.leftover);
  CHECK(back.degree == o.degree);
  REQUIRE(back.trace);
  CHECK(back.trace->steps.size() == o.trace->steps.size());
  CHECK(dump(to_json(back, 17)) == dump(doc));
  CHECK(!to_json(o).contains("seed"));
}

TEST_CASE("optima round-trip") {
  const auto [i1, i2, i3] = gen_example_three(3);
  const OfflineOptimum opt = opt_general_exact(i2);
  const OfflineOptimum back = optimum_from_json(to_json(opt));
  CHECK(back.value == opt.value);
  CHECK(back.kind == opt.kind);
  CHECK(back.witness == opt.witness);
}

TEST_CASE("ranks files") {
  const RankAssignment r = ranks_from({0.0, 0.25, 1.0});
  const RankAssignment back = ranks_from_json_text(ranks_to_json_text(r));
  CHECK(back.rank == r.rank);
  CHECK(back.price == r.price);
  CHECK_THROWS_AS(ranks_from_json_text("[0.1, 1.5]"), std::invalid_argument);
  CHECK_THROWS_AS(ranks_from_json_text("{\"a\": 1}"), ParseError);
  CHECK_THROWS_AS(ranks_from_json_text("[0.1,"), ParseError);
  CHECK_THROWS_AS(ranks_from_json_text("[\"x\"]"), ParseError);
}

TEST_CASE("ratio estimates round-trip through JSON and CSV") {
  const RatioEstimate e = estimate_ratio(gen_upper_triangular(10), Algorithm::kRanking, 100, 5);
  const RatioEstimate back = ratio_from_json(to_json(e));
  CHECK(dump(to_json(back)) == dump(to_json(e)));

  const CsvTable t = parse_csv(ratio_csv({e}));
  CHECK(t.seed == 5);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0][t.column("algorithm")] == "ranking");
  CHECK(std::stod(t.rows[0][t.column("ratio")]) == e.ratio);
  CHECK(std::stoll(t.rows[0][t.column("trials")]) == 100);
  CHECK_THROWS_AS(t.column("nope"), ParseError);
}

TEST_CASE("audit output") {
  const Instance ex = gen_example_no_surpass(2, 5);
  AuditReport rep = audit(ex, ranks_from({0.5, 0.5}));
  rep.seed = 11;
  const Json doc = to_json(rep);
  CHECK(doc["no_surpassing"]["violations"] == 1);
  CHECK(doc["no_surpassing"]["run_violated"] == true);
  CHECK(doc["multiset"].size() == 2);

  const CsvTable t = parse_csv(audit_csv({rep}));
  REQUIRE(t.rows.size() == 1);
  CHECK(t.header == std::vector<std::string>{"seed", "query", "bidder", "ebid", "beta",
                                             "surpassing_bid", "surpassing_bidder"});
  CHECK(t.rows[0][t.column("query")] == "4");
  CHECK(t.rows[0][t.column("surpassing_bidder")] == "1");
  CHECK(std::stod(t.rows[0][t.column("ebid")]) ==
        rep.no_surpassing->violations[0].effective_bid);
}

TEST_CASE("sweep and contribution tables") {
  SweepRow row;
  row.mu_target = 0.1;
  row.ratio = 0.75;
  row.clean_runs = 3;
  const CsvTable t = parse_csv(sweep_csv({row, row}, 42));
  CHECK(t.seed == 42);
  CHECK(t.rows.size() == 2);
  CHECK(t.rows[1][t.column("clean_runs")] == "3");
  CHECK(std::stod(t.rows[0][t.column("ratio")]) == 0.75);
  CHECK(to_json(row)["mu_target"] == 0.1);

  ContributionEstimate c;
  c.target = Star{2, {4, 5}};
  c.mean = 1.5;
  const CsvTable ct = parse_csv(contribution_csv({c}, 1));
  REQUIRE(ct.rows.size() == 1);
  CHECK(ct.seed == 1);
}

TEST_CASE("csv parsing") {
  const CsvTable t = parse_csv("a,b\n1,2\n3,4\n");
  CHECK(!t.seed);
  CHECK(t.rows.size() == 2);
  CHECK(t.rows[1][t.column("b")] == "4");
  CHECK_THROWS_AS(parse_csv("a,b\n1\n"), ParseError);
}

TEST_CASE("documents end with a newline") {
  const std::string text = dump(Json::object());
  CHECK(text.back() == '\n');
}
