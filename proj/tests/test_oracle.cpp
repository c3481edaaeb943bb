#include <doctest.h>

#include "adwords/oracle.hpp"
#include "adwords/rng.hpp"
#include "support.hpp"

using namespace adwords;
using testing::bidder;
using testing::enumerate_optimum;
using testing::sv_bidder;

namespace {

Instance small_random(ProblemClass cls, std::uint64_t seed) {
  Rng rng(seed);
  RandomParams p;
  p.problem_class = cls;
  p.n = static_cast<int>(rng.uniform_int(0, 8));
  p.n = std::max(p.n, 1);
  p.m = static_cast<int>(rng.uniform_int(1, 5));
  p.density = 0.2 + 0.2 * static_cast<double>(rng.uniform_int(0, 3));
  p.bid_hi = 6;
  p.budget_value = 0.2 + 0.2 * static_cast<double>(rng.uniform_int(0, 3));
  p.seed = rng.next();
  return gen_random(p);
}

void check_witness(const Instance& inst, const OfflineOptimum& opt) {
  REQUIRE(opt.witness);
  CHECK(check_assignment(inst, *opt.witness).empty());
  CHECK(assignment_value(inst, *opt.witness) == opt.value);
}

}  // namespace

TEST_CASE("maximum matching on fixed instances") {
  CHECK(opt_obm(gen_upper_triangular(5)).value == 5);
  Instance star;
  star.problem_class = ProblemClass::kObm;
  star.bidders = {bidder(0, 1)};
  star.edges = {{Edge{0, 1}}, {Edge{0, 1}}, {Edge{0, 1}}};
  const OfflineOptimum opt = opt_obm(star);
  CHECK(opt.value == 1);
  CHECK(opt.kind == OptimumKind::kExact);
  check_witness(star, opt);
  CHECK_THROWS_AS(opt_obm(gen_example_no_surpass(2, 3)), std::invalid_argument);
}

TEST_CASE("maximum matching agrees with enumeration") {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const Instance inst = small_random(ProblemClass::kObm, s);
    const OfflineOptimum opt = opt_obm(inst);
    CHECK(opt.value == enumerate_optimum(inst));
    check_witness(inst, opt);
  }
}

TEST_CASE("b-matching on fixed instances") {
  Instance inst;
  inst.problem_class = ProblemClass::kSingleValued;
  inst.bidders = {sv_bidder(0, 2, 3)};
  for (int q = 0; q < 5; ++q) inst.edges.push_back({Edge{0, 2}});
  CHECK(opt_single_valued(inst).value == 6);

  PlantedParams p;
  p.problem_class = ProblemClass::kSingleValued;
  p.n = 15;
  p.m = 4;
  for (std::uint64_t s = 0; s < 10; ++s) {
    p.seed = s;
    const Instance planted = gen_planted(p);
    CHECK(opt_single_valued(planted).value == total_budget(planted));
  }
  CHECK_THROWS_AS(opt_single_valued(gen_example_no_surpass(2, 3)), std::invalid_argument);
}

TEST_CASE("b-matching agrees with enumeration") {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const Instance inst = small_random(ProblemClass::kSingleValued, s);
    const OfflineOptimum opt = opt_single_valued(inst);
    CHECK(opt.value == enumerate_optimum(inst));
    check_witness(inst, opt);
  }
}

TEST_CASE("b-matching prefers weight over cardinality") {
  Instance inst;
  inst.problem_class = ProblemClass::kSingleValued;
  inst.bidders = {sv_bidder(0, 1, 2), sv_bidder(1, 5, 1)};
  inst.edges = {{Edge{0, 1}, Edge{1, 5}}, {Edge{1, 5}}};
  CHECK(opt_single_valued(inst).value == 6);
  CHECK(enumerate_optimum(inst) == 6);
}

TEST_CASE("branch and bound on fixed instances") {
  const auto [i1, i2, i3] = gen_example_three(3);
  CHECK(opt_general_exact(i1).value == 6);
  CHECK(opt_general_exact(i2).value == 6);
  CHECK(opt_general_exact(i3).value == 6);

  const Instance ex = gen_example_no_surpass(2, 3);
  const Money enumerated = enumerate_optimum(ex);
  const OfflineOptimum opt = opt_general_exact(ex);
  CHECK(opt.value == enumerated);
  CHECK(opt.value <= total_budget(ex));
  check_witness(ex, opt);

  Instance empty;
  CHECK(opt_general_exact(empty).value == 0);
}

TEST_CASE("branch and bound agrees with enumeration") {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const Instance inst = small_random(ProblemClass::kGeneral, s);
    const OfflineOptimum opt = opt_general_exact(inst);
    CHECK(opt.value == enumerate_optimum(inst));
    CHECK(opt.value <= opt_general_bound(inst).value);
    check_witness(inst, opt);
  }
}

TEST_CASE("branch and bound honours the node limit") {
  // Greedy takes 6 and stops; the optimum 5 + 5 needs a search.
  Instance inst;
  inst.bidders = {bidder(0, 10)};
  inst.edges = {{Edge{0, 6}}, {Edge{0, 5}}, {Edge{0, 5}}};
  CHECK(opt_general_exact(inst).value == 10);
  CHECK_THROWS_AS(opt_general_exact(inst, 1), NodeLimitExceeded);
  CHECK_THROWS_AS(best_optimum(inst, false, 1), NodeLimitExceeded);
  const OfflineOptimum bound = best_optimum(inst, true, 1);
  CHECK(bound.kind == OptimumKind::kUpperBound);
  CHECK(bound.value == 10);
  CHECK(!bound.witness);
}

TEST_CASE("upper bound formula") {
  Instance one;
  one.bidders = {bidder(0, 10)};
  one.edges = {{Edge{0, 3}}};
  CHECK(opt_general_bound(one).value == 3);
  const auto [i1, i2, i3] = gen_example_three(4);
  CHECK(opt_general_bound(i3).value == 8);
}

TEST_CASE("planted certificates are tight") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    PlantedParams p;
    p.problem_class = static_cast<ProblemClass>(s % 3);
    p.n = 10;
    p.m = 4;
    p.budget = 30;
    p.mu_target = 0.2;
    p.seed = s;
    const Instance inst = gen_planted(p);
    const auto cert = planted_certificate(inst);
    REQUIRE(cert);
    CHECK(cert->kind == OptimumKind::kPlantedCertificate);
    CHECK(cert->value == opt_general_bound(inst).value);
    CHECK(cert->value == total_budget(inst));
    check_witness(inst, *cert);
    CHECK(best_optimum(inst).kind == OptimumKind::kPlantedCertificate);
  }
  // A planted solution that is not optimal is not a certificate.
  Instance weak;
  weak.bidders = {bidder(0, 4)};
  weak.edges = {{Edge{0, 2}}, {Edge{0, 2}}};
  weak.planted_opt = PlantedSolution{{{0, 0}}};
  CHECK(!planted_certificate(weak));
  CHECK(best_optimum(weak).value == 4);
}

TEST_CASE("best optimum dispatches by class") {
  Instance obm = small_random(ProblemClass::kObm, 1);
  CHECK(best_optimum(obm).value == opt_obm(obm).value);
  Instance sv = small_random(ProblemClass::kSingleValued, 2);
  CHECK(best_optimum(sv).value == opt_single_valued(sv).value);
  CHECK(to_string(OptimumKind::kUpperBound) == "upper_bound");
}
