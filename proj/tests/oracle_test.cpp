#include <doctest.h>

#include "corpus_support.hpp"
#include "racefix/oracle.hpp"
#include "racefix/repair.hpp"
#include "racefix/verifier.hpp"

using namespace racefix;

TEST_CASE("oracle finds the motivating race and accepts the barrier repair") {
  const auto ip = test::load_instrumented("race.mmp");
  const auto racy = oracle_race_check(ip, default_assignment(ip));
  REQUIRE_FALSE(racy.safe());
  CHECK(racy.races.begin()->first.loc.line == 4);
  CHECK(racy.races.begin()->second.loc.line == 6);
  CHECK(oracle_race_check(ip, Assignment::with_enabled(2, {1})).safe());
}

TEST_CASE("oracle runs parsed programs with their own constructs") {
  CHECK(oracle_race_check(parse(test::corpus_text("race_with_barrier.mmp"))).safe());
  CHECK(oracle_race_check(parse(test::corpus_text("ordered_needed.mmp"))).safe());
  CHECK_FALSE(oracle_race_check(parse(test::corpus_text("ordered_too_late.mmp"))).safe());
  CHECK(oracle_race_check(parse(test::corpus_text("ordered_late_ok.mmp"))).safe());
  CHECK(oracle_race_check(with_max_parallelism(parse(test::corpus_text("race_free.mmp")), 4)).safe());
}

TEST_CASE("oracle reports every racing pair it can reach") {
  const auto ip = test::load_instrumented("algo_barrier.mmp");
  const auto result = oracle_race_check(ip, default_assignment(ip));
  const auto pairs = racing_pairs(ip, default_assignment(ip));
  CHECK(std::vector<RaceTrace>(result.races.begin(), result.races.end()) == pairs);
  CHECK(result.statesExplored > 1);
}

TEST_CASE("oracle limits") {
  const Program wide = parse(test::corpus_text("race_free.mmp"));
  CHECK_THROWS_AS(oracle_race_check(wide), std::invalid_argument);
  OracleOptions tiny;
  tiny.maxStates = 3;
  const auto ip = test::load_instrumented("race.mmp");
  CHECK_THROWS_AS(oracle_race_check(ip, default_assignment(ip), tiny), ResourceLimit);
}

TEST_CASE("single unit never races") {
  const Program p = parse("shared int d[2];\nparallel(1) {\n  d[0] = 1;\n  x = d[0];\n}\n");
  CHECK(oracle_race_check(p).safe());
}
