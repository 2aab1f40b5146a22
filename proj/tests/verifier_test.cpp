#include <doctest.h>

#include "corpus_support.hpp"
#include "racefix/verifier.hpp"

using namespace racefix;

namespace {

// Independent statement of the collision rule: enumerate every unit pair.
bool collide_by_enumeration(const IndexExpr& x, const IndexExpr& y, std::int64_t units) {
  for (std::int64_t u = 0; u < units; ++u) {
    for (std::int64_t v = 0; v < units; ++v) {
      if (u != v && x.at(u) == y.at(v)) return true;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("index collision rule matches enumeration") {
  std::vector<IndexExpr> exprs;
  for (std::int64_t k = -3; k <= 6; ++k) {
    exprs.push_back(IndexExpr::symbolic(k));
    exprs.push_back(IndexExpr::constant(k));
  }
  for (std::int64_t n = 0; n <= 6; ++n) {
    for (const auto& x : exprs) {
      for (const auto& y : exprs) {
        CAPTURE(n);
        CHECK(indices_may_collide(x, y, n) == collide_by_enumeration(x, y, n));
      }
    }
  }
}

TEST_CASE("collision order matches enumeration") {
  std::vector<IndexExpr> exprs;
  for (std::int64_t k = -2; k <= 5; ++k) {
    exprs.push_back(IndexExpr::symbolic(k));
    exprs.push_back(IndexExpr::constant(k));
  }
  for (std::int64_t n = 0; n <= 5; ++n) {
    for (const auto& x : exprs) {
      for (const auto& y : exprs) {
        bool x_first = false;
        bool y_first = false;
        for (std::int64_t u = 0; u < n; ++u) {
          for (std::int64_t v = 0; v < n; ++v) {
            if (x.at(u) != y.at(v)) continue;
            x_first = x_first || u < v;
            y_first = y_first || u > v;
          }
        }
        const CollisionOrder order = collision_order(x, y, n);
        CAPTURE(n);
        CHECK(order.xFirst == x_first);
        CHECK(order.yFirst == y_first);
      }
    }
  }
}

TEST_CASE("motivating race is reported between the read and the write") {
  const auto ip = test::load_instrumented("race.mmp");
  const auto r = verify(ip, default_assignment(ip));
  REQUIRE(r.is_race());
  CHECK(r.trace->first.loc.line == 4);
  CHECK(r.trace->first.kind == AccessKind::Read);
  CHECK(r.trace->second.loc.line == 6);
  CHECK(r.trace->second.kind == AccessKind::Write);
  CHECK(r.trace->array == "data");
  CHECK(verify(ip, Assignment::with_enabled(2, {1})).is_safe());
  CHECK_FALSE(verify(ip, Assignment::with_enabled(2, {0})).is_safe());
}

TEST_CASE("barrier phases: a barrier separates earlier lines from later ones") {
  const auto ip = test::load_instrumented("algo_barrier.mmp");
  CHECK(verify(ip, Assignment::with_enabled(4, {2})).is_safe());
  CHECK(verify(ip, Assignment::with_enabled(4, {1, 3})).is_safe());
  const auto r = verify(ip, Assignment::with_enabled(4, {1}));
  REQUIRE(r.is_race());
  CHECK(r.trace->first.loc.line == 5);
  CHECK(r.trace->second.loc.line == 7);
}

TEST_CASE("same-line write-write race") {
  const auto ip = test::load_instrumented("race_sameline.mmp");
  const auto r = verify(ip, Assignment(ip.var_count(), true));
  REQUIRE(r.is_race());
  CHECK(r.trace->first == r.trace->second);
  CHECK(r.trace->first.kind == AccessKind::Write);
}

TEST_CASE("ordered region covers from the earliest enabled variable to the last shared access") {
  const auto ip = test::load_instrumented("race_for.mmp");
  REQUIRE(ip.var_count() == 2);
  CHECK_FALSE(verify(ip, default_assignment(ip)).is_safe());
  CHECK(verify(ip, Assignment::with_enabled(2, {0})).is_safe());
  // The read at line 4 runs in the earlier iteration, so the region may
  // start at the write.
  CHECK(verify(ip, Assignment::with_enabled(2, {1})).is_safe());
  CHECK(verify(ip, Assignment::with_enabled(2, {0, 1})).is_safe());
}

TEST_CASE("only the later iteration's access has to be inside the ordered region") {
  // Iteration u reads data[u+1] at line 5; iteration u+1 writes it at line 7.
  const auto late_ok = test::load_instrumented("ordered_late_ok.mmp");
  REQUIRE(late_ok.var_count() == 2);
  CHECK(verify(late_ok, Assignment::with_enabled(2, {1})).is_safe());
  const auto r = verify(late_ok, default_assignment(late_ok));
  REQUIRE(r.is_race());
  CHECK(ordered_start_bound(late_ok, *r.trace) == 7);

  // Iteration u writes data[u+1] at line 6; iteration u+1 reads it at line 4.
  const auto too_late = test::load_instrumented("ordered_too_late.mmp");
  CHECK_FALSE(verify(too_late, Assignment::with_enabled(2, {1})).is_safe());
  CHECK(verify(too_late, Assignment::with_enabled(2, {0})).is_safe());
  const auto r2 = verify(too_late, default_assignment(too_late));
  REQUIRE(r2.is_race());
  CHECK(ordered_start_bound(too_late, *r2.trace) == 4);
}

TEST_CASE("racing_pairs is sorted and verify reports its first element") {
  for (const auto& path : test::corpus_files()) {
    const auto p = test::try_load(path);
    if (!p) continue;
    const auto ip = instrument(*p);
    const auto pairs = racing_pairs(ip, default_assignment(ip));
    CAPTURE(path.string());
    CHECK(std::is_sorted(pairs.begin(), pairs.end()));
    const auto r = verify(ip, default_assignment(ip));
    if (pairs.empty()) {
      CHECK(r.is_safe());
    } else {
      REQUIRE(r.is_race());
      CHECK(*r.trace == pairs.front());
    }
  }
}

TEST_CASE("wrong-sized assignment is a non-race error") {
  const auto ip = test::load_instrumented("race.mmp");
  const auto r = verify(ip, Assignment(7));
  CHECK(r.tag == VerificationResult::Tag::Other);
  CHECK_FALSE(r.message.empty());
}

TEST_CASE("enabling more variables never adds races") {
  auto gen = test::rng(3);
  for (int round = 0; round < 200; ++round) {
    const auto ip = instrument(parse(test::random_program(gen)));
    const std::size_t m = ip.var_count();
    if (m == 0 || m > 20) continue;
    const std::uint64_t mask = gen() & ((std::uint64_t{1} << m) - 1);
    const std::uint64_t more = mask | (gen() & ((std::uint64_t{1} << m) - 1));
    const auto fewer_pairs = racing_pairs(ip, test::from_mask(m, mask));
    const auto more_pairs = racing_pairs(ip, test::from_mask(m, more));
    for (const auto& t : more_pairs) {
      CHECK(std::find(fewer_pairs.begin(), fewer_pairs.end(), t) != fewer_pairs.end());
    }
  }
}
