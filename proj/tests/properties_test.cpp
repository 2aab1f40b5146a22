// Randomised properties over generated MiniMP programs. Every generator is
// seeded, so failures reproduce.

#include <doctest.h>

#include <bit>
#include <set>

#include "corpus_support.hpp"
#include "racefix/emit.hpp"
#include "racefix/oracle.hpp"
#include "racefix/repair.hpp"

using namespace racefix;

namespace {

constexpr int kPrograms = 500;

template <typename Fn>
void for_random_programs(std::uint64_t salt, Fn fn) {
  auto gen = test::rng(salt);
  for (int round = 0; round < kPrograms; ++round) {
    const std::string src = test::random_program(gen);
    CAPTURE(src);
    fn(instrument(parse(src)), gen);
  }
}

}  // namespace

TEST_CASE("repair terminates without repeating traces, within m+1 calls") {
  for_random_programs(10, [](const InstrumentedProgram& ip, std::mt19937_64&) {
    for (Strategy s : {Strategy::Mhs, Strategy::MaxSat}) {
      RepairOptions opts;
      opts.strategy = s;
      const auto out = repair(ip, opts);
      CHECK(out.tag != OutcomeTag::Timeout);
      CHECK(out.iterations <= ip.var_count() + 1);
      std::set<std::tuple<int, int, int, int, std::string>> seen;
      for (const auto& t : out.traces) {
        CHECK(seen.emplace(t.first.loc.line, int(t.first.kind), t.second.loc.line, int(t.second.kind), t.array)
                  .second);
      }
    }
  });
}

TEST_CASE("every proposed assignment satisfies all clauses learned before it") {
  for_random_programs(11, [](const InstrumentedProgram& ip, std::mt19937_64&) {
    ClauseSet learned(ip.var_count());
    bool ok = true;
    RepairOptions opts;
    opts.observer = [&](const IterationEvent& ev) {
      ok = ok && learned.satisfied_by(ev.sol);
      if (ev.learned) {
        ok = ok && !ev.learned->satisfied_by(ev.sol);
        learned.add(*ev.learned);
      }
    };
    repair(ip, opts);
    CHECK(ok);
  });
}

TEST_CASE("both strategies agree on repairability; MaxSAT is never larger") {
  for_random_programs(12, [](const InstrumentedProgram& ip, std::mt19937_64&) {
    RepairOptions mhs_opts;
    RepairOptions maxsat_opts;
    maxsat_opts.strategy = Strategy::MaxSat;
    const auto a = repair(ip, mhs_opts);
    const auto b = repair(ip, maxsat_opts);
    CHECK(a.tag == b.tag);
    if (a.repaired() && b.repaired()) {
      CHECK(verify(ip, a.sol).is_safe());
      CHECK(verify(ip, b.sol).is_safe());
    }
  });
}

TEST_CASE("MaxSAT repair is minimal over all SAFE assignments") {
  for_random_programs(13, [](const InstrumentedProgram& ip, std::mt19937_64&) {
    if (ip.var_count() > 12) return;
    RepairOptions opts;
    opts.strategy = Strategy::MaxSat;
    const auto out = repair(ip, opts);
    const auto best = test::brute_force_min_safe(ip);
    CHECK(out.repaired() == best.has_value());
    if (out.repaired() && best) CHECK(out.sol.count_enabled() == *best);
  });
}

TEST_CASE("verifier and oracle agree at two and three units") {
  for_random_programs(14, [](const InstrumentedProgram& ip, std::mt19937_64& gen) {
    for (std::int64_t units : {2, 3}) {
      const auto scaled = instrument(with_max_parallelism(ip.original, units));
      const std::size_t m = scaled.var_count();
      for (int k = 0; k < 5; ++k) {
        Assignment a(m);
        for (std::size_t v = 0; v < m; ++v) a.set(static_cast<VarId>(v), gen() & 1U);
        CAPTURE(a.to_string());
        CHECK(verify(scaled, a).is_safe() == oracle_race_check(scaled, a).safe());
      }
    }
  });
}

TEST_CASE("repaired output round-trips through the parser") {
  for_random_programs(15, [](const InstrumentedProgram& ip, std::mt19937_64&) {
    const auto out = repair(ip);
    if (!out.repaired()) return;
    const Candidate cand = generate_repair_candidate(ip, out.sol);
    const std::string text = emit_program(cand);
    const Program again = parse(text);
    CHECK(same_structure(again, cand.program));
    CHECK(apply_edits(ip.original.source, compute_edits(ip, out.sol)) == text);
    // Re-running on the repaired program finds nothing left to do.
    const auto ip2 = instrument(again);
    CHECK(verify(ip2, existing_assignment(ip2)).is_safe());
  });
}
