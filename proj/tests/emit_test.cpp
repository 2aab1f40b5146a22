#include <doctest.h>

#include "corpus_support.hpp"
#include "racefix/emit.hpp"

using namespace racefix;

namespace {

RepairOutcome repaired(const std::string& file) {
  RepairOptions opts;
  opts.strategy = Strategy::MaxSat;
  return repair(test::load_instrumented(file), opts);
}

}  // namespace

TEST_CASE("action names round-trip") {
  for (auto a : {EditAction::InsertBarrier, EditAction::WrapOrdered, EditAction::AddOrderedClause,
                 EditAction::RemoveBarrier, EditAction::RemoveOrderedRegion}) {
    CHECK(parse_edit_action(to_string(a)) == a);
  }
  CHECK_FALSE(parse_edit_action("Reorder").has_value());
}

TEST_CASE("barrier repair inserts one line in front of the write") {
  const auto out = repaired("race.mmp");
  const auto edits = compute_edits(out.program, out.sol);
  REQUIRE(edits.size() == 1);
  CHECK(edits[0].action == EditAction::InsertBarrier);
  CHECK(edits[0].loc == SourceLoc{6, 3});
  const std::string text = emit_program(generate_repair_candidate(out.program, out.sol));
  CHECK(text ==
        "shared int data[5];\n"
        "parallel(4) {\n"
        "  compute;\n"
        "  temp = data[tid+1];\n"
        "\n"
        "  barrier;\n"
        "  data[tid] = temp;\n"
        "}\n");
}

TEST_CASE("loop repair adds the clause and wraps both accesses") {
  const auto out = repaired("race_for.mmp");
  const auto edits = compute_edits(out.program, out.sol);
  REQUIRE(edits.size() == 2);
  CHECK(edits[0].action == EditAction::AddOrderedClause);
  CHECK(edits[0].loc.line == 2);
  CHECK(edits[1].action == EditAction::WrapOrdered);
  CHECK(edits[1].loc.line == 4);
  REQUIRE(edits[1].end.has_value());
  CHECK(edits[1].end->line == 6);
  const std::string text = emit_program(generate_repair_candidate(out.program, out.sol));
  CHECK(text ==
        "shared int data[5];\n"
        "parallel_for(4) ordered {\n"
        "  compute;\n"
        "  ordered {\n"
        "  temp = data[i+1];\n"
        "\n"
        "  data[i] = temp;\n"
        "  }\n"
        "}\n");
}

TEST_CASE("removal edits") {
  const auto out = repaired("two_barriers_one_needed.mmp");
  const auto edits = compute_edits(out.program, out.sol);
  REQUIRE(edits.size() == 1);
  CHECK(edits[0].action == EditAction::RemoveBarrier);

  const auto ord = repaired("ordered_redundant.mmp");
  const auto ord_edits = compute_edits(ord.program, ord.sol);
  REQUIRE(ord_edits.size() == 1);
  CHECK(ord_edits[0].action == EditAction::RemoveOrderedRegion);
  const std::string text = emit_program(generate_repair_candidate(ord.program, ord.sol));
  CHECK(text.find("ordered") == std::string::npos);
}

TEST_CASE("CRLF sources get CRLF insertions") {
  const auto out = repaired("crlf.mmp");
  const std::string text = emit_program(generate_repair_candidate(out.program, out.sol));
  CHECK(text.find("barrier;\r\n") != std::string::npos);
  std::size_t bare = 0;
  for (std::size_t i = 0; i < text.size(); ++i) bare += text[i] == '\n' && (i == 0 || text[i - 1] != '\r');
  CHECK(bare == 0);
  CHECK(apply_edits(out.program.original.source, compute_edits(out.program, out.sol)) == text);
}

TEST_CASE("emitting the as-written assignment reproduces the input") {
  for (const auto& path : test::corpus_files()) {
    const auto p = test::try_load(path);
    if (!p) continue;
    CAPTURE(path.string());
    const auto ip = instrument(*p);
    CHECK(emit_program(generate_repair_candidate(ip, existing_assignment(ip))) == read_text(path));
    CHECK(compute_edits(ip, existing_assignment(ip)).empty());
  }
}

TEST_CASE("applying edits reproduces emission for random assignments") {
  auto gen = test::rng(6);
  for (const auto& path : test::corpus_files()) {
    const auto p = test::try_load(path);
    if (!p) continue;
    const auto ip = instrument(*p);
    const std::size_t m = ip.var_count();
    for (int round = 0; round < 20; ++round) {
      Assignment a(m);
      for (std::size_t v = 0; v < m; ++v) a.set(static_cast<VarId>(v), gen() & 1U);
      CAPTURE(path.string());
      CAPTURE(a.to_string());
      const std::string emitted = emit_program(generate_repair_candidate(ip, a));
      CHECK(apply_edits(p->source, compute_edits(ip, a)) == emitted);
      const Program again = parse(emitted);
      CHECK(instrument(again).var_count() >= 0);
    }
  }
}

TEST_CASE("summary JSON for a repaired program") {
  const auto out = repaired("algo_barrier.mmp");
  const auto doc = emit_summary(out);
  CHECK(doc["programName"] == "algo_barrier");
  CHECK(doc["status"] == "repaired");
  CHECK(doc["strategy"] == "maxsat");
  CHECK(doc["iterations"] == 3);
  CHECK(doc["optimal"] == true);
  CHECK(doc["enabledCount"] == 1);
  REQUIRE(doc["edits"].size() == 1);
  CHECK(doc["edits"][0]["action"] == "InsertBarrier");
  CHECK(doc["edits"][0]["loc"]["line"] == 6);
  CHECK(doc["edits"][0]["loc"]["col"] == 3);
  CHECK(doc["clauses"] == nlohmann::json::parse("[[2,3],[3,4]]"));
}

TEST_CASE("summary JSON for an unrepairable program carries the reason and trace") {
  const auto out = repaired("race_sameline.mmp");
  const auto doc = emit_summary(out);
  CHECK(doc["status"] == "cannot_repair");
  CHECK(doc["reason"] == "write-write same line");
  CHECK_FALSE(doc.contains("edits"));
  CHECK(doc["trace"]["first"]["line"] == 4);
  CHECK(doc["trace"]["second"]["kind"] == "write");
  const auto unsupported = emit_unsupported_summary("task", "3:3: unsupported construct 'task'");
  CHECK(unsupported["status"] == "unsupported");
}

TEST_CASE("IO errors name the path") {
  CHECK_THROWS_AS(read_text("/nonexistent/dir/file.mmp"), IoError);
  try {
    write_text("/nonexistent/dir/out.json", "x");
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(e.path() == "/nonexistent/dir/out.json");
    CHECK(std::string(e.what()).find("/nonexistent/dir/out.json") != std::string::npos);
  }
}
