#include <doctest.h>

#include <chrono>
#include <fstream>
#include <sstream>

#include "corpus_support.hpp"
#include "racefix/driver.hpp"
#include "racefix/emit.hpp"

using namespace racefix;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("racefix_driver_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string chain_program(int pairs) {
  std::ostringstream out;
  out << "shared int d[5];\nparallel(4) {\n";
  for (int k = 0; k < pairs; ++k) out << "  x = d[tid+1];\n  d[tid] = x;\n";
  out << "}\n";
  return out.str();
}

}  // namespace

TEST_CASE("verdict categories") {
  RunConfig cfg;
  auto verdict = [&](const std::string& file) {
    return process_source(test::corpus_text(file), file, cfg).verdict;
  };
  CHECK(verdict("race_free.mmp") == Verdict::SafeNoChanges);
  CHECK(verdict("race_with_barrier.mmp") == Verdict::SafeNoChanges);
  CHECK(verdict("redundant_barrier.mmp") == Verdict::ChangesRecommended);
  CHECK(verdict("race.mmp") == Verdict::Repaired);
  CHECK(verdict("race_sameline.mmp") == Verdict::CannotRepair);
  CHECK(verdict("task.mmp") == Verdict::Unsupported);
  CHECK(process_source("shared int;", "bad", cfg).verdict == Verdict::Error);
}

TEST_CASE("verdict lines") {
  FileResult r;
  r.verdict = Verdict::Repaired;
  r.edits = 1;
  CHECK(r.verdict_line() == "REPAIRED 1 edit");
  r.edits = 3;
  CHECK(r.verdict_line() == "REPAIRED 3 edits");
  r.verdict = Verdict::CannotRepair;
  r.message = "write-write same line";
  CHECK(r.verdict_line() == "CANNOT-REPAIR (write-write same line)");
  CHECK(category_key(Verdict::SafeNoChanges) == "safe_no_change");
}

TEST_CASE("output paths strip .mmp") {
  RunConfig cfg;
  CHECK(output_path("dir/race.mmp", cfg, ".llor.json") == fs::path("dir/race.llor.json"));
  CHECK(output_path("dir/race.c", cfg, ".repaired.mmp") == fs::path("dir/race.c.repaired.mmp"));
  cfg.outDir = "out";
  CHECK(output_path("dir/race.mmp", cfg, ".llor.json") == fs::path("out/race.llor.json"));
}

TEST_CASE("directories expand to sorted .mmp files, skipping earlier outputs") {
  const fs::path dir = scratch_dir("expand");
  write_text(dir / "b.mmp", "");
  write_text(dir / "a.mmp", "");
  write_text(dir / "a.repaired.mmp", "");
  write_text(dir / "notes.txt", "");
  const auto files = expand_inputs({dir});
  REQUIRE(files.size() == 2);
  CHECK(files[0].filename() == "a.mmp");
  CHECK(files[1].filename() == "b.mmp");
}

TEST_CASE("run writes summaries, repaired programs and clause dumps") {
  const fs::path dir = scratch_dir("run");
  RunConfig cfg;
  cfg.inputs = {test::corpus_dir() / "race.mmp", test::corpus_dir() / "race_sameline.mmp"};
  cfg.outDir = dir;
  cfg.dumpClauses = true;
  cfg.reportPath = dir / "report.csv";
  std::ostringstream out, err;
  const RunReport report = run(cfg, out, err);
  CHECK(report.exitCode == 1);
  CHECK(out.str().find("race.mmp: REPAIRED 1 edit\n") != std::string::npos);
  CHECK(out.str().find("race_sameline.mmp: CANNOT-REPAIR (write-write same line)\n") != std::string::npos);

  const auto summary = nlohmann::json::parse(read_text(dir / "race.llor.json"));
  CHECK(summary["verdict"] == "REPAIRED");
  CHECK(summary["status"] == "repaired");
  CHECK(fs::exists(dir / "race.repaired.mmp"));
  CHECK_FALSE(fs::exists(dir / "race_sameline.repaired.mmp"));
  CHECK(read_text(dir / "race.clauses.cnf") == "p cnf 2 1\n2 0\n");
  CHECK(read_text(dir / "report.csv").rfind("input,verdict,edits,iterations,enabled\n", 0) == 0);
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch_dir("exit");
  RunConfig cfg;
  cfg.outDir = dir;
  std::ostringstream out, err;
  cfg.inputs = {test::corpus_dir() / "race.mmp"};
  CHECK(run(cfg, out, err).exitCode == 0);
  cfg.inputs = {dir / "missing.mmp"};
  CHECK(run(cfg, out, err).exitCode == 2);
  write_text(dir / "bad.mmp", "parallel(2) {\n  x = y;\n");
  cfg.inputs = {dir / "bad.mmp"};
  CHECK(run(cfg, out, err).exitCode == 2);
  CHECK(err.str().find("error: ") != std::string::npos);
}

TEST_CASE("parallel jobs give the same results in input order") {
  const fs::path dir = scratch_dir("jobs");
  RunConfig cfg;
  cfg.inputs = {test::corpus_dir()};
  cfg.outDir = dir;
  cfg.maxIterations = 50;
  std::ostringstream serial, parallel, err;
  run(cfg, serial, err);
  cfg.jobs = 4;
  run(cfg, parallel, err);
  CHECK(serial.str() == parallel.str());
}

TEST_CASE("wall-clock timeout is honoured within 10%") {
  RunConfig cfg;
  cfg.timeoutSecs = 1.0;
  cfg.maxIterations = 100000;
  const std::string src = chain_program(1500);
  const auto t0 = std::chrono::steady_clock::now();
  const FileResult r = process_source(src, "chain", cfg);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(r.verdict == Verdict::Timeout);
  CHECK(elapsed <= 1.1);
}

TEST_CASE("verbose mode logs each iteration") {
  RunConfig cfg;
  cfg.verbose = true;
  const FileResult r = process_source(test::corpus_text("algo_barrier.mmp"), "algo_barrier", cfg);
  CHECK(r.log.find("iteration 1: enabled {} -> ") != std::string::npos);
  CHECK(r.log.find("learned (b2 | b3)") != std::string::npos);
  CHECK(r.log.find("iteration 3: enabled {b3} -> SAFE") != std::string::npos);
}

TEST_CASE("solver comparison CSV") {
  RunConfig cfg;
  cfg.inputs = {test::corpus_dir() / "algo_barrier.mmp", test::corpus_dir() / "race_sameline.mmp"};
  std::ostringstream err;
  const std::string csv = compare_solvers(cfg, err);
  std::istringstream lines(csv);
  std::string header, row, extra;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(header == "input,mhs_ms,maxsat_ms,mhs_iters,maxsat_iters,mhs_enabled,maxsat_enabled");
  CHECK(row.find("algo_barrier.mmp,") != std::string::npos);
  CHECK(row.substr(row.size() - 8) == ",3,3,1,1");
  CHECK_FALSE(std::getline(lines, extra));
}

TEST_CASE("solver comparison over the corpus: header-only when empty, MaxSAT never larger") {
  RunConfig cfg;
  cfg.maxIterations = 50;
  std::ostringstream err;
  cfg.inputs = {scratch_dir("empty_corpus")};
  CHECK(compare_solvers(cfg, err) == "input,mhs_ms,maxsat_ms,mhs_iters,maxsat_iters,mhs_enabled,maxsat_enabled\n");

  cfg.inputs = {test::corpus_dir()};
  std::istringstream lines(compare_solvers(cfg, err));
  std::string line;
  std::getline(lines, line);
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    std::vector<std::string> fields;
    std::istringstream in(line);
    for (std::string f; std::getline(in, f, ',');) fields.push_back(f);
    REQUIRE(fields.size() == 7);
    CAPTURE(line);
    CHECK(std::stoi(fields[6]) <= std::stoi(fields[5]));
  }
  CHECK(rows > 0);
}

TEST_CASE("configuration is validated") {
  RunConfig cfg;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.inputs = {"x.mmp"};
  cfg.timeoutSecs = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
