// racefix: repair data races in MiniMP programs by placing barriers or an
// ordered region.
//
//   racefix [options] <file.mmp|dir>...
//
// Writes <input>.llor.json (summary) and, when repaired, <input>.repaired.mmp
// next to each input (or under --out-dir).

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "racefix/driver.hpp"
#include "racefix/emit.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Repair data races in MiniMP programs"};
  app.set_version_flag("--version", "racefix 0.1.0");

  racefix::RunConfig cfg;
  std::vector<std::string> inputs;
  std::string solver = "mhs";
  std::string report;
  std::string out_dir;

  app.add_option("inputs", inputs, "MiniMP files or directories of .mmp files")->required();
  app.add_option("--solver", solver, "Solve strategy")
      ->check(CLI::IsMember({"mhs", "maxsat"}))
      ->capture_default_str();
  app.add_option("--timeout", cfg.timeoutSecs, "Per-file time limit in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--max-iterations", cfg.maxIterations, "Per-file verifier call limit")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("-v,--verbose", cfg.verbose, "Log every repair iteration to stderr");
  app.add_option("--report", report, "Write a CSV report (verdicts, or solver comparison)");
  app.add_flag("--compare-solvers", cfg.compareSolvers, "Run both strategies and report timings as CSV");
  app.add_flag("--dump-clauses", cfg.dumpClauses, "Write the learned clauses as <input>.clauses.cnf");
  app.add_option("--out-dir", out_dir, "Directory for output files");
  app.add_option("-j,--jobs", cfg.jobs, "Files processed in parallel")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (const auto& in : inputs) cfg.inputs.emplace_back(in);
  cfg.solver = *racefix::parse_strategy(solver);
  if (!report.empty()) cfg.reportPath = report;
  if (!out_dir.empty()) cfg.outDir = out_dir;

  try {
    if (cfg.compareSolvers) {
      std::string csv = racefix::compare_solvers(cfg, std::cerr);
      if (cfg.reportPath) {
        racefix::write_text(*cfg.reportPath, csv);
      } else {
        std::cout << csv;
      }
      return 0;
    }
    return racefix::run(cfg, std::cout, std::cerr).exitCode;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
