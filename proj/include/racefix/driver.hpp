#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "racefix/repair.hpp"

namespace racefix {

struct RunConfig {
  std::vector<std::filesystem::path> inputs;
  Strategy solver = Strategy::Mhs;
  double timeoutSecs = 300;
  std::size_t maxIterations = 1000;
  bool verbose = false;
  std::optional<std::filesystem::path> reportPath;
  bool compareSolvers = false;
  bool dumpClauses = false;
  std::optional<std::filesystem::path> outDir;
  bool writeOutputs = true;
  unsigned jobs = 1;

  /// Throws std::invalid_argument on a bad configuration.
  void validate() const;
  RepairOptions repair_options(Strategy strategy) const;
};

/// Per-file result categories (one row each of the results table).
enum class Verdict { SafeNoChanges, ChangesRecommended, Repaired, CannotRepair, Unsupported, Timeout, Error };

std::string_view to_string(Verdict v);
/// Manifest key: safe_no_change, changes_recommended, repaired, ...
std::string_view category_key(Verdict v);

struct FileResult {
  std::string input;
  Verdict verdict = Verdict::Error;
  std::size_t edits = 0;
  std::string message;
  std::optional<RepairOutcome> outcome;
  std::string repairedText;
  std::string log;

  /// "REPAIRED 2 edits", "SAFE-no-changes", ...
  std::string verdict_line() const;
};

/// Parse, instrument, check as written, repair. `name` becomes the program
/// name.
FileResult process_source(std::string_view text, const std::string& name, const RunConfig& cfg);

struct RunReport {
  std::vector<FileResult> files;
  int exitCode = 0;
};

/// Expands directories to their *.mmp files (sorted), keeps files as given.
std::vector<std::filesystem::path> expand_inputs(const std::vector<std::filesystem::path>& inputs);

/// Output paths: the input with `.mmp` stripped plus `.llor.json`,
/// `.repaired.mmp`, `.clauses.cnf`; placed in outDir when set.
std::filesystem::path output_path(const std::filesystem::path& input, const RunConfig& cfg, std::string_view suffix);

/// Processes every input, writes artifacts, prints one verdict line per file
/// in input order. Exit code 0 if every file is SAFE/CHANGES/REPAIRED, 1 if
/// any cannot be repaired, is unsupported or timed out, 2 on IO or syntax
/// errors.
RunReport run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// CSV: input,mhs_ms,maxsat_ms,mhs_iters,maxsat_iters,mhs_enabled,maxsat_enabled;
/// one row per input repaired by either strategy.
std::string compare_solvers(const RunConfig& cfg, std::ostream& err);

}  // namespace racefix
