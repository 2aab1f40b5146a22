#include "racefix/driver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "racefix/emit.hpp"
#include "racefix/frontend.hpp"
#include "racefix/instrument.hpp"

namespace racefix {

namespace fs = std::filesystem;

void RunConfig::validate() const {
  if (inputs.empty()) throw std::invalid_argument("no inputs");
  if (!(timeoutSecs > 0)) throw std::invalid_argument("timeout must be positive");
  if (maxIterations == 0) throw std::invalid_argument("max iterations must be positive");
  if (jobs == 0) throw std::invalid_argument("jobs must be positive");
}

RepairOptions RunConfig::repair_options(Strategy strategy) const {
  RepairOptions opts;
  opts.strategy = strategy;
  opts.budget.maxIterations = maxIterations;
  opts.budget.timeout = std::chrono::milliseconds(static_cast<long long>(timeoutSecs * 1000.0));
  return opts;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::SafeNoChanges: return "SAFE-no-changes";
    case Verdict::ChangesRecommended: return "CHANGES-RECOMMENDED";
    case Verdict::Repaired: return "REPAIRED";
    case Verdict::CannotRepair: return "CANNOT-REPAIR";
    case Verdict::Unsupported: return "UNSUPPORTED";
    case Verdict::Timeout: return "TIMEOUT";
    case Verdict::Error: return "ERROR";
  }
  return "?";
}

std::string_view category_key(Verdict v) {
  switch (v) {
    case Verdict::SafeNoChanges: return "safe_no_change";
    case Verdict::ChangesRecommended: return "changes_recommended";
    case Verdict::Repaired: return "repaired";
    case Verdict::CannotRepair: return "cannot_repair";
    case Verdict::Unsupported: return "unsupported";
    case Verdict::Timeout: return "timeout";
    case Verdict::Error: return "error";
  }
  return "?";
}

std::string FileResult::verdict_line() const {
  switch (verdict) {
    case Verdict::Repaired: return fmt::format("REPAIRED {} edit{}", edits, edits == 1 ? "" : "s");
    case Verdict::ChangesRecommended:
      return fmt::format("CHANGES-RECOMMENDED {} edit{}", edits, edits == 1 ? "" : "s");
    case Verdict::SafeNoChanges: return "SAFE-no-changes";
    default: return fmt::format("{} ({})", to_string(verdict), message);
  }
}

FileResult process_source(std::string_view text, const std::string& name, const RunConfig& cfg) {
  FileResult res;
  res.input = name;
  Program program;
  try {
    program = parse(text, name);
  } catch (const UnsupportedConstruct& e) {
    res.verdict = Verdict::Unsupported;
    res.message = e.what();
    return res;
  } catch (const SyntaxError& e) {
    res.verdict = Verdict::Error;
    res.message = e.what();
    return res;
  }

  const InstrumentedProgram ip = instrument(program);
  const bool safe_as_written = verify(ip, existing_assignment(ip)).is_safe();

  std::ostringstream log;
  RepairOptions opts = cfg.repair_options(cfg.solver);
  if (cfg.verbose) {
    log << fmt::format("{}: {} barrier variables\n", name, ip.var_count());
    opts.observer = [&log](const IterationEvent& ev) {
      log << fmt::format("  iteration {}: enabled {} -> ", ev.iteration, ev.sol.to_string());
      if (ev.result.is_safe()) {
        log << "SAFE\n";
      } else if (ev.result.trace) {
        log << to_string(*ev.result.trace) << fmt::format(", learned {}\n", ev.learned ? ev.learned->to_string() : "-");
      } else {
        log << ev.result.message << '\n';
      }
    };
  }
  RepairOutcome outcome = repair(ip, opts);
  res.log = log.str();

  switch (outcome.tag) {
    case OutcomeTag::Repaired: {
      const auto edits = compute_edits(ip, outcome.sol);
      res.edits = edits.size();
      if (safe_as_written) {
        res.verdict = edits.empty() ? Verdict::SafeNoChanges : Verdict::ChangesRecommended;
      } else {
        res.verdict = Verdict::Repaired;
      }
      res.repairedText = emit_program(generate_repair_candidate(ip, outcome.sol));
      break;
    }
    case OutcomeTag::CannotRepair: res.verdict = Verdict::CannotRepair; break;
    case OutcomeTag::Unsupported: res.verdict = Verdict::Unsupported; break;
    case OutcomeTag::Timeout: res.verdict = Verdict::Timeout; break;
  }
  res.message = outcome.message;
  res.outcome = std::move(outcome);
  return res;
}

std::vector<fs::path> expand_inputs(const std::vector<fs::path>& inputs) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    if (!fs::is_directory(in)) {
      out.push_back(in);
      continue;
    }
    std::vector<fs::path> found;
    for (const auto& entry : fs::recursive_directory_iterator(in)) {
      if (entry.is_regular_file() && entry.path().extension() == ".mmp" &&
          entry.path().string().find(".repaired.mmp") == std::string::npos) {
        found.push_back(entry.path());
      }
    }
    std::sort(found.begin(), found.end());
    out.insert(out.end(), found.begin(), found.end());
  }
  return out;
}

fs::path output_path(const fs::path& input, const RunConfig& cfg, std::string_view suffix) {
  fs::path stem = input;
  if (stem.extension() == ".mmp") stem.replace_extension();
  fs::path name = stem.filename();
  name += suffix;
  return cfg.outDir ? *cfg.outDir / name : stem.parent_path() / name;
}

namespace {

std::string program_name(const fs::path& input) { return input.stem().string(); }

FileResult process_file(const fs::path& input, const RunConfig& cfg) {
  FileResult res;
  std::string text;
  try {
    text = read_text(input);
  } catch (const IoError& e) {
    res.input = input.string();
    res.verdict = Verdict::Error;
    res.message = e.what();
    return res;
  }
  res = process_source(text, program_name(input), cfg);
  res.input = input.string();
  if (!cfg.writeOutputs || res.verdict == Verdict::Error) return res;

  try {
    if (cfg.outDir) fs::create_directories(*cfg.outDir);
    nlohmann::json summary = res.outcome ? emit_summary(*res.outcome)
                                         : emit_unsupported_summary(program_name(input), res.message);
    summary["input"] = input.string();
    summary["verdict"] = to_string(res.verdict);
    write_text(output_path(input, cfg, ".llor.json"), summary.dump(2) + "\n");
    if (res.outcome && res.outcome->repaired()) {
      write_text(output_path(input, cfg, ".repaired.mmp"), res.repairedText);
    }
    if (cfg.dumpClauses && res.outcome) {
      write_text(output_path(input, cfg, ".clauses.cnf"), to_dimacs(res.outcome->phi));
    }
  } catch (const IoError& e) {
    res.verdict = Verdict::Error;
    res.message = e.what();
  } catch (const fs::filesystem_error& e) {
    res.verdict = Verdict::Error;
    res.message = e.what();
  }
  return res;
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads.
template <typename Fn>
void parallel_for_each(std::size_t n, unsigned jobs, Fn fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  for (unsigned w = 0; w < std::min<std::size_t>(jobs, n); ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

RunReport run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  cfg.validate();
  const auto inputs = expand_inputs(cfg.inputs);
  RunReport report;
  report.files.resize(inputs.size());
  parallel_for_each(inputs.size(), cfg.jobs, [&](std::size_t i) { report.files[i] = process_file(inputs[i], cfg); });

  bool failed = false;
  bool errored = false;
  for (const auto& f : report.files) {
    if (!f.log.empty()) err << f.log;
    out << f.input << ": " << f.verdict_line() << '\n';
    switch (f.verdict) {
      case Verdict::Error: errored = true; break;
      case Verdict::CannotRepair:
      case Verdict::Unsupported:
      case Verdict::Timeout: failed = true; break;
      default: break;
    }
    if (f.verdict == Verdict::Error) err << "error: " << f.message << '\n';
  }
  report.exitCode = errored ? 2 : failed ? 1 : 0;

  if (cfg.reportPath) {
    std::string csv = "input,verdict,edits,iterations,enabled\n";
    for (const auto& f : report.files) {
      std::size_t iterations = f.outcome ? f.outcome->iterations : 0;
      std::size_t enabled = f.outcome && f.outcome->repaired() ? f.outcome->sol.count_enabled() : 0;
      csv += fmt::format("{},{},{},{},{}\n", csv_field(f.input), to_string(f.verdict), f.edits, iterations, enabled);
    }
    try {
      write_text(*cfg.reportPath, csv);
    } catch (const IoError& e) {
      err << "error: " << e.what() << '\n';
      report.exitCode = 2;
    }
  }
  return report;
}

std::string compare_solvers(const RunConfig& cfg, std::ostream& err) {
  cfg.validate();
  std::string csv = "input,mhs_ms,maxsat_ms,mhs_iters,maxsat_iters,mhs_enabled,maxsat_enabled\n";
  for (const auto& input : expand_inputs(cfg.inputs)) {
    Program program;
    try {
      program = parse(read_text(input), program_name(input));
    } catch (const std::exception& e) {
      err << input.string() << ": skipped (" << e.what() << ")\n";
      continue;
    }
    const InstrumentedProgram ip = instrument(program);
    auto timed = [&](Strategy s) {
      auto t0 = std::chrono::steady_clock::now();
      RepairOutcome o = repair(ip, cfg.repair_options(s));
      auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      return std::pair{std::move(o), ms};
    };
    auto [mhs, mhs_ms] = timed(Strategy::Mhs);
    auto [maxsat, maxsat_ms] = timed(Strategy::MaxSat);
    if (!mhs.repaired() && !maxsat.repaired()) continue;
    auto enabled = [](const RepairOutcome& o) { return o.repaired() ? std::to_string(o.sol.count_enabled()) : ""; };
    csv += fmt::format("{},{:.3f},{:.3f},{},{},{},{}\n", csv_field(input.string()), mhs_ms, maxsat_ms,
                       mhs.iterations, maxsat.iterations, enabled(mhs), enabled(maxsat));
  }
  return csv;
}

}  // namespace racefix
