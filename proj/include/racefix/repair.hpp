#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "racefix/clauses.hpp"
#include "racefix/instrument.hpp"
#include "racefix/verifier.hpp"

namespace racefix {

enum class Strategy { Mhs, MaxSat };

std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view name);

/// Clause learned from `trace` under `a`: every disabled variable whose
/// construct would order the two accesses.
///  - parallel region: variables placed strictly after first.line and at or
///    before second.line (a barrier in front of the second access separates
///    the pair);
///  - parallel_for: variables at or before ordered_start_bound(ip, trace),
///    since the ordered region runs from the earliest enabled variable to the
///    last shared access and a pair is ordered once the later iteration's
///    access is inside it.
/// Empty when nothing can separate the pair (same-line conflicts).
Clause generate_clause(const InstrumentedProgram& ip, const Assignment& a, const RaceTrace& trace);

/// Constructs enabled by an assignment in one region.
struct RegionPlan {
  // Base statement indices that get a new barrier in front of them.
  std::vector<std::size_t> insertBarrierBefore;
  // Programmer-written barriers kept in place.
  std::vector<SourceLoc> keptBarriers;
  // Programmer-written barriers dropped.
  std::vector<SourceLoc> removedBarriers;
  // Generated ordered region as an inclusive range of base statement indices.
  std::optional<std::pair<std::size_t, std::size_t>> ordered;
  // The programmer's ordered region already covers exactly `ordered`.
  bool keepExistingOrdered = false;
  bool orderedClause = false;
};

std::vector<RegionPlan> plan_constructs(const InstrumentedProgram& ip, const Assignment& sol);

/// A repair candidate: the program with constructs enabled per `sol`.
struct Candidate {
  // Statements carry their original locations; inserted constructs are
  // marked synthetic and carry the location of the statement they guard.
  Program program;
  Program original;
  Assignment sol;
};

Candidate generate_repair_candidate(const InstrumentedProgram& ip, const Assignment& sol);

struct Budget {
  std::size_t maxIterations = 1000;
  std::chrono::milliseconds timeout{300'000};
};

enum class OutcomeTag { Repaired, CannotRepair, Unsupported, Timeout };
enum class FailureReason { EmptyClause, NonRaceError, InternalError };

std::string_view to_string(OutcomeTag tag);

struct RepairOutcome {
  OutcomeTag tag = OutcomeTag::Repaired;
  Strategy strategy = Strategy::Mhs;
  std::string programName;
  InstrumentedProgram program;
  Assignment sol;
  ClauseSet phi;
  // Verifier calls made.
  std::size_t iterations = 0;
  // Traces in the order they were reported.
  std::vector<RaceTrace> traces;
  std::optional<FailureReason> reason;
  std::string message;
  // Set for Repaired outcomes: whether sol is MaxSAT-optimal for phi, and
  // the optimal count.
  std::optional<bool> optimal;
  std::optional<std::size_t> optimalCount;

  bool repaired() const { return tag == OutcomeTag::Repaired; }
};

struct IterationEvent {
  std::size_t iteration;
  const Assignment& sol;
  const VerificationResult& result;
  const Clause* learned;
};

struct RepairOptions {
  Strategy strategy = Strategy::Mhs;
  Budget budget;
  const Verifier* verifier = nullptr;  // reference verifier when null
  std::function<void(const IterationEvent&)> observer;
};

/// The counterexample-guided loop: solve, build the candidate, verify, learn
/// one clause per race, until SAFE, an unsatisfiable constraint, a non-race
/// verifier error, or the budget runs out.
RepairOutcome repair(const InstrumentedProgram& ip, const RepairOptions& options = {});

/// Same loop; programmer-written constructs start disabled, so the ones the
/// solution leaves disabled are the removable ones.
RepairOutcome remove_unnecessary(const InstrumentedProgram& ip, const RepairOptions& options = {});

}  // namespace racefix
