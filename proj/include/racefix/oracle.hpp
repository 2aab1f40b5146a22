#pragma once

// Small-scope model checker used as an independent cross-check of the
// reference verifier. It runs the concrete program (one unit per thread or
// loop iteration), explores every reachable interleaving state, and reports
// each pair of conflicting accesses that two units can have enabled at the
// same moment.

#include <cstddef>
#include <set>
#include <stdexcept>

#include "racefix/repair.hpp"
#include "racefix/verifier.hpp"

namespace racefix {

class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleOptions {
  std::int64_t maxThreads = 4;
  std::int64_t maxArrayLength = 16;
  std::size_t maxStates = 2'000'000;
};

struct TraceOrder {
  bool operator()(const RaceTrace& a, const RaceTrace& b) const { return a < b; }
};

struct OracleResult {
  std::set<RaceTrace, TraceOrder> races;
  std::size_t statesExplored = 0;

  bool safe() const { return races.empty(); }
};

/// Checks a program with explicit constructs (Barrier / OrderedBegin /
/// OrderedEnd statements), e.g. a repair candidate or a parsed file.
/// Throws std::invalid_argument when a region exceeds maxThreads or an array
/// exceeds maxArrayLength, ResourceLimit when the state bound is hit.
OracleResult oracle_race_check(const Program& program, const OracleOptions& options = {});

/// Checks the candidate generate_repair_candidate(ip, a) builds.
OracleResult oracle_race_check(const InstrumentedProgram& ip, const Assignment& a,
                               const OracleOptions& options = {});

}  // namespace racefix
