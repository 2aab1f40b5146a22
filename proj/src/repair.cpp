#include "racefix/repair.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include <fmt/format.h>

namespace racefix {

std::string_view to_string(Strategy s) { return s == Strategy::Mhs ? "mhs" : "maxsat"; }

std::optional<Strategy> parse_strategy(std::string_view name) {
  if (name == "mhs") return Strategy::Mhs;
  if (name == "maxsat") return Strategy::MaxSat;
  return std::nullopt;
}

std::string_view to_string(OutcomeTag tag) {
  switch (tag) {
    case OutcomeTag::Repaired: return "repaired";
    case OutcomeTag::CannotRepair: return "cannot_repair";
    case OutcomeTag::Unsupported: return "unsupported";
    case OutcomeTag::Timeout: return "timeout";
  }
  return "?";
}

Clause generate_clause(const InstrumentedProgram& ip, const Assignment& a, const RaceTrace& trace) {
  const Region& region = ip.base.regions.at(trace.region);
  const int first = trace.first.loc.line;
  const int second = trace.second.loc.line;
  const std::optional<int> loop_bound =
      region.kind == RegionKind::ParallelFor ? ordered_start_bound(ip, trace) : std::nullopt;
  std::vector<VarId> lits;
  for (const auto& v : ip.vars) {
    if (v.region != trace.region || a[v.id]) continue;
    const int line = v.loc.line;
    if (region.kind == RegionKind::Parallel) {
      if (line > first && line <= second) lits.push_back(v.id);
    } else if (v.stmt && loop_bound && line <= *loop_bound) {
      lits.push_back(v.id);
    }
  }
  return Clause(std::move(lits));
}

namespace {

std::vector<std::size_t> shared_statements(const Region& region) {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < region.body.size(); ++s) {
    if (region.body[s].touches_shared()) out.push_back(s);
  }
  return out;
}

}  // namespace

std::vector<RegionPlan> plan_constructs(const InstrumentedProgram& ip, const Assignment& sol) {
  std::vector<RegionPlan> plans(ip.base.regions.size());
  for (std::size_t r = 0; r < plans.size(); ++r) {
    const Region& region = ip.base.regions[r];
    RegionPlan& plan = plans[r];
    if (region.kind == RegionKind::Parallel) {
      for (const auto& v : ip.vars) {
        if (v.region != r) continue;
        auto& bucket = sol[v.id] ? plan.keptBarriers : plan.removedBarriers;
        bucket.insert(bucket.end(), v.existing.begin(), v.existing.end());
        if (sol[v.id] && !v.fromExisting && v.stmt) plan.insertBarrierBefore.push_back(*v.stmt);
      }
      continue;
    }

    std::optional<std::size_t> start;
    std::optional<VarId> existing_var;
    for (const auto& v : ip.vars) {
      if (v.region != r) continue;
      if (v.fromExisting) existing_var = v.id;
      if (sol[v.id] && v.stmt && (!start || *v.stmt < *start)) start = v.stmt;
    }
    const auto shared = shared_statements(region);
    if (start) plan.ordered = std::pair{*start, shared.back()};

    const auto& span = ip.existingOrdered[r];
    if (span) {
      std::vector<std::size_t> inside_existing;
      std::vector<std::size_t> inside_generated;
      for (std::size_t s : shared) {
        int line = region.body[s].loc.line;
        if (line > span->begin.line && line < span->end.line) inside_existing.push_back(s);
        if (plan.ordered && s >= plan.ordered->first) inside_generated.push_back(s);
      }
      plan.keepExistingOrdered = existing_var && sol[*existing_var] && inside_existing == inside_generated;
    }
    plan.orderedClause =
        plan.ordered.has_value() || plan.keepExistingOrdered || (region.orderedClause && !span);
  }
  return plans;
}

Candidate generate_repair_candidate(const InstrumentedProgram& ip, const Assignment& sol) {
  Candidate cand{ip.base, ip.original, sol};
  const auto plans = plan_constructs(ip, sol);
  for (std::size_t r = 0; r < plans.size(); ++r) {
    const RegionPlan& plan = plans[r];
    const Region& base = ip.base.regions[r];
    const Region& orig = ip.original.regions[r];

    // (line, slot, statement); slot 0 goes in front of the line's statement,
    // 2 after it.
    std::vector<std::tuple<int, int, Stmt>> merged;
    for (const Stmt& s : base.body) merged.emplace_back(s.loc.line, 1, s);
    for (const Stmt& s : orig.body) {
      bool keep = false;
      if (s.op == StmtOp::Barrier) {
        keep = std::find(plan.keptBarriers.begin(), plan.keptBarriers.end(), s.loc) != plan.keptBarriers.end();
      } else if (s.op == StmtOp::OrderedBegin || s.op == StmtOp::OrderedEnd) {
        keep = plan.keepExistingOrdered;
      }
      if (keep) merged.emplace_back(s.loc.line, 1, s);
    }
    for (std::size_t idx : plan.insertBarrierBefore) {
      const SourceLoc loc = base.body[idx].loc;
      merged.emplace_back(loc.line, 0, Stmt{loc, StmtOp::Barrier, {}, {}, true});
    }
    if (plan.ordered && !plan.keepExistingOrdered) {
      const SourceLoc begin = base.body[plan.ordered->first].loc;
      const SourceLoc end = base.body[plan.ordered->second].loc;
      merged.emplace_back(begin.line, 0, Stmt{begin, StmtOp::OrderedBegin, {}, {}, true});
      merged.emplace_back(end.line, 2, Stmt{end, StmtOp::OrderedEnd, {}, {}, true});
    }
    std::stable_sort(merged.begin(), merged.end(), [](const auto& x, const auto& y) {
      return std::tie(std::get<0>(x), std::get<1>(x)) < std::tie(std::get<0>(y), std::get<1>(y));
    });

    Region& out = cand.program.regions[r];
    out.body.clear();
    for (auto& entry : merged) out.body.push_back(std::move(std::get<2>(entry)));
    out.orderedClause = plan.orderedClause;
  }
  return cand;
}

namespace {

std::string empty_clause_message(const RaceTrace& t) {
  if (t.first.loc.line == t.second.loc.line) {
    if (t.first.kind == AccessKind::Write && t.second.kind == AccessKind::Write) return "write-write same line";
    return fmt::format("read-write same line; split line {} to place a barrier between the read and the write",
                       t.first.loc.line);
  }
  return fmt::format("no synchronisation point between lines {} and {}", t.first.loc.line, t.second.loc.line);
}

RepairOutcome start_outcome(const InstrumentedProgram& ip, Strategy strategy) {
  RepairOutcome out;
  out.strategy = strategy;
  out.programName = ip.original.name;
  out.program = ip;
  out.phi = ClauseSet(ip.var_count());
  out.sol = default_assignment(ip);
  return out;
}

}  // namespace

RepairOutcome repair(const InstrumentedProgram& ip, const RepairOptions& options) {
  static const ReferenceVerifier reference;
  const Verifier& verifier = options.verifier ? *options.verifier : reference;
  const Deadline deadline = Deadline::after(options.budget.timeout);

  RepairOutcome out = start_outcome(ip, options.strategy);
  auto fail = [&](OutcomeTag tag, std::optional<FailureReason> reason, std::string message) {
    out.tag = tag;
    out.reason = reason;
    out.message = std::move(message);
    return out;
  };

  try {
    std::set<std::tuple<int, int, int, int, std::string, std::size_t>> seen;
    while (true) {
      deadline.check();
      auto sol = options.strategy == Strategy::Mhs ? solve_mhs(out.phi) : solve_maxsat(out.phi, deadline);
      if (!sol) {
        const RaceTrace& last = out.traces.back();
        return fail(OutcomeTag::CannotRepair, FailureReason::EmptyClause, empty_clause_message(last));
      }
      out.sol = *sol;
      if (out.iterations >= options.budget.maxIterations) {
        return fail(OutcomeTag::Timeout, std::nullopt,
                    fmt::format("iteration budget of {} exhausted", options.budget.maxIterations));
      }
      ++out.iterations;
      VerificationResult result = verifier.verify(ip, out.sol, deadline);
      if (result.is_safe()) {
        if (options.observer) options.observer({out.iterations, out.sol, result, nullptr});
        break;
      }
      if (!result.is_race() || !result.trace) {
        if (options.observer) options.observer({out.iterations, out.sol, result, nullptr});
        if (result.tag == VerificationResult::Tag::Unsupported) {
          return fail(OutcomeTag::Unsupported, FailureReason::NonRaceError, result.message);
        }
        return fail(OutcomeTag::CannotRepair, FailureReason::NonRaceError,
                    result.message.empty() ? "verifier error" : result.message);
      }
      const RaceTrace& trace = *result.trace;
      if (!seen.emplace(trace.first.loc.line, static_cast<int>(trace.first.kind), trace.second.loc.line,
                        static_cast<int>(trace.second.kind), trace.array, trace.region)
               .second) {
        return fail(OutcomeTag::CannotRepair, FailureReason::InternalError,
                    "verifier repeated an earlier trace: " + to_string(trace));
      }
      out.traces.push_back(trace);
      Clause clause = generate_clause(ip, out.sol, trace);
      if (options.observer) options.observer({out.iterations, out.sol, result, &clause});
      try {
        out.phi.add(std::move(clause));
      } catch (const DuplicateClause& e) {
        return fail(OutcomeTag::CannotRepair, FailureReason::InternalError, e.what());
      }
    }
  } catch (const DeadlineExceeded&) {
    return fail(OutcomeTag::Timeout, std::nullopt,
                fmt::format("timed out after {} ms", options.budget.timeout.count()));
  }

  out.tag = OutcomeTag::Repaired;
  try {
    out.optimalCount = min_hitting_set_size(out.phi, deadline);
    out.optimal = out.optimalCount && *out.optimalCount == out.sol.count_enabled();
  } catch (const DeadlineExceeded&) {
    // Repair stands; optimality is just not known.
  }
  return out;
}

RepairOutcome remove_unnecessary(const InstrumentedProgram& ip, const RepairOptions& options) {
  return repair(ip, options);
}

}  // namespace racefix
