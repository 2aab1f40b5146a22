#include "racefix/instrument.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace racefix {

std::string_view to_string(VarKind kind) { return kind == VarKind::Barrier ? "barrier" : "ordered"; }

std::optional<VarId> InstrumentedProgram::var_for(std::size_t region, std::size_t stmt) const {
  for (const auto& v : vars) {
    if (v.region == region && v.stmt == stmt) return v.id;
  }
  return std::nullopt;
}

Assignment Assignment::with_enabled(std::size_t size, const std::vector<VarId>& ids) {
  Assignment a(size);
  for (VarId id : ids) a.set(id, true);
  return a;
}

std::size_t Assignment::count_enabled() const {
  std::size_t n = 0;
  for (bool v : values_) n += v ? 1 : 0;
  return n;
}

std::vector<VarId> Assignment::enabled() const {
  std::vector<VarId> out;
  for (std::size_t n = 0; n < values_.size(); ++n) {
    if (values_[n]) out.push_back(static_cast<VarId>(n));
  }
  return out;
}

std::string Assignment::to_string() const {
  std::vector<std::string> names;
  for (VarId id : enabled()) names.push_back(fmt::format("b{}", id + 1));
  return fmt::format("{{{}}}", fmt::join(names, ","));
}

InstrumentedProgram instrument(const Program& program) {
  InstrumentedProgram ip;
  ip.original = program;
  ip.base = program;
  VarId next = 0;
  for (std::size_t r = 0; r < program.regions.size(); ++r) {
    const Region& region = program.regions[r];
    Region& out = ip.base.regions[r];
    out.body.clear();
    ip.sharedAccessLocs.emplace_back();
    ip.existingOrdered.emplace_back();
    VarKind kind = region.kind == RegionKind::Parallel ? VarKind::Barrier : VarKind::Ordered;

    std::vector<SourceLoc> pending;
    for (const Stmt& s : region.body) {
      switch (s.op) {
        case StmtOp::Barrier:
          pending.push_back(s.loc);
          continue;
        case StmtOp::OrderedBegin:
          pending.push_back(s.loc);
          ip.existingOrdered[r] = OrderedSpan{s.loc, s.loc};
          continue;
        case StmtOp::OrderedEnd:
          ip.existingOrdered[r]->end = s.loc;
          continue;
        default:
          break;
      }
      out.body.push_back(s);
      if (!s.touches_shared()) continue;
      ip.sharedAccessLocs[r].push_back(s.loc);
      BarrierVariable v;
      v.id = next++;
      v.loc = s.loc;
      v.kind = kind;
      v.region = r;
      v.stmt = out.body.size() - 1;
      v.fromExisting = !pending.empty();
      v.existing = std::move(pending);
      pending.clear();
      ip.vars.push_back(std::move(v));
    }
    if (!pending.empty()) {
      BarrierVariable v;
      v.id = next++;
      v.loc = pending.front();
      v.kind = kind;
      v.region = r;
      v.fromExisting = true;
      v.existing = std::move(pending);
      ip.vars.push_back(std::move(v));
    }
  }
  return ip;
}

Assignment default_assignment(const InstrumentedProgram& ip) { return Assignment(ip.var_count()); }

Assignment existing_assignment(const InstrumentedProgram& ip) {
  Assignment a(ip.var_count());
  for (const auto& v : ip.vars) a.set(v.id, v.fromExisting);
  return a;
}

}  // namespace racefix
