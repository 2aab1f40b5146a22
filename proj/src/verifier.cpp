#include "racefix/verifier.hpp"

#include <algorithm>
#include <cstdlib>
#include <tuple>

#include <fmt/format.h>

namespace racefix {

namespace {

struct Event {
  SourceLoc loc;
  AccessKind kind;
  const Access* access;
};

std::vector<Event> events_of(const Region& region) {
  std::vector<Event> out;
  for (const Stmt& s : region.body) {
    for (const Access& acc : s.accesses) out.push_back({s.loc, acc.kind, &acc});
  }
  return out;
}

// Pairs (first, second) of events in `region` that race under `a`; stops after
// the smallest first line that has any race when `first_only`.
void region_races(const InstrumentedProgram& ip, std::size_t r, const Assignment& a, bool first_only,
                  const Deadline& deadline, std::vector<RaceTrace>& out) {
  const Region& region = ip.base.regions[r];
  const std::vector<Event> events = events_of(region);

  std::vector<int> barrier_lines;
  std::optional<int> ordered_start;
  for (const auto& v : ip.vars) {
    if (v.region != r || !a[v.id]) continue;
    if (region.kind == RegionKind::Parallel) {
      barrier_lines.push_back(v.loc.line);
    } else if (v.stmt && (!ordered_start || v.loc.line < *ordered_start)) {
      ordered_start = v.loc.line;
    }
  }
  std::sort(barrier_lines.begin(), barrier_lines.end());
  auto phase = [&](int line) {
    return std::upper_bound(barrier_lines.begin(), barrier_lines.end(), line) - barrier_lines.begin();
  };
  // The later iteration's access must be inside the region; the earlier
  // one always precedes the region's end, the last shared access.
  auto ordered = [&](const Event& e1, const Event& e2) {
    if (!ordered_start) return false;
    const CollisionOrder order = collision_order(e1.access->index, e2.access->index, region.count);
    return (!order.xFirst || e2.loc.line >= *ordered_start) && (!order.yFirst || e1.loc.line >= *ordered_start);
  };

  std::optional<int> found_line;
  for (std::size_t x = 0; x < events.size(); ++x) {
    const Event& e1 = events[x];
    if (first_only && found_line && e1.loc.line > *found_line) break;
    if ((x & 63) == 0) deadline.check();
    for (std::size_t y = x; y < events.size(); ++y) {
      const Event& e2 = events[y];
      if (e1.kind == AccessKind::Read && e2.kind == AccessKind::Read) continue;
      if (e1.access->array != e2.access->array) continue;
      if (!indices_may_collide(e1.access->index, e2.access->index, region.count)) continue;
      if (region.kind == RegionKind::Parallel) {
        if (phase(e1.loc.line) != phase(e2.loc.line)) continue;
      } else if (ordered(e1, e2)) {
        continue;
      }
      out.push_back(RaceTrace{{e1.loc, e1.kind}, {e2.loc, e2.kind}, e1.access->array, r});
      found_line = e1.loc.line;
    }
  }
}

std::vector<RaceTrace> collect(const InstrumentedProgram& ip, const Assignment& a, bool first_only,
                               const Deadline& deadline) {
  std::vector<RaceTrace> out;
  for (std::size_t r = 0; r < ip.base.regions.size(); ++r) {
    region_races(ip, r, a, first_only, deadline, out);
    // Regions are laid out in source order, so an earlier region's races
    // always sort first.
    if (first_only && !out.empty()) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

bool operator<(const RaceTrace& a, const RaceTrace& b) {
  return std::tie(a.first.loc.line, a.second.loc.line, a.first.kind, a.second.kind, a.array, a.region,
                  a.first.loc.col, a.second.loc.col) <
         std::tie(b.first.loc.line, b.second.loc.line, b.first.kind, b.second.kind, b.array, b.region,
                  b.first.loc.col, b.second.loc.col);
}

std::string to_string(const RaceTrace& t) {
  return fmt::format("race on '{}': {} at line {} vs {} at line {}", t.array, to_string(t.first.kind),
                     t.first.loc.line, to_string(t.second.kind), t.second.loc.line);
}

bool indices_may_collide(const IndexExpr& x, const IndexExpr& y, std::int64_t units) {
  if (units < 2) return false;
  if (x.induction && y.induction) {
    // u + cx == v + cy with u != v, both in [0, units).
    std::int64_t d = x.offset - y.offset;
    return d != 0 && std::llabs(d) < units;
  }
  if (!x.induction && !y.induction) return x.offset == y.offset;
  const IndexExpr& sym = x.induction ? x : y;
  const IndexExpr& cst = x.induction ? y : x;
  std::int64_t unit = cst.offset - sym.offset;
  return unit >= 0 && unit < units;
}

CollisionOrder collision_order(const IndexExpr& x, const IndexExpr& y, std::int64_t units) {
  CollisionOrder order;
  if (!indices_may_collide(x, y, units)) return order;
  if (x.induction && y.induction) {
    // v - u == x.offset - y.offset.
    order.xFirst = x.offset > y.offset;
    order.yFirst = x.offset < y.offset;
  } else if (!x.induction && !y.induction) {
    order.xFirst = order.yFirst = true;
  } else {
    // The unit on the induction side is pinned; the other side ranges freely.
    const IndexExpr& sym = x.induction ? x : y;
    const IndexExpr& cst = x.induction ? y : x;
    const std::int64_t pinned = cst.offset - sym.offset;
    const bool others_before = pinned >= 1;
    const bool others_after = pinned <= units - 2;
    order.xFirst = x.induction ? others_after : others_before;
    order.yFirst = x.induction ? others_before : others_after;
  }
  return order;
}

namespace {

const Access* find_access(const Region& region, const AccessPoint& point, const std::string& array) {
  for (const Stmt& s : region.body) {
    if (s.loc != point.loc) continue;
    for (const Access& acc : s.accesses) {
      if (acc.kind == point.kind && acc.array == array) return &acc;
    }
  }
  return nullptr;
}

}  // namespace

std::optional<int> ordered_start_bound(const InstrumentedProgram& ip, const RaceTrace& trace) {
  if (trace.region >= ip.base.regions.size()) return std::nullopt;
  const Region& region = ip.base.regions[trace.region];
  const Access* x = find_access(region, trace.first, trace.array);
  const Access* y = find_access(region, trace.second, trace.array);
  if (!x || !y) return std::nullopt;
  const CollisionOrder order = collision_order(x->index, y->index, region.count);
  if (!order.any()) return std::nullopt;
  int bound = std::max(trace.first.loc.line, trace.second.loc.line);
  if (order.xFirst) bound = std::min(bound, trace.second.loc.line);
  if (order.yFirst) bound = std::min(bound, trace.first.loc.line);
  return bound;
}

VerificationResult ReferenceVerifier::verify(const InstrumentedProgram& ip, const Assignment& a,
                                             const Deadline& deadline) const {
  if (a.size() != ip.var_count()) {
    return VerificationResult::other(
        fmt::format("assignment covers {} variables, program has {}", a.size(), ip.var_count()));
  }
  auto races = collect(ip, a, true, deadline);
  if (races.empty()) return VerificationResult::safe();
  return VerificationResult::race(races.front());
}

VerificationResult verify(const InstrumentedProgram& ip, const Assignment& a) {
  return ReferenceVerifier{}.verify(ip, a);
}

std::vector<RaceTrace> racing_pairs(const InstrumentedProgram& ip, const Assignment& a) {
  return collect(ip, a, false, Deadline{});
}

}  // namespace racefix
