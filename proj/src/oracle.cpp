#include "racefix/oracle.hpp"

#include <unordered_set>

#include <fmt/format.h>

namespace racefix {

namespace {

enum class EvType { Access, Barrier, OrderedEnter, OrderedExit };

struct Ev {
  EvType type;
  SourceLoc loc;
  const Access* access = nullptr;
};

std::vector<Ev> template_of(const Region& region) {
  std::vector<Ev> out;
  for (const Stmt& s : region.body) {
    switch (s.op) {
      case StmtOp::Barrier: out.push_back({EvType::Barrier, s.loc}); break;
      case StmtOp::OrderedBegin: out.push_back({EvType::OrderedEnter, s.loc}); break;
      case StmtOp::OrderedEnd: out.push_back({EvType::OrderedExit, s.loc}); break;
      default:
        for (const Access& a : s.accesses) out.push_back({EvType::Access, s.loc, &a});
        break;
    }
  }
  return out;
}

// pcs[0..units) followed by the ordered token.
using State = std::vector<std::uint16_t>;

std::string key_of(const State& s) {
  return std::string(reinterpret_cast<const char*>(s.data()), s.size() * sizeof(std::uint16_t));
}

void explore_region(const Region& region, std::size_t r, const OracleOptions& options, OracleResult& result) {
  const std::vector<Ev> tmpl = template_of(region);
  const auto units = static_cast<std::size_t>(region.count);
  if (tmpl.size() >= 0xffff) throw ResourceLimit("region too long for the oracle");
  const auto len = static_cast<std::uint16_t>(tmpl.size());

  auto conflict = [&](std::size_t u, std::uint16_t pu, std::size_t v, std::uint16_t pv) {
    const Ev& a = tmpl[pu];
    const Ev& b = tmpl[pv];
    if (a.type != EvType::Access || b.type != EvType::Access) return;
    if (a.access->kind == AccessKind::Read && b.access->kind == AccessKind::Read) return;
    if (a.access->array != b.access->array) return;
    if (a.access->index.at(static_cast<std::int64_t>(u)) != b.access->index.at(static_cast<std::int64_t>(v))) return;
    const Ev& lo = pu <= pv ? a : b;
    const Ev& hi = pu <= pv ? b : a;
    result.races.insert(RaceTrace{{lo.loc, lo.access->kind}, {hi.loc, hi.access->kind}, lo.access->array, r});
  };

  State init(units + 1, 0);
  std::unordered_set<std::string> visited{key_of(init)};
  std::vector<State> stack{init};
  while (!stack.empty()) {
    State s = std::move(stack.back());
    stack.pop_back();
    ++result.statesExplored;

    for (std::size_t u = 0; u < units; ++u) {
      if (s[u] == len) continue;
      for (std::size_t v = u + 1; v < units; ++v) {
        if (s[v] != len) conflict(u, s[u], v, s[v]);
      }
    }

    auto push = [&](State next) {
      if (visited.insert(key_of(next)).second) {
        if (visited.size() > options.maxStates) {
          throw ResourceLimit(fmt::format("more than {} states", options.maxStates));
        }
        stack.push_back(std::move(next));
      }
    };
    const std::uint16_t token = s[units];
    for (std::size_t u = 0; u < units; ++u) {
      const std::uint16_t pc = s[u];
      if (pc == len) continue;
      State next = s;
      switch (tmpl[pc].type) {
        case EvType::Access:
          ++next[u];
          push(std::move(next));
          break;
        case EvType::Barrier: {
          bool all_here = true;
          for (std::size_t v = 0; v < units; ++v) all_here = all_here && s[v] == pc;
          if (all_here && u == 0) {
            for (std::size_t v = 0; v < units; ++v) ++next[v];
            push(std::move(next));
          }
          break;
        }
        case EvType::OrderedEnter:
          if (token == u) {
            ++next[u];
            push(std::move(next));
          }
          break;
        case EvType::OrderedExit:
          ++next[u];
          next[units] = static_cast<std::uint16_t>(u + 1);
          push(std::move(next));
          break;
      }
    }
  }
}

}  // namespace

OracleResult oracle_race_check(const Program& program, const OracleOptions& options) {
  for (const auto& d : program.decls) {
    if (d.length > options.maxArrayLength) {
      throw std::invalid_argument(fmt::format("array '{}' longer than {}", d.name, options.maxArrayLength));
    }
  }
  OracleResult result;
  for (std::size_t r = 0; r < program.regions.size(); ++r) {
    const Region& region = program.regions[r];
    if (region.count > options.maxThreads) {
      throw std::invalid_argument(
          fmt::format("region at line {} has {} units, oracle limit is {}", region.headerLoc.line, region.count,
                      options.maxThreads));
    }
    explore_region(region, r, options, result);
  }
  return result;
}

OracleResult oracle_race_check(const InstrumentedProgram& ip, const Assignment& a, const OracleOptions& options) {
  return oracle_race_check(generate_repair_candidate(ip, a).program, options);
}

}  // namespace racefix
