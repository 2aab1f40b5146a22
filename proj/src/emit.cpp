#include "racefix/emit.hpp"

#include <algorithm>
#include <array>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include <fmt/format.h>

namespace racefix {

namespace {

constexpr std::array<std::pair<EditAction, std::string_view>, 5> kActionNames{{
    {EditAction::InsertBarrier, "InsertBarrier"},
    {EditAction::WrapOrdered, "WrapOrdered"},
    {EditAction::AddOrderedClause, "AddOrderedClause"},
    {EditAction::RemoveBarrier, "RemoveBarrier"},
    {EditAction::RemoveOrderedRegion, "RemoveOrderedRegion"},
}};

bool has_cr(std::string_view line) { return !line.empty() && line.back() == '\r'; }

// Builds an inserted line styled after `anchor`: same indentation, same
// line ending.
std::string styled(std::string_view anchor, std::string_view text) {
  std::string out(indentation(anchor));
  out += text;
  if (has_cr(anchor)) out += '\r';
  return out;
}

std::size_t brace_pos(std::string_view line) {
  std::string_view code = line.substr(0, line.find("//"));
  return code.rfind('{');
}

std::string with_clause(std::string line) {
  std::size_t brace = brace_pos(line);
  if (brace != std::string::npos) line.insert(brace, "ordered ");
  return line;
}

std::string without_clause(std::string line) {
  std::size_t brace = brace_pos(line);
  std::size_t clause = line.rfind("ordered", brace);
  if (brace != std::string::npos && clause != std::string::npos) line.erase(clause, brace - clause);
  return line;
}

std::string_view code_of(std::string_view line) {
  line = line.substr(0, line.find("//"));
  std::size_t start = line.find_first_not_of(" \t");
  return start == std::string_view::npos ? std::string_view{} : line.substr(start);
}

// 1-based line of the nearest parallel_for header at or above `line`.
int loop_header_above(const std::vector<std::string>& lines, int line) {
  for (int n = line; n >= 1; --n) {
    if (code_of(lines[static_cast<std::size_t>(n - 1)]).rfind("parallel_for", 0) == 0) return n;
  }
  return 0;
}

bool edit_less(const Edit& a, const Edit& b) {
  return std::tie(a.loc, a.action) < std::tie(b.loc, b.action);
}

}  // namespace

std::string_view to_string(EditAction action) {
  for (const auto& [a, name] : kActionNames) {
    if (a == action) return name;
  }
  return "?";
}

std::optional<EditAction> parse_edit_action(std::string_view name) {
  for (const auto& [a, n] : kActionNames) {
    if (n == name) return a;
  }
  return std::nullopt;
}

std::vector<Edit> compute_edits(const InstrumentedProgram& ip, const Assignment& sol) {
  std::vector<Edit> edits;
  const auto plans = plan_constructs(ip, sol);
  for (std::size_t r = 0; r < plans.size(); ++r) {
    const RegionPlan& plan = plans[r];
    const Region& base = ip.base.regions[r];
    for (std::size_t idx : plan.insertBarrierBefore) edits.push_back({EditAction::InsertBarrier, base.body[idx].loc, std::nullopt});
    for (const SourceLoc& loc : plan.removedBarriers) edits.push_back({EditAction::RemoveBarrier, loc, std::nullopt});
    const auto& span = ip.existingOrdered[r];
    if (span && !plan.keepExistingOrdered) {
      edits.push_back({EditAction::RemoveOrderedRegion, span->begin, span->end});
    }
    if (plan.ordered && !plan.keepExistingOrdered) {
      edits.push_back(
          {EditAction::WrapOrdered, base.body[plan.ordered->first].loc, base.body[plan.ordered->second].loc});
    }
    if (plan.orderedClause && !base.orderedClause) edits.push_back({EditAction::AddOrderedClause, base.headerLoc, std::nullopt});
  }
  std::sort(edits.begin(), edits.end(), edit_less);
  return edits;
}

std::string emit_program(const Candidate& candidate) {
  const Program& original = candidate.original;
  const auto& lines = original.source.lines;

  std::set<int> kept;
  std::map<int, std::vector<std::string>> before;
  std::map<int, std::vector<std::string>> after;
  auto line_text = [&](int line) -> std::string_view { return lines.at(static_cast<std::size_t>(line - 1)); };

  for (const Region& region : candidate.program.regions) {
    std::string close_indent_anchor;
    for (const Stmt& s : region.body) {
      if (!s.synthetic) {
        kept.insert(s.loc.line);
        continue;
      }
      std::string_view anchor = line_text(s.loc.line);
      switch (s.op) {
        case StmtOp::Barrier: before[s.loc.line].push_back(styled(anchor, "barrier;")); break;
        case StmtOp::OrderedBegin:
          before[s.loc.line].push_back(styled(anchor, "ordered {"));
          close_indent_anchor = std::string(indentation(anchor));
          break;
        case StmtOp::OrderedEnd: {
          std::string text = close_indent_anchor + "}";
          if (has_cr(anchor)) text += '\r';
          after[s.loc.line].push_back(std::move(text));
          break;
        }
        default: break;
      }
    }
  }

  std::set<int> dropped;
  std::map<int, bool> header_clause;
  for (std::size_t r = 0; r < original.regions.size(); ++r) {
    const Region& orig = original.regions[r];
    for (const Stmt& s : orig.body) {
      if (!kept.count(s.loc.line)) dropped.insert(s.loc.line);
    }
    if (r < candidate.program.regions.size() &&
        candidate.program.regions[r].orderedClause != orig.orderedClause) {
      header_clause[orig.headerLoc.line] = candidate.program.regions[r].orderedClause;
    }
  }

  SourceText out;
  out.trailingNewline = original.source.trailingNewline;
  for (int line = 1; line <= static_cast<int>(lines.size()); ++line) {
    if (dropped.count(line)) continue;
    if (auto it = before.find(line); it != before.end()) {
      out.lines.insert(out.lines.end(), it->second.begin(), it->second.end());
    }
    std::string text(line_text(line));
    if (auto it = header_clause.find(line); it != header_clause.end()) {
      text = it->second ? with_clause(std::move(text)) : without_clause(std::move(text));
    }
    out.lines.push_back(std::move(text));
    if (auto it = after.find(line); it != after.end()) {
      out.lines.insert(out.lines.end(), it->second.begin(), it->second.end());
    }
  }
  return out.join();
}

std::string apply_edits(const SourceText& original, std::span<const Edit> edits) {
  const auto& lines = original.lines;
  auto line_text = [&](int line) -> const std::string& { return lines.at(static_cast<std::size_t>(line - 1)); };

  std::set<int> drop;
  std::map<int, std::vector<std::string>> before;
  std::map<int, std::vector<std::string>> after;
  std::set<int> add_clause;
  std::set<int> clause_removed_from;
  std::set<int> wrapped_loops;
  for (const Edit& e : edits) {
    const int line = e.loc.line;
    switch (e.action) {
      case EditAction::InsertBarrier: before[line].push_back(styled(line_text(line), "barrier;")); break;
      case EditAction::RemoveBarrier: drop.insert(line); break;
      case EditAction::AddOrderedClause: add_clause.insert(line); break;
      case EditAction::WrapOrdered: {
        const int end = e.end.value_or(e.loc).line;
        before[line].push_back(styled(line_text(line), "ordered {"));
        std::string close = std::string(indentation(line_text(line))) + "}";
        if (has_cr(line_text(end))) close += '\r';
        after[end].push_back(std::move(close));
        wrapped_loops.insert(loop_header_above(lines, line));
        break;
      }
      case EditAction::RemoveOrderedRegion:
        drop.insert(line);
        if (e.end) drop.insert(e.end->line);
        clause_removed_from.insert(loop_header_above(lines, line));
        break;
    }
  }

  SourceText out;
  out.trailingNewline = original.trailingNewline;
  for (int line = 1; line <= static_cast<int>(lines.size()); ++line) {
    if (drop.count(line)) continue;
    if (auto it = before.find(line); it != before.end()) {
      out.lines.insert(out.lines.end(), it->second.begin(), it->second.end());
    }
    std::string text = line_text(line);
    if (add_clause.count(line)) {
      text = with_clause(std::move(text));
    } else if (clause_removed_from.count(line) && !wrapped_loops.count(line)) {
      text = without_clause(std::move(text));
    }
    out.lines.push_back(std::move(text));
    if (auto it = after.find(line); it != after.end()) {
      out.lines.insert(out.lines.end(), it->second.begin(), it->second.end());
    }
  }
  return out.join();
}

RepairSummary summarize(const RepairOutcome& outcome) {
  RepairSummary s;
  s.programName = outcome.programName;
  s.strategy = outcome.strategy;
  s.status = outcome.tag;
  s.iterations = outcome.iterations;
  if (outcome.repaired()) {
    s.edits = compute_edits(outcome.program, outcome.sol);
    s.enabledCount = outcome.sol.count_enabled();
    s.optimal = outcome.optimal.value_or(false);
    s.optimalCount = outcome.optimalCount;
  } else {
    s.reason = outcome.message;
  }
  return s;
}

namespace {

nlohmann::json loc_json(const SourceLoc& loc) { return {{"line", loc.line}, {"col", loc.col}}; }

}  // namespace

nlohmann::json to_json(const RepairSummary& s) {
  nlohmann::json doc;
  doc["programName"] = s.programName;
  doc["status"] = to_string(s.status);
  doc["strategy"] = to_string(s.strategy);
  doc["iterations"] = s.iterations;
  if (s.status != OutcomeTag::Repaired) {
    doc["reason"] = s.reason;
    return doc;
  }
  auto edits = nlohmann::json::array();
  for (const Edit& e : s.edits) {
    nlohmann::json item{{"action", to_string(e.action)}, {"loc", loc_json(e.loc)}};
    if (e.end) item["end"] = loc_json(*e.end);
    edits.push_back(std::move(item));
  }
  doc["edits"] = std::move(edits);
  doc["optimal"] = s.optimal;
  doc["enabledCount"] = s.enabledCount;
  if (s.optimalCount) doc["optimalCount"] = *s.optimalCount;
  return doc;
}

nlohmann::json emit_summary(const RepairOutcome& outcome) {
  nlohmann::json doc = to_json(summarize(outcome));
  auto clauses = nlohmann::json::array();
  for (const Clause& c : outcome.phi.clauses()) {
    auto lits = nlohmann::json::array();
    for (VarId id : c.literals()) lits.push_back(id + 1);
    clauses.push_back(std::move(lits));
  }
  doc["clauses"] = std::move(clauses);
  if (outcome.tag == OutcomeTag::CannotRepair && !outcome.traces.empty()) {
    const RaceTrace& t = outcome.traces.back();
    doc["trace"] = {{"array", t.array},
                    {"first", {{"line", t.first.loc.line}, {"kind", to_string(t.first.kind)}}},
                    {"second", {{"line", t.second.loc.line}, {"kind", to_string(t.second.kind)}}}};
  }
  return doc;
}

nlohmann::json emit_unsupported_summary(const std::string& programName, const std::string& reason) {
  return {{"programName", programName}, {"status", to_string(OutcomeTag::Unsupported)}, {"reason", reason}};
}

IoError::IoError(const std::filesystem::path& path, const std::string& what)
    : std::runtime_error(fmt::format("{}: {}", path.string(), what)), path_(path) {}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, fmt::format("cannot open for writing ({})", std::strerror(errno)));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError(path, "write failed");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, fmt::format("cannot open for reading ({})", std::strerror(errno)));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace racefix
