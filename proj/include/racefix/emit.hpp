#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "racefix/repair.hpp"

namespace racefix {

enum class EditAction { InsertBarrier, WrapOrdered, AddOrderedClause, RemoveBarrier, RemoveOrderedRegion };

std::string_view to_string(EditAction action);
std::optional<EditAction> parse_edit_action(std::string_view name);

/// One source change, in coordinates of the original input.
///  InsertBarrier        new `barrier;` line in front of the statement at loc
///  WrapOrdered          `ordered {` in front of loc, `}` after end
///  AddOrderedClause     `ordered` added to the loop header at loc
///  RemoveBarrier        delete the `barrier;` line at loc
///  RemoveOrderedRegion  delete the `ordered {` line at loc and its `}` at
///                       end; drops the loop's clause unless the same loop
///                       also gets a WrapOrdered
struct Edit {
  EditAction action = EditAction::InsertBarrier;
  SourceLoc loc;
  std::optional<SourceLoc> end;

  friend bool operator==(const Edit&, const Edit&) = default;
};

/// Edits turning the original program into the candidate for `sol`, sorted
/// by location.
std::vector<Edit> compute_edits(const InstrumentedProgram& ip, const Assignment& sol);

/// Renders a candidate as MiniMP text. Original lines are reproduced
/// verbatim; inserted constructs go on their own lines, indented like the
/// statement they guard.
std::string emit_program(const Candidate& candidate);

/// Applies edits to the original text line by line.
std::string apply_edits(const SourceText& original, std::span<const Edit> edits);

struct RepairSummary {
  std::string programName;
  Strategy strategy = Strategy::Mhs;
  OutcomeTag status = OutcomeTag::Repaired;
  std::size_t iterations = 0;
  std::vector<Edit> edits;
  bool optimal = false;
  std::size_t enabledCount = 0;
  std::optional<std::size_t> optimalCount;
  std::string reason;
};

RepairSummary summarize(const RepairOutcome& outcome);

nlohmann::json to_json(const RepairSummary& summary);

/// Summary document for an outcome. Repaired outcomes list their edits;
/// others carry `status` and `reason` only.
nlohmann::json emit_summary(const RepairOutcome& outcome);

/// Summary for input rejected by the front end.
nlohmann::json emit_unsupported_summary(const std::string& programName, const std::string& reason);

class IoError : public std::runtime_error {
 public:
  IoError(const std::filesystem::path& path, const std::string& what);
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

}  // namespace racefix
