#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "racefix/frontend.hpp"

namespace racefix {

using VarId = int;

/// What enabling a variable adds: a barrier in front of the guarded
/// statement, or the start of the loop's ordered region at it.
enum class VarKind { Barrier, Ordered };

std::string_view to_string(VarKind kind);

struct BarrierVariable {
  VarId id = 0;
  // Location of the guarded statement, or of the removed construct itself
  // when no shared access follows it in the region (position-only).
  SourceLoc loc;
  VarKind kind = VarKind::Barrier;
  bool fromExisting = false;
  std::size_t region = 0;
  // Index into base.regions[region].body; empty for position-only variables.
  std::optional<std::size_t> stmt;
  // Programmer-written constructs this variable stands for: barrier lines, or
  // the `ordered {` line of an existing ordered region.
  std::vector<SourceLoc> existing;

  /// Display name; DIMACS-style 1-based, so id 0 is "b1".
  std::string label() const { return "b" + std::to_string(id + 1); }

  friend bool operator==(const BarrierVariable&, const BarrierVariable&) = default;
};

struct OrderedSpan {
  SourceLoc begin;
  SourceLoc end;

  friend bool operator==(const OrderedSpan&, const OrderedSpan&) = default;
};

struct InstrumentedProgram {
  // Input as written, constructs included.
  Program original;
  // Barrier statements and ordered wrappers removed.
  Program base;
  std::vector<BarrierVariable> vars;
  std::vector<std::vector<SourceLoc>> sharedAccessLocs;
  // Programmer-written ordered region per loop, if any.
  std::vector<std::optional<OrderedSpan>> existingOrdered;

  std::size_t var_count() const { return vars.size(); }
  /// Variable guarding base.regions[region].body[stmt], if any.
  std::optional<VarId> var_for(std::size_t region, std::size_t stmt) const;

  friend bool operator==(const InstrumentedProgram&, const InstrumentedProgram&) = default;
};

/// Total map from variable id to enabled/disabled.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::size_t size, bool value = false) : values_(size, value) {}

  static Assignment with_enabled(std::size_t size, const std::vector<VarId>& ids);

  std::size_t size() const { return values_.size(); }
  bool operator[](VarId id) const { return values_.at(static_cast<std::size_t>(id)); }
  void set(VarId id, bool value) { values_.at(static_cast<std::size_t>(id)) = value; }

  std::size_t count_enabled() const;
  std::vector<VarId> enabled() const;
  std::string to_string() const;

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::vector<bool> values_;
};

InstrumentedProgram instrument(const Program& program);

/// Every variable false: the construct-free program.
Assignment default_assignment(const InstrumentedProgram& ip);

/// Variables standing for programmer-written constructs enabled: the program
/// as written.
Assignment existing_assignment(const InstrumentedProgram& ip);

}  // namespace racefix
