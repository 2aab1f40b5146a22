#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "racefix/deadline.hpp"
#include "racefix/instrument.hpp"

namespace racefix {

/// Disjunction of positive literals. The empty clause is unsatisfiable.
class Clause {
 public:
  Clause() = default;
  Clause(std::initializer_list<VarId> ids) : Clause(std::vector<VarId>(ids)) {}
  explicit Clause(std::vector<VarId> ids);

  const std::vector<VarId>& literals() const { return lits_; }
  bool empty() const { return lits_.empty(); }
  bool contains(VarId id) const;
  bool satisfied_by(const Assignment& a) const;
  std::string to_string() const;

  friend auto operator<=>(const Clause&, const Clause&) = default;

 private:
  std::vector<VarId> lits_;  // sorted, unique
};

class DuplicateClause : public std::logic_error {
 public:
  explicit DuplicateClause(const Clause& c);
};

/// The accumulated constraint: a set of positive clauses over `var_count`
/// variables, kept in insertion order. Starts empty (trivially true).
class ClauseSet {
 public:
  ClauseSet() = default;
  explicit ClauseSet(std::size_t var_count) : varCount_(var_count) {}

  /// Throws DuplicateClause if `c` is already present, std::out_of_range for
  /// literals outside [0, var_count).
  void add(Clause c);

  std::size_t var_count() const { return varCount_; }
  const std::vector<Clause>& clauses() const { return clauses_; }
  std::size_t size() const { return clauses_.size(); }
  bool has_empty_clause() const;
  bool satisfied_by(const Assignment& a) const;

  friend bool operator==(const ClauseSet&, const ClauseSet&) = default;

 private:
  std::size_t varCount_ = 0;
  std::vector<Clause> clauses_;
};

ClauseSet add_clause(ClauseSet phi, Clause c);

/// Greedy hitting set: repeatedly enable the variable hitting the most
/// still-unhit clauses (smallest id on ties). nullopt iff phi holds the
/// empty clause.
std::optional<Assignment> solve_mhs(const ClauseSet& phi);

/// Partial MaxSAT with phi hard and every ~b soft: a satisfying assignment
/// with the fewest enabled variables; among those, the lexicographically
/// smallest sorted id list. nullopt iff phi holds the empty clause. Throws
/// DeadlineExceeded.
std::optional<Assignment> solve_maxsat(const ClauseSet& phi, const Deadline& deadline = {});

/// Size of a minimum hitting set of phi (nullopt if phi holds the empty clause).
std::optional<std::size_t> min_hitting_set_size(const ClauseSet& phi, const Deadline& deadline = {});

/// True iff `a` enables exactly as many variables as the MaxSAT optimum.
bool check_optimal(const ClauseSet& phi, const Assignment& a, const Deadline& deadline = {});

/// DIMACS-style dump: header `p cnf <vars> <clauses>` then one 0-terminated
/// line per clause with 1-based variable numbers.
std::string to_dimacs(const ClauseSet& phi);

}  // namespace racefix
