#include "racefix/clauses.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace racefix {

Clause::Clause(std::vector<VarId> ids) : lits_(std::move(ids)) {
  std::sort(lits_.begin(), lits_.end());
  lits_.erase(std::unique(lits_.begin(), lits_.end()), lits_.end());
}

bool Clause::contains(VarId id) const { return std::binary_search(lits_.begin(), lits_.end(), id); }

bool Clause::satisfied_by(const Assignment& a) const {
  return std::any_of(lits_.begin(), lits_.end(), [&](VarId id) { return a[id]; });
}

std::string Clause::to_string() const {
  if (lits_.empty()) return "()";
  std::vector<std::string> names;
  for (VarId id : lits_) names.push_back(fmt::format("b{}", id + 1));
  return fmt::format("({})", fmt::join(names, " | "));
}

DuplicateClause::DuplicateClause(const Clause& c) : std::logic_error("duplicate clause " + c.to_string()) {}

void ClauseSet::add(Clause c) {
  for (VarId id : c.literals()) {
    if (id < 0 || static_cast<std::size_t>(id) >= varCount_) {
      throw std::out_of_range(fmt::format("literal b{} outside {} variables", id + 1, varCount_));
    }
  }
  if (std::find(clauses_.begin(), clauses_.end(), c) != clauses_.end()) throw DuplicateClause(c);
  clauses_.push_back(std::move(c));
}

bool ClauseSet::has_empty_clause() const {
  return std::any_of(clauses_.begin(), clauses_.end(), [](const Clause& c) { return c.empty(); });
}

bool ClauseSet::satisfied_by(const Assignment& a) const {
  return std::all_of(clauses_.begin(), clauses_.end(), [&](const Clause& c) { return c.satisfied_by(a); });
}

ClauseSet add_clause(ClauseSet phi, Clause c) {
  phi.add(std::move(c));
  return phi;
}

std::optional<Assignment> solve_mhs(const ClauseSet& phi) {
  if (phi.has_empty_clause()) return std::nullopt;
  Assignment out(phi.var_count());
  const auto& clauses = phi.clauses();
  std::vector<bool> hit(clauses.size(), false);
  std::size_t remaining = clauses.size();
  std::vector<std::size_t> score(phi.var_count());
  while (remaining > 0) {
    std::fill(score.begin(), score.end(), 0);
    for (std::size_t c = 0; c < clauses.size(); ++c) {
      if (hit[c]) continue;
      for (VarId id : clauses[c].literals()) ++score[static_cast<std::size_t>(id)];
    }
    // max_element keeps the first maximum, i.e. the smallest id.
    auto best = static_cast<VarId>(std::max_element(score.begin(), score.end()) - score.begin());
    out.set(best, true);
    for (std::size_t c = 0; c < clauses.size(); ++c) {
      if (!hit[c] && clauses[c].contains(best)) {
        hit[c] = true;
        --remaining;
      }
    }
  }
  return out;
}

namespace {

// Branch and bound over "is there a hitting set of size <= budget that
// includes every In variable and no Out variable".
class HittingSetSearch {
 public:
  enum State : signed char { Out = -1, Free = 0, In = 1 };

  HittingSetSearch(const ClauseSet& phi, const Deadline& deadline) : deadline_(deadline) {
    for (const Clause& c : phi.clauses()) clauses_.push_back(c.literals());
    state_.assign(phi.var_count(), Free);
  }

  std::vector<State>& state() { return state_; }

  bool feasible(std::size_t budget) {
    if ((++nodes_ & 255) == 0) deadline_.check();
    // Unhit clauses, and the one with the fewest free literals.
    std::vector<const std::vector<VarId>*> open;
    const std::vector<VarId>* pick = nullptr;
    std::size_t pick_free = SIZE_MAX;
    for (const auto& c : clauses_) {
      std::size_t free = 0;
      bool hit = false;
      for (VarId id : c) {
        if (state_[id] == In) {
          hit = true;
          break;
        }
        if (state_[id] == Free) ++free;
      }
      if (hit) continue;
      if (free == 0) return false;
      open.push_back(&c);
      if (free < pick_free) {
        pick_free = free;
        pick = &c;
      }
    }
    if (open.empty()) return true;
    if (budget == 0) return false;
    if (lower_bound(open) > budget) return false;

    std::vector<VarId> excluded;
    bool ok = false;
    for (VarId id : *pick) {
      if (state_[id] != Free) continue;
      state_[id] = In;
      ok = feasible(budget - 1);
      state_[id] = Out;
      excluded.push_back(id);
      if (ok) break;
    }
    for (VarId id : excluded) state_[id] = Free;
    return ok;
  }

 private:
  // Greedy packing of clauses with pairwise disjoint free literals: each one
  // needs its own variable.
  std::size_t lower_bound(const std::vector<const std::vector<VarId>*>& open) {
    used_.assign(state_.size(), false);
    std::size_t bound = 0;
    for (const auto* c : open) {
      bool disjoint = std::none_of(c->begin(), c->end(), [&](VarId id) { return state_[id] == Free && used_[id]; });
      if (!disjoint) continue;
      ++bound;
      for (VarId id : *c) {
        if (state_[id] == Free) used_[id] = true;
      }
    }
    return bound;
  }

  std::vector<std::vector<VarId>> clauses_;
  std::vector<State> state_;
  std::vector<bool> used_;
  const Deadline& deadline_;
  std::size_t nodes_ = 0;
};

std::size_t optimum_size(HittingSetSearch& search, const ClauseSet& phi) {
  std::size_t upper = solve_mhs(phi)->count_enabled();
  for (std::size_t k = 0; k < upper; ++k) {
    if (search.feasible(k)) return k;
  }
  return upper;
}

}  // namespace

std::optional<std::size_t> min_hitting_set_size(const ClauseSet& phi, const Deadline& deadline) {
  if (phi.has_empty_clause()) return std::nullopt;
  HittingSetSearch search(phi, deadline);
  return optimum_size(search, phi);
}

std::optional<Assignment> solve_maxsat(const ClauseSet& phi, const Deadline& deadline) {
  if (phi.has_empty_clause()) return std::nullopt;
  HittingSetSearch search(phi, deadline);
  const std::size_t k = optimum_size(search, phi);

  std::vector<bool> mentioned(phi.var_count(), false);
  for (const Clause& c : phi.clauses()) {
    for (VarId id : c.literals()) mentioned[static_cast<std::size_t>(id)] = true;
  }
  auto& state = search.state();
  for (std::size_t id = 0; id < state.size(); ++id) {
    if (!mentioned[id]) state[id] = HittingSetSearch::Out;
  }
  // Fix variables in increasing id order, keeping each one whenever an
  // optimum still exists with it: yields the lexicographically smallest set.
  std::size_t chosen = 0;
  for (std::size_t id = 0; id < state.size() && chosen < k; ++id) {
    if (!mentioned[id]) continue;
    state[id] = HittingSetSearch::In;
    if (search.feasible(k - chosen - 1)) {
      ++chosen;
    } else {
      state[id] = HittingSetSearch::Out;
    }
  }
  Assignment out(phi.var_count());
  for (std::size_t id = 0; id < state.size(); ++id) {
    if (state[id] == HittingSetSearch::In) out.set(static_cast<VarId>(id), true);
  }
  return out;
}

bool check_optimal(const ClauseSet& phi, const Assignment& a, const Deadline& deadline) {
  auto best = min_hitting_set_size(phi, deadline);
  return best && a.count_enabled() == *best;
}

std::string to_dimacs(const ClauseSet& phi) {
  std::string out = fmt::format("p cnf {} {}\n", phi.var_count(), phi.size());
  for (const Clause& c : phi.clauses()) {
    for (VarId id : c.literals()) out += fmt::format("{} ", id + 1);
    out += "0\n";
  }
  return out;
}

}  // namespace racefix
