#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "racefix/deadline.hpp"
#include "racefix/instrument.hpp"

namespace racefix {

struct AccessPoint {
  SourceLoc loc;
  AccessKind kind = AccessKind::Read;

  friend auto operator<=>(const AccessPoint&, const AccessPoint&) = default;
};

/// One race: two accesses to `array` that may touch the same cell from
/// different threads (or loop iterations) without synchronisation.
struct RaceTrace {
  AccessPoint first;
  AccessPoint second;
  std::string array;
  std::size_t region = 0;

  friend bool operator==(const RaceTrace&, const RaceTrace&) = default;
};

/// Report order: (first.line, second.line), then access kinds, array, region.
bool operator<(const RaceTrace& a, const RaceTrace& b);

std::string to_string(const RaceTrace& trace);

struct VerificationResult {
  enum class Tag { Safe, Race, Other, Unsupported };

  Tag tag = Tag::Safe;
  std::optional<RaceTrace> trace;
  std::string message;

  static VerificationResult safe() { return {}; }
  static VerificationResult race(RaceTrace t) { return {Tag::Race, std::move(t), {}}; }
  static VerificationResult other(std::string m) { return {Tag::Other, std::nullopt, std::move(m)}; }
  static VerificationResult unsupported(std::string m) { return {Tag::Unsupported, std::nullopt, std::move(m)}; }

  bool is_safe() const { return tag == Tag::Safe; }
  bool is_race() const { return tag == Tag::Race; }
};

/// Plug-in seam for race checkers. Implementations must be deterministic and
/// must never report a trace again once a variable separating its two
/// accesses has been enabled.
class Verifier {
 public:
  virtual ~Verifier() = default;
  virtual VerificationResult verify(const InstrumentedProgram& ip, const Assignment& a,
                                    const Deadline& deadline = {}) const = 0;
};

/// Exact checker for MiniMP: barrier phases in parallel regions, a single
/// ordered region per parallel_for loop, affine index conflicts.
///
/// In a loop the ordered region runs from the earliest enabled variable's
/// statement to the last shared access. Everything an iteration does before
/// or inside its ordered block happens before the next iteration's block, so
/// a colliding pair is ordered exactly when the access made by the later
/// iteration lies inside the region.
class ReferenceVerifier final : public Verifier {
 public:
  VerificationResult verify(const InstrumentedProgram& ip, const Assignment& a,
                            const Deadline& deadline = {}) const override;
};

VerificationResult verify(const InstrumentedProgram& ip, const Assignment& a);

/// Every racing pair under `a`, sorted in report order.
std::vector<RaceTrace> racing_pairs(const InstrumentedProgram& ip, const Assignment& a);

/// True if two threads/iterations u != v in [0, units) exist with
/// x.at(u) == y.at(v).
bool indices_may_collide(const IndexExpr& x, const IndexExpr& y, std::int64_t units);

/// Which iteration orders exist among colliding units: `xFirst` if some
/// u < v has x.at(u) == y.at(v), `yFirst` if some u > v does.
struct CollisionOrder {
  bool xFirst = false;
  bool yFirst = false;

  bool any() const { return xFirst || yFirst; }
};

CollisionOrder collision_order(const IndexExpr& x, const IndexExpr& y, std::int64_t units);

/// Latest line an ordered region in the trace's loop may start at and still
/// order the traced pair: the line of the access made by the later
/// iteration, or the earlier of both lines when either order is possible.
/// nullopt if the trace does not name two loop accesses that collide.
std::optional<int> ordered_start_bound(const InstrumentedProgram& ip, const RaceTrace& trace);

}  // namespace racefix
