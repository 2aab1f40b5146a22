#pragma once

// MiniMP: a line-oriented toy language with barrier-synchronised parallel
// regions and parallel-for loops over shared integer arrays.
//
//   shared int data[5];
//   parallel(4) {
//     t = data[tid+1];
//     barrier;
//     data[tid] = t;
//   }
//   parallel_for(4) ordered {
//     ordered {
//       data[i] = data[i+1];
//     }
//   }

#include <cstdint>
#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace racefix {

struct SourceLoc {
  int line = 1;
  int col = 1;

  friend auto operator<=>(const SourceLoc&, const SourceLoc&) = default;
};

std::string to_string(const SourceLoc& loc);

enum class AccessKind { Read, Write };

std::string_view to_string(AccessKind kind);

/// Affine index `sym + offset` (sym is `tid` or `i`) or a plain constant.
struct IndexExpr {
  bool induction = false;
  std::int64_t offset = 0;

  static IndexExpr symbolic(std::int64_t offset) { return {true, offset}; }
  static IndexExpr constant(std::int64_t value) { return {false, value}; }

  /// Concrete cell touched by thread/iteration `unit`.
  std::int64_t at(std::int64_t unit) const { return induction ? unit + offset : offset; }

  friend bool operator==(const IndexExpr&, const IndexExpr&) = default;
};

struct Access {
  std::string array;
  IndexExpr index;
  AccessKind kind = AccessKind::Read;

  friend bool operator==(const Access&, const Access&) = default;
};

enum class StmtOp { Read, Write, ReadWrite, LocalCompute, Barrier, OrderedBegin, OrderedEnd };

std::string_view to_string(StmtOp op);

struct Stmt {
  SourceLoc loc;
  StmtOp op = StmtOp::LocalCompute;
  // Shared accesses in execution order. A ReadWrite line is split into its
  // read followed by its write, both at the same source line.
  std::vector<Access> accesses;
  // Read: destination local. Write: value expression text.
  std::string operand;
  // Inserted by repair rather than written in the source.
  bool synthetic = false;

  bool touches_shared() const { return !accesses.empty(); }
  bool is_construct() const {
    return op == StmtOp::Barrier || op == StmtOp::OrderedBegin || op == StmtOp::OrderedEnd;
  }

  friend bool operator==(const Stmt&, const Stmt&) = default;
};

enum class RegionKind { Parallel, ParallelFor };

std::string_view to_string(RegionKind kind);

struct Region {
  RegionKind kind = RegionKind::Parallel;
  // Thread count for Parallel, trip count for ParallelFor.
  std::int64_t count = 1;
  std::vector<Stmt> body;
  bool orderedClause = false;
  SourceLoc headerLoc;
  SourceLoc braceLoc;
  SourceLoc closeLoc;

  /// Name of the induction symbol usable in index expressions.
  std::string_view induction_symbol() const { return kind == RegionKind::Parallel ? "tid" : "i"; }

  friend bool operator==(const Region&, const Region&) = default;
};

struct ArrayDecl {
  std::string name;
  std::int64_t length = 1;
  SourceLoc loc;

  friend bool operator==(const ArrayDecl&, const ArrayDecl&) = default;
};

/// Physical lines of the source, without terminators. A trailing '\r' of a
/// CRLF line is kept so the text can be reproduced byte for byte.
struct SourceText {
  std::vector<std::string> lines;
  bool trailingNewline = true;

  std::string join() const;

  friend bool operator==(const SourceText&, const SourceText&) = default;
};

struct Program {
  std::string name;
  std::vector<ArrayDecl> decls;
  std::vector<Region> regions;
  SourceText source;

  const ArrayDecl* find_array(std::string_view name) const;

  friend bool operator==(const Program&, const Program&) = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(SourceLoc loc, const std::string& what);
  const SourceLoc& loc() const noexcept { return loc_; }

 private:
  SourceLoc loc_;
};

class SyntaxError : public ParseError {
 public:
  SyntaxError(SourceLoc loc, std::string message);
  const std::string& message() const noexcept { return message_; }

 private:
  std::string message_;
};

/// Constructs outside the supported OpenMP subset (sections, simd, tasking,
/// teams/target offload, pointers).
class UnsupportedConstruct : public ParseError {
 public:
  UnsupportedConstruct(SourceLoc loc, std::string name);
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Parses and validates MiniMP text. Accepts LF or CRLF line endings.
/// Throws SyntaxError or UnsupportedConstruct; never anything else for any
/// byte input.
Program parse(std::string_view source, std::string name = "main");

/// Canonical rendering from the AST alone (source text is ignored).
std::string format_program(const Program& program);

/// Equality of everything but source positions and text: region kinds,
/// counts, clauses, and the sequence of statement operations and operands.
bool same_structure(const Program& a, const Program& b);

/// Copy of `program` with every region's thread/trip count capped at
/// `units`. Index bounds stay valid because they only shrink.
Program with_max_parallelism(const Program& program, std::int64_t units);

/// Leading whitespace of a line.
std::string_view indentation(std::string_view line);

}  // namespace racefix
