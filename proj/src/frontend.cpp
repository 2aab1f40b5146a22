#include "racefix/frontend.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <set>
#include <utility>

#include <fmt/format.h>

namespace racefix {

namespace {

constexpr std::int64_t kMaxLiteral = 1'000'000'000;
constexpr std::int64_t kMaxUnits = 1'000'000;

constexpr std::array kUnsupportedKeywords = {
    std::string_view{"sections"}, std::string_view{"section"}, std::string_view{"simd"},
    std::string_view{"task"},     std::string_view{"taskloop"}, std::string_view{"taskwait"},
    std::string_view{"teams"},    std::string_view{"target"},
};

constexpr std::array kReserved = {
    std::string_view{"shared"},   std::string_view{"int"},     std::string_view{"parallel"},
    std::string_view{"parallel_for"}, std::string_view{"ordered"}, std::string_view{"barrier"},
    std::string_view{"compute"},  std::string_view{"tid"},     std::string_view{"i"},
};

enum class TokKind { Ident, Int, Punct, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;
  int col = 1;
};

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Strips a trailing '\r' and a `//` comment.
std::string_view code_part(std::string_view raw) {
  if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
  if (auto pos = raw.find("//"); pos != std::string_view::npos) raw = raw.substr(0, pos);
  return raw;
}

std::vector<Token> lex_line(std::string_view raw, int line) {
  std::string_view code = code_part(raw);
  std::vector<Token> out;
  std::size_t pos = 0;
  while (pos < code.size()) {
    char c = code[pos];
    int col = static_cast<int>(pos) + 1;
    if (c == ' ' || c == '\t' || c == '\f' || c == '\v') {
      ++pos;
    } else if (is_ident_start(c)) {
      std::size_t end = pos;
      while (end < code.size() && (is_ident_start(code[end]) || is_digit(code[end]))) ++end;
      out.push_back({TokKind::Ident, std::string(code.substr(pos, end - pos)), col});
      pos = end;
    } else if (is_digit(c)) {
      std::size_t end = pos;
      while (end < code.size() && is_digit(code[end])) ++end;
      out.push_back({TokKind::Int, std::string(code.substr(pos, end - pos)), col});
      pos = end;
    } else if (std::string_view("[](){};=+-*").find(c) != std::string_view::npos) {
      out.push_back({TokKind::Punct, std::string(1, c), col});
      ++pos;
    } else {
      unsigned byte = static_cast<unsigned char>(c);
      throw SyntaxError({line, col}, byte >= 0x20 && byte < 0x7f
                                         ? fmt::format("unexpected character '{}'", c)
                                         : fmt::format("unexpected byte 0x{:02x}", byte));
    }
  }
  return out;
}

SourceText split_lines(std::string_view source) {
  SourceText text;
  text.trailingNewline = !source.empty() && source.back() == '\n';
  std::size_t start = 0;
  while (start < source.size()) {
    std::size_t nl = source.find('\n', start);
    if (nl == std::string_view::npos) {
      text.lines.emplace_back(source.substr(start));
      break;
    }
    text.lines.emplace_back(source.substr(start, nl - start));
    start = nl + 1;
  }
  return text;
}

// Cursor over one line's tokens.
class LineParser {
 public:
  LineParser(const std::vector<Token>& toks, int line) : toks_(toks), line_(line) {}

  const Token& peek(std::size_t ahead = 0) const {
    static const Token end{TokKind::End, "", 0};
    return pos_ + ahead < toks_.size() ? toks_[pos_ + ahead] : end;
  }
  bool at_end() const { return pos_ >= toks_.size(); }
  bool is(std::string_view text, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind != TokKind::End && t.text == text;
  }
  SourceLoc here() const {
    if (!at_end()) return {line_, toks_[pos_].col};
    if (toks_.empty()) return {line_, 1};
    const Token& last = toks_.back();
    return {line_, last.col + static_cast<int>(last.text.size())};
  }

  const Token& next() {
    const Token& t = peek();
    if (!at_end()) ++pos_;
    return t;
  }
  const Token& expect(std::string_view text) {
    if (!is(text)) fail(fmt::format("expected '{}'", text));
    return next();
  }
  std::string ident(std::string_view what) {
    if (peek().kind != TokKind::Ident) fail(fmt::format("expected {}", what));
    return next().text;
  }
  std::int64_t integer(std::string_view what) {
    if (peek().kind != TokKind::Int) fail(fmt::format("expected {}", what));
    const Token& t = peek();
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc{} || v > kMaxLiteral) fail("integer literal too large");
    next();
    return v;
  }
  void finish() {
    if (!at_end()) fail(fmt::format("unexpected '{}'", peek().text));
  }
  [[noreturn]] void fail(const std::string& message) const { throw SyntaxError(here(), message); }

 private:
  const std::vector<Token>& toks_;
  int line_;
  std::size_t pos_ = 0;
};

bool reserved(std::string_view name) {
  return std::find(kReserved.begin(), kReserved.end(), name) != kReserved.end();
}

class Parser {
 public:
  Parser(SourceText text, std::string name) { program_.source = std::move(text); program_.name = std::move(name); }

  Program run() {
    // Unsupported constructs are reported ahead of any syntax problem.
    std::vector<std::vector<Token>> lexed;
    lexed.reserve(program_.source.lines.size());
    for (std::size_t n = 0; n < program_.source.lines.size(); ++n) {
      int line = static_cast<int>(n) + 1;
      std::vector<Token> toks;
      try {
        toks = lex_line(program_.source.lines[n], line);
      } catch (const SyntaxError&) {
        toks.clear();
      }
      scan_unsupported(toks, line);
      lexed.push_back(std::move(toks));
    }
    for (std::size_t n = 0; n < program_.source.lines.size(); ++n) {
      int line = static_cast<int>(n) + 1;
      auto toks = lex_line(program_.source.lines[n], line);
      if (toks.empty()) continue;
      LineParser lp(toks, line);
      if (current_) {
        region_line(lp);
      } else {
        top_line(lp);
      }
    }
    if (current_) {
      int last = std::max<int>(1, static_cast<int>(program_.source.lines.size()));
      throw SyntaxError({last, 1}, fmt::format("unterminated {} region opened at line {}",
                                               to_string(current_->kind), current_->headerLoc.line));
    }
    return std::move(program_);
  }

 private:
  static void scan_unsupported(const std::vector<Token>& toks, int line) {
    for (const Token& t : toks) {
      if (t.kind == TokKind::Punct && t.text == "*") throw UnsupportedConstruct({line, t.col}, "pointer");
      if (t.kind == TokKind::Ident &&
          std::find(kUnsupportedKeywords.begin(), kUnsupportedKeywords.end(), t.text) !=
              kUnsupportedKeywords.end()) {
        throw UnsupportedConstruct({line, t.col}, t.text);
      }
    }
  }

  void top_line(LineParser& lp) {
    SourceLoc start = lp.here();
    if (lp.is("shared")) {
      lp.next();
      lp.expect("int");
      SourceLoc nameLoc = lp.here();
      std::string name = lp.ident("array name");
      if (reserved(name)) throw SyntaxError(nameLoc, fmt::format("'{}' is a reserved word", name));
      if (program_.find_array(name)) throw SyntaxError(nameLoc, fmt::format("array '{}' redeclared", name));
      lp.expect("[");
      std::int64_t len = lp.integer("array length");
      if (len <= 0) lp.fail("array length must be positive");
      lp.expect("]");
      lp.expect(";");
      lp.finish();
      program_.decls.push_back({std::move(name), len, start});
      return;
    }
    if (lp.is("parallel") || lp.is("parallel_for")) {
      Region region;
      region.kind = lp.next().text == "parallel" ? RegionKind::Parallel : RegionKind::ParallelFor;
      region.headerLoc = start;
      lp.expect("(");
      region.count = lp.integer(region.kind == RegionKind::Parallel ? "thread count" : "trip count");
      if (region.count <= 0) lp.fail("count must be positive");
      if (region.count > kMaxUnits) lp.fail("count too large");
      lp.expect(")");
      if (lp.is("ordered")) {
        if (region.kind == RegionKind::Parallel) lp.fail("'ordered' clause is only valid on parallel_for");
        lp.next();
        region.orderedClause = true;
      }
      region.braceLoc = lp.here();
      lp.expect("{");
      lp.finish();
      current_ = std::move(region);
      return;
    }
    if (lp.is("}")) lp.fail("unmatched '}'");
    lp.fail("statement outside of a parallel region");
  }

  void region_line(LineParser& lp) {
    Region& region = *current_;
    SourceLoc start = lp.here();
    if (lp.is("}")) {
      lp.next();
      lp.finish();
      if (inOrdered_) {
        inOrdered_ = false;
        region.body.push_back(Stmt{start, StmtOp::OrderedEnd, {}, {}, false});
        return;
      }
      if (region.body.empty()) {
        throw SyntaxError(region.headerLoc, "empty region");
      }
      region.closeLoc = start;
      program_.regions.push_back(std::move(region));
      current_.reset();
      seenOrdered_ = false;
      return;
    }
    if (lp.is("barrier")) {
      lp.next();
      lp.expect(";");
      lp.finish();
      if (region.kind == RegionKind::ParallelFor) {
        throw SyntaxError(start, "barrier is not allowed inside a parallel_for loop");
      }
      region.body.push_back(Stmt{start, StmtOp::Barrier, {}, {}, false});
      return;
    }
    if (lp.is("ordered")) {
      lp.next();
      lp.expect("{");
      lp.finish();
      if (region.kind == RegionKind::Parallel) throw SyntaxError(start, "ordered region outside of parallel_for");
      if (!region.orderedClause) throw SyntaxError(start, "ordered region requires the loop's 'ordered' clause");
      if (inOrdered_) throw SyntaxError(start, "nested ordered region");
      if (seenOrdered_) throw SyntaxError(start, "at most one ordered region per loop");
      inOrdered_ = seenOrdered_ = true;
      region.body.push_back(Stmt{start, StmtOp::OrderedBegin, {}, {}, false});
      return;
    }
    if (lp.is("compute")) {
      lp.next();
      lp.expect(";");
      lp.finish();
      region.body.push_back(Stmt{start, StmtOp::LocalCompute, {}, {}, false});
      return;
    }
    if (lp.peek().kind != TokKind::Ident) lp.fail("expected a statement");

    // NAME = ARR[IDX];  or  ARR[IDX] = EXPR;
    SourceLoc nameLoc = lp.here();
    std::string name = lp.next().text;
    if (lp.is("[")) {
      Access write = array_access(lp, name, nameLoc, AccessKind::Write);
      lp.expect("=");
      Stmt stmt{start, StmtOp::Write, {}, {}, false};
      if (lp.peek().kind == TokKind::Ident && lp.is("[", 1)) {
        SourceLoc rloc = lp.here();
        std::string rname = lp.next().text;
        Access read = array_access(lp, rname, rloc, AccessKind::Read);
        stmt.op = StmtOp::ReadWrite;
        stmt.accesses = {std::move(read), std::move(write)};
      } else {
        stmt.operand = value_expr(lp);
        stmt.accesses = {std::move(write)};
      }
      lp.expect(";");
      lp.finish();
      region.body.push_back(std::move(stmt));
      return;
    }
    if (reserved(name) || program_.find_array(name)) {
      throw SyntaxError(nameLoc, fmt::format("'{}' cannot be assigned", name));
    }
    lp.expect("=");
    SourceLoc rloc = lp.here();
    std::string rname = lp.ident("array name");
    if (!lp.is("[")) lp.fail("expected '['");
    Access read = array_access(lp, rname, rloc, AccessKind::Read);
    lp.expect(";");
    lp.finish();
    region.body.push_back(Stmt{start, StmtOp::Read, {std::move(read)}, std::move(name), false});
  }

  std::string value_expr(LineParser& lp) {
    if (lp.is("-")) {
      lp.next();
      return "-" + std::to_string(lp.integer("integer"));
    }
    if (lp.peek().kind == TokKind::Int) return std::to_string(lp.integer("integer"));
    SourceLoc loc = lp.here();
    std::string name = lp.ident("value");
    if (program_.find_array(name)) throw SyntaxError(loc, fmt::format("array '{}' used without an index", name));
    if (reserved(name) && name != current_->induction_symbol()) {
      throw SyntaxError(loc, fmt::format("'{}' is not a value here", name));
    }
    return name;
  }

  Access array_access(LineParser& lp, const std::string& name, SourceLoc loc, AccessKind kind) {
    const ArrayDecl* decl = program_.find_array(name);
    if (!decl) throw SyntaxError(loc, fmt::format("undeclared array '{}'", name));
    lp.expect("[");
    IndexExpr index = index_expr(lp);
    lp.expect("]");
    const Region& region = *current_;
    std::int64_t lo = index.at(0);
    std::int64_t hi = index.at(index.induction ? region.count - 1 : 0);
    if (lo < 0 || hi >= decl->length) {
      throw SyntaxError(loc, fmt::format("index of '{}' out of bounds [0, {})", name, decl->length));
    }
    return Access{name, index, kind};
  }

  IndexExpr index_expr(LineParser& lp) {
    std::string_view sym = current_->induction_symbol();
    if (lp.peek().kind == TokKind::Int) return IndexExpr::constant(lp.integer("index"));
    SourceLoc loc = lp.here();
    std::string name = lp.ident("index expression");
    if (name != sym) {
      throw SyntaxError(loc, fmt::format("index must be affine in '{}', got '{}'", sym, name));
    }
    if (lp.is("+") || lp.is("-")) {
      bool neg = lp.next().text == "-";
      std::int64_t c = lp.integer("offset");
      return IndexExpr::symbolic(neg ? -c : c);
    }
    return IndexExpr::symbolic(0);
  }

  Program program_;
  std::optional<Region> current_;
  bool inOrdered_ = false;
  bool seenOrdered_ = false;
};

std::string format_index(const IndexExpr& idx, std::string_view sym) {
  if (!idx.induction) return std::to_string(idx.offset);
  if (idx.offset == 0) return std::string(sym);
  return fmt::format("{}{}{}", sym, idx.offset < 0 ? "-" : "+", idx.offset < 0 ? -idx.offset : idx.offset);
}

std::string format_access(const Access& a, std::string_view sym) {
  return fmt::format("{}[{}]", a.array, format_index(a.index, sym));
}

}  // namespace

std::string to_string(const SourceLoc& loc) { return fmt::format("{}:{}", loc.line, loc.col); }

std::string_view to_string(AccessKind kind) { return kind == AccessKind::Read ? "read" : "write"; }

std::string_view to_string(StmtOp op) {
  switch (op) {
    case StmtOp::Read: return "read";
    case StmtOp::Write: return "write";
    case StmtOp::ReadWrite: return "read-write";
    case StmtOp::LocalCompute: return "compute";
    case StmtOp::Barrier: return "barrier";
    case StmtOp::OrderedBegin: return "ordered-begin";
    case StmtOp::OrderedEnd: return "ordered-end";
  }
  return "?";
}

std::string_view to_string(RegionKind kind) { return kind == RegionKind::Parallel ? "parallel" : "parallel_for"; }

std::string SourceText::join() const {
  std::string out;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    out += lines[n];
    if (n + 1 < lines.size() || trailingNewline) out += '\n';
  }
  return out;
}

const ArrayDecl* Program::find_array(std::string_view name) const {
  for (const auto& d : decls) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

ParseError::ParseError(SourceLoc loc, const std::string& what) : std::runtime_error(what), loc_(loc) {}

SyntaxError::SyntaxError(SourceLoc loc, std::string message)
    : ParseError(loc, fmt::format("{}: syntax error: {}", to_string(loc), message)), message_(std::move(message)) {}

UnsupportedConstruct::UnsupportedConstruct(SourceLoc loc, std::string name)
    : ParseError(loc, fmt::format("{}: unsupported construct '{}'", to_string(loc), name)), name_(std::move(name)) {}

Program parse(std::string_view source, std::string name) {
  return Parser(split_lines(source), std::move(name)).run();
}

std::string format_program(const Program& program) {
  std::string out;
  for (const auto& d : program.decls) out += fmt::format("shared int {}[{}];\n", d.name, d.length);
  for (const auto& r : program.regions) {
    std::string_view sym = r.induction_symbol();
    out += fmt::format("{}({}){} {{\n", to_string(r.kind), r.count, r.orderedClause ? " ordered" : "");
    std::string indent = "  ";
    for (const auto& s : r.body) {
      switch (s.op) {
        case StmtOp::Read:
          out += fmt::format("{}{} = {};\n", indent, s.operand, format_access(s.accesses[0], sym));
          break;
        case StmtOp::Write:
          out += fmt::format("{}{} = {};\n", indent, format_access(s.accesses[0], sym), s.operand);
          break;
        case StmtOp::ReadWrite:
          out += fmt::format("{}{} = {};\n", indent, format_access(s.accesses[1], sym),
                             format_access(s.accesses[0], sym));
          break;
        case StmtOp::LocalCompute: out += indent + "compute;\n"; break;
        case StmtOp::Barrier: out += indent + "barrier;\n"; break;
        case StmtOp::OrderedBegin:
          out += indent + "ordered {\n";
          indent += "  ";
          break;
        case StmtOp::OrderedEnd:
          indent.resize(indent.size() - 2);
          out += indent + "}\n";
          break;
      }
    }
    out += "}\n";
  }
  return out;
}

bool same_structure(const Program& a, const Program& b) {
  if (a.regions.size() != b.regions.size() || a.decls.size() != b.decls.size()) return false;
  for (std::size_t n = 0; n < a.decls.size(); ++n) {
    if (a.decls[n].name != b.decls[n].name || a.decls[n].length != b.decls[n].length) return false;
  }
  for (std::size_t r = 0; r < a.regions.size(); ++r) {
    const Region& x = a.regions[r];
    const Region& y = b.regions[r];
    if (x.kind != y.kind || x.count != y.count || x.orderedClause != y.orderedClause) return false;
    if (x.body.size() != y.body.size()) return false;
    for (std::size_t s = 0; s < x.body.size(); ++s) {
      const Stmt& p = x.body[s];
      const Stmt& q = y.body[s];
      if (p.op != q.op || p.accesses != q.accesses || p.operand != q.operand) return false;
    }
  }
  return true;
}

Program with_max_parallelism(const Program& program, std::int64_t units) {
  Program out = program;
  for (auto& r : out.regions) r.count = std::min(r.count, units);
  return out;
}

std::string_view indentation(std::string_view line) {
  std::size_t n = 0;
  while (n < line.size() && (line[n] == ' ' || line[n] == '\t')) ++n;
  return line.substr(0, n);
}

}  // namespace racefix
