// S-expression reader for PDDL text.
//
// PDDL identifiers are case-insensitive; the reader lowercases every atom so
// the rest of the toolkit can compare names directly.

#ifndef PLANSEL_SEXPR_H_
#define PLANSEL_SEXPR_H_

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace plansel {

struct SourcePos {
  int line = 1;
  int column = 1;
};

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& message, SourcePos pos);

  const SourcePos& pos() const { return pos_; }

 private:
  SourcePos pos_;
};

struct SExpr {
  bool is_list = false;
  std::string atom;
  std::vector<SExpr> items;
  SourcePos pos;

  bool IsAtom() const { return !is_list; }
  bool IsAtom(std::string_view value) const {
    return !is_list && atom == value;
  }
  // True when this is a list whose first element is the given atom.
  bool HasHead(std::string_view head) const {
    return is_list && !items.empty() && items.front().IsAtom(head);
  }
};

// Parses exactly one top-level expression; trailing non-comment content is an
// error.
SExpr ParseSExpr(std::string_view text);

// Parses every top-level expression in order.
std::vector<SExpr> ParseSExprs(std::string_view text);

std::string ToLower(std::string_view text);

}  // namespace plansel

#endif  // PLANSEL_SEXPR_H_
