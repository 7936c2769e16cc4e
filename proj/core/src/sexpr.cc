#include "plansel/sexpr.h"

#include <cctype>
#include <sstream>

namespace plansel {

namespace {

std::string FormatMessage(const std::string& message, SourcePos pos) {
  std::ostringstream ss;
  ss << pos.line << ":" << pos.column << ": " << message;
  return ss.str();
}

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  bool AtEnd() {
    SkipBlank();
    return offset_ >= text_.size();
  }

  SExpr Read() {
    SkipBlank();
    if (offset_ >= text_.size()) {
      throw SyntaxError("unexpected end of input", pos_);
    }
    const char c = text_[offset_];
    if (c == ')') throw SyntaxError("unbalanced ')'", pos_);
    if (c == '(') {
      SExpr list;
      list.is_list = true;
      list.pos = pos_;
      Advance();
      while (true) {
        SkipBlank();
        if (offset_ >= text_.size()) {
          throw SyntaxError("unterminated list opened here", list.pos);
        }
        if (text_[offset_] == ')') {
          Advance();
          return list;
        }
        list.items.push_back(Read());
      }
    }
    SExpr atom;
    atom.pos = pos_;
    while (offset_ < text_.size()) {
      const char ch = text_[offset_];
      if (std::isspace(static_cast<unsigned char>(ch)) || ch == '(' ||
          ch == ')' || ch == ';') {
        break;
      }
      atom.atom.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
      Advance();
    }
    return atom;
  }

  SourcePos pos() const { return pos_; }

 private:
  void Advance() {
    if (text_[offset_] == '\n') {
      ++pos_.line;
      pos_.column = 1;
    } else {
      ++pos_.column;
    }
    ++offset_;
  }

  void SkipBlank() {
    while (offset_ < text_.size()) {
      const char c = text_[offset_];
      if (c == ';') {
        while (offset_ < text_.size() && text_[offset_] != '\n') Advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        Advance();
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  size_t offset_ = 0;
  SourcePos pos_;
};

}  // namespace

SyntaxError::SyntaxError(const std::string& message, SourcePos pos)
    : std::runtime_error(FormatMessage(message, pos)), pos_(pos) {}

SExpr ParseSExpr(std::string_view text) {
  Reader reader(text);
  SExpr expr = reader.Read();
  if (!reader.AtEnd()) {
    throw SyntaxError("trailing content after expression", reader.pos());
  }
  return expr;
}

std::vector<SExpr> ParseSExprs(std::string_view text) {
  Reader reader(text);
  std::vector<SExpr> exprs;
  while (!reader.AtEnd()) exprs.push_back(reader.Read());
  return exprs;
}

std::string ToLower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

}  // namespace plansel
