#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "acnkit/result.hpp"

namespace acnkit::detail {

enum class Tok {
  kIdent,
  kNumber,
  kCString,    // "..."
  kHexString,  // '0A0D'H
  kAssign,     // ::=
  kLBrace,
  kRBrace,
  kLParen,
  kRParen,
  kLBracket,
  kRBracket,
  kLAngle,
  kRAngle,
  kComma,
  kDot,
  kRange,  // ..
  kPipe,
  kColon,
  kCaret,
  kMinus,
  kEnd,
};

std::string_view describe(Tok t);

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;  // identifier/number text, or decoded string contents
  SourceSpan span;
};

// Shared by both grammars. `--` comments run to the end of the line or to the
// next `--`; `/* */` comments are also accepted.
Result<std::vector<Token>> lex(std::string_view text);

Error syntax_error(const SourceSpan& span, const std::string& message);

// Cursor over a token vector with the usual helpers.
class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  bool at(Tok t, std::size_t ahead = 0) const { return peek(ahead).kind == t; }
  bool at_word(std::string_view w, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::kIdent && peek(ahead).text == w;
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool accept(Tok t) {
    if (!at(t)) return false;
    next();
    return true;
  }
  bool accept_word(std::string_view w) {
    if (!at_word(w)) return false;
    next();
    return true;
  }
  Result<Token> expect(Tok t, std::string_view what);
  Result<Token> expect_word(std::string_view w);

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// Identifier shape used by both grammars.
bool is_identifier(std::string_view s);

}  // namespace acnkit::detail
