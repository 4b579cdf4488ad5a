#include "lexer.hpp"

#include <cctype>

namespace acnkit::detail {

std::string_view describe(Tok t) {
  switch (t) {
    case Tok::kIdent: return "identifier";
    case Tok::kNumber: return "number";
    case Tok::kCString: return "string";
    case Tok::kHexString: return "hex string";
    case Tok::kAssign: return "'::='";
    case Tok::kLBrace: return "'{'";
    case Tok::kRBrace: return "'}'";
    case Tok::kLParen: return "'('";
    case Tok::kRParen: return "')'";
    case Tok::kLBracket: return "'['";
    case Tok::kRBracket: return "']'";
    case Tok::kLAngle: return "'<'";
    case Tok::kRAngle: return "'>'";
    case Tok::kComma: return "','";
    case Tok::kDot: return "'.'";
    case Tok::kRange: return "'..'";
    case Tok::kPipe: return "'|'";
    case Tok::kColon: return "':'";
    case Tok::kCaret: return "'^'";
    case Tok::kMinus: return "'-'";
    case Tok::kEnd: return "end of input";
  }
  return "?";
}

Error syntax_error(const SourceSpan& span, const std::string& message) {
  Error e{ErrorCode::kSyntax, message, {}};
  e.diagnostics.push_back({span, message});
  return e;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (std::isalnum(c)) continue;
    if (c == '-' && i + 1 < s.size() && std::isalnum(static_cast<unsigned char>(s[i + 1]))) {
      continue;
    }
    return false;
  }
  return true;
}

namespace {

class Lexer {
 public:
  explicit Lexer(std::string_view text) : src_(text) {}

  Result<std::vector<Token>> run() {
    std::vector<Token> out;
    while (true) {
      ACNKIT_TRY(skip_space_and_comments());
      if (pos_ >= src_.size()) {
        out.push_back({Tok::kEnd, "", span_here(0)});
        return out;
      }
      ACNKIT_ASSIGN_OR_RETURN(Token t, one());
      out.push_back(std::move(t));
    }
  }

 private:
  SourceSpan span_here(std::size_t len) const {
    return {line_, col_, static_cast<std::uint32_t>(pos_), static_cast<std::uint32_t>(len)};
  }

  char at(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  Status skip_space_and_comments() {
    while (pos_ < src_.size()) {
      const char c = at();
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '-' && at(1) == '-') {
        advance(2);
        while (pos_ < src_.size() && at() != '\n') {
          if (at() == '-' && at(1) == '-') {
            advance(2);
            break;
          }
          advance();
        }
      } else if (c == '/' && at(1) == '*') {
        const SourceSpan start = span_here(2);
        advance(2);
        while (pos_ < src_.size() && !(at() == '*' && at(1) == '/')) advance();
        if (pos_ >= src_.size()) return syntax_error(start, "unterminated comment");
        advance(2);
      } else {
        break;
      }
    }
    return {};
  }

  Result<Token> one() {
    const SourceSpan start = span_here(1);
    const char c = at();
    auto simple = [&](Tok t, std::size_t len) {
      Token tok{t, std::string(src_.substr(pos_, len)), span_here(len)};
      advance(len);
      return tok;
    };
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t len = 1;
      while (true) {
        const char d = pos_ + len < src_.size() ? src_[pos_ + len] : '\0';
        const char e = pos_ + len + 1 < src_.size() ? src_[pos_ + len + 1] : '\0';
        if (std::isalnum(static_cast<unsigned char>(d))) {
          ++len;
        } else if (d == '-' && std::isalnum(static_cast<unsigned char>(e))) {
          len += 2;
        } else {
          break;
        }
      }
      return simple(Tok::kIdent, len);
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t len = 1;
      while (pos_ + len < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + len]))) {
        ++len;
      }
      if (pos_ + len < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_ + len]))) {
        return syntax_error(span_here(len + 1), "malformed number");
      }
      return simple(Tok::kNumber, len);
    }
    if (c == '"') return cstring();
    if (c == '\'') return hexstring();
    if (c == ':' && at(1) == ':' && at(2) == '=') return simple(Tok::kAssign, 3);
    if (c == '.' && at(1) == '.') return simple(Tok::kRange, 2);
    switch (c) {
      case '{': return simple(Tok::kLBrace, 1);
      case '}': return simple(Tok::kRBrace, 1);
      case '(': return simple(Tok::kLParen, 1);
      case ')': return simple(Tok::kRParen, 1);
      case '[': return simple(Tok::kLBracket, 1);
      case ']': return simple(Tok::kRBracket, 1);
      case '<': return simple(Tok::kLAngle, 1);
      case '>': return simple(Tok::kRAngle, 1);
      case ',': return simple(Tok::kComma, 1);
      case '.': return simple(Tok::kDot, 1);
      case '|': return simple(Tok::kPipe, 1);
      case ':': return simple(Tok::kColon, 1);
      case '^': return simple(Tok::kCaret, 1);
      case '-': return simple(Tok::kMinus, 1);
      default: break;
    }
    return syntax_error(start, cat("unexpected character '", c, "'"));
  }

  // ASN.1 cstrings: "" inside the string is a literal quote.
  Result<Token> cstring() {
    const SourceSpan start = span_here(1);
    const std::size_t begin = pos_;
    advance();
    std::string value;
    while (true) {
      if (pos_ >= src_.size()) return syntax_error(start, "unterminated string");
      const char c = at();
      if (c == '"') {
        if (at(1) == '"') {
          value.push_back('"');
          advance(2);
          continue;
        }
        advance();
        break;
      }
      value.push_back(c);
      advance();
    }
    SourceSpan span = start;
    span.length = static_cast<std::uint32_t>(pos_ - begin);
    return Token{Tok::kCString, std::move(value), span};
  }

  Result<Token> hexstring() {
    const SourceSpan start = span_here(1);
    const std::size_t begin = pos_;
    advance();
    std::string digits;
    while (pos_ < src_.size() && at() != '\'') {
      const char c = at();
      if (!std::isspace(static_cast<unsigned char>(c))) {
        if (!std::isxdigit(static_cast<unsigned char>(c))) {
          return syntax_error(span_here(1), cat("'", c, "' is not a hex digit"));
        }
        digits.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
      }
      advance();
    }
    if (pos_ >= src_.size()) return syntax_error(start, "unterminated hex string");
    advance();
    if (at() != 'H') return syntax_error(span_here(1), "hex string must end with 'H");
    advance();
    SourceSpan span = start;
    span.length = static_cast<std::uint32_t>(pos_ - begin);
    return Token{Tok::kHexString, std::move(digits), span};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t col_ = 1;
};

}  // namespace

Result<std::vector<Token>> lex(std::string_view text) { return Lexer(text).run(); }

Result<Token> TokenStream::expect(Tok t, std::string_view what) {
  if (!at(t)) {
    const Token& got = peek();
    return syntax_error(got.span, cat("expected ", what, ", found ",
                                      got.kind == Tok::kEnd ? std::string("end of input")
                                                            : cat("'", got.text, "'")));
  }
  return next();
}

Result<Token> TokenStream::expect_word(std::string_view w) {
  if (!at_word(w)) {
    const Token& got = peek();
    return syntax_error(got.span, cat("expected '", w, "', found ",
                                      got.kind == Tok::kEnd ? std::string("end of input")
                                                            : cat("'", got.text, "'")));
  }
  return next();
}

}  // namespace acnkit::detail
