#include <charconv>

#include "acnkit/ast.hpp"
#include "lexer.hpp"

namespace acnkit {

using detail::Tok;
using detail::Token;
using detail::TokenStream;
using detail::syntax_error;

std::string_view to_string(AcnPropKind kind) {
  switch (kind) {
    case AcnPropKind::kSize: return "size";
    case AcnPropKind::kEncoding: return "encoding";
    case AcnPropKind::kEndianness: return "endianness";
    case AcnPropKind::kAlignToNext: return "align-to-next";
    case AcnPropKind::kDeterminant: return "determinant";
    case AcnPropKind::kPresentWhen: return "present-when";
    case AcnPropKind::kTerminationPattern: return "termination-pattern";
  }
  return "?";
}

const AcnEntry* AcnSpec::find(std::string_view type_name) const {
  for (const auto& e : entries) {
    if (e.type_name == type_name) return &e;
  }
  return nullptr;
}

const AcnProperty* find_prop(const std::vector<AcnProperty>& props, AcnPropKind kind) {
  for (const auto& p : props) {
    if (p.kind == kind) return &p;
  }
  return nullptr;
}

namespace {

struct PropSyntax {
  std::string_view name;
  AcnPropKind kind;
  std::vector<std::string_view> keywords;  // empty: free-form argument
};

const std::vector<PropSyntax>& prop_table() {
  static const std::vector<PropSyntax> table = {
      {"size", AcnPropKind::kSize, {}},
      {"encoding",
       AcnPropKind::kEncoding,
       {"pos-int", "twos-complement", "IEEE754-1985-32", "IEEE754-1985-64", "ASCII"}},
      {"endianness", AcnPropKind::kEndianness, {"big", "little"}},
      {"align-to-next", AcnPropKind::kAlignToNext, {"byte", "word", "dword"}},
      {"determinant", AcnPropKind::kDeterminant, {}},
      {"present-when", AcnPropKind::kPresentWhen, {}},
      {"termination-pattern", AcnPropKind::kTerminationPattern, {}},
  };
  return table;
}

SourceSpan join(const SourceSpan& a, const SourceSpan& b) {
  SourceSpan s = a;
  if (b.offset + b.length > a.offset) s.length = b.offset + b.length - a.offset;
  return s;
}

class AcnParser {
 public:
  explicit AcnParser(std::vector<Token> toks) : ts_(std::move(toks)) {}

  Result<AcnSpec> spec() {
    AcnSpec spec;
    bool shell = false;
    if (ts_.at(Tok::kIdent) && ts_.at_word("DEFINITIONS", 1)) {
      shell = true;
      spec.module_name = ts_.next().text;
      ts_.next();
      ACNKIT_TRY(ts_.expect(Tok::kAssign, "'::='"));
      ACNKIT_TRY(ts_.expect_word("BEGIN"));
    }
    while (!ts_.at(Tok::kEnd) && !(shell && ts_.at_word("END"))) {
      ACNKIT_ASSIGN_OR_RETURN(AcnEntry e, entry());
      if (spec.find(e.type_name)) {
        return syntax_error(e.span, cat("duplicate ACN entry for '", e.type_name, "'"));
      }
      spec.entries.push_back(std::move(e));
    }
    if (shell) ACNKIT_TRY(ts_.expect_word("END"));
    ACNKIT_TRY(ts_.expect(Tok::kEnd, "end of input"));
    return spec;
  }

 private:
  Result<AcnEntry> entry() {
    AcnEntry e;
    ACNKIT_ASSIGN_OR_RETURN(Token name, ts_.expect(Tok::kIdent, "type name"));
    e.type_name = name.text;
    e.span = name.span;
    if (ts_.accept(Tok::kLAngle)) {
      do {
        ACNKIT_ASSIGN_OR_RETURN(Token type, ts_.expect(Tok::kIdent, "parameter type"));
        ACNKIT_TRY(ts_.expect(Tok::kColon, "':'"));
        ACNKIT_ASSIGN_OR_RETURN(Token pname, ts_.expect(Tok::kIdent, "parameter name"));
        for (const auto& p : e.params) {
          if (p.name == pname.text) {
            return syntax_error(pname.span, cat("duplicate parameter '", pname.text, "'"));
          }
        }
        e.params.push_back({type.text, pname.text, join(type.span, pname.span)});
      } while (ts_.accept(Tok::kComma));
      ACNKIT_TRY(ts_.expect(Tok::kRAngle, "'>'"));
    }
    ACNKIT_ASSIGN_OR_RETURN(SourceSpan end, properties(e.props));
    e.span = join(e.span, end);
    if (ts_.at(Tok::kLBrace)) {
      e.has_children = true;
      ACNKIT_ASSIGN_OR_RETURN(end, children(e.children));
      e.span = join(e.span, end);
    }
    return e;
  }

  Result<std::string> path() {
    ACNKIT_ASSIGN_OR_RETURN(Token first, ts_.expect(Tok::kIdent, "field reference"));
    std::string out = first.text;
    while (ts_.accept(Tok::kDot)) {
      ACNKIT_ASSIGN_OR_RETURN(Token part, ts_.expect(Tok::kIdent, "field name"));
      out += "." + part.text;
    }
    return out;
  }

  Result<AcnProperty> property() {
    ACNKIT_ASSIGN_OR_RETURN(Token name, ts_.expect(Tok::kIdent, "ACN property"));
    const PropSyntax* syntax = nullptr;
    for (const auto& s : prop_table()) {
      if (s.name == name.text) syntax = &s;
    }
    if (!syntax) return syntax_error(name.span, cat("unknown ACN property '", name.text, "'"));
    AcnProperty p;
    p.kind = syntax->kind;
    p.span = name.span;
    const Token& arg = ts_.peek();
    const SourceSpan arg_span = arg.span;
    if (syntax->kind == AcnPropKind::kTerminationPattern) {
      ACNKIT_ASSIGN_OR_RETURN(Token hex, ts_.expect(Tok::kHexString, "hex string"));
      if (hex.text.empty() || hex.text.size() % 2 != 0 || hex.text.size() > 16) {
        return syntax_error(hex.span, "termination pattern must be 1 to 8 whole bytes");
      }
      for (std::size_t i = 0; i < hex.text.size(); i += 2) {
        p.pattern.push_back(static_cast<std::uint8_t>(std::stoul(hex.text.substr(i, 2), nullptr, 16)));
      }
      p.text = hex.text;
    } else if (syntax->kind == AcnPropKind::kSize && arg.kind == Tok::kNumber) {
      std::uint64_t n = 0;
      const Token& num = ts_.next();
      auto [ptr, ec] = std::from_chars(num.text.data(), num.text.data() + num.text.size(), n);
      (void)ptr;
      if (ec != std::errc()) return syntax_error(num.span, "size out of range");
      p.number = n;
      p.text = num.text;
    } else if (!syntax->keywords.empty()) {
      ACNKIT_ASSIGN_OR_RETURN(Token word, ts_.expect(Tok::kIdent, cat(syntax->name, " value")));
      bool known = false;
      for (auto k : syntax->keywords) known = known || k == word.text;
      if (!known) {
        return syntax_error(word.span, cat("'", word.text, "' is not a valid ", syntax->name,
                                           " value"));
      }
      p.text = word.text;
    } else {
      ACNKIT_ASSIGN_OR_RETURN(p.text, path());
    }
    p.span = join(p.span, arg_span);
    return p;
  }

  // Returns the span of the closing bracket.
  Result<SourceSpan> properties(std::vector<AcnProperty>& props) {
    ACNKIT_TRY(ts_.expect(Tok::kLBracket, "'['"));
    if (!ts_.at(Tok::kRBracket)) {
      do {
        ACNKIT_ASSIGN_OR_RETURN(AcnProperty p, property());
        if (find_prop(props, p.kind)) {
          return syntax_error(p.span, cat("duplicate property '", to_string(p.kind), "'"));
        }
        props.push_back(std::move(p));
      } while (ts_.accept(Tok::kComma));
    }
    ACNKIT_ASSIGN_OR_RETURN(Token close, ts_.expect(Tok::kRBracket, "']'"));
    return close.span;
  }

  Result<SourceSpan> children(std::vector<AcnChild>& out) {
    ACNKIT_TRY(ts_.expect(Tok::kLBrace, "'{'"));
    if (!ts_.at(Tok::kRBrace)) {
      do {
        ACNKIT_ASSIGN_OR_RETURN(AcnChild c, child());
        for (const auto& other : out) {
          if (other.name == c.name) {
            return syntax_error(c.span, c.name.empty()
                                            ? std::string("duplicate element entry")
                                            : cat("duplicate ACN child '", c.name, "'"));
          }
        }
        out.push_back(std::move(c));
      } while (ts_.accept(Tok::kComma));
    }
    ACNKIT_ASSIGN_OR_RETURN(Token close, ts_.expect(Tok::kRBrace, "'}'"));
    return close.span;
  }

  Result<AcnChild> child() {
    AcnChild c;
    c.span = ts_.peek().span;
    if (ts_.at(Tok::kIdent)) {
      c.name = ts_.next().text;
      if (ts_.at(Tok::kIdent)) c.inserted_type = ts_.next().text;
    }
    if (ts_.accept(Tok::kLAngle)) {
      do {
        ACNKIT_ASSIGN_OR_RETURN(std::string arg, path());
        c.args.push_back(std::move(arg));
      } while (ts_.accept(Tok::kComma));
      ACNKIT_TRY(ts_.expect(Tok::kRAngle, "'>'"));
    }
    ACNKIT_ASSIGN_OR_RETURN(SourceSpan end, properties(c.props));
    c.span = join(c.span, end);
    if (ts_.at(Tok::kLBrace)) {
      c.has_children = true;
      ACNKIT_ASSIGN_OR_RETURN(end, children(c.children));
      c.span = join(c.span, end);
    }
    return c;
  }

  TokenStream ts_;
};

}  // namespace

Result<AcnSpec> parse_acn(std::string_view text) {
  auto toks = detail::lex(text);
  if (!toks.ok()) return std::move(std::move(toks).error().with_source(SourceKind::kAcn));
  auto out = AcnParser(std::move(toks).value()).spec();
  if (!out.ok()) return std::move(std::move(out).error().with_source(SourceKind::kAcn));
  return out;
}

}  // namespace acnkit
