#include <algorithm>
#include <charconv>
#include <limits>
#include <set>

#include "acnkit/ast.hpp"
#include "lexer.hpp"

namespace acnkit {

using detail::Tok;
using detail::Token;
using detail::TokenStream;
using detail::syntax_error;

std::string_view to_string(AsnKind kind) {
  switch (kind) {
    case AsnKind::kInteger: return "INTEGER";
    case AsnKind::kBoolean: return "BOOLEAN";
    case AsnKind::kNull: return "NULL";
    case AsnKind::kReal: return "REAL";
    case AsnKind::kEnumerated: return "ENUMERATED";
    case AsnKind::kIA5String: return "IA5String";
    case AsnKind::kSequence: return "SEQUENCE";
    case AsnKind::kChoice: return "CHOICE";
    case AsnKind::kSequenceOf: return "SEQUENCE OF";
    case AsnKind::kReference: return "reference";
  }
  return "?";
}

const TypeAssignment* AsnModule::find(std::string_view type_name) const {
  for (const auto& a : assignments) {
    if (a.name == type_name) return &a;
  }
  return nullptr;
}

std::string expand_alphabet(const std::vector<AlphabetPart>& parts) {
  std::set<unsigned char> codes;
  for (const auto& p : parts) {
    if (p.is_range) {
      for (int c = static_cast<unsigned char>(p.lo); c <= static_cast<unsigned char>(p.hi); ++c) {
        codes.insert(static_cast<unsigned char>(c));
      }
    } else {
      for (char c : p.chars) codes.insert(static_cast<unsigned char>(c));
    }
  }
  std::string out;
  for (auto c : codes) out.push_back(static_cast<char>(c));
  return out;
}

namespace {

const std::set<std::string, std::less<>> kReserved = {
    "INTEGER", "BOOLEAN", "NULL", "REAL", "ENUMERATED", "IA5String", "SEQUENCE", "CHOICE",
    "OF", "SIZE", "FROM", "OPTIONAL", "DEFINITIONS", "BEGIN", "END", "AUTOMATIC", "TAGS",
};

SourceSpan join(const SourceSpan& a, const SourceSpan& b) {
  SourceSpan s = a;
  if (b.offset + b.length > a.offset) s.length = b.offset + b.length - a.offset;
  return s;
}

class AsnParser {
 public:
  explicit AsnParser(std::vector<Token> toks) : ts_(std::move(toks)) {}

  Result<AsnModule> module() {
    AsnModule m;
    bool shell = false;
    if (ts_.at(Tok::kIdent) && ts_.at_word("DEFINITIONS", 1)) {
      shell = true;
      m.name = ts_.next().text;
      ts_.next();
      if (ts_.accept_word("AUTOMATIC")) ACNKIT_TRY(ts_.expect_word("TAGS"));
      ACNKIT_TRY(ts_.expect(Tok::kAssign, "'::='"));
      ACNKIT_TRY(ts_.expect_word("BEGIN"));
    }
    while (!ts_.at(Tok::kEnd) && !(shell && ts_.at_word("END"))) {
      ACNKIT_ASSIGN_OR_RETURN(TypeAssignment a, assignment());
      if (m.find(a.name)) {
        return syntax_error(a.span, cat("duplicate type assignment '", a.name, "'"));
      }
      m.assignments.push_back(std::move(a));
    }
    if (shell) ACNKIT_TRY(ts_.expect_word("END"));
    ACNKIT_TRY(ts_.expect(Tok::kEnd, "end of input"));
    return m;
  }

 private:
  Result<TypeAssignment> assignment() {
    ACNKIT_ASSIGN_OR_RETURN(Token name, ts_.expect(Tok::kIdent, "type name"));
    if (kReserved.count(name.text)) {
      return syntax_error(name.span, cat("'", name.text, "' is a reserved word"));
    }
    ACNKIT_TRY(ts_.expect(Tok::kAssign, "'::='"));
    ACNKIT_ASSIGN_OR_RETURN(AsnTypePtr t, type());
    const SourceSpan span = join(name.span, t->span);
    return TypeAssignment{name.text, std::move(t), span};
  }

  Result<std::int64_t> signed_number() {
    const SourceSpan start = ts_.peek().span;
    const bool negative = ts_.accept(Tok::kMinus);
    ACNKIT_ASSIGN_OR_RETURN(Token num, ts_.expect(Tok::kNumber, "number"));
    std::uint64_t magnitude = 0;
    auto [p, ec] = std::from_chars(num.text.data(), num.text.data() + num.text.size(), magnitude);
    (void)p;
    const std::uint64_t limit = negative ? std::uint64_t{1} << 63
                                         : static_cast<std::uint64_t>(
                                               std::numeric_limits<std::int64_t>::max());
    if (ec != std::errc() || magnitude > limit) {
      return syntax_error(join(start, num.span), cat("number out of 64-bit range"));
    }
    if (negative) return static_cast<std::int64_t>(0 - magnitude);
    return static_cast<std::int64_t>(magnitude);
  }

  // `lo .. hi` or a single value.
  Result<IntRange> range_body() {
    const SourceSpan start = ts_.peek().span;
    ACNKIT_ASSIGN_OR_RETURN(std::int64_t lo, signed_number());
    std::int64_t hi = lo;
    if (ts_.accept(Tok::kRange)) {
      ACNKIT_ASSIGN_OR_RETURN(hi, signed_number());
    }
    if (lo > hi) {
      return syntax_error(start, cat("empty range ", lo, " .. ", hi));
    }
    return IntRange{lo, hi};
  }

  Result<IntRange> size_constraint() {
    ACNKIT_TRY(ts_.expect_word("SIZE"));
    ACNKIT_TRY(ts_.expect(Tok::kLParen, "'('"));
    const SourceSpan start = ts_.peek().span;
    ACNKIT_ASSIGN_OR_RETURN(IntRange r, range_body());
    if (r.lo < 0) return syntax_error(start, "size lower bound must be non-negative");
    ACNKIT_TRY(ts_.expect(Tok::kRParen, "')'"));
    return r;
  }

  Result<char> single_char() {
    ACNKIT_ASSIGN_OR_RETURN(Token s, ts_.expect(Tok::kCString, "string"));
    if (s.text.size() != 1) return syntax_error(s.span, "range bound must be a single character");
    return s.text[0];
  }

  Status from_constraint(AsnType& t) {
    ACNKIT_TRY(ts_.expect_word("FROM"));
    ACNKIT_TRY(ts_.expect(Tok::kLParen, "'('"));
    do {
      const SourceSpan start = ts_.peek().span;
      if (ts_.at(Tok::kCString) && ts_.at(Tok::kRange, 1)) {
        ACNKIT_ASSIGN_OR_RETURN(char lo, single_char());
        ts_.next();
        ACNKIT_ASSIGN_OR_RETURN(char hi, single_char());
        if (static_cast<unsigned char>(lo) > static_cast<unsigned char>(hi)) {
          return syntax_error(start, "empty character range");
        }
        t.alphabet.push_back(AlphabetPart{"", true, lo, hi});
      } else {
        ACNKIT_ASSIGN_OR_RETURN(Token s, ts_.expect(Tok::kCString, "string"));
        if (s.text.empty()) return syntax_error(s.span, "empty alphabet string");
        t.alphabet.push_back(AlphabetPart{s.text, false, 0, 0});
      }
    } while (ts_.accept(Tok::kPipe));
    for (char c : expand_alphabet(t.alphabet)) {
      if (static_cast<unsigned char>(c) > 127) {
        return syntax_error(t.span, "IA5String alphabet must be 7-bit");
      }
    }
    ACNKIT_TRY(ts_.expect(Tok::kRParen, "')'"));
    return {};
  }

  // One or more parenthesized constraints; inside each, SIZE and FROM may be
  // joined with '^'.
  Status string_constraints(AsnType& t) {
    while (ts_.accept(Tok::kLParen)) {
      do {
        const SourceSpan at = ts_.peek().span;
        if (ts_.at_word("SIZE")) {
          if (t.size) return syntax_error(at, "duplicate SIZE constraint");
          ACNKIT_ASSIGN_OR_RETURN(IntRange r, size_constraint());
          t.size = r;
        } else if (ts_.at_word("FROM")) {
          if (!t.alphabet.empty()) return syntax_error(at, "duplicate FROM constraint");
          ACNKIT_TRY(from_constraint(t));
        } else {
          return syntax_error(at, "expected SIZE or FROM");
        }
      } while (ts_.accept(Tok::kCaret));
      ACNKIT_TRY(ts_.expect(Tok::kRParen, "')'"));
    }
    return {};
  }

  Status components(AsnType& t, bool allow_optional) {
    ACNKIT_TRY(ts_.expect(Tok::kLBrace, "'{'"));
    if (!ts_.at(Tok::kRBrace)) {
      do {
        ACNKIT_ASSIGN_OR_RETURN(Token name, ts_.expect(Tok::kIdent, "component name"));
        if (kReserved.count(name.text)) {
          return syntax_error(name.span, cat("'", name.text, "' is a reserved word"));
        }
        for (const auto& c : t.components) {
          if (c.name == name.text) {
            return syntax_error(name.span, cat("duplicate component '", name.text, "'"));
          }
        }
        ACNKIT_ASSIGN_OR_RETURN(AsnTypePtr ct, type());
        Component c{name.text, ct, false, join(name.span, ct->span)};
        if (ts_.at_word("OPTIONAL")) {
          if (!allow_optional) {
            return syntax_error(ts_.peek().span, "OPTIONAL is only allowed in SEQUENCE");
          }
          c.span = join(c.span, ts_.next().span);
          c.optional = true;
        }
        t.components.push_back(std::move(c));
      } while (ts_.accept(Tok::kComma));
    }
    ACNKIT_ASSIGN_OR_RETURN(Token close, ts_.expect(Tok::kRBrace, "'}'"));
    t.span = join(t.span, close.span);
    if (t.kind == AsnKind::kChoice && t.components.empty()) {
      return syntax_error(t.span, "CHOICE needs at least one alternative");
    }
    return {};
  }

  Status enum_items(AsnType& t) {
    ACNKIT_TRY(ts_.expect(Tok::kLBrace, "'{'"));
    do {
      ACNKIT_ASSIGN_OR_RETURN(Token name, ts_.expect(Tok::kIdent, "enumeration item"));
      EnumItem item{name.text, 0, false, name.span};
      if (ts_.accept(Tok::kLParen)) {
        ACNKIT_ASSIGN_OR_RETURN(item.value, signed_number());
        item.explicit_value = true;
        ACNKIT_ASSIGN_OR_RETURN(Token close, ts_.expect(Tok::kRParen, "')'"));
        item.span = join(item.span, close.span);
      }
      for (const auto& other : t.items) {
        if (other.name == item.name) {
          return syntax_error(item.span, cat("duplicate enumeration item '", item.name, "'"));
        }
      }
      t.items.push_back(std::move(item));
    } while (ts_.accept(Tok::kComma));
    ACNKIT_ASSIGN_OR_RETURN(Token close, ts_.expect(Tok::kRBrace, "'}'"));
    t.span = join(t.span, close.span);

    // Implicit values take the smallest non-negative numbers not used
    // explicitly, in item order.
    std::set<std::int64_t> used;
    for (const auto& item : t.items) {
      if (!item.explicit_value) continue;
      if (!used.insert(item.value).second) {
        return syntax_error(item.span, cat("duplicate enumeration value ", item.value));
      }
    }
    std::int64_t next = 0;
    for (auto& item : t.items) {
      if (item.explicit_value) continue;
      while (used.count(next)) ++next;
      item.value = next;
      used.insert(next);
    }
    return {};
  }

  Result<AsnTypePtr> type() {
    auto t = std::make_shared<AsnType>();
    const Token& head = ts_.peek();
    if (head.kind != Tok::kIdent) {
      return syntax_error(head.span, cat("expected a type, found ",
                                         head.kind == Tok::kEnd ? std::string("end of input")
                                                                : cat("'", head.text, "'")));
    }
    t->span = head.span;
    const std::string word = ts_.next().text;
    if (word == "INTEGER") {
      t->kind = AsnKind::kInteger;
      if (ts_.accept(Tok::kLParen)) {
        ACNKIT_ASSIGN_OR_RETURN(IntRange r, range_body());
        t->range = r;
        ACNKIT_ASSIGN_OR_RETURN(Token close, ts_.expect(Tok::kRParen, "')'"));
        t->span = join(t->span, close.span);
      }
    } else if (word == "BOOLEAN") {
      t->kind = AsnKind::kBoolean;
    } else if (word == "NULL") {
      t->kind = AsnKind::kNull;
    } else if (word == "REAL") {
      t->kind = AsnKind::kReal;
    } else if (word == "ENUMERATED") {
      t->kind = AsnKind::kEnumerated;
      ACNKIT_TRY(enum_items(*t));
    } else if (word == "IA5String") {
      t->kind = AsnKind::kIA5String;
      ACNKIT_TRY(string_constraints(*t));
    } else if (word == "CHOICE") {
      t->kind = AsnKind::kChoice;
      ACNKIT_TRY(components(*t, false));
    } else if (word == "SEQUENCE") {
      if (ts_.at(Tok::kLBrace)) {
        t->kind = AsnKind::kSequence;
        ACNKIT_TRY(components(*t, true));
      } else {
        t->kind = AsnKind::kSequenceOf;
        if (ts_.accept(Tok::kLParen)) {
          ACNKIT_ASSIGN_OR_RETURN(IntRange r, size_constraint());
          t->size = r;
          ACNKIT_TRY(ts_.expect(Tok::kRParen, "')'"));
        } else if (ts_.at_word("SIZE")) {
          ACNKIT_ASSIGN_OR_RETURN(IntRange r, size_constraint());
          t->size = r;
        }
        ACNKIT_TRY(ts_.expect_word("OF"));
        ACNKIT_ASSIGN_OR_RETURN(t->element, type());
        t->span = join(t->span, t->element->span);
      }
    } else if (kReserved.count(word)) {
      return syntax_error(head.span, cat("unexpected '", word, "'"));
    } else {
      t->kind = AsnKind::kReference;
      t->ref = word;
    }
    return t;
  }

  TokenStream ts_;
};

}  // namespace

Result<AsnModule> parse_asn1(std::string_view text) {
  auto toks = detail::lex(text);
  if (!toks.ok()) return std::move(std::move(toks).error().with_source(SourceKind::kAsn1));
  auto out = AsnParser(std::move(toks).value()).module();
  if (!out.ok()) return std::move(std::move(out).error().with_source(SourceKind::kAsn1));
  return out;
}

}  // namespace acnkit
