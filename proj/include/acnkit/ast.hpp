#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "acnkit/result.hpp"

namespace acnkit {

// ---------------------------------------------------------------------------
// ASN.1 subset

enum class AsnKind {
  kInteger,
  kBoolean,
  kNull,
  kReal,
  kEnumerated,
  kIA5String,
  kSequence,
  kChoice,
  kSequenceOf,
  kReference,
};

std::string_view to_string(AsnKind kind);

struct IntRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  friend bool operator==(const IntRange&, const IntRange&) = default;
};

struct EnumItem {
  std::string name;
  std::int64_t value = 0;
  bool explicit_value = false;
  SourceSpan span;
};

// One piece of a FROM(...) permitted-alphabet constraint: either a literal
// character string or an inclusive character range "a".."z".
struct AlphabetPart {
  std::string chars;
  bool is_range = false;
  char lo = 0;
  char hi = 0;
  friend bool operator==(const AlphabetPart&, const AlphabetPart&) = default;
};

struct AsnType;
using AsnTypePtr = std::shared_ptr<AsnType>;

struct Component {
  std::string name;
  AsnTypePtr type;
  bool optional = false;
  SourceSpan span;
};

struct AsnType {
  AsnKind kind = AsnKind::kNull;
  SourceSpan span;
  std::optional<IntRange> range;             // INTEGER value range
  std::optional<IntRange> size;              // IA5String / SEQUENCE OF size
  std::vector<AlphabetPart> alphabet;        // IA5String FROM constraint
  std::vector<EnumItem> items;               // ENUMERATED
  std::vector<Component> components;         // SEQUENCE fields, CHOICE alternatives
  AsnTypePtr element;                        // SEQUENCE OF
  std::string ref;                           // referenced type name
};

struct TypeAssignment {
  std::string name;
  AsnTypePtr type;
  SourceSpan span;
};

struct AsnModule {
  // Empty when the text has no DEFINITIONS shell.
  std::string name;
  std::vector<TypeAssignment> assignments;

  const TypeAssignment* find(std::string_view type_name) const;
};

// Expands a FROM constraint into its distinct characters, ascending by code.
std::string expand_alphabet(const std::vector<AlphabetPart>& parts);

// ---------------------------------------------------------------------------
// ACN subset

enum class AcnPropKind {
  kSize,
  kEncoding,
  kEndianness,
  kAlignToNext,
  kDeterminant,
  kPresentWhen,
  kTerminationPattern,
};

std::string_view to_string(AcnPropKind kind);

struct AcnProperty {
  AcnPropKind kind = AcnPropKind::kSize;
  // Keyword or field path argument (`null-terminated`, `pos-int`, `n`, ...).
  std::string text;
  // Numeric argument (`size 32`).
  std::optional<std::uint64_t> number;
  // Termination pattern bytes.
  std::vector<std::uint8_t> pattern;
  SourceSpan span;
};

struct AcnChild {
  // Empty for the element entry of a SEQUENCE OF.
  std::string name;
  // Set for ACN-inserted fields: a type reference, or INTEGER / BOOLEAN.
  std::string inserted_type;
  // Actual arguments of a parameterized type reference, as field paths.
  std::vector<std::string> args;
  std::vector<AcnProperty> props;
  std::vector<AcnChild> children;
  bool has_children = false;
  SourceSpan span;
};

struct AcnParam {
  std::string type_name;
  std::string name;
  SourceSpan span;
};

struct AcnEntry {
  std::string type_name;
  std::vector<AcnParam> params;
  std::vector<AcnProperty> props;
  std::vector<AcnChild> children;
  bool has_children = false;
  SourceSpan span;
};

struct AcnSpec {
  std::string module_name;
  std::vector<AcnEntry> entries;

  const AcnEntry* find(std::string_view type_name) const;
};

const AcnProperty* find_prop(const std::vector<AcnProperty>& props, AcnPropKind kind);

// ---------------------------------------------------------------------------
// Parsing and printing

Result<AsnModule> parse_asn1(std::string_view text);
Result<AcnSpec> parse_acn(std::string_view text);

// Canonical text. Parsing the output gives back an equivalent tree.
std::string print_asn1(const AsnModule& module);
std::string print_acn(const AcnSpec& spec);

}  // namespace acnkit
