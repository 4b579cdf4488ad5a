#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "acnkit/acn_codec.hpp"
#include "acnkit/result.hpp"

namespace acnkit {

// Static size analysis of a plan node. `alignment` is the modulus m (1, 8,
// 16 or 32) such that the exact size depends on the start offset only
// through offset mod m; 1 means the size does not depend on it at all.
struct SizeBounds {
  std::uint64_t min_bits = 0;
  std::uint64_t max_bits = 0;
  unsigned alignment = 1;
  friend bool operator==(const SizeBounds&, const SizeBounds&) = default;
};

// "none", "mod8", "mod16", "mod32".
std::string alignment_name(unsigned alignment);

// Largest bound a plan may carry.
inline constexpr std::uint64_t kMaxPlanBits = std::uint64_t{1} << 48;

enum class PlanKind {
  kConstUInt,          // byte-aligned unsigned of width 8/16/32/64
  kUIntBits,           // unsigned of any width 1..64
  kTwosComplement,     // signed of any width 1..64
  kConstrainedNumber,  // value - min in bits_needed(max - min) bits
  kReal,
  kBool,
  kNull,
  kEnumerated,
  kStringAsciiNull,
  kStringCharIndex,
  kAlign,
  kRecord,
  kVariant,
  kList,
  kOutlined,
  kConstraintCheck,
};

std::string_view to_string(PlanKind kind);
std::optional<PlanKind> plan_kind_from_string(std::string_view name);

enum class SlotKind { kInteger, kEnumerated, kBoolean };

std::string_view to_string(SlotKind kind);

struct PlanNode;
using PlanNodePtr = std::shared_ptr<const PlanNode>;

struct PlanItem {
  std::string name;
  std::int64_t value = 0;
};

struct PlanField {
  std::string name;
  PlanNodePtr node;
  bool inserted = false;
  bool optional = false;
  std::string present_slot;  // boolean slot deciding presence of an optional field
  std::string produces;      // slot this field's value feeds, if any
};

struct PlanAlternative {
  std::string name;
  std::string when;  // enumeration item selecting this alternative
  PlanNodePtr node;
};

struct PlanParam {
  std::string param;
  std::string slot;
};

// One node kind per instance; only the members that kind uses are set.
struct PlanNode {
  PlanKind kind = PlanKind::kNull;
  SizeBounds bounds;

  unsigned width = 0;                    // ConstUInt, UIntBits, TwosComplement, Real; Align modulus
  Endianness endianness = Endianness::kBig;
  std::int64_t min = 0;                  // value range or length range
  std::int64_t max = 0;
  std::vector<PlanItem> items;           // Enumerated
  std::optional<Alphabet> alphabet;      // strings
  std::vector<std::uint8_t> terminator;  // StringAsciiNull
  std::string slot;                      // length, size or determinant slot
  std::string name;                      // Outlined
  std::vector<PlanParam> params;         // Outlined
  std::vector<PlanField> fields;         // Record
  std::vector<PlanAlternative> alternatives;  // Variant
  PlanNodePtr child;  // Enumerated, Align, List element, Outlined body, ConstraintCheck

  const PlanItem* item_by_name(std::string_view item) const;
  const PlanItem* item_by_value(std::int64_t value) const;
};

struct PlanSlot {
  std::string name;
  SlotKind kind = SlotKind::kInteger;
};

struct CodecPlan {
  std::string type_name;
  std::vector<PlanSlot> slots;  // in producer document order
  PlanNodePtr root;

  const SizeBounds& bounds() const { return root->bounds; }
  const PlanSlot* find_slot(std::string_view name) const;
};

// Bounds of a node from its own parameters and its children's stored bounds.
// Saturates at UINT64_MAX.
SizeBounds compute_bounds(const PlanNode& node);

// Follows Align, ConstraintCheck and Outlined wrappers.
const PlanNode& strip_wrappers(const PlanNode& node);

// Checks every structural invariant: parameter ranges, slot wiring (one
// producer per slot, producer before consumers, consumers in the producer's
// scope, matching kinds), unique Outlined names and stored bounds.
Status validate_plan(const CodecPlan& plan);

// Canonical JSON. Identical plans give identical text.
std::string plan_dump(const CodecPlan& plan);
// Parses and validates.
Result<CodecPlan> plan_load(std::string_view text);

}  // namespace acnkit
