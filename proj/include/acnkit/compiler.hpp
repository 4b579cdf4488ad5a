#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "acnkit/ast.hpp"
#include "acnkit/plan.hpp"

namespace acnkit {

// A reference from a consumer (size, determinant, present-when, argument) to
// its producer: a preceding mandatory field of an enclosing SEQUENCE, or a
// parameter of the enclosing type assignment.
struct SlotRef {
  enum class Kind { kField, kParam };
  Kind kind = Kind::kField;
  std::string name;
  SourceSpan span;
};

struct ResolvedNode;
using ResolvedNodePtr = std::shared_ptr<const ResolvedNode>;

struct ResolvedField {
  std::string name;
  ResolvedNodePtr node;
  bool optional = false;
  bool inserted = false;
  std::optional<SlotRef> present_when;
  SourceSpan span;
};

struct ResolvedNode {
  AsnTypePtr type;  // as written; a reference for named types
  AsnTypePtr base;  // `type` with references followed
  std::string target;  // referenced assignment, when `type` is a reference
  std::vector<SlotRef> args;
  std::vector<AcnProperty> props;  // ACN properties written at this position
  std::optional<SlotRef> size_ref;
  std::optional<SlotRef> determinant;
  std::vector<ResolvedField> fields;  // SEQUENCE fields in wire order, or CHOICE alternatives
  ResolvedNodePtr element;            // SEQUENCE OF
  SourceSpan span;
};

struct ResolvedType {
  std::string name;
  std::vector<AcnParam> params;
  std::vector<AsnTypePtr> param_types;  // followed to their base types
  ResolvedNodePtr root;
};

struct ResolvedSchema {
  std::vector<ResolvedType> types;  // ASN.1 order

  const ResolvedType* find(std::string_view name) const;
};

// Joins an ASN.1 module with its ACN spec. Checks references, recursion,
// parameter arity and kinds, property applicability, ACN child placement
// and the producer/consumer wiring of every determinant.
Result<ResolvedSchema> resolve(const AsnModule& asn, const AcnSpec& acn);

// Expands one type assignment into a codec plan. Type references with ACN
// arguments become Outlined nodes named `<Type>__<useSitePath>`.
Result<CodecPlan> compile(const ResolvedSchema& schema, std::string_view type_name);

Result<SizeBounds> size_bounds(const ResolvedSchema& schema, std::string_view type_name);

// parse + resolve + compile in one step.
Result<CodecPlan> compile_text(std::string_view asn1_text, std::string_view acn_text,
                               std::string_view type_name);

}  // namespace acnkit
