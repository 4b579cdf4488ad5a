#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "acnkit/plan.hpp"
#include "acnkit/value.hpp"

namespace acnkit {

struct GeneratedSchema {
  std::string asn1;
  std::string acn;
  std::string type;  // root type assignment
};

struct SchemaLimits {
  unsigned max_depth = 4;
  unsigned max_fanout = 5;
  unsigned max_list = 4;
  unsigned max_string = 10;
};

// Random ASN.1 module plus matching ACN module. Covers every node kind the
// compiler emits, including ACN-inserted size, presence and determinant
// fields and alignment. The root is always a SEQUENCE named Root.
GeneratedSchema random_schema(std::mt19937_64& rng, const SchemaLimits& limits = {});

// Random value that satisfies every constraint of the plan. Integers lean
// toward their range ends.
Value random_value(const CodecPlan& plan, std::mt19937_64& rng);

}  // namespace acnkit
