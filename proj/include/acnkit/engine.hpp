#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "acnkit/acn_codec.hpp"
#include "acnkit/plan.hpp"
#include "acnkit/value.hpp"

namespace acnkit {

// Bytes [floor(start/8), ceil((start+bits)/8)) of the codec buffer after an
// encode, plus the exact message length.
struct EncodeReport {
  std::vector<std::uint8_t> bytes;
  std::uint64_t bit_length = 0;
  std::uint64_t start_offset = 0;
};

// ACN-inserted values seen while decoding, keyed by runtime path such as
// `physicalDevCmds[1].physicalDev-ID`, in wire order.
using SlotValues = std::vector<std::pair<std::string, Value>>;

// Brings a value into the exact shape the plan expects: single-key objects
// become records or variants as needed, strings become enumeration items,
// and record fields are put in plan order. Fails on unknown or missing
// fields and on user-supplied ACN-inserted fields.
Result<Value> conform(const CodecPlan& plan, const Value& v);

// Writes v at the codec cursor. Needs at least plan max_bits of room.
// On failure, bits before the start cursor are unchanged.
Result<EncodeReport> encode(const CodecPlan& plan, const Value& v, AcnCodec& codec);

Result<Value> decode(const CodecPlan& plan, AcnCodec& codec, SlotValues* slots = nullptr);

// Exact number of bits encode would write starting at absolute bit offset.
Result<std::uint64_t> size_of(const CodecPlan& plan, const Value& v, std::uint64_t offset_bits);

struct Violation {
  std::string path;
  std::string message;
};

// Every ASN.1 constraint the plan carries, checked against v. Shape errors
// are reported as a single violation at the top level.
std::vector<Violation> check_constraints(const CodecPlan& plan, const Value& v);

using Decoder = std::function<Result<Value>(const CodecPlan&, AcnCodec&)>;

struct RoundtripOptions {
  std::uint64_t offset_bits = 0;
  unsigned fuzz_cases = 16;
  std::uint64_t seed = 1;
  Decoder decoder;  // defaults to decode()
};

struct ContractOutcome {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RoundtripReport {
  std::vector<ContractOutcome> contracts;
  std::uint64_t bit_length = 0;
  unsigned fuzz_runs = 0;  // decodes performed by prefix-fuzz

  bool passed() const;
  // Name of the first failed contract, or empty.
  std::string first_failure() const;
};

// Names of the contracts in the order roundtrip_check runs them.
const std::vector<std::string>& contract_names();

// Encodes v at the offset over a randomly prefilled buffer, rewinds, decodes
// and checks every invertibility contract, then decodes again with random
// bit flips beyond the message end.
RoundtripReport roundtrip_check(const CodecPlan& plan, const Value& v,
                                const RoundtripOptions& options = {});

}  // namespace acnkit
