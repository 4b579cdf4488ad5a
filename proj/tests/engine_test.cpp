#include <gtest/gtest.h>

#include "acnkit/compiler.hpp"
#include "acnkit/engine.hpp"
#include "support/fixtures.hpp"

namespace acnkit {
namespace {

using testing::read_fixture;

CodecPlan must_compile(std::string_view asn, std::string_view acn, std::string_view type) {
  auto plan = compile_text(asn, acn, type);
  EXPECT_TRUE(plan.ok()) << plan.error().describe();
  return plan.ok() ? std::move(plan).value() : CodecPlan{};
}

CodecPlan fixture_plan(const std::string& stem, std::string_view type) {
  return must_compile(read_fixture(stem + ".asn1"), read_fixture(stem + ".acn"), type);
}

Value must_parse(std::string_view json) {
  auto v = parse_value_json(json);
  EXPECT_TRUE(v.ok()) << v.error().describe();
  return v.ok() ? std::move(v).value() : Value::null();
}

Value fixture_value(const std::string& name) { return must_parse(read_fixture(name)); }

std::string module(std::string_view body) {
  return cat("M DEFINITIONS AUTOMATIC TAGS ::= BEGIN\n", body, "\nEND\n");
}

std::string acn_module(std::string_view body) { return cat("M DEFINITIONS ::= BEGIN\n", body, "\nEND\n"); }

AcnCodec fresh(std::size_t bytes) {
  auto c = AcnCodec::create(bytes);
  EXPECT_TRUE(c.ok());
  return std::move(c).value();
}

AcnCodec over(std::vector<std::uint8_t> bytes) {
  auto s = BitStream::wrap(std::move(bytes));
  EXPECT_TRUE(s.ok());
  return AcnCodec(std::move(s).value());
}

struct Case {
  std::string stem;
  std::string type;
  std::string value;
};

const std::vector<Case>& fixture_cases() {
  static const std::vector<Case> cases = {
      {"tc27", "TC-2-7-DistrPhysicalDevCmds", "tc27.cmds1.json"},
      {"tc27", "TC-2-7-DistrPhysicalDevCmds", "tc27.single.json"},
      {"mixed", "Reading", "mixed.full.json"},
      {"mixed", "Reading", "mixed.sparse.json"},
      {"aligned", "Frame", "aligned.frame.json"},
  };
  return cases;
}

TEST(Encode, ByteInteger) {
  const CodecPlan plan = must_compile(module("T ::= INTEGER (0 .. 255)"), acn_module("T []"), "T");
  AcnCodec c = fresh(4);
  auto r = encode(plan, Value::integer(5), c);
  ASSERT_TRUE(r.ok()) << r.error().describe();
  EXPECT_EQ(r->bit_length, 8u);
  EXPECT_EQ(r->bytes, std::vector<std::uint8_t>{0x05});

  AcnCodec d = over({0x05});
  auto v = decode(plan, d);
  ASSERT_TRUE(v.ok());
  EXPECT_EQ(*v, Value::integer(5));
  EXPECT_EQ(d.bit_index(), 8u);
}

TEST(Encode, OutOfRangeIsConstraintError) {
  const CodecPlan plan = must_compile(module("T ::= INTEGER (0 .. 255)"), acn_module("T []"), "T");
  AcnCodec c = fresh(4);
  auto r = encode(plan, Value::integer(300), c);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.error().code, ErrorCode::kConstraint);
}

TEST(Encode, NeedsMaxBitsOfRoom) {
  const CodecPlan plan = must_compile(module("T ::= INTEGER (0 .. 4294967295)"),
                                      acn_module("T [size 32, encoding pos-int]"), "T");
  AcnCodec c = fresh(3);
  auto r = encode(plan, Value::integer(1), c);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.error().code, ErrorCode::kInsufficientBuffer);
}

TEST(Decode, TruncatedBuffer) {
  const CodecPlan plan = must_compile(module("T ::= INTEGER (0 .. 4294967295)"),
                                      acn_module("T [size 32, encoding pos-int]"), "T");
  AcnCodec d = over({0x00, 0x01});
  auto v = decode(plan, d);
  ASSERT_FALSE(v.ok());
  EXPECT_EQ(v.error().code, ErrorCode::kInsufficientBuffer);
}

TEST(Encode, Tc27SynthesizesSizeAndDeterminants) {
  const CodecPlan plan = fixture_plan("tc27", "TC-2-7-DistrPhysicalDevCmds");
  AcnCodec c = fresh(256);
  auto r = encode(plan, fixture_value("tc27.cmds1.json"), c);
  ASSERT_TRUE(r.ok()) << r.error().describe();
  // n = 2 as 32-bit big endian, then per command: device id, protoData, cmdData.
  const std::vector<std::uint8_t> expected = {0, 0, 0, 2, 1, 7, 200, 1, 0, 255};
  EXPECT_EQ(r->bytes, expected);
  EXPECT_EQ(r->bit_length, 80u);

  AcnCodec d = over(r->bytes);
  SlotValues slots;
  auto v = decode(plan, d, &slots);
  ASSERT_TRUE(v.ok()) << v.error().describe();
  auto canon = conform(plan, fixture_value("tc27.cmds1.json"));
  ASSERT_TRUE(canon.ok());
  EXPECT_EQ(print_value_json(*v), print_value_json(*canon));
  ASSERT_EQ(slots.size(), 3u);
  EXPECT_EQ(slots[0].first, "n");
  EXPECT_EQ(slots[0].second, Value::integer(2));
  EXPECT_EQ(slots[2].first, "physicalDevCmds[1].physicalDev-ID");
  EXPECT_EQ(slots[2].second, Value::enumerated("dev1"));
}

TEST(Decode, UnmappedDeterminantIsCleanError) {
  const CodecPlan plan = fixture_plan("tc27", "TC-2-7-DistrPhysicalDevCmds");
  // Device id 2 (dev2) has no alternative in either CHOICE.
  AcnCodec d = over({0, 0, 0, 1, 2, 7, 9});
  auto v = decode(plan, d);
  ASSERT_FALSE(v.ok());
  EXPECT_EQ(v.error().code, ErrorCode::kDeterminant);
  EXPECT_NE(v.error().message.find("dev2"), std::string::npos) << v.error().message;
}

TEST(Decode, ChoiceIndexPastAlternatives) {
  const CodecPlan plan = must_compile(module("T ::= CHOICE { a NULL, b NULL, c NULL }"), acn_module("T []"), "T");
  AcnCodec d = over({0xC0});
  auto v = decode(plan, d);
  ASSERT_FALSE(v.ok());
  EXPECT_EQ(v.error().code, ErrorCode::kDeterminant);
}

TEST(Decode, ListLengthPastRange) {
  const CodecPlan plan =
      must_compile(module("T ::= SEQUENCE (SIZE(0 .. 2)) OF BOOLEAN"), acn_module("T []"), "T");
  AcnCodec d = over({0xC0});
  auto v = decode(plan, d);
  ASSERT_FALSE(v.ok());
  EXPECT_EQ(v.error().code, ErrorCode::kDecodeConstraint);
}

TEST(Decode, DeviceIdOutsideEnumeration) {
  const CodecPlan plan = fixture_plan("tc27", "TC-2-7-DistrPhysicalDevCmds");
  AcnCodec d = over({0, 0, 0, 1, 9, 7, 9});
  auto v = decode(plan, d);
  ASSERT_FALSE(v.ok());
  EXPECT_EQ(v.error().code, ErrorCode::kDecodeConstraint);
}

TEST(Decode, SizeSlotOutsideRange) {
  const CodecPlan plan = fixture_plan("tc27", "TC-2-7-DistrPhysicalDevCmds");
  for (std::uint8_t n : {0, 64}) {
    std::vector<std::uint8_t> bytes(2048, 1);
    bytes[0] = bytes[1] = bytes[2] = 0;
    bytes[3] = n;
    AcnCodec e = over(bytes);
    auto v = decode(plan, e);
    ASSERT_FALSE(v.ok());
    EXPECT_EQ(v.error().code, ErrorCode::kDecodeConstraint) << v.error().describe();
  }
}

TEST(Encode, DeterminantMismatchNamesPath) {
  const CodecPlan plan = must_compile(
      module("T ::= SEQUENCE { a A, b A }\nA ::= CHOICE { x INTEGER (0 .. 3), y BOOLEAN }\n"
             "K ::= ENUMERATED { x, y }"),
      acn_module("T [] { k K [], a<k> [], b<k> [] }\nA<K: d> [determinant d] { x [], y [] }"), "T");
  // One determinant cannot select two different alternatives.
  AcnCodec c = fresh(16);
  auto r = encode(plan, must_parse(R"({"a": {"x": 1}, "b": {"y": true}})"), c);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.error().code, ErrorCode::kConstraint);
  EXPECT_EQ(r.error().message.rfind("k: ", 0), 0u) << r.error().message;

  auto same = encode(plan, must_parse(R"({"a": {"y": false}, "b": {"y": true}})"), c);
  ASSERT_TRUE(same.ok()) << same.error().describe();
  EXPECT_EQ(same->bit_length, 1u + 1u + 1u);
  const auto v = check_constraints(plan, must_parse(R"({"a": {"x": 1}, "b": {"y": true}})"));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].path, "k");
}

TEST(Encode, ShapeErrors) {
  const CodecPlan plan = fixture_plan("tc27", "TC-2-7-DistrPhysicalDevCmds");
  AcnCodec c = fresh(1024);
  auto with_n = encode(plan, must_parse(R"({"n": 1, "physicalDevCmds": []})"), c);
  ASSERT_FALSE(with_n.ok());
  EXPECT_EQ(with_n.error().code, ErrorCode::kShapeMismatch);
  auto unknown_alt = encode(
      plan, must_parse(R"({"physicalDevCmds": [{"protoData": {"dev9": 1}, "cmdData": {"dev1": 1}}]})"), c);
  ASSERT_FALSE(unknown_alt.ok());
  EXPECT_EQ(unknown_alt.error().code, ErrorCode::kShapeMismatch);
  auto missing = encode(plan, must_parse("{}"), c);
  ASSERT_FALSE(missing.ok());
  EXPECT_EQ(missing.error().code, ErrorCode::kShapeMismatch);
}

TEST(Encode, FailureLeavesPriorBitsIntact) {
  const CodecPlan plan = fixture_plan("mixed", "Reading");
  Value v = fixture_value("mixed.full.json");
  auto bad = parse_value_json(R"({"text": "oÿ"})");
  ASSERT_TRUE(bad.ok());
  auto& fields = std::get<RecordV>(v.data()).fields;
  for (auto& f : fields) {
    if (f.name == "payload") f.value = *bad;
  }
  std::vector<std::uint8_t> init(200, 0xA5);
  AcnCodec c = over(init);
  ASSERT_TRUE(c.stream().set_bit_index(13).ok());
  auto r = encode(plan, v, c);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.error().code, ErrorCode::kCharOutOfRange);
  EXPECT_NE(r.error().message.find("payload.text"), std::string::npos) << r.error().message;
  auto same = bit_ranges_equal(init, c.stream().buffer(), 0, 13);
  ASSERT_TRUE(same.ok());
  EXPECT_TRUE(*same);
}

TEST(SizeOf, AlignedBool) {
  const CodecPlan plan =
      must_compile(module("T ::= BOOLEAN"), acn_module("T [align-to-next byte]"), "T");
  EXPECT_EQ(*size_of(plan, Value::boolean(true), 3), 6u);
  EXPECT_EQ(*size_of(plan, Value::boolean(true), 8), 1u);
  for (std::uint64_t off = 0; off < 32; ++off) {
    auto r = roundtrip_check(plan, Value::boolean(off % 2 == 0), {off, 8, off});
    EXPECT_TRUE(r.passed()) << off << " " << r.first_failure();
  }
}

TEST(SizeOf, ListWithExternalSize) {
  const CodecPlan plan = must_compile(
      module("T ::= SEQUENCE { xs SEQUENCE (SIZE(0 .. 10)) OF INTEGER (0 .. 16777215) }"),
      acn_module("T [] { n INTEGER [size 32, encoding pos-int], xs [size n] { [size 24, encoding pos-int] } }"),
      "T");
  for (std::int64_t k = 0; k <= 10; ++k) {
    std::vector<Value> items;
    for (std::int64_t i = 0; i < k; ++i) items.push_back(Value::integer(i * 1000));
    const Value v = Value::record({{"xs", Value::list(items)}});
    auto s = size_of(plan, v, 0);
    ASSERT_TRUE(s.ok()) << s.error().describe();
    EXPECT_EQ(*s, static_cast<std::uint64_t>(32 + 24 * k));
    EXPECT_EQ(*size_of(plan, v, 8), *s);
  }
}

TEST(SizeOf, ShapeMismatch) {
  const CodecPlan plan = must_compile(module("T ::= INTEGER (0 .. 255)"), acn_module("T []"), "T");
  auto s = size_of(plan, Value::boolean(true), 0);
  ASSERT_FALSE(s.ok());
  EXPECT_EQ(s.error().code, ErrorCode::kShapeMismatch);
}

TEST(Constraints, Violations) {
  const CodecPlan plan = fixture_plan("mixed", "Reading");
  EXPECT_TRUE(check_constraints(plan, fixture_value("mixed.full.json")).empty());

  Value v = fixture_value("mixed.full.json");
  for (auto& f : std::get<RecordV>(v.data()).fields) {
    if (f.name == "label") f.value = Value::string("AB_12");
    if (f.name == "sensor") f.value = Value::integer(2000);
  }
  const auto out = check_constraints(plan, v);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].path, "sensor");
  EXPECT_EQ(out[1].path, "label");
  EXPECT_NE(out[1].message.find("index 2"), std::string::npos) << out[1].message;

  const CodecPlan tc = fixture_plan("tc27", "TC-2-7-DistrPhysicalDevCmds");
  const auto empty = check_constraints(tc, must_parse(R"({"physicalDevCmds": []})"));
  ASSERT_EQ(empty.size(), 1u);
  EXPECT_EQ(empty[0].path, "physicalDevCmds");
}

TEST(Roundtrip, FixturesAtEveryOffset) {
  for (const auto& c : fixture_cases()) {
    const CodecPlan plan = fixture_plan(c.stem, c.type);
    const Value v = fixture_value(c.value);
    ASSERT_TRUE(check_constraints(plan, v).empty()) << c.value;
    for (std::uint64_t off = 0; off < 32; ++off) {
      RoundtripOptions o;
      o.offset_bits = off;
      o.seed = off + 1;
      const RoundtripReport r = roundtrip_check(plan, v, o);
      ASSERT_EQ(r.contracts.size(), contract_names().size()) << c.value << " @" << off;
      for (const auto& k : r.contracts) {
        EXPECT_TRUE(k.passed) << c.value << " @" << off << " " << k.name << ": " << k.detail;
      }
    }
  }
}

TEST(Roundtrip, AlignedSizeDependsOnResidue) {
  const CodecPlan plan = fixture_plan("aligned", "Frame");
  const Value v = fixture_value("aligned.frame.json");
  for (std::uint64_t off = 0; off < 32; ++off) {
    EXPECT_EQ(*size_of(plan, v, off), *size_of(plan, v, off + 32));
  }
}

TEST(Roundtrip, CorruptedDecoderFailsValueEquality) {
  const CodecPlan plan = fixture_plan("tc27", "TC-2-7-DistrPhysicalDevCmds");
  RoundtripOptions o;
  o.decoder = [](const CodecPlan& p, AcnCodec& c) -> Result<Value> {
    ACNKIT_ASSIGN_OR_RETURN(Value v, decode(p, c));
    auto& items = std::get<ListV>(std::get<RecordV>(v.data()).fields[0].value.data()).items;
    items.pop_back();
    return v;
  };
  const RoundtripReport r = roundtrip_check(plan, fixture_value("tc27.cmds1.json"), o);
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.first_failure(), "value-equality");
}

TEST(Roundtrip, NanPatternsSurvive) {
  const CodecPlan plan = must_compile(module("T ::= REAL"), acn_module("T [encoding IEEE754-1985-32]"), "T");
  for (std::uint64_t p : {0x7FC00001ull, 0xFF800001ull, 0x7F800000ull}) {
    const RoundtripReport r = roundtrip_check(plan, Value::real(p, 32), {5, 8, 1});
    EXPECT_TRUE(r.passed()) << r.first_failure();
  }
}

}  // namespace
}  // namespace acnkit
