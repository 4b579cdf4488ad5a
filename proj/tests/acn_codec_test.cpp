#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "acnkit/acn_codec.hpp"

namespace acnkit {
namespace {

using Bytes = std::vector<std::uint8_t>;

AcnCodec codec_at(std::size_t bytes, std::uint64_t offset) {
  auto c = AcnCodec::create(bytes).value();
  EXPECT_TRUE(c.move_bit_index(static_cast<std::int64_t>(offset)).ok());
  return c;
}

Bytes from_hex(const std::string& hex) {
  Bytes out;
  if (hex == "-") return out;
  for (std::size_t i = 0; i + 1 < hex.size(); i += 2) {
    out.push_back(static_cast<std::uint8_t>(std::stoul(hex.substr(i, 2), nullptr, 16)));
  }
  return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) return "-";
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (auto b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 15]);
  }
  return out;
}

Bytes str_bytes(std::string_view s) { return {s.begin(), s.end()}; }

TEST(BitsNeeded, Values) {
  EXPECT_EQ(bits_needed(0), 0u);
  EXPECT_EQ(bits_needed(1), 1u);
  EXPECT_EQ(bits_needed(2), 2u);
  EXPECT_EQ(bits_needed(7), 3u);
  EXPECT_EQ(bits_needed(8), 4u);
  EXPECT_EQ(bits_needed(255), 8u);
  EXPECT_EQ(bits_needed(256), 9u);
  EXPECT_EQ(bits_needed(~std::uint64_t{0}), 64u);
}

TEST(Uint2Int, AllWidths) {
  EXPECT_EQ(uint2int(0xFF, 1), -1);
  EXPECT_EQ(uint2int(0x7F, 1), 127);
  EXPECT_EQ(uint2int(0x80, 1), -128);
  EXPECT_EQ(uint2int(0x8000, 2), -32768);
  EXPECT_EQ(uint2int(0x800000, 3), -8388608);
  EXPECT_EQ(uint2int(0x7FFFFF, 3), 8388607);
  EXPECT_EQ(uint2int(0xFFFFFFFF, 4), -1);
  EXPECT_EQ(uint2int(0x8000000000ull, 5), -(std::int64_t{1} << 39));
  EXPECT_EQ(uint2int(0xFFFFFFFFFFFFull, 6), -1);
  EXPECT_EQ(uint2int(0x80000000000000ull, 7), -(std::int64_t{1} << 55));
  EXPECT_EQ(uint2int(0x8000000000000000ull, 8), std::numeric_limits<std::int64_t>::min());
  // Bits above the width are ignored.
  EXPECT_EQ(uint2int(0xAB01, 1), 1);
}

TEST(Uint2Int, InverseOfInt2Uint) {
  std::mt19937_64 rng(3);
  for (unsigned nb = 1; nb <= 8; ++nb) {
    for (int i = 0; i < 500; ++i) {
      const auto v = sign_extend(rng(), nb * 8);
      EXPECT_EQ(uint2int(int2uint(v, nb), nb), v);
      EXPECT_EQ(sign_extend(int2uint(v, nb), nb * 8), v);
    }
  }
}

TEST(AlphabetTest, Validation) {
  EXPECT_EQ(Alphabet::create("").error().code, ErrorCode::kInvalidArgument);
  EXPECT_EQ(Alphabet::create("AA").error().code, ErrorCode::kInvalidArgument);
  EXPECT_EQ(Alphabet::create("A\xC3").error().code, ErrorCode::kCharOutOfRange);
  auto a = Alphabet::create("XYZ").value();
  EXPECT_EQ(a.bits_per_char(), 2u);
  EXPECT_EQ(a.index_of('Z'), 2u);
  EXPECT_FALSE(a.contains('A'));
  EXPECT_EQ(Alphabet::create("Q").value().bits_per_char(), 0u);
  EXPECT_EQ(Alphabet::ascii().bits_per_char(), 7u);
}

TEST(ConstrainedNumber, Examples) {
  auto c = codec_at(1, 0);
  ASSERT_TRUE(c.encode_constrained_pos_whole_number(5, 0, 7).ok());
  EXPECT_EQ(c.bit_index(), 3u);
  EXPECT_EQ(c.stream().buffer()[0], 0b1010'0000);

  auto w = codec_at(4, 0);
  ASSERT_TRUE(w.encode_constrained_pos_whole_number(255, 0, 255).ok());
  EXPECT_EQ(w.bit_index(), 8u);

  auto empty_range = codec_at(1, 0);
  ASSERT_TRUE(empty_range.encode_constrained_pos_whole_number(3, 3, 3).ok());
  EXPECT_EQ(empty_range.bit_index(), 0u);

  auto bad = codec_at(1, 0);
  EXPECT_EQ(bad.encode_constrained_pos_whole_number(8, 0, 7).error().code, ErrorCode::kConstraint);
  EXPECT_EQ(bad.bit_index(), 0u);
}

TEST(ConstrainedNumber, DecodeRejectsOutOfRangeOffset) {
  auto c = AcnCodec(BitStream::wrap({0b1110'0000}).value());
  // 3 bits hold 7, but the range only admits offsets 0..5.
  EXPECT_EQ(c.decode_constrained_pos_whole_number(10, 15).error().code,
            ErrorCode::kDecodeConstraint);
  auto s = AcnCodec(BitStream::wrap({0b1110'0000}).value());
  EXPECT_EQ(s.decode_constrained_whole_number(-3, 2).error().code, ErrorCode::kDecodeConstraint);
}

TEST(ConstrainedNumber, SignedExtremes) {
  const auto lo = std::numeric_limits<std::int64_t>::min();
  const auto hi = std::numeric_limits<std::int64_t>::max();
  auto c = codec_at(8, 0);
  ASSERT_TRUE(c.encode_constrained_whole_number(-1, lo, hi).ok());
  EXPECT_EQ(c.bit_index(), 64u);
  auto r = c.reset_at(codec_at(8, 0)).value();
  EXPECT_EQ(r.decode_constrained_whole_number(lo, hi).value(), -1);
}

TEST(UintConstSize, AlignedBigEndian) {
  auto c = codec_at(4, 0);
  ASSERT_TRUE(c.enc_uint_const_size_aligned(0x01020304, 32).ok());
  EXPECT_EQ(to_hex(c.stream().buffer()), "01020304");
  EXPECT_EQ(c.enc_uint_const_size_aligned(1, 8).error().code, ErrorCode::kBounds);
  auto d = codec_at(2, 0);
  EXPECT_EQ(d.enc_uint_const_size_aligned(0x100, 8).error().code, ErrorCode::kValueTooWide);
  EXPECT_EQ(d.enc_uint_const_size_aligned(1, 12).error().code, ErrorCode::kInvalidArgument);
}

TEST(UintConstSize, ArbitraryWidth) {
  auto c = codec_at(2, 0);
  ASSERT_TRUE(c.enc_uint_const_size(0b10110, 5).ok());
  EXPECT_EQ(c.stream().buffer()[0], 0b1011'0000);
  EXPECT_EQ(c.enc_uint_const_size(4, 2).error().code, ErrorCode::kValueTooWide);
  EXPECT_EQ(c.enc_uint_const_size(0, 0).error().code, ErrorCode::kInvalidArgument);
}

TEST(TwosComplement, Examples) {
  auto c = codec_at(1, 0);
  ASSERT_TRUE(c.enc_int_twos_complement_const_size_aligned(-1, 8).ok());
  EXPECT_EQ(c.stream().buffer()[0], 0xFF);

  auto d = codec_at(1, 0);
  ASSERT_TRUE(d.enc_int_twos_complement_const_size(-2, 3).ok());
  EXPECT_EQ(d.stream().buffer()[0], 0b1100'0000);
  auto r = d.reset_at(codec_at(1, 0)).value();
  EXPECT_EQ(r.dec_int_twos_complement_const_size(3).value(), -2);

  auto e = codec_at(1, 0);
  EXPECT_EQ(e.enc_int_twos_complement_const_size(4, 3).error().code, ErrorCode::kValueTooWide);
  EXPECT_EQ(e.enc_int_twos_complement_const_size(-5, 3).error().code, ErrorCode::kValueTooWide);
  EXPECT_EQ(e.enc_int_twos_complement_const_size_aligned(128, 8).error().code,
            ErrorCode::kValueTooWide);
}

TEST(RealIeee754, EndiannessAndPatterns) {
  float f = 1.0f;
  std::uint32_t bits32 = 0;
  std::memcpy(&bits32, &f, sizeof f);
  auto big = codec_at(4, 0);
  ASSERT_TRUE(big.enc_real_ieee754(bits32, 32, Endianness::kBig).ok());
  EXPECT_EQ(to_hex(big.stream().buffer()), "3f800000");
  auto little = codec_at(4, 0);
  ASSERT_TRUE(little.enc_real_ieee754(bits32, 32, Endianness::kLittle).ok());
  EXPECT_EQ(to_hex(little.stream().buffer()), "0000803f");

  auto c = codec_at(8, 0);
  EXPECT_EQ(c.enc_real_ieee754(0x1'0000'0000ull, 32, Endianness::kBig).error().code,
            ErrorCode::kValueTooWide);
  EXPECT_EQ(c.enc_real_ieee754(0, 16, Endianness::kBig).error().code,
            ErrorCode::kInvalidArgument);
}

// NaN payloads survive as raw patterns: a float comparison would always fail.
TEST(RealIeee754, NanPatternRoundtrips) {
  const std::uint64_t quiet_payload = 0x7FF8'0000'0000'0ABCull;
  const std::uint64_t signalling_neg = 0xFFF0'0000'0000'0001ull;
  for (auto pattern : {quiet_payload, signalling_neg}) {
    double d = 0;
    std::memcpy(&d, &pattern, sizeof d);
    ASSERT_TRUE(std::isnan(d));
    for (auto e : {Endianness::kBig, Endianness::kLittle}) {
      auto c = codec_at(9, 3);
      const auto start = c;
      ASSERT_TRUE(c.enc_real_ieee754(pattern, 64, e).ok());
      auto r = c.reset_at(start).value();
      EXPECT_EQ(r.dec_real_ieee754(64, e).value(), pattern);
    }
  }
}

TEST(AsciiNullTerminated, Example) {
  const Bytes pattern = {0x00};
  auto c = codec_at(3, 0);
  ASSERT_TRUE(c.enc_string_ascii_null_terminated(str_bytes("hi"), 5, pattern).ok());
  EXPECT_EQ(to_hex(c.stream().buffer()), "686900");
  auto r = c.reset_at(codec_at(3, 0)).value();
  EXPECT_EQ(r.dec_string_ascii_null_terminated(5, pattern).value(), str_bytes("hi"));
}

TEST(AsciiNullTerminated, Errors) {
  const Bytes pattern = {0x00};
  auto c = codec_at(16, 0);
  EXPECT_EQ(c.enc_string_ascii_null_terminated(str_bytes("toolong"), 3, pattern).error().code,
            ErrorCode::kStringTooLong);
  const Bytes high = {'a', 0xC8};
  EXPECT_EQ(c.enc_string_ascii_null_terminated(high, 5, pattern).error().code,
            ErrorCode::kCharOutOfRange);
  const Bytes with_nul = {'a', 0x00, 'b'};
  EXPECT_EQ(c.enc_string_ascii_null_terminated(with_nul, 5, pattern).error().code,
            ErrorCode::kNullPatternCollision);
  EXPECT_EQ(c.enc_string_ascii_null_terminated(str_bytes("a"), 5, Bytes{}).error().code,
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(c.bit_index(), 0u);

  auto small = codec_at(2, 0);
  EXPECT_EQ(small.enc_string_ascii_null_terminated(str_bytes("ab"), 5, pattern).error().code,
            ErrorCode::kBounds);
  EXPECT_EQ(small.bit_index(), 0u);
}

// A multi-byte pattern whose prefix is a suffix of the text must not end the
// string early.
TEST(AsciiNullTerminated, OverlappingPattern) {
  const Bytes pattern = {'a', 'b'};
  EXPECT_TRUE(terminator_is_unambiguous(str_bytes("xa"), pattern));
  EXPECT_FALSE(terminator_is_unambiguous(str_bytes("abx"), pattern));
  // "a" + "aa": the decoder would stop one byte early.
  EXPECT_FALSE(terminator_is_unambiguous(str_bytes("a"), Bytes{'a', 'a'}));
  // "a" + "ab" = "aab": first "ab" is at index 1 == size, so it decodes.
  EXPECT_TRUE(terminator_is_unambiguous(str_bytes("a"), pattern));
  auto c = codec_at(8, 0);
  ASSERT_TRUE(c.enc_string_ascii_null_terminated(str_bytes("a"), 4, pattern).ok());
  auto r = c.reset_at(codec_at(8, 0)).value();
  EXPECT_EQ(r.dec_string_ascii_null_terminated(4, pattern).value(), str_bytes("a"));
}

TEST(AsciiNullTerminated, DecodeRejectsHighBytes) {
  auto c = AcnCodec(BitStream::wrap({'o', 0xE9, 0x00}).value());
  EXPECT_EQ(c.dec_string_ascii_null_terminated(5, Bytes{0x00}).error().code,
            ErrorCode::kCharOutOfRange);
}

TEST(AsciiNullTerminated, DecodeMissingTerminator) {
  auto c = AcnCodec(BitStream::wrap({'a', 'b', 'c', 'd', 0x00}).value());
  EXPECT_EQ(c.dec_string_ascii_null_terminated(2, Bytes{0x00}).error().code,
            ErrorCode::kMissingTerminator);
}

TEST(CharIndex, Examples) {
  const auto abc = Alphabet::create("ABC").value();
  auto c = codec_at(2, 0);
  ASSERT_TRUE(c.enc_string_char_index_internal(str_bytes("CAB"), abc, 0, 3).ok());
  // length 3 in 2 bits, then 10 00 01.
  EXPECT_EQ(c.bit_index(), 8u);
  EXPECT_EQ(c.stream().buffer()[0], 0b1110'0001);

  auto e = codec_at(2, 0);
  EXPECT_EQ(e.enc_string_char_index_internal(str_bytes("AD"), abc, 0, 3).error().code,
            ErrorCode::kCharNotInAlphabet);
  EXPECT_EQ(e.enc_string_char_index_internal(str_bytes("AAAA"), abc, 0, 3).error().code,
            ErrorCode::kConstraint);
  EXPECT_EQ(e.enc_string_char_index_external(str_bytes("AB"), abc, 5, 3).error().code,
            ErrorCode::kLengthMismatch);
  EXPECT_EQ(e.bit_index(), 0u);
}

TEST(CharIndex, DecodeRejectsIndexOutsideAlphabet) {
  const auto abc = Alphabet::create("ABC").value();
  auto c = AcnCodec(BitStream::wrap({0b1100'0000}).value());
  EXPECT_EQ(c.dec_string_char_index_external(abc, 4, 1).error().code,
            ErrorCode::kDecodeConstraint);
}

TEST(Alignment, PadsToBoundary) {
  auto c = codec_at(4, 3);
  ASSERT_TRUE(c.align_to(8).ok());
  EXPECT_EQ(c.bit_index(), 8u);
  ASSERT_TRUE(c.align_to(8).ok());
  EXPECT_EQ(c.bit_index(), 8u);
  ASSERT_TRUE(c.align_to(32).ok());
  EXPECT_EQ(c.bit_index(), 32u);
  EXPECT_EQ(AcnCodec::padding_bits(17, 16), 15u);
}

// Padding must be checked against the remaining space, and must really
// write zeroes rather than skipping over stale bits.
TEST(Alignment, WritesZeroesAndChecksSpace) {
  auto dirty = AcnCodec(BitStream::wrap({0xFF, 0xFF}).value());
  ASSERT_TRUE(dirty.move_bit_index(1).ok());
  ASSERT_TRUE(dirty.align_to(8).ok());
  EXPECT_EQ(dirty.stream().buffer()[0], 0x80);

  auto tight = codec_at(1, 3);
  EXPECT_EQ(tight.align_to(16).error().code, ErrorCode::kBounds);
  EXPECT_EQ(tight.bit_index(), 3u);

  auto reader = AcnCodec(BitStream::wrap({0xFF}).value());
  ASSERT_TRUE(reader.move_bit_index(5).ok());
  EXPECT_EQ(reader.skip_alignment(16).error().code, ErrorCode::kBounds);
}

// Replays vectors produced by make_primitive_vectors.py.
TEST(GoldenVectors, MatchPythonOracle) {
  std::ifstream in(ACNKIT_TEST_DATA_DIR "/golden/acn_primitives.txt");
  ASSERT_TRUE(in.good());
  std::string line;
  int cases = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto arrow = line.find(" -> ");
    ASSERT_NE(arrow, std::string::npos) << line;
    std::istringstream args(line.substr(0, arrow));
    std::istringstream expect(line.substr(arrow + 4));
    std::string op, want_hex;
    std::uint64_t offset = 0, want_end = 0;
    args >> op >> offset;
    expect >> want_hex >> want_end;
    const Bytes want = from_hex(want_hex);
    const std::size_t cap = want.size();

    auto c = codec_at(cap, offset);
    const auto start = c;
    auto check = [&](const Status& st) {
      ASSERT_TRUE(st.ok()) << line << ": " << st.error().describe();
      EXPECT_EQ(to_hex(c.stream().buffer()), want_hex) << line;
      EXPECT_EQ(c.bit_index(), want_end) << line;
    };
    auto reader = [&] { return c.reset_at(start).value(); };

    if (op == "cpwn") {
      std::uint64_t v, lo, hi;
      args >> v >> lo >> hi;
      check(c.encode_constrained_pos_whole_number(v, lo, hi));
      EXPECT_EQ(reader().decode_constrained_pos_whole_number(lo, hi).value(), v) << line;
    } else if (op == "cwn") {
      std::int64_t v, lo, hi;
      args >> v >> lo >> hi;
      check(c.encode_constrained_whole_number(v, lo, hi));
      EXPECT_EQ(reader().decode_constrained_whole_number(lo, hi).value(), v) << line;
    } else if (op == "uint_aligned" || op == "uint") {
      std::uint64_t v;
      unsigned w;
      args >> v >> w;
      if (op == "uint_aligned") {
        check(c.enc_uint_const_size_aligned(v, w));
        EXPECT_EQ(reader().dec_uint_const_size_aligned(w).value(), v) << line;
      } else {
        check(c.enc_uint_const_size(v, w));
        EXPECT_EQ(reader().dec_uint_const_size(w).value(), v) << line;
      }
    } else if (op == "twos_aligned" || op == "twos") {
      std::int64_t v;
      unsigned w;
      args >> v >> w;
      if (op == "twos_aligned") {
        check(c.enc_int_twos_complement_const_size_aligned(v, w));
        EXPECT_EQ(reader().dec_int_twos_complement_const_size_aligned(w).value(), v) << line;
      } else {
        check(c.enc_int_twos_complement_const_size(v, w));
        EXPECT_EQ(reader().dec_int_twos_complement_const_size(w).value(), v) << line;
      }
    } else if (op == "real") {
      std::uint64_t p;
      unsigned w;
      std::string endian;
      args >> p >> w >> endian;
      const auto e = endian == "big" ? Endianness::kBig : Endianness::kLittle;
      check(c.enc_real_ieee754(p, w, e));
      EXPECT_EQ(reader().dec_real_ieee754(w, e).value(), p) << line;
    } else if (op == "ascii_null") {
      std::string s_hex, pat_hex;
      std::uint64_t max_len;
      args >> s_hex >> max_len >> pat_hex;
      const Bytes s = from_hex(s_hex), pat = from_hex(pat_hex);
      check(c.enc_string_ascii_null_terminated(s, max_len, pat));
      EXPECT_EQ(reader().dec_string_ascii_null_terminated(max_len, pat).value(), s) << line;
    } else if (op == "char_internal") {
      std::string a_hex, s_hex;
      std::uint64_t lo, hi;
      args >> a_hex >> s_hex >> lo >> hi;
      const Bytes a = from_hex(a_hex), s = from_hex(s_hex);
      const auto alpha = Alphabet::create(std::string(a.begin(), a.end())).value();
      check(c.enc_string_char_index_internal(s, alpha, lo, hi));
      EXPECT_EQ(reader().dec_string_char_index_internal(alpha, lo, hi).value(), s) << line;
    } else if (op == "char_external") {
      std::string a_hex, s_hex;
      std::uint64_t hi;
      args >> a_hex >> s_hex >> hi;
      const Bytes a = from_hex(a_hex), s = from_hex(s_hex);
      const auto alpha = Alphabet::create(std::string(a.begin(), a.end())).value();
      check(c.enc_string_char_index_external(s, alpha, hi, s.size()));
      EXPECT_EQ(reader().dec_string_char_index_external(alpha, hi, s.size()).value(), s) << line;
    } else if (op == "align") {
      unsigned m;
      args >> m;
      check(c.align_to(m));
      auto r = reader();
      ASSERT_TRUE(r.skip_alignment(m).ok());
      EXPECT_EQ(r.bit_index(), want_end) << line;
    } else {
      FAIL() << "unknown op " << op;
    }
    ++cases;
  }
  EXPECT_GT(cases, 300);
}

// Encoders must leave everything outside [cursor, cursor + size) alone and
// decoders must consume exactly what was written, at any offset.
TEST(CodecProperty, RoundtripAndExactAdvance) {
  std::mt19937_64 rng(42);
  const auto digits = Alphabet::create("0123456789").value();
  for (int trial = 0; trial < 3000; ++trial) {
    const unsigned offset = rng() % 32;
    Bytes noise(24);
    for (auto& b : noise) b = static_cast<std::uint8_t>(rng());
    auto c = AcnCodec(BitStream::wrap(noise).value());
    ASSERT_TRUE(c.move_bit_index(offset).ok());
    const auto start = c;

    const unsigned n = 1 + rng() % 40;
    const std::uint64_t u = rng() >> (64 - n);
    const std::int64_t s = sign_extend(rng(), n);
    Bytes str(rng() % 6);
    for (auto& ch : str) ch = static_cast<std::uint8_t>('0' + rng() % 10);

    ASSERT_TRUE(c.enc_uint_const_size(u, n).ok());
    ASSERT_TRUE(c.enc_int_twos_complement_const_size(s, n).ok());
    ASSERT_TRUE(c.enc_string_char_index_internal(str, digits, 0, 5).ok());
    const std::uint64_t expected = 2ull * n + 3 + 4 * str.size();
    EXPECT_EQ(c.bit_index(), offset + expected);
    EXPECT_EQ(c.stream().buffer_length(), noise.size());
    EXPECT_TRUE(start.stream().is_prefix_of(c.stream()).value());
    EXPECT_TRUE(bit_ranges_equal(noise, {c.stream().buffer().begin(), c.stream().buffer().end()},
                                 offset + expected, noise.size() * 8)
                    .value());

    auto r = c.reset_at(start).value();
    EXPECT_EQ(r.dec_uint_const_size(n).value(), u);
    EXPECT_EQ(r.dec_int_twos_complement_const_size(n).value(), s);
    EXPECT_EQ(r.dec_string_char_index_internal(digits, 0, 5).value(), str);
    EXPECT_EQ(r.bit_index(), c.bit_index());
  }
}

}  // namespace
}  // namespace acnkit
