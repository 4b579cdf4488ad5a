#include "acnkit/acn_codec.hpp"

#include <algorithm>
#include <limits>

namespace acnkit {

std::string_view to_string(Endianness e) { return e == Endianness::kBig ? "big" : "little"; }

unsigned bits_needed(std::uint64_t range) {
  unsigned n = 0;
  while (n < 64 && (range >> n) != 0) ++n;
  return n;
}

// Unrolled over the eight byte widths; every case is a fixed mask/sign-bit pair.
std::int64_t uint2int(std::uint64_t v, unsigned num_bytes) {
  switch (num_bytes) {
    case 1:
      return static_cast<std::int8_t>(v & 0xFFu);
    case 2:
      return static_cast<std::int16_t>(v & 0xFFFFu);
    case 3: {
      const std::uint64_t u = v & 0xFFFFFFu;
      return (u & 0x800000u) ? static_cast<std::int64_t>(u | ~std::uint64_t{0xFFFFFF})
                             : static_cast<std::int64_t>(u);
    }
    case 4:
      return static_cast<std::int32_t>(v & 0xFFFFFFFFu);
    case 5: {
      const std::uint64_t u = v & 0xFFFFFFFFFFull;
      return (u & 0x8000000000ull) ? static_cast<std::int64_t>(u | ~0xFFFFFFFFFFull)
                                   : static_cast<std::int64_t>(u);
    }
    case 6: {
      const std::uint64_t u = v & 0xFFFFFFFFFFFFull;
      return (u & 0x800000000000ull) ? static_cast<std::int64_t>(u | ~0xFFFFFFFFFFFFull)
                                     : static_cast<std::int64_t>(u);
    }
    case 7: {
      const std::uint64_t u = v & 0xFFFFFFFFFFFFFFull;
      return (u & 0x80000000000000ull) ? static_cast<std::int64_t>(u | ~0xFFFFFFFFFFFFFFull)
                                       : static_cast<std::int64_t>(u);
    }
    default:
      return static_cast<std::int64_t>(v);
  }
}

std::uint64_t int2uint(std::int64_t v, unsigned num_bytes) {
  const auto u = static_cast<std::uint64_t>(v);
  if (num_bytes >= 8) return u;
  return u & ((std::uint64_t{1} << (8 * num_bytes)) - 1);
}

std::int64_t sign_extend(std::uint64_t v, unsigned n_bits) {
  if (n_bits == 0) return 0;
  if (n_bits >= 64) return static_cast<std::int64_t>(v);
  const std::uint64_t mask = (std::uint64_t{1} << n_bits) - 1;
  const std::uint64_t u = v & mask;
  const std::uint64_t sign = std::uint64_t{1} << (n_bits - 1);
  return (u & sign) ? static_cast<std::int64_t>(u | ~mask) : static_cast<std::int64_t>(u);
}

Result<Alphabet> Alphabet::create(std::string_view chars) {
  if (chars.empty()) return make_error(ErrorCode::kInvalidArgument, "alphabet is empty");
  Alphabet a;
  for (char ch : chars) {
    const auto c = static_cast<std::uint8_t>(ch);
    if (c > 127) {
      return make_error(ErrorCode::kCharOutOfRange, "alphabet code ", unsigned{c}, " is not 7-bit");
    }
    if (a.index_[c] >= 0) {
      return make_error(ErrorCode::kInvalidArgument, "alphabet code ", unsigned{c},
                        " appears twice");
    }
    a.index_[c] = static_cast<std::int16_t>(a.chars_.size());
    a.chars_.push_back(ch);
  }
  return a;
}

Alphabet Alphabet::ascii() {
  Alphabet a;
  for (int c = 0; c < 128; ++c) {
    a.index_[static_cast<std::size_t>(c)] = static_cast<std::int16_t>(c);
    a.chars_.push_back(static_cast<char>(c));
  }
  return a;
}

bool terminator_is_unambiguous(std::span<const std::uint8_t> s,
                               std::span<const std::uint8_t> pattern) {
  std::vector<std::uint8_t> joined(s.begin(), s.end());
  joined.insert(joined.end(), pattern.begin(), pattern.end());
  const auto hit = std::search(joined.begin(), joined.end(), pattern.begin(), pattern.end());
  return static_cast<std::size_t>(hit - joined.begin()) == s.size();
}

Result<AcnCodec> AcnCodec::create(std::size_t capacity_bytes) {
  ACNKIT_ASSIGN_OR_RETURN(BitStream stream, BitStream::create(capacity_bytes));
  return AcnCodec(std::move(stream));
}

Result<AcnCodec> AcnCodec::reset_at(const AcnCodec& other) const {
  ACNKIT_ASSIGN_OR_RETURN(BitStream stream, stream_.reset_at(other.stream_));
  return AcnCodec(std::move(stream));
}

Status AcnCodec::encode_constrained_pos_whole_number(std::uint64_t v, std::uint64_t min,
                                                     std::uint64_t max) {
  if (min > max) return make_error(ErrorCode::kInvalidArgument, "empty range [", min, ", ", max, "]");
  if (v < min || v > max) {
    return make_error(ErrorCode::kConstraint, "value ", v, " outside [", min, ", ", max, "]");
  }
  return stream_.append_lsb_bits_msb_first(v - min, bits_needed(max - min));
}

Result<std::uint64_t> AcnCodec::decode_constrained_pos_whole_number(std::uint64_t min,
                                                                    std::uint64_t max) {
  if (min > max) return make_error(ErrorCode::kInvalidArgument, "empty range [", min, ", ", max, "]");
  ACNKIT_ASSIGN_OR_RETURN(std::uint64_t raw,
                          stream_.read_n_lsb_bits_msb_first(bits_needed(max - min)));
  if (raw > max - min) {
    return make_error(ErrorCode::kDecodeConstraint, "decoded offset ", raw, " exceeds range [",
                      min, ", ", max, "]");
  }
  return min + raw;
}

Status AcnCodec::encode_constrained_whole_number(std::int64_t v, std::int64_t min,
                                                 std::int64_t max) {
  if (min > max) return make_error(ErrorCode::kInvalidArgument, "empty range [", min, ", ", max, "]");
  if (v < min || v > max) {
    return make_error(ErrorCode::kConstraint, "value ", v, " outside [", min, ", ", max, "]");
  }
  const std::uint64_t offset = static_cast<std::uint64_t>(v) - static_cast<std::uint64_t>(min);
  const std::uint64_t range = static_cast<std::uint64_t>(max) - static_cast<std::uint64_t>(min);
  return stream_.append_lsb_bits_msb_first(offset, bits_needed(range));
}

Result<std::int64_t> AcnCodec::decode_constrained_whole_number(std::int64_t min, std::int64_t max) {
  if (min > max) return make_error(ErrorCode::kInvalidArgument, "empty range [", min, ", ", max, "]");
  const std::uint64_t range = static_cast<std::uint64_t>(max) - static_cast<std::uint64_t>(min);
  ACNKIT_ASSIGN_OR_RETURN(std::uint64_t raw, stream_.read_n_lsb_bits_msb_first(bits_needed(range)));
  if (raw > range) {
    return make_error(ErrorCode::kDecodeConstraint, "decoded offset ", raw, " exceeds range [",
                      min, ", ", max, "]");
  }
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(min) + raw);
}

namespace {

Status check_aligned_width(unsigned width) {
  if (width != 8 && width != 16 && width != 32 && width != 64) {
    return make_error(ErrorCode::kInvalidArgument, "aligned width ", width,
                      " is not 8, 16, 32 or 64");
  }
  return {};
}

Status check_bit_width(unsigned n_bits) {
  if (n_bits < 1 || n_bits > 64) {
    return make_error(ErrorCode::kInvalidArgument, "width ", n_bits, " not in 1..64");
  }
  return {};
}

Status check_signed_range(std::int64_t v, unsigned n_bits) {
  if (n_bits >= 64) return {};
  const std::int64_t lo = -(std::int64_t{1} << (n_bits - 1));
  const std::int64_t hi = (std::int64_t{1} << (n_bits - 1)) - 1;
  if (v < lo || v > hi) {
    return make_error(ErrorCode::kValueTooWide, "value ", v, " outside [", lo, ", ", hi,
                      "] for ", n_bits, "-bit two's complement");
  }
  return {};
}

}  // namespace

Status AcnCodec::enc_uint_const_size_aligned(std::uint64_t v, unsigned width) {
  ACNKIT_TRY(check_aligned_width(width));
  if (width < 64 && (v >> width) != 0) {
    return make_error(ErrorCode::kValueTooWide, "value ", v, " does not fit in ", width, " bits");
  }
  if (!stream_.validate_offset_bits(width)) {
    return make_error(ErrorCode::kBounds, "need ", width, " bits, ", stream_.remaining_bits(),
                      " remaining");
  }
  for (unsigned shift = width; shift > 0; shift -= 8) {
    ACNKIT_TRY(stream_.append_byte(static_cast<std::uint8_t>(v >> (shift - 8))));
  }
  return {};
}

Result<std::uint64_t> AcnCodec::dec_uint_const_size_aligned(unsigned width) {
  ACNKIT_TRY(check_aligned_width(width));
  if (!stream_.validate_offset_bits(width)) {
    return make_error(ErrorCode::kBounds, "need ", width, " bits, ", stream_.remaining_bits(),
                      " remaining");
  }
  std::uint64_t v = 0;
  for (unsigned i = 0; i < width / 8; ++i) {
    ACNKIT_ASSIGN_OR_RETURN(std::uint8_t byte, stream_.read_byte());
    v = (v << 8) | byte;
  }
  return v;
}

Status AcnCodec::enc_uint_const_size(std::uint64_t v, unsigned n_bits) {
  ACNKIT_TRY(check_bit_width(n_bits));
  return stream_.append_lsb_bits_msb_first(v, n_bits);
}

Result<std::uint64_t> AcnCodec::dec_uint_const_size(unsigned n_bits) {
  ACNKIT_TRY(check_bit_width(n_bits));
  return stream_.read_n_lsb_bits_msb_first(n_bits);
}

Status AcnCodec::enc_int_twos_complement_const_size_aligned(std::int64_t v, unsigned width) {
  ACNKIT_TRY(check_aligned_width(width));
  ACNKIT_TRY(check_signed_range(v, width));
  return enc_uint_const_size_aligned(int2uint(v, width / 8), width);
}

Result<std::int64_t> AcnCodec::dec_int_twos_complement_const_size_aligned(unsigned width) {
  ACNKIT_ASSIGN_OR_RETURN(std::uint64_t raw, dec_uint_const_size_aligned(width));
  return uint2int(raw, width / 8);
}

Status AcnCodec::enc_int_twos_complement_const_size(std::int64_t v, unsigned n_bits) {
  ACNKIT_TRY(check_bit_width(n_bits));
  ACNKIT_TRY(check_signed_range(v, n_bits));
  const std::uint64_t mask =
      n_bits == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n_bits) - 1;
  return stream_.append_lsb_bits_msb_first(static_cast<std::uint64_t>(v) & mask, n_bits);
}

Result<std::int64_t> AcnCodec::dec_int_twos_complement_const_size(unsigned n_bits) {
  ACNKIT_TRY(check_bit_width(n_bits));
  ACNKIT_ASSIGN_OR_RETURN(std::uint64_t raw, stream_.read_n_lsb_bits_msb_first(n_bits));
  return sign_extend(raw, n_bits);
}

Status AcnCodec::enc_real_ieee754(std::uint64_t pattern, unsigned width, Endianness endianness) {
  if (width != 32 && width != 64) {
    return make_error(ErrorCode::kInvalidArgument, "IEEE-754 width ", width, " is not 32 or 64");
  }
  if (width == 32 && (pattern >> 32) != 0) {
    return make_error(ErrorCode::kValueTooWide, "pattern ", pattern, " is wider than 32 bits");
  }
  if (!stream_.validate_offset_bits(width)) {
    return make_error(ErrorCode::kBounds, "need ", width, " bits, ", stream_.remaining_bits(),
                      " remaining");
  }
  const unsigned n = width / 8;
  for (unsigned i = 0; i < n; ++i) {
    const unsigned byte_index = endianness == Endianness::kBig ? n - 1 - i : i;
    ACNKIT_TRY(stream_.append_byte(static_cast<std::uint8_t>(pattern >> (8 * byte_index))));
  }
  return {};
}

Result<std::uint64_t> AcnCodec::dec_real_ieee754(unsigned width, Endianness endianness) {
  if (width != 32 && width != 64) {
    return make_error(ErrorCode::kInvalidArgument, "IEEE-754 width ", width, " is not 32 or 64");
  }
  if (!stream_.validate_offset_bits(width)) {
    return make_error(ErrorCode::kBounds, "need ", width, " bits, ", stream_.remaining_bits(),
                      " remaining");
  }
  const unsigned n = width / 8;
  std::uint64_t pattern = 0;
  for (unsigned i = 0; i < n; ++i) {
    ACNKIT_ASSIGN_OR_RETURN(std::uint8_t byte, stream_.read_byte());
    const unsigned byte_index = endianness == Endianness::kBig ? n - 1 - i : i;
    pattern |= static_cast<std::uint64_t>(byte) << (8 * byte_index);
  }
  return pattern;
}

namespace {

Status check_null_pattern(std::span<const std::uint8_t> pattern) {
  if (pattern.empty() || pattern.size() > 8) {
    return make_error(ErrorCode::kInvalidArgument, "termination pattern length ", pattern.size(),
                      " not in 1..8");
  }
  return {};
}

}  // namespace

Status AcnCodec::enc_string_ascii_null_terminated(std::span<const std::uint8_t> s,
                                                  std::uint64_t max_len,
                                                  std::span<const std::uint8_t> null_pattern) {
  ACNKIT_TRY(check_null_pattern(null_pattern));
  if (s.size() > max_len) {
    return make_error(ErrorCode::kStringTooLong, "string length ", s.size(), " exceeds ", max_len);
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] > 127) {
      return make_error(ErrorCode::kCharOutOfRange, "byte ", unsigned{s[i]}, " at index ", i,
                        " is outside [0, 127]");
    }
  }
  if (!terminator_is_unambiguous(s, null_pattern)) {
    return make_error(ErrorCode::kNullPatternCollision,
                      "string contents collide with the termination pattern");
  }
  const std::uint64_t total = (static_cast<std::uint64_t>(s.size()) + null_pattern.size()) * 8;
  if (!stream_.validate_offset_bits(total)) {
    return make_error(ErrorCode::kBounds, "need ", total, " bits, ", stream_.remaining_bits(),
                      " remaining");
  }
  ACNKIT_TRY(stream_.append_byte_array(s));
  return stream_.append_byte_array(null_pattern);
}

Result<std::vector<std::uint8_t>> AcnCodec::dec_string_ascii_null_terminated(
    std::uint64_t max_len, std::span<const std::uint8_t> null_pattern) {
  ACNKIT_TRY(check_null_pattern(null_pattern));
  std::vector<std::uint8_t> bytes;
  const std::uint64_t limit = max_len + null_pattern.size();
  while (bytes.size() < limit) {
    ACNKIT_ASSIGN_OR_RETURN(std::uint8_t byte, stream_.read_byte());
    bytes.push_back(byte);
    if (bytes.size() >= null_pattern.size() &&
        std::equal(null_pattern.begin(), null_pattern.end(),
                   bytes.end() - static_cast<std::ptrdiff_t>(null_pattern.size()))) {
      bytes.resize(bytes.size() - null_pattern.size());
      for (std::size_t i = 0; i < bytes.size(); ++i) {
        if (bytes[i] > 127) {
          return make_error(ErrorCode::kCharOutOfRange, "decoded byte ", unsigned{bytes[i]},
                            " at index ", i, " is outside [0, 127]");
        }
      }
      return bytes;
    }
  }
  return make_error(ErrorCode::kMissingTerminator, "no termination pattern within ", limit,
                    " bytes");
}

Status AcnCodec::encode_chars(std::span<const std::uint8_t> s, const Alphabet& alphabet) {
  const unsigned width = alphabet.bits_per_char();
  for (std::uint8_t c : s) {
    ACNKIT_TRY(stream_.append_lsb_bits_msb_first(*alphabet.index_of(c), width));
  }
  return {};
}

Result<std::vector<std::uint8_t>> AcnCodec::decode_chars(const Alphabet& alphabet,
                                                         std::uint64_t count) {
  const unsigned width = alphabet.bits_per_char();
  if (!stream_.validate_offset_bits(count * width)) {
    return make_error(ErrorCode::kBounds, "need ", count * width, " bits, ",
                      stream_.remaining_bits(), " remaining");
  }
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::uint64_t i = 0; i < count; ++i) {
    ACNKIT_ASSIGN_OR_RETURN(std::uint64_t index, stream_.read_n_lsb_bits_msb_first(width));
    if (index >= alphabet.size()) {
      return make_error(ErrorCode::kDecodeConstraint, "character index ", index,
                        " outside the ", alphabet.size(), "-character alphabet");
    }
    out.push_back(static_cast<std::uint8_t>(alphabet.at(static_cast<std::size_t>(index))));
  }
  return out;
}

namespace {

Status check_chars(std::span<const std::uint8_t> s, const Alphabet& alphabet) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!alphabet.contains(s[i])) {
      return make_error(ErrorCode::kCharNotInAlphabet, "character ", unsigned{s[i]}, " at index ",
                        i, " is not in the alphabet");
    }
  }
  return {};
}

}  // namespace

Status AcnCodec::enc_string_char_index_internal(std::span<const std::uint8_t> s,
                                                const Alphabet& alphabet, std::uint64_t min_len,
                                                std::uint64_t max_len) {
  if (min_len > max_len) {
    return make_error(ErrorCode::kInvalidArgument, "empty length range [", min_len, ", ", max_len,
                      "]");
  }
  if (s.size() < min_len || s.size() > max_len) {
    return make_error(ErrorCode::kConstraint, "string length ", s.size(), " outside [", min_len,
                      ", ", max_len, "]");
  }
  ACNKIT_TRY(check_chars(s, alphabet));
  const std::uint64_t total =
      bits_needed(max_len - min_len) + s.size() * std::uint64_t{alphabet.bits_per_char()};
  if (!stream_.validate_offset_bits(total)) {
    return make_error(ErrorCode::kBounds, "need ", total, " bits, ", stream_.remaining_bits(),
                      " remaining");
  }
  ACNKIT_TRY(encode_constrained_pos_whole_number(s.size(), min_len, max_len));
  return encode_chars(s, alphabet);
}

Result<std::vector<std::uint8_t>> AcnCodec::dec_string_char_index_internal(
    const Alphabet& alphabet, std::uint64_t min_len, std::uint64_t max_len) {
  ACNKIT_ASSIGN_OR_RETURN(std::uint64_t len, decode_constrained_pos_whole_number(min_len, max_len));
  return decode_chars(alphabet, len);
}

Status AcnCodec::enc_string_char_index_external(std::span<const std::uint8_t> s,
                                                const Alphabet& alphabet, std::uint64_t max_len,
                                                std::uint64_t ext_len) {
  if (s.size() != ext_len) {
    return make_error(ErrorCode::kLengthMismatch, "string length ", s.size(),
                      " differs from the determinant ", ext_len);
  }
  if (ext_len > max_len) {
    return make_error(ErrorCode::kStringTooLong, "string length ", ext_len, " exceeds ", max_len);
  }
  ACNKIT_TRY(check_chars(s, alphabet));
  const std::uint64_t total = ext_len * alphabet.bits_per_char();
  if (!stream_.validate_offset_bits(total)) {
    return make_error(ErrorCode::kBounds, "need ", total, " bits, ", stream_.remaining_bits(),
                      " remaining");
  }
  return encode_chars(s, alphabet);
}

Result<std::vector<std::uint8_t>> AcnCodec::dec_string_char_index_external(
    const Alphabet& alphabet, std::uint64_t max_len, std::uint64_t ext_len) {
  if (ext_len > max_len) {
    return make_error(ErrorCode::kDecodeConstraint, "external length ", ext_len, " exceeds ",
                      max_len);
  }
  return decode_chars(alphabet, ext_len);
}

Status AcnCodec::align_to(unsigned modulus) {
  if (modulus == 0) return make_error(ErrorCode::kInvalidArgument, "alignment modulus is zero");
  const std::uint64_t pad = padding_bits(stream_.bit_index(), modulus);
  if (!stream_.validate_offset_bits(pad)) {
    return make_error(ErrorCode::kBounds, "need ", pad, " padding bits, ",
                      stream_.remaining_bits(), " remaining");
  }
  return stream_.append_n_zero_bits(pad);
}

Status AcnCodec::skip_alignment(unsigned modulus) {
  if (modulus == 0) return make_error(ErrorCode::kInvalidArgument, "alignment modulus is zero");
  const std::uint64_t pad = padding_bits(stream_.bit_index(), modulus);
  if (!stream_.validate_offset_bits(pad)) {
    return make_error(ErrorCode::kBounds, "need ", pad, " padding bits, ",
                      stream_.remaining_bits(), " remaining");
  }
  return stream_.move_bit_index(static_cast<std::int64_t>(pad));
}

}  // namespace acnkit
