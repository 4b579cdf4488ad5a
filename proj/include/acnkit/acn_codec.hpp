#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "acnkit/bitstream.hpp"

namespace acnkit {

enum class Endianness { kBig, kLittle };

std::string_view to_string(Endianness e);

// Smallest n with range < 2^n; bits_needed(0) == 0.
unsigned bits_needed(std::uint64_t range);

// Interprets the low 8*num_bytes bits of v as two's complement and sign
// extends to 64 bits. num_bytes must be in 1..8.
std::int64_t uint2int(std::uint64_t v, unsigned num_bytes);
// Low 8*num_bytes bits of the two's complement pattern of v.
std::uint64_t int2uint(std::int64_t v, unsigned num_bytes);
// Same as uint2int for an arbitrary bit width in 1..64.
std::int64_t sign_extend(std::uint64_t v, unsigned n_bits);

// Ordered set of distinct 7-bit character codes. A character's index in the
// set is its wire value for char-index string encodings.
class Alphabet {
 public:
  static Result<Alphabet> create(std::string_view chars);
  // All 128 ASCII codes in ascending order.
  static Alphabet ascii();

  std::size_t size() const { return chars_.size(); }
  std::string_view chars() const { return chars_; }
  char at(std::size_t index) const { return chars_[index]; }
  std::optional<std::size_t> index_of(std::uint8_t c) const {
    if (c > 127 || index_[c] < 0) return std::nullopt;
    return static_cast<std::size_t>(index_[c]);
  }
  bool contains(std::uint8_t c) const { return index_of(c).has_value(); }
  // Width of one character index.
  unsigned bits_per_char() const { return bits_needed(chars_.size() - 1); }

  friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.chars_ == b.chars_; }

 private:
  Alphabet() { index_.fill(-1); }

  std::string chars_;
  std::array<std::int16_t, 128> index_{};
};

// The ACN primitive catalog layered over a BitStream. Every encoder has a
// decoder that is its exact inverse at the same cursor and that consumes
// exactly the bits the encoder wrote. Decoders return fresh values.
class AcnCodec {
 public:
  AcnCodec() = default;
  explicit AcnCodec(BitStream stream) : stream_(std::move(stream)) {}

  static Result<AcnCodec> create(std::size_t capacity_bytes);

  BitStream& stream() { return stream_; }
  const BitStream& stream() const { return stream_; }

  std::uint64_t bit_index() const { return stream_.bit_index(); }
  std::uint64_t remaining_bits() const { return stream_.remaining_bits(); }
  bool validate_offset_bits(std::uint64_t n) const { return stream_.validate_offset_bits(n); }
  Status move_bit_index(std::int64_t offset) { return stream_.move_bit_index(offset); }
  Result<AcnCodec> reset_at(const AcnCodec& other) const;

  // Constrained whole numbers: (v - min) in bits_needed(max - min) bits.
  Status encode_constrained_pos_whole_number(std::uint64_t v, std::uint64_t min,
                                             std::uint64_t max);
  Result<std::uint64_t> decode_constrained_pos_whole_number(std::uint64_t min, std::uint64_t max);
  Status encode_constrained_whole_number(std::int64_t v, std::int64_t min, std::int64_t max);
  Result<std::int64_t> decode_constrained_whole_number(std::int64_t min, std::int64_t max);

  // Unsigned, width in {8, 16, 32, 64}, big endian.
  Status enc_uint_const_size_aligned(std::uint64_t v, unsigned width);
  Result<std::uint64_t> dec_uint_const_size_aligned(unsigned width);
  // Unsigned, any width in 1..64, MSB first.
  Status enc_uint_const_size(std::uint64_t v, unsigned n_bits);
  Result<std::uint64_t> dec_uint_const_size(unsigned n_bits);

  // Two's complement, width in {8, 16, 32, 64}, big endian.
  Status enc_int_twos_complement_const_size_aligned(std::int64_t v, unsigned width);
  Result<std::int64_t> dec_int_twos_complement_const_size_aligned(unsigned width);
  // Two's complement, any width in 1..64.
  Status enc_int_twos_complement_const_size(std::int64_t v, unsigned n_bits);
  Result<std::int64_t> dec_int_twos_complement_const_size(unsigned n_bits);

  // IEEE-754 values as uninterpreted bit patterns. width is 32 or 64.
  Status enc_real_ieee754(std::uint64_t pattern, unsigned width, Endianness endianness);
  Result<std::uint64_t> dec_real_ieee754(unsigned width, Endianness endianness);

  // 7-bit characters followed by a termination pattern of 1..8 bytes.
  Status enc_string_ascii_null_terminated(std::span<const std::uint8_t> s, std::uint64_t max_len,
                                          std::span<const std::uint8_t> null_pattern);
  Result<std::vector<std::uint8_t>> dec_string_ascii_null_terminated(
      std::uint64_t max_len, std::span<const std::uint8_t> null_pattern);

  // Length as a constrained number in [min_len, max_len], then char indices.
  Status enc_string_char_index_internal(std::span<const std::uint8_t> s, const Alphabet& alphabet,
                                        std::uint64_t min_len, std::uint64_t max_len);
  Result<std::vector<std::uint8_t>> dec_string_char_index_internal(const Alphabet& alphabet,
                                                                   std::uint64_t min_len,
                                                                   std::uint64_t max_len);
  // Char indices only; the length travels in an external ACN field.
  Status enc_string_char_index_external(std::span<const std::uint8_t> s, const Alphabet& alphabet,
                                        std::uint64_t max_len, std::uint64_t ext_len);
  Result<std::vector<std::uint8_t>> dec_string_char_index_external(const Alphabet& alphabet,
                                                                   std::uint64_t max_len,
                                                                   std::uint64_t ext_len);

  // Zero padding up to the next multiple of `modulus` bits (absolute
  // position). Space is checked before any padding is written.
  Status align_to(unsigned modulus);
  Status skip_alignment(unsigned modulus);

  static std::uint64_t padding_bits(std::uint64_t offset, unsigned modulus) {
    return (modulus - offset % modulus) % modulus;
  }

 private:
  Status encode_chars(std::span<const std::uint8_t> s, const Alphabet& alphabet);
  Result<std::vector<std::uint8_t>> decode_chars(const Alphabet& alphabet, std::uint64_t count);

  BitStream stream_;
};

// Checks that `s` followed by `pattern` contains the pattern first at
// position s.size(), which is what makes the terminator decodable.
bool terminator_is_unambiguous(std::span<const std::uint8_t> s,
                               std::span<const std::uint8_t> pattern);

}  // namespace acnkit
