#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "acnkit/result.hpp"

namespace acnkit {

// Bit-exact append/read stream over a fixed-capacity byte buffer.
//
// The cursor is kept as (current_byte, current_bit). Bit 0 of a byte is its
// most significant bit. The cursor may rest one byte past the end of the
// buffer only when current_bit is 0. Every append/read checks the available
// space first, so a failed call leaves the stream untouched.
//
// A stream is single-writer. Copies are independent snapshots.
class BitStream {
 public:
  static constexpr std::size_t kDefaultCapacityCap = std::size_t{1} << 28;

  BitStream() = default;

  // All-zero buffer of the given size with the cursor at bit 0.
  static Result<BitStream> create(std::size_t capacity_bytes,
                                  std::size_t capacity_cap = kDefaultCapacityCap);
  // Stream over existing bytes (for decoding), cursor at bit 0.
  static Result<BitStream> wrap(std::vector<std::uint8_t> bytes,
                                std::size_t capacity_cap = kDefaultCapacityCap);

  std::size_t current_byte() const { return current_byte_; }
  unsigned current_bit() const { return current_bit_; }
  std::uint64_t bit_index() const {
    return static_cast<std::uint64_t>(current_byte_) * 8 + current_bit_;
  }
  std::uint64_t capacity_bits() const {
    return static_cast<std::uint64_t>(buf_.size()) * 8;
  }
  std::uint64_t remaining_bits() const { return capacity_bits() - bit_index(); }
  bool validate_offset_bits(std::uint64_t n) const { return remaining_bits() >= n; }
  bool validate_offset_bytes(std::uint64_t n) const {
    return n <= remaining_bits() / 8;
  }

  std::span<const std::uint8_t> buffer() const { return buf_; }
  std::size_t buffer_length() const { return buf_.size(); }

  bool invariant() const;

  // Cursor movement.
  Status move_bit_index(std::int64_t offset);
  Status set_bit_index(std::uint64_t bit);
  // Copy of this buffer carrying `other`'s cursor. `this` is unchanged.
  Result<BitStream> reset_at(const BitStream& other) const;

  // Bit-level appends.
  Status append_bit(bool bit);
  Status append_bit_one() { return append_bit(true); }
  Status append_bit_zero() { return append_bit(false); }
  Status append_n_bits(bool bit, std::uint64_t n);
  Status append_n_zero_bits(std::uint64_t n) { return append_n_bits(false, n); }
  Status append_n_one_bits(std::uint64_t n) { return append_n_bits(true, n); }
  // Appends bit `i` of `byte`, where i == 0 is the MSB.
  Status append_bit_from_byte(std::uint8_t byte, unsigned i);
  // Appends bits [from, from + n_bits) of `src`, MSB-first indexing.
  Status append_bits_msb_first(std::span<const std::uint8_t> src, std::uint64_t n_bits,
                               std::uint64_t from = 0);
  // Appends the n_bits low bits of v, most significant of those first.
  Status append_lsb_bits_msb_first(std::uint64_t v, unsigned n_bits);
  // Appends the n_bits low bits of v, least significant first.
  Status append_bits_lsb_first(std::uint64_t v, unsigned n_bits);

  // Byte-level appends (any cursor alignment).
  Status append_partial_byte(std::uint8_t byte, unsigned n_bits);
  Status append_byte(std::uint8_t byte);
  Status append_byte_array(std::span<const std::uint8_t> bytes);

  // Reads.
  Result<bool> read_bit();
  Result<bool> peek_bit() const;
  // ceil(n_bits / 8) bytes, packed MSB-first, trailing pad bits zero.
  Result<std::vector<std::uint8_t>> read_bits(std::uint64_t n_bits);
  Result<std::uint64_t> read_n_lsb_bits_msb_first(unsigned n_bits);
  Result<std::uint64_t> read_n_bits_lsb_first(unsigned n_bits);
  // The n_bits read land in the high bits of the result, low bits zero.
  Result<std::uint8_t> read_partial_byte(unsigned n_bits);
  Result<std::uint8_t> read_byte();
  Result<std::vector<std::uint8_t>> read_byte_array(std::size_t n);

  // bit_index(this) <= bit_index(other) and both buffers agree on
  // [0, bit_index(this)). Buffers must have equal length.
  Result<bool> is_prefix_of(const BitStream& other) const;

  // "ab cd 00 @ 1:3"
  std::string debug_dump() const;

 private:
  explicit BitStream(std::vector<std::uint8_t> buf) : buf_(std::move(buf)) {}

  Status require_bits(std::uint64_t n) const;
  void put_bit(bool bit);
  bool take_bit();
  void check_invariant() const;

  std::vector<std::uint8_t> buf_;
  std::size_t current_byte_ = 0;
  unsigned current_bit_ = 0;
};

// True iff bits [from_bit, to_bit) agree in both buffers.
Result<bool> bit_ranges_equal(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                              std::uint64_t from_bit, std::uint64_t to_bit);

// Bit `i` of a buffer, MSB-first indexing. No bounds check.
inline bool bit_at(std::span<const std::uint8_t> buf, std::uint64_t i) {
  return ((buf[i / 8] >> (7 - i % 8)) & 1u) != 0;
}

}  // namespace acnkit
