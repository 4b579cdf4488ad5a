#include "acnkit/bitstream.hpp"

#include <algorithm>
#include <cassert>
#include <cstdio>

namespace acnkit {

namespace {

Error bounds_error(std::uint64_t wanted, std::uint64_t remaining) {
  return make_error(ErrorCode::kBounds, "need ", wanted, " bits, ", remaining, " remaining");
}

}  // namespace

Result<BitStream> BitStream::create(std::size_t capacity_bytes, std::size_t capacity_cap) {
  if (capacity_bytes > capacity_cap) {
    return make_error(ErrorCode::kCapacity, "capacity ", capacity_bytes,
                      " bytes exceeds the cap of ", capacity_cap);
  }
  return BitStream(std::vector<std::uint8_t>(capacity_bytes, 0));
}

Result<BitStream> BitStream::wrap(std::vector<std::uint8_t> bytes, std::size_t capacity_cap) {
  if (bytes.size() > capacity_cap) {
    return make_error(ErrorCode::kCapacity, "capacity ", bytes.size(),
                      " bytes exceeds the cap of ", capacity_cap);
  }
  return BitStream(std::move(bytes));
}

bool BitStream::invariant() const {
  return current_bit_ < 8 &&
         (current_byte_ < buf_.size() || (current_bit_ == 0 && current_byte_ == buf_.size()));
}

void BitStream::check_invariant() const {
#ifndef NDEBUG
  assert(invariant());
#endif
}

Status BitStream::require_bits(std::uint64_t n) const {
  if (!validate_offset_bits(n)) return bounds_error(n, remaining_bits());
  return {};
}

void BitStream::put_bit(bool bit) {
  const auto mask = static_cast<std::uint8_t>(0x80u >> current_bit_);
  if (bit) {
    buf_[current_byte_] |= mask;
  } else {
    buf_[current_byte_] &= static_cast<std::uint8_t>(~mask);
  }
  if (++current_bit_ == 8) {
    current_bit_ = 0;
    ++current_byte_;
  }
}

bool BitStream::take_bit() {
  const bool bit = ((buf_[current_byte_] >> (7 - current_bit_)) & 1u) != 0;
  if (++current_bit_ == 8) {
    current_bit_ = 0;
    ++current_byte_;
  }
  return bit;
}

Status BitStream::set_bit_index(std::uint64_t bit) {
  if (bit > capacity_bits()) {
    return make_error(ErrorCode::kBounds, "bit index ", bit, " beyond capacity ",
                      capacity_bits());
  }
  current_byte_ = static_cast<std::size_t>(bit / 8);
  current_bit_ = static_cast<unsigned>(bit % 8);
  check_invariant();
  return {};
}

Status BitStream::move_bit_index(std::int64_t offset) {
  const auto here = static_cast<std::int64_t>(bit_index());
  if (offset < -here || (offset > 0 && static_cast<std::uint64_t>(offset) > remaining_bits())) {
    return make_error(ErrorCode::kBounds, "cannot move cursor by ", offset, " from bit ", here,
                      " in a ", capacity_bits(), "-bit buffer");
  }
  return set_bit_index(static_cast<std::uint64_t>(here + offset));
}

Result<BitStream> BitStream::reset_at(const BitStream& other) const {
  BitStream copy = *this;
  ACNKIT_TRY(copy.set_bit_index(other.bit_index()));
  return copy;
}

Status BitStream::append_bit(bool bit) {
  ACNKIT_TRY(require_bits(1));
  put_bit(bit);
  check_invariant();
  return {};
}

Status BitStream::append_n_bits(bool bit, std::uint64_t n) {
  ACNKIT_TRY(require_bits(n));
  for (std::uint64_t i = 0; i < n; ++i) put_bit(bit);
  check_invariant();
  return {};
}

Status BitStream::append_bit_from_byte(std::uint8_t byte, unsigned i) {
  if (i > 7) return make_error(ErrorCode::kInvalidArgument, "bit position ", i, " not in 0..7");
  ACNKIT_TRY(require_bits(1));
  put_bit(((byte >> (7 - i)) & 1u) != 0);
  check_invariant();
  return {};
}

Status BitStream::append_bits_msb_first(std::span<const std::uint8_t> src, std::uint64_t n_bits,
                                        std::uint64_t from) {
  const std::uint64_t src_bits = static_cast<std::uint64_t>(src.size()) * 8;
  if (from > src_bits || n_bits > src_bits - from) {
    return make_error(ErrorCode::kBounds, "source range [", from, ", ", from + n_bits,
                      ") exceeds ", src_bits, " source bits");
  }
  ACNKIT_TRY(require_bits(n_bits));
  for (std::uint64_t i = from; i < from + n_bits; ++i) {
    put_bit(((src[i / 8] >> (7 - i % 8)) & 1u) != 0);
  }
  check_invariant();
  return {};
}

namespace {

Status check_width(std::uint64_t v, unsigned n_bits) {
  if (n_bits > 64) return make_error(ErrorCode::kInvalidArgument, "width ", n_bits, " > 64");
  if (n_bits < 64 && (v >> n_bits) != 0) {
    return make_error(ErrorCode::kValueTooWide, "value ", v, " does not fit in ", n_bits, " bits");
  }
  return {};
}

}  // namespace

Status BitStream::append_lsb_bits_msb_first(std::uint64_t v, unsigned n_bits) {
  ACNKIT_TRY(check_width(v, n_bits));
  ACNKIT_TRY(require_bits(n_bits));
  for (unsigned i = n_bits; i > 0; --i) put_bit(((v >> (i - 1)) & 1u) != 0);
  check_invariant();
  return {};
}

Status BitStream::append_bits_lsb_first(std::uint64_t v, unsigned n_bits) {
  ACNKIT_TRY(check_width(v, n_bits));
  ACNKIT_TRY(require_bits(n_bits));
  for (unsigned i = 0; i < n_bits; ++i) put_bit(((v >> i) & 1u) != 0);
  check_invariant();
  return {};
}

Status BitStream::append_partial_byte(std::uint8_t byte, unsigned n_bits) {
  if (n_bits < 1 || n_bits > 8) {
    return make_error(ErrorCode::kInvalidArgument, "partial byte width ", n_bits, " not in 1..8");
  }
  ACNKIT_TRY(require_bits(n_bits));
  for (unsigned i = 0; i < n_bits; ++i) put_bit(((byte >> (7 - i)) & 1u) != 0);
  check_invariant();
  return {};
}

Status BitStream::append_byte(std::uint8_t byte) { return append_partial_byte(byte, 8); }

Status BitStream::append_byte_array(std::span<const std::uint8_t> bytes) {
  return append_bits_msb_first(bytes, static_cast<std::uint64_t>(bytes.size()) * 8, 0);
}

Result<bool> BitStream::read_bit() {
  ACNKIT_TRY(require_bits(1));
  const bool bit = take_bit();
  check_invariant();
  return bit;
}

Result<bool> BitStream::peek_bit() const {
  ACNKIT_TRY(require_bits(1));
  return ((buf_[current_byte_] >> (7 - current_bit_)) & 1u) != 0;
}

Result<std::vector<std::uint8_t>> BitStream::read_bits(std::uint64_t n_bits) {
  ACNKIT_TRY(require_bits(n_bits));
  std::vector<std::uint8_t> out(static_cast<std::size_t>((n_bits + 7) / 8), 0);
  for (std::uint64_t i = 0; i < n_bits; ++i) {
    if (take_bit()) out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  }
  check_invariant();
  return out;
}

Result<std::uint64_t> BitStream::read_n_lsb_bits_msb_first(unsigned n_bits) {
  if (n_bits > 64) return make_error(ErrorCode::kInvalidArgument, "width ", n_bits, " > 64");
  ACNKIT_TRY(require_bits(n_bits));
  std::uint64_t v = 0;
  for (unsigned i = 0; i < n_bits; ++i) v = (v << 1) | (take_bit() ? 1u : 0u);
  check_invariant();
  return v;
}

Result<std::uint64_t> BitStream::read_n_bits_lsb_first(unsigned n_bits) {
  if (n_bits > 64) return make_error(ErrorCode::kInvalidArgument, "width ", n_bits, " > 64");
  ACNKIT_TRY(require_bits(n_bits));
  std::uint64_t v = 0;
  for (unsigned i = 0; i < n_bits; ++i) {
    if (take_bit()) v |= std::uint64_t{1} << i;
  }
  check_invariant();
  return v;
}

Result<std::uint8_t> BitStream::read_partial_byte(unsigned n_bits) {
  if (n_bits < 1 || n_bits > 8) {
    return make_error(ErrorCode::kInvalidArgument, "partial byte width ", n_bits, " not in 1..8");
  }
  ACNKIT_TRY(require_bits(n_bits));
  unsigned v = 0;
  for (unsigned i = 0; i < n_bits; ++i) {
    if (take_bit()) v |= 0x80u >> i;
  }
  check_invariant();
  return static_cast<std::uint8_t>(v);
}

Result<std::uint8_t> BitStream::read_byte() { return read_partial_byte(8); }

Result<std::vector<std::uint8_t>> BitStream::read_byte_array(std::size_t n) {
  return read_bits(static_cast<std::uint64_t>(n) * 8);
}

Result<bool> BitStream::is_prefix_of(const BitStream& other) const {
  if (buf_.size() != other.buf_.size()) {
    return make_error(ErrorCode::kBounds, "buffer lengths differ: ", buf_.size(), " vs ",
                      other.buf_.size());
  }
  if (bit_index() > other.bit_index()) return false;
  return bit_ranges_equal(buf_, other.buf_, 0, bit_index());
}

std::string BitStream::debug_dump() const {
  std::string out;
  char hex[4];
  for (std::size_t i = 0; i < buf_.size(); ++i) {
    std::snprintf(hex, sizeof hex, "%02x", buf_[i]);
    if (i != 0) out += ' ';
    out += hex;
  }
  return cat(out, out.empty() ? "@ " : " @ ", current_byte_, ':', current_bit_);
}

Result<bool> bit_ranges_equal(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                              std::uint64_t from_bit, std::uint64_t to_bit) {
  const std::uint64_t limit = static_cast<std::uint64_t>(std::min(a.size(), b.size())) * 8;
  if (from_bit > to_bit || to_bit > limit) {
    return make_error(ErrorCode::kBounds, "bit range [", from_bit, ", ", to_bit,
                      ") outside the common ", limit, " bits");
  }
  for (std::uint64_t i = from_bit; i < to_bit; ++i) {
    if (bit_at(a, i) != bit_at(b, i)) return false;
  }
  return true;
}

}  // namespace acnkit
