#pragma once

// Deliberately naive reference model of the bit stream: a list of booleans
// plus a cursor. No byte arithmetic at all, so it shares no code path with
// the real implementation.

#include <cstdint>
#include <optional>
#include <vector>

namespace acnkit::testing {

class BitListModel {
 public:
  explicit BitListModel(std::size_t capacity_bytes) : bits_(capacity_bytes * 8, false) {}

  std::uint64_t cursor() const { return cursor_; }
  std::uint64_t capacity() const { return bits_.size(); }
  std::uint64_t remaining() const { return bits_.size() - cursor_; }
  const std::vector<bool>& bits() const { return bits_; }

  bool fits(std::uint64_t n) const { return remaining() >= n; }

  bool move(std::int64_t offset) {
    const auto target = static_cast<std::int64_t>(cursor_) + offset;
    if (target < 0 || static_cast<std::uint64_t>(target) > bits_.size()) return false;
    cursor_ = static_cast<std::uint64_t>(target);
    return true;
  }

  bool append(bool b) {
    if (!fits(1)) return false;
    bits_[cursor_++] = b;
    return true;
  }

  bool append_all(const std::vector<bool>& list) {
    if (!fits(list.size())) return false;
    for (bool b : list) bits_[cursor_++] = b;
    return true;
  }

  std::optional<std::vector<bool>> read(std::uint64_t n) {
    if (!fits(n)) return std::nullopt;
    std::vector<bool> out(bits_.begin() + static_cast<std::ptrdiff_t>(cursor_),
                          bits_.begin() + static_cast<std::ptrdiff_t>(cursor_ + n));
    cursor_ += n;
    return out;
  }

  // Packs the model's bits into bytes the same way a wire dump would look.
  std::vector<std::uint8_t> to_bytes() const {
    std::vector<std::uint8_t> out(bits_.size() / 8, 0);
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      if (bits_[i]) out[i / 8] = static_cast<std::uint8_t>(out[i / 8] | (1 << (7 - i % 8)));
    }
    return out;
  }

 private:
  std::vector<bool> bits_;
  std::uint64_t cursor_ = 0;
};

// Bits of an unsigned value, most significant first.
inline std::vector<bool> msb_bits(std::uint64_t v, unsigned n) {
  std::vector<bool> out;
  for (unsigned i = 0; i < n; ++i) out.push_back(((v >> (n - 1 - i)) & 1u) != 0);
  return out;
}

inline std::vector<bool> lsb_bits(std::uint64_t v, unsigned n) {
  std::vector<bool> out;
  for (unsigned i = 0; i < n; ++i) out.push_back(((v >> i) & 1u) != 0);
  return out;
}

inline std::vector<bool> byte_bits(const std::vector<std::uint8_t>& bytes) {
  std::vector<bool> out;
  for (auto b : bytes) {
    for (int i = 7; i >= 0; --i) out.push_back(((b >> i) & 1) != 0);
  }
  return out;
}

inline std::uint64_t bits_to_uint(const std::vector<bool>& bits) {
  std::uint64_t v = 0;
  for (bool b : bits) v = (v << 1) | (b ? 1u : 0u);
  return v;
}

}  // namespace acnkit::testing
