#pragma once

// One randomized encode/decode trial per codec primitive pair. Each trial
// encodes a random valid input at a given offset over a noisy buffer, checks
// the cursor advance against an arithmetic size oracle, then decodes from the
// start cursor and checks the value and final cursor.

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "acnkit/acn_codec.hpp"

namespace acnkit::testing {

using Rng = std::mt19937_64;
using Bytes = std::vector<std::uint8_t>;

// Smallest n with r < 2^n, by counting.
inline unsigned oracle_bits(std::uint64_t r) {
  unsigned n = 0;
  while (n < 64 && (r >> n) != 0) ++n;
  return n;
}

struct TrialSetup {
  AcnCodec codec;
  AcnCodec start;
  Bytes noise;
};

inline TrialSetup noisy_codec(Rng& rng, std::uint64_t offset, std::size_t bytes = 48) {
  Bytes noise(bytes);
  for (auto& b : noise) b = static_cast<std::uint8_t>(rng());
  AcnCodec c(BitStream::wrap(noise).value());
  (void)c.move_bit_index(static_cast<std::int64_t>(offset));
  return {c, c, noise};
}

// Common post-encode checks; returns an error text or nullopt.
inline std::optional<std::string> check_encode(const TrialSetup& t, const AcnCodec& after,
                                               std::uint64_t expected_bits) {
  const std::uint64_t start = t.start.bit_index();
  if (after.bit_index() - start != expected_bits) {
    return "advanced " + std::to_string(after.bit_index() - start) + " bits, oracle says " +
           std::to_string(expected_bits);
  }
  if (after.stream().buffer_length() != t.noise.size()) return std::string("buffer length changed");
  auto prior = bit_ranges_equal(t.noise, after.stream().buffer(), 0, start);
  if (!prior.ok() || !*prior) return std::string("bits before the start cursor changed");
  return std::nullopt;
}

struct Primitive {
  std::string name;
  // Runs one trial at the offset; returns a failure description.
  std::function<std::optional<std::string>(Rng&, std::uint64_t)> trial;
};

inline std::uint64_t below(Rng& rng, std::uint64_t n) { return n == 0 ? 0 : rng() % n; }

inline std::uint64_t random_in(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  const std::uint64_t span = hi - lo;
  if (span == ~std::uint64_t{0}) return rng();
  return lo + rng() % (span + 1);
}

// Random span size with a spread of bit widths.
inline std::uint64_t random_span(Rng& rng) {
  const unsigned w = static_cast<unsigned>(below(rng, 65));
  return w == 0 ? 0 : (rng() >> (64 - w));
}

template <typename Decoded, typename Encode, typename Decode>
std::optional<std::string> roundtrip_one(Rng& rng, std::uint64_t offset, std::uint64_t expected_bits,
                                         const Decoded& value, Encode&& enc, Decode&& dec) {
  TrialSetup t = noisy_codec(rng, offset);
  AcnCodec c = t.codec;
  auto st = enc(c);
  if (!st.ok()) return "encode failed: " + st.error().describe();
  if (auto e = check_encode(t, c, expected_bits)) return e;
  AcnCodec r = c.reset_at(t.start).value();
  auto got = dec(r);
  if (!got.ok()) return "decode failed: " + got.error().describe();
  if (!(*got == value)) return std::string("decoded value differs");
  if (r.bit_index() != c.bit_index()) return std::string("decoder cursor differs from encoder cursor");
  return std::nullopt;
}

inline Bytes random_alphabet_chars(Rng& rng) {
  std::vector<std::uint8_t> all(128);
  for (unsigned i = 0; i < 128; ++i) all[i] = static_cast<std::uint8_t>(i);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(1 + below(rng, 128));
  return all;
}

inline const std::vector<Primitive>& primitive_catalog() {
  static const std::vector<Primitive> catalog = {
      {"constrained_pos_whole_number",
       [](Rng& rng, std::uint64_t off) {
         const std::uint64_t span = random_span(rng);
         const std::uint64_t min = random_in(rng, 0, ~std::uint64_t{0} - span);
         const std::uint64_t max = min + span;
         const std::uint64_t v = random_in(rng, min, max);
         return roundtrip_one(
             rng, off, oracle_bits(span), v,
             [&](AcnCodec& c) { return c.encode_constrained_pos_whole_number(v, min, max); },
             [&](AcnCodec& c) { return c.decode_constrained_pos_whole_number(min, max); });
       }},
      {"constrained_whole_number",
       [](Rng& rng, std::uint64_t off) {
         const std::uint64_t span = random_span(rng);
         const auto min = static_cast<std::int64_t>(random_in(rng, 0, ~std::uint64_t{0} - span) ^ (std::uint64_t{1} << 63));
         const std::int64_t max = static_cast<std::int64_t>(static_cast<std::uint64_t>(min) + span);
         if (max < min) return std::optional<std::string>();  // wrapped; not a valid range
         const auto v = static_cast<std::int64_t>(static_cast<std::uint64_t>(min) + random_in(rng, 0, span));
         return roundtrip_one(
             rng, off, oracle_bits(span), v,
             [&](AcnCodec& c) { return c.encode_constrained_whole_number(v, min, max); },
             [&](AcnCodec& c) { return c.decode_constrained_whole_number(min, max); });
       }},
      {"uint_const_size_aligned",
       [](Rng& rng, std::uint64_t off) {
         const unsigned w = 8u << below(rng, 4);
         const std::uint64_t v = w == 64 ? rng() : rng() & ((std::uint64_t{1} << w) - 1);
         return roundtrip_one(
             rng, off, w, v, [&](AcnCodec& c) { return c.enc_uint_const_size_aligned(v, w); },
             [&](AcnCodec& c) { return c.dec_uint_const_size_aligned(w); });
       }},
      {"uint_const_size",
       [](Rng& rng, std::uint64_t off) {
         const unsigned n = 1 + static_cast<unsigned>(below(rng, 64));
         const std::uint64_t v = rng() >> (64 - n);
         return roundtrip_one(
             rng, off, n, v, [&](AcnCodec& c) { return c.enc_uint_const_size(v, n); },
             [&](AcnCodec& c) { return c.dec_uint_const_size(n); });
       }},
      {"int_twos_complement_const_size_aligned",
       [](Rng& rng, std::uint64_t off) {
         const unsigned w = 8u << below(rng, 4);
         const std::int64_t v = static_cast<std::int64_t>(rng()) >> (64 - w);
         return roundtrip_one(
             rng, off, w, v,
             [&](AcnCodec& c) { return c.enc_int_twos_complement_const_size_aligned(v, w); },
             [&](AcnCodec& c) { return c.dec_int_twos_complement_const_size_aligned(w); });
       }},
      {"int_twos_complement_const_size",
       [](Rng& rng, std::uint64_t off) {
         const unsigned n = 1 + static_cast<unsigned>(below(rng, 64));
         const std::int64_t v = static_cast<std::int64_t>(rng()) >> (64 - n);
         return roundtrip_one(
             rng, off, n, v,
             [&](AcnCodec& c) { return c.enc_int_twos_complement_const_size(v, n); },
             [&](AcnCodec& c) { return c.dec_int_twos_complement_const_size(n); });
       }},
      {"real_ieee754",
       [](Rng& rng, std::uint64_t off) {
         const unsigned w = (rng() & 1) ? 32 : 64;
         const Endianness e = (rng() & 1) ? Endianness::kBig : Endianness::kLittle;
         std::uint64_t p = w == 32 ? rng() & 0xFFFFFFFFu : rng();
         // Force NaN exponents often: all-ones exponent with a random payload.
         if (rng() % 4 == 0) p |= w == 32 ? 0x7F800001u : 0x7FF0000000000001u;
         return roundtrip_one(
             rng, off, w, p, [&](AcnCodec& c) { return c.enc_real_ieee754(p, w, e); },
             [&](AcnCodec& c) { return c.dec_real_ieee754(w, e); });
       }},
      {"string_ascii_null_terminated",
       [](Rng& rng, std::uint64_t off) {
         const std::uint64_t max_len = below(rng, 12);
         Bytes pattern(1 + below(rng, 8));
         for (auto& b : pattern) b = static_cast<std::uint8_t>(rng());
         Bytes s(below(rng, max_len + 1));
         for (auto& b : s) b = static_cast<std::uint8_t>(rng() & 0x7F);
         // Valid only if the pattern first occurs right after s.
         Bytes joined = s;
         joined.insert(joined.end(), pattern.begin(), pattern.end());
         auto first = std::search(joined.begin(), joined.end(), pattern.begin(), pattern.end());
         if (static_cast<std::size_t>(first - joined.begin()) != s.size()) {
           s.clear();
         }
         return roundtrip_one(
             rng, off, (s.size() + pattern.size()) * 8, s,
             [&](AcnCodec& c) { return c.enc_string_ascii_null_terminated(s, max_len, pattern); },
             [&](AcnCodec& c) { return c.dec_string_ascii_null_terminated(max_len, pattern); });
       }},
      {"string_char_index_internal",
       [](Rng& rng, std::uint64_t off) {
         const Bytes chars = random_alphabet_chars(rng);
         const auto alphabet =
             Alphabet::create(std::string_view(reinterpret_cast<const char*>(chars.data()), chars.size())).value();
         const std::uint64_t min = below(rng, 6);
         const std::uint64_t max = min + below(rng, 12);
         Bytes s(random_in(rng, min, max));
         for (auto& b : s) b = chars[below(rng, chars.size())];
         const std::uint64_t bits = oracle_bits(max - min) + s.size() * oracle_bits(chars.size() - 1);
         return roundtrip_one(
             rng, off, bits, s,
             [&](AcnCodec& c) { return c.enc_string_char_index_internal(s, alphabet, min, max); },
             [&](AcnCodec& c) { return c.dec_string_char_index_internal(alphabet, min, max); });
       }},
      {"string_char_index_external",
       [](Rng& rng, std::uint64_t off) {
         const Bytes chars = random_alphabet_chars(rng);
         const auto alphabet =
             Alphabet::create(std::string_view(reinterpret_cast<const char*>(chars.data()), chars.size())).value();
         const std::uint64_t max = below(rng, 16);
         Bytes s(below(rng, max + 1));
         for (auto& b : s) b = chars[below(rng, chars.size())];
         const std::uint64_t bits = s.size() * oracle_bits(chars.size() - 1);
         return roundtrip_one(
             rng, off, bits, s,
             [&](AcnCodec& c) { return c.enc_string_char_index_external(s, alphabet, max, s.size()); },
             [&](AcnCodec& c) { return c.dec_string_char_index_external(alphabet, max, s.size()); });
       }},
      {"align_to",
       [](Rng& rng, std::uint64_t off) -> std::optional<std::string> {
         const unsigned m = 8u << below(rng, 3);
         const std::uint64_t pad = (m - off % m) % m;
         TrialSetup t = noisy_codec(rng, off);
         AcnCodec c = t.codec;
         if (!c.align_to(m).ok()) return std::string("align_to failed");
         if (auto e = check_encode(t, c, pad)) return e;
         for (std::uint64_t i = off; i < off + pad; ++i) {
           if (bit_at(c.stream().buffer(), i)) return std::string("padding bit is not zero");
         }
         AcnCodec r = c.reset_at(t.start).value();
         if (!r.skip_alignment(m).ok() || r.bit_index() != c.bit_index()) {
           return std::string("skip_alignment disagrees with align_to");
         }
         return std::nullopt;
       }},
  };
  return catalog;
}

// uint2int/int2uint are pure helpers; they roundtrip on the low bytes.
inline std::optional<std::string> int_conversion_trial(Rng& rng) {
  const unsigned k = 1 + static_cast<unsigned>(below(rng, 8));
  const std::uint64_t v = rng();
  const std::uint64_t mask = k == 8 ? ~std::uint64_t{0} : (std::uint64_t{1} << (8 * k)) - 1;
  const std::int64_t s = uint2int(v, k);
  if (int2uint(s, k) != (v & mask)) return std::string("int2uint(uint2int(v)) lost bits");
  // Wide-arithmetic oracle for the sign extension.
  const __int128 low = static_cast<__int128>(v & mask);
  const __int128 expect = (low >> (8 * k - 1)) ? low - (static_cast<__int128>(1) << (8 * k)) : low;
  if (static_cast<__int128>(s) != expect) return std::string("uint2int sign extension wrong");
  return std::nullopt;
}

}  // namespace acnkit::testing
