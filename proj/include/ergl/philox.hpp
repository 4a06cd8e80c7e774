#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// Every random quantity in the library is a pure function of
// (seed, counter): the 64-bit seed is the Philox key and the counter names
// the draw. Draws can therefore be replayed in any order and from any
// thread.

#include <array>
#include <cstdint>

namespace ergl {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;
using PhiloxBlock = std::array<std::uint32_t, 4>;

namespace detail {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

constexpr void philox_round(PhiloxCounter& ctr, const PhiloxKey& key) {
  const std::uint64_t p0 = std::uint64_t{kPhiloxM0} * ctr[0];
  const std::uint64_t p1 = std::uint64_t{kPhiloxM1} * ctr[2];
  ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
         static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
         static_cast<std::uint32_t>(p0)};
}

}  // namespace detail

constexpr PhiloxBlock philox4x32(PhiloxCounter ctr, PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += detail::kPhiloxW0;
      key[1] += detail::kPhiloxW1;
    }
    detail::philox_round(ctr, key);
  }
  return ctr;
}

constexpr PhiloxKey philox_key(std::uint64_t seed) {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

/// Stream tags occupy counter word 3 so that independent uses of one seed
/// never collide.
enum class StreamTag : std::uint32_t {
  kEdge = 0x45444745u,        // "EDGE"
  kAssignment = 0x41535347u,  // "ASSG"
  kPermutation = 0x5045524Du, // "PERM"
};

/// Maps a 32-bit word to [0, range) by multiply-shift; bias is at most
/// range / 2^32.
constexpr std::uint32_t scale32(std::uint32_t word, std::uint32_t range) {
  return static_cast<std::uint32_t>((std::uint64_t{word} * range) >> 32);
}

/// Maps a 64-bit word to [0, range) by multiply-shift; bias is at most
/// range / 2^64.
constexpr std::uint64_t scale64(std::uint64_t word, std::uint64_t range) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(word) * range) >> 64);
}

constexpr std::uint64_t join64(std::uint32_t hi, std::uint32_t lo) {
  return (std::uint64_t{hi} << 32) | lo;
}

/// Uniform double in [0, 1) with 53 random bits.
constexpr double unit_double(std::uint64_t word) {
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

}  // namespace ergl
