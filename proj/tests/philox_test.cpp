#include "ergl/philox.hpp"

#include <gtest/gtest.h>

#include <set>

namespace ergl {
namespace {

// Known-answer vectors distributed with the Random123 library.
TEST(Philox, KnownAnswerZero) {
  const PhiloxBlock out = philox4x32({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (PhiloxBlock{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerAllOnes) {
  const PhiloxBlock out =
      philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out, (PhiloxBlock{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi) {
  const PhiloxBlock out =
      philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out, (PhiloxBlock{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Philox, UsableAtCompileTime) {
  constexpr PhiloxBlock out = philox4x32({0, 0, 0, 0}, {0, 0});
  static_assert(out[0] == 0x6627e8d5u);
}

TEST(Philox, KeyFromSeedSplitsWords) {
  EXPECT_EQ(philox_key(0x0123456789abcdefull), (PhiloxKey{0x89abcdefu, 0x01234567u}));
}

TEST(Philox, StreamTagsSeparateDraws) {
  const PhiloxKey key = philox_key(42);
  std::set<PhiloxBlock> seen;
  for (const auto tag : {StreamTag::kEdge, StreamTag::kAssignment, StreamTag::kPermutation}) {
    seen.insert(philox4x32({0, 0, 0, static_cast<std::uint32_t>(tag)}, key));
  }
  EXPECT_EQ(seen.size(), 3u);
}

TEST(Philox, ScaleStaysInRange) {
  for (const std::uint32_t range : {1u, 2u, 3u, 7u, 1000u, 0xffffffffu}) {
    EXPECT_EQ(scale32(0, range), 0u);
    EXPECT_EQ(scale32(0xffffffffu, range), range - 1);
  }
  EXPECT_EQ(scale64(~std::uint64_t{0}, 56), 55u);
  EXPECT_EQ(scale64(0, 56), 0u);
}

TEST(Philox, UnitDoubleInHalfOpenInterval) {
  EXPECT_EQ(unit_double(0), 0.0);
  EXPECT_LT(unit_double(~std::uint64_t{0}), 1.0);
  EXPECT_EQ(unit_double(std::uint64_t{1} << 63), 0.5);
  EXPECT_EQ(join64(1, 2), (std::uint64_t{1} << 32) | 2);
}

}  // namespace
}  // namespace ergl
