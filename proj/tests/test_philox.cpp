#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <set>

#include "gwi/philox.hpp"

using gwi::Philox4x32;

namespace {

void expect_block(Philox4x32::Counter ctr, Philox4x32::Key key, Philox4x32::Counter want) {
  const auto got = Philox4x32::encrypt(ctr, key);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(got[i], want[i]) << "word " << i;
}

}  // namespace

TEST(Philox, KnownAnswerZero) {
  expect_block({0, 0, 0, 0}, {0, 0}, {0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
}

TEST(Philox, KnownAnswerOnes) {
  expect_block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff},
               {0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
}

TEST(Philox, KnownAnswerPi) {
  expect_block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0},
               {0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST(CounterStream, ReproducibleAndIndependentOfOtherStreams) {
  gwi::CounterStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
    EXPECT_NE(x, d.next_u64());
    seen.insert(x);
  }
  EXPECT_EQ(seen.size(), 100u);
}

TEST(CounterStream, UniformsInOpenUnitInterval) {
  gwi::CounterStream s(1, 0);
  double sum = 0.0;
  constexpr int kN = 200000;
  for (int i = 0; i < kN; ++i) {
    const double u = s.next_uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / kN, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / kN));
}
