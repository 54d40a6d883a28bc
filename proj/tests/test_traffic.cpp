#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "tsnsim/traffic.hpp"

using namespace tsn;

TEST(Traffic, SeedDerivationIsStableAndSpreads) {
  static_assert(splitmix64(0) == 0xE220A8397B1DCDAFULL);
  EXPECT_NE(derive_seed(1, 0x100), derive_seed(1, 0x101));
  EXPECT_NE(derive_seed(1, 0x100), derive_seed(2, 0x100));
  EXPECT_EQ(derive_seed(9, 3), derive_seed(9, 3));
}

TEST(Traffic, StreamArrivalStatistics) {
  StStreamGenerator g(2, 6, 20.0, from_seconds(5.0), 11);
  const Nanos horizon = from_seconds(500.0);
  std::array<int, 6> hops{};
  double dur_sum = 0;
  int n = 0;
  Nanos last{0};
  while (auto s = g.next(horizon, static_cast<FlowId>(n))) {
    EXPECT_GT(s->start_time, last);
    last = s->start_time;
    EXPECT_EQ(s->gateway, 2);
    EXPECT_EQ(s->sink, (2 + s->hop_count) % 6);
    ++hops[static_cast<std::size_t>(s->hop_count)];
    dur_sum += to_seconds(s->duration);
    ++n;
  }
  // 10,000 expected arrivals; 5 sigma is 500.
  EXPECT_NEAR(n, 10'000, 500);
  EXPECT_NEAR(dur_sum / n, 5.0, 0.25);
  EXPECT_EQ(hops[0], 0);
  for (int h = 1; h <= 5; ++h) EXPECT_NEAR(hops[static_cast<std::size_t>(h)], n / 5.0, 0.06 * n);
}

TEST(Traffic, SameSeedSameStreams) {
  StStreamGenerator a(0, 6, 5.0, from_seconds(2.0), 99), b(0, 6, 5.0, from_seconds(2.0), 99);
  for (int i = 0; i < 100; ++i) {
    auto x = a.next(kNever, 0), y = b.next(kNever, 0);
    ASSERT_TRUE(x && y);
    EXPECT_EQ(x->start_time, y->start_time);
    EXPECT_EQ(x->duration, y->duration);
    EXPECT_EQ(x->hop_count, y->hop_count);
  }
}

TEST(Traffic, BeRateAndOrder) {
  BeGenerator g(1e8, 1500, 5);  // 8,333 frames/s
  int n = 0;
  Nanos last{0};
  g.generate_until(from_seconds(10.0), [&](const BeArrival& a) {
    EXPECT_GE(a.created_at, last);
    EXPECT_GE(a.hop_count, 1);
    EXPECT_LE(a.hop_count, 5);
    last = a.created_at;
    ++n;
  });
  const double expect = 1e8 / 12'000.0 * 10;
  EXPECT_NEAR(n, expect, 5 * std::sqrt(expect));
}

TEST(Traffic, ZeroRatesProduceNothing) {
  StStreamGenerator g(0, 6, 0.0, kSecond, 1);
  EXPECT_FALSE(g.next(kNever, 0));
  BeGenerator b(0.0, 1500, 1);
  int n = 0;
  b.generate_until(kSecond, [&](const BeArrival&) { ++n; });
  EXPECT_EQ(n, 0);
}

TEST(Traffic, InjectionScheduleCounts) {
  StreamSpec s;
  s.start_time = Nanos{10'000};
  s.duration = Nanos{1'000'000};
  const auto inj = injection_process(s, Nanos{20'000}, Nanos{50'000});
  EXPECT_EQ(inj.first_boundary, Nanos{50'000});
  // Boundaries 50, 100, ..., 1000 us are before the 1,010 us expiry.
  EXPECT_EQ(inj.frames_offered(), 20u);
  EXPECT_TRUE(inj.active_at(Nanos{1'000'000}));
  EXPECT_FALSE(inj.active_at(Nanos{1'050'000}));
}
