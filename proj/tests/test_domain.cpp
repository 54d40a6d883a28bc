#include <gtest/gtest.h>

#include "tsnsim/domain.hpp"

using namespace tsn;

namespace {

StreamSpec spec(int gamma = 1, int size = 64) {
  StreamSpec s;
  s.frames_per_cycle = gamma;
  s.packet_size = size;
  s.duration = kSecond;
  return s;
}

}  // namespace

TEST(Domain, TransmissionTimeOfCommonFrames) {
  EXPECT_EQ(transmission_time(64, kGigabitPerSecond), Nanos{512});
  EXPECT_EQ(transmission_time(1500, kGigabitPerSecond), Nanos{12'000});
  EXPECT_EQ(transmission_time(64, BitRate{2'000'000'000}), Nanos{256});
  // 8 bits at 3 Gb/s = 2.67 ns, rounded up.
  EXPECT_EQ(transmission_time(1, BitRate{3'000'000'000}), Nanos{3});
}

TEST(Domain, BitsInSpan) {
  EXPECT_EQ(bits_in(Nanos{10'000}, kGigabitPerSecond), 10'000);
  EXPECT_EQ(bits_in(Nanos{45'000}, kGigabitPerSecond), 45'000);
  EXPECT_EQ(bits_in(Nanos{1}, BitRate{999'999'999}), 0);
}

TEST(Domain, StreamRateOfOneSmallFramePerCycle) {
  EXPECT_DOUBLE_EQ(stream_rate(spec(), Nanos{50'000}), 10.24e6);
  EXPECT_DOUBLE_EQ(stream_rate(spec(3, 100), Nanos{50'000}), 3 * 800 * 1e9 / 50'000);
  EXPECT_THROW(stream_rate(spec(), Nanos{0}), std::invalid_argument);
}

TEST(Domain, PortBandwidthRequirement) {
  auto bw = port_bandwidth_requirement(spec(), Nanos{10'000});
  ASSERT_TRUE(bw);
  EXPECT_DOUBLE_EQ(*bw, 51.2e6);
  EXPECT_FALSE(port_bandwidth_requirement(spec(), Nanos{0}));
}

TEST(Domain, CycleRounding) {
  const Nanos ct{50'000};
  EXPECT_EQ(ceil_to_cycle(Nanos{0}, ct), Nanos{0});
  EXPECT_EQ(ceil_to_cycle(Nanos{1}, ct), ct);
  EXPECT_EQ(ceil_to_cycle(ct, ct), ct);
  EXPECT_EQ(next_cycle_after(Nanos{0}, ct), ct);
  EXPECT_EQ(next_cycle_after(ct, ct), 2 * ct);
  EXPECT_EQ(next_cycle_after(ct - Nanos{1}, ct), ct);
}

TEST(Domain, StreamValidation) {
  auto s = spec();
  EXPECT_NO_THROW(validate(s));
  s.hop_count = 6;
  EXPECT_THROW(validate(s), std::invalid_argument);
  s = spec();
  s.duration = Nanos{0};
  EXPECT_THROW(validate(s), std::invalid_argument);
  s = spec(0);
  EXPECT_THROW(validate(s), std::invalid_argument);
}

TEST(Domain, GclWellFormed) {
  GateControlList g{Nanos{50'000}, {{ClassSet{TrafficClass::St}, Nanos{10'000}}, {ClassSet{TrafficClass::Be}, Nanos{40'000}}}};
  EXPECT_TRUE(g.well_formed());
  g.entries[1].duration = Nanos{39'999};
  EXPECT_FALSE(g.well_formed());
  g.entries.clear();
  EXPECT_FALSE(g.well_formed());
}

TEST(Domain, PortStateArithmetic) {
  auto p = make_port_state(kGigabitPerSecond, Nanos{50'000}, 20);
  EXPECT_EQ(p.st_slot_time(), Nanos{10'000});
  EXPECT_EQ(p.remaining_load, 10'000);
  p.registered[1] = 512;
  p.registered[2] = 512;
  EXPECT_EQ(recompute_remaining_load(p), 10'000 - 1024);
  EXPECT_THROW(make_port_state(kGigabitPerSecond, Nanos{50'050}, 20), std::invalid_argument);
}

TEST(Domain, ClassSet) {
  ClassSet s{TrafficClass::Cdt, TrafficClass::Be};
  EXPECT_TRUE(s.contains(TrafficClass::Cdt));
  EXPECT_FALSE(s.contains(TrafficClass::St));
  s.insert(TrafficClass::St);
  EXPECT_TRUE(s.contains(TrafficClass::St));
  EXPECT_TRUE(ClassSet{}.empty());
}
