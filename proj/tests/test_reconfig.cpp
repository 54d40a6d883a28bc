#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tsnsim/reconfig.hpp"

using namespace tsn;

namespace {

constexpr Nanos kCt{50'000};

StreamSpec small(FlowId id) {
  StreamSpec s;
  s.flow_id = id;
  s.duration = kSecond;
  return s;
}

}  // namespace

TEST(Reconfig, NinetyPercentSlotHoldsEightySevenSmallStreams) {
  auto port = make_port_state(kGigabitPerSecond, kCt, 20);
  const auto policy = SlotPolicy::centralized(20, true);
  FlowId id = 1;
  while (admit(port, small(id), policy).admitted()) ++id;
  EXPECT_EQ(id - 1, 87u);
  EXPECT_EQ(port.slot_percent, 90);
  EXPECT_EQ(try_admit(port, small(1000), policy).reason, AdmissionReason::AtMaxSlot);
}

TEST(Reconfig, StaticSlotHoldsWhatFits) {
  auto port = make_port_state(kGigabitPerSecond, kCt, 20);
  const auto policy = SlotPolicy::centralized(20, false);
  FlowId id = 1;
  while (admit(port, small(id), policy).admitted()) ++id;
  // 10 us at 1 Gb/s = 10,000 bits = 19 frames of 512 bits.
  EXPECT_EQ(id - 1, 19u);
  EXPECT_EQ(port.slot_percent, 20);
}

TEST(Reconfig, GrowsInOnePercentSteps) {
  auto port = make_port_state(kGigabitPerSecond, kCt, 20);
  const auto policy = SlotPolicy::centralized(20, true);
  for (FlowId id = 1; id <= 19; ++id) ASSERT_EQ(admit(port, small(id), policy).reason, AdmissionReason::FitsAsIs);
  const auto d = admit(port, small(20), policy);
  EXPECT_EQ(d.reason, AdmissionReason::Grown);
  EXPECT_EQ(d.new_slot_percent, 21);  // 10,240 bits needs 10.5 kbit
  EXPECT_EQ(d.remaining_after, 10'500 - 20 * 512);
}

TEST(Reconfig, ReleaseShrinksToMinimalSlot) {
  auto port = make_port_state(kGigabitPerSecond, kCt, 20);
  const auto policy = SlotPolicy::centralized(20, true);
  for (FlowId id = 1; id <= 40; ++id) admit(port, small(id), policy);
  EXPECT_EQ(port.slot_percent, 41);
  for (FlowId id = 1; id <= 30; ++id) release(port, id, policy);
  EXPECT_EQ(port.slot_percent, 20);  // init ratio acts as the floor
  EXPECT_FALSE(release(port, 999, policy).found);
}

TEST(Reconfig, DistributedSlotStartsEmptyAndReturnsToZero) {
  const auto policy = SlotPolicy::distributed(true);
  auto port = make_port_state(kGigabitPerSecond, kCt, policy.empty_percent);
  EXPECT_EQ(port.slot_percent, 0);
  auto d = admit(port, small(1), policy);
  EXPECT_TRUE(d.admitted());
  EXPECT_EQ(d.new_slot_percent, 2);  // 1% = 500 bits < 512
  release(port, 1, policy);
  EXPECT_EQ(port.slot_percent, 0);
}

TEST(Reconfig, DuplicateFlowIsALogicError) {
  auto port = make_port_state(kGigabitPerSecond, kCt, 20);
  const auto policy = SlotPolicy::centralized(20, true);
  admit(port, small(1), policy);
  EXPECT_THROW(try_admit(port, small(1), policy), std::logic_error);
}

TEST(Reconfig, TwoEntryGcl) {
  const auto g = synthesize_gcl(Nanos{10'000}, kCt);
  ASSERT_EQ(g.entries.size(), 2u);
  EXPECT_EQ(g.entries[0].duration, Nanos{10'000});
  EXPECT_EQ(g.entries[0].open_classes, (ClassSet{TrafficClass::Cdt, TrafficClass::St}));
  EXPECT_EQ(g.entries[1].duration, Nanos{40'000});
  EXPECT_EQ(g.entries[1].open_classes, (ClassSet{TrafficClass::Cdt, TrafficClass::Be}));
  EXPECT_TRUE(g.well_formed());
  EXPECT_EQ(synthesize_gcl(Nanos{0}, kCt).entries.size(), 1u);
  EXPECT_THROW(synthesize_gcl(Nanos{45'001}, kCt), std::invalid_argument);
}

TEST(Reconfig, MatchesBruteForceEnumeration) {
  const auto r = oracle::check_reconfig_oracle(10'000, 42);
  EXPECT_EQ(r.cases, 10'000);
  EXPECT_EQ(r.mismatches, 0) << r.first_mismatch;
}

TEST(Reconfig, RemainingLoadNeverNegativeAfterAdmissions) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto policy = SlotPolicy::centralized(static_cast<int>(rng() % 91), (rng() & 1) != 0);
    auto port = make_port_state(kGigabitPerSecond, kCt, policy.empty_percent);
    for (FlowId id = 1; id <= 50; ++id) {
      StreamSpec s = small(id);
      s.packet_size = 64 + static_cast<int>(rng() % 1437);
      admit(port, s, policy);
      ASSERT_GE(port.remaining_load, 0);
      ASSERT_LE(port.slot_percent, 90);
      if (rng() % 3 == 0) {
        release(port, port.registered.begin()->first, policy);
        ASSERT_GE(port.remaining_load, 0);
      }
    }
  }
}
