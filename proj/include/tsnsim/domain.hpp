#pragma once

// Core value types shared by the data plane, the reconfiguration calculus and
// both configuration models (central controller and distributed switches).

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tsn {

using Nanos = std::chrono::nanoseconds;
using Bits = std::int64_t;
using FlowId = std::uint32_t;
using SwitchId = int;
using PortId = int;

inline constexpr Nanos kMicrosecond{1'000};
inline constexpr Nanos kSecond{1'000'000'000};
inline constexpr Nanos kNever = Nanos::max();

constexpr double to_us(Nanos t) { return static_cast<double>(t.count()) / 1e3; }
constexpr double to_seconds(Nanos t) { return static_cast<double>(t.count()) / 1e9; }

inline Nanos from_us(double us) { return Nanos{static_cast<std::int64_t>(us * 1e3 + (us >= 0 ? 0.5 : -0.5))}; }
inline Nanos from_seconds(double s) { return Nanos{static_cast<std::int64_t>(s * 1e9 + (s >= 0 ? 0.5 : -0.5))}; }

struct BitRate {
  std::int64_t bps = 0;

  friend constexpr bool operator==(BitRate, BitRate) = default;
};

inline constexpr BitRate kGigabitPerSecond{1'000'000'000};

// Serialization delay of `bytes` on a link of `rate`, rounded up to whole ns.
constexpr Nanos transmission_time(std::int64_t bytes, BitRate rate) {
  const std::int64_t bits = bytes * 8;
  return Nanos{(bits * 1'000'000'000 + rate.bps - 1) / rate.bps};
}

// Bits a link of `rate` carries in `span` (floor).
constexpr Bits bits_in(Nanos span, BitRate rate) {
  return static_cast<Bits>((static_cast<__int128>(span.count()) * rate.bps) / 1'000'000'000);
}

// Smallest multiple of `cycle` that is >= t.
constexpr Nanos ceil_to_cycle(Nanos t, Nanos cycle) {
  const auto k = (t.count() + cycle.count() - 1) / cycle.count();
  return Nanos{k * cycle.count()};
}

// First multiple of `cycle` strictly after t.
constexpr Nanos next_cycle_after(Nanos t, Nanos cycle) {
  return Nanos{(t.count() / cycle.count() + 1) * cycle.count()};
}

// Traffic classes in strict-priority order: lower value wins.
enum class TrafficClass : std::uint8_t { Cdt = 0, St = 1, Be = 2 };
inline constexpr std::size_t kNumClasses = 3;
inline constexpr TrafficClass kAllClasses[kNumClasses] = {TrafficClass::Cdt, TrafficClass::St,
                                                          TrafficClass::Be};

constexpr std::size_t index_of(TrafficClass c) { return static_cast<std::size_t>(c); }

constexpr std::string_view to_string(TrafficClass c) {
  switch (c) {
    case TrafficClass::Cdt: return "CDT";
    case TrafficClass::St: return "ST";
    case TrafficClass::Be: return "BE";
  }
  return "?";
}

class ClassSet {
 public:
  constexpr ClassSet() = default;
  constexpr ClassSet(std::initializer_list<TrafficClass> classes) {
    for (auto c : classes) bits_ |= mask(c);
  }

  constexpr bool contains(TrafficClass c) const { return (bits_ & mask(c)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr void insert(TrafficClass c) { bits_ |= mask(c); }

  friend constexpr bool operator==(ClassSet, ClassSet) = default;

 private:
  static constexpr std::uint8_t mask(TrafficClass c) { return static_cast<std::uint8_t>(1U << index_of(c)); }
  std::uint8_t bits_ = 0;
};

/// A scheduled-traffic stream as reported by its talker: identity, first-hop
/// bridge, destination, per-cycle injection and lifetime.
struct StreamSpec {
  FlowId flow_id = 0;
  int source_id = 0;
  SwitchId gateway = 0;
  SwitchId sink = 0;
  int hop_count = 1;         // clockwise switch-to-switch distance to the sink switch
  int frames_per_cycle = 1;  // gamma
  int packet_size = 64;      // bytes
  Nanos start_time{0};
  Nanos duration{0};

  constexpr Nanos expiry() const { return start_time + duration; }
  constexpr Bits demand_per_cycle() const {
    return static_cast<Bits>(frames_per_cycle) * packet_size * 8;
  }
};

inline void validate(const StreamSpec& s) {
  if (s.hop_count < 1 || s.hop_count > 5) throw std::invalid_argument("stream hop_count must be in [1,5]");
  if (s.duration <= Nanos{0}) throw std::invalid_argument("stream duration must be positive");
  if (s.frames_per_cycle < 1) throw std::invalid_argument("stream frames_per_cycle must be >= 1");
  if (s.packet_size < 1) throw std::invalid_argument("stream packet_size must be positive");
}

// Offered rate of a stream: gamma * size * 8 / CT, in bits per second.
inline double stream_rate(const StreamSpec& s, Nanos cycle_time) {
  if (cycle_time <= Nanos{0}) throw std::invalid_argument("cycle time must be positive");
  return static_cast<double>(s.demand_per_cycle()) * 1e9 / static_cast<double>(cycle_time.count());
}

// Egress bandwidth a stream needs while the ST gate is open: gamma * size * 8
// divided by the current slot. Empty when the port has no ST slot at all.
inline std::optional<double> port_bandwidth_requirement(const StreamSpec& s, Nanos st_slot_time) {
  if (st_slot_time <= Nanos{0}) return std::nullopt;
  return static_cast<double>(s.demand_per_cycle()) * 1e9 / static_cast<double>(st_slot_time.count());
}

struct GateControlEntry {
  ClassSet open_classes;
  Nanos duration{0};

  friend bool operator==(const GateControlEntry&, const GateControlEntry&) = default;
};

struct GateControlList {
  Nanos cycle_time{0};
  std::vector<GateControlEntry> entries;

  bool well_formed() const {
    if (cycle_time <= Nanos{0} || entries.empty()) return false;
    Nanos sum{0};
    for (const auto& e : entries) {
      if (e.duration <= Nanos{0}) return false;
      sum += e.duration;
    }
    return sum == cycle_time;
  }

  friend bool operator==(const GateControlList&, const GateControlList&) = default;
};

/// Per-egress-port ST accounting. The slot is held as an integer percentage of
/// the cycle, so every slot time is an exact multiple of CT/100.
struct PortResourceState {
  BitRate link_rate = kGigabitPerSecond;
  Nanos cycle_time{50'000};
  int slot_percent = 0;
  std::map<FlowId, Bits> registered;  // flow -> demand in bits per cycle
  Bits remaining_load = 0;

  Nanos slot_time_for(int percent) const { return cycle_time * percent / 100; }
  Nanos st_slot_time() const { return slot_time_for(slot_percent); }
  Bits capacity_at(int percent) const { return bits_in(slot_time_for(percent), link_rate); }
  Bits registered_demand() const {
    Bits sum = 0;
    for (const auto& [id, bits] : registered) sum += bits;
    return sum;
  }
};

inline PortResourceState make_port_state(BitRate rate, Nanos cycle_time, int slot_percent) {
  if (cycle_time.count() % 100 != 0) throw std::invalid_argument("cycle time must be a multiple of 100 ns");
  PortResourceState p;
  p.link_rate = rate;
  p.cycle_time = cycle_time;
  p.slot_percent = slot_percent;
  p.remaining_load = p.capacity_at(slot_percent);
  return p;
}

// Refreshes and returns remaining_load = slot capacity - registered demand.
// Negative means the port is oversubscribed.
inline Bits recompute_remaining_load(PortResourceState& port) {
  port.remaining_load = port.capacity_at(port.slot_percent) - port.registered_demand();
  return port.remaining_load;
}

/// One hop of a stream path: the switch and the egress port it leaves through.
struct Hop {
  SwitchId switch_id = 0;
  PortId port = 0;

  friend bool operator==(const Hop&, const Hop&) = default;
};

enum class CdtKind : std::uint8_t { TransmissionRequest, PendingReservation, ApprovalGranted, Rejection, Termination };

constexpr std::string_view to_string(CdtKind k) {
  switch (k) {
    case CdtKind::TransmissionRequest: return "TransmissionRequest";
    case CdtKind::PendingReservation: return "PendingReservation";
    case CdtKind::ApprovalGranted: return "ApprovalGranted";
    case CdtKind::Rejection: return "Rejection";
    case CdtKind::Termination: return "Termination";
  }
  return "?";
}

/// Control-plane signaling unit. `cursor` indexes the switch currently
/// handling the message: 0..path.size()-1 are the switches owning the path's
/// egress ports, path.size() is the sink switch.
struct CdtMessage {
  CdtKind kind = CdtKind::TransmissionRequest;
  StreamSpec stream;
  std::vector<Hop> path;
  std::size_t cursor = 0;
  int size_bytes = 64;
  Nanos sent_at{0};  // when the talker issued the original request

  SwitchId current_switch() const { return cursor < path.size() ? path[cursor].switch_id : stream.sink; }
  bool cursor_valid() const { return cursor <= path.size(); }
};

/// A frame in the data plane. ST frames carry the flow they belong to; CDT
/// frames carry the index of the control message they transport.
struct Frame {
  TrafficClass cls = TrafficClass::Be;
  std::optional<FlowId> flow_id;
  int size = 0;  // bytes
  Nanos created_at{0};
  SwitchId source_switch = 0;
  SwitchId sink_switch = 0;
  int direction = 0;            // ring direction the frame travels in
  std::uint32_t control_ref = 0;  // CDT payload handle
};

}  // namespace tsn
