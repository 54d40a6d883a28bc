#pragma once

// Reconfiguration calculus for the ST slot of one egress port: grow the slot
// in 1%-of-CT steps on admission, shrink it back on release, and turn a slot
// into the two-entry gate control list.

#include <string_view>

#include "tsnsim/domain.hpp"

namespace tsn {

/// Slot bounds for a configuration model.
///
/// `empty_percent` is the slot a port holds with no registered streams,
/// `floor_percent` the smallest slot while streams are registered. With
/// growth disabled the slot never moves from its current value.
struct SlotPolicy {
  int empty_percent = 20;
  int floor_percent = 20;
  int max_percent = 90;
  int step_percent = 1;
  bool growth = true;

  // Central controller: the initialized gating ratio is a floor.
  static SlotPolicy centralized(int init_percent, bool reconfigure) {
    return SlotPolicy{init_percent, init_percent, 90, 1, reconfigure};
  }

  // Distributed switches start with no ST slot and never go below 1% while
  // streams are registered. Without reconfiguration they run a static slot.
  static SlotPolicy distributed(bool reconfigure, int static_percent = 20) {
    if (!reconfigure) return SlotPolicy{static_percent, static_percent, 90, 1, false};
    return SlotPolicy{0, 1, 90, 1, true};
  }
};

enum class AdmissionOutcome { Admit, Reject };
enum class AdmissionReason { FitsAsIs, Grown, AtMaxSlot, NoCapacity };

constexpr std::string_view to_string(AdmissionReason r) {
  switch (r) {
    case AdmissionReason::FitsAsIs: return "fits-as-is";
    case AdmissionReason::Grown: return "grown";
    case AdmissionReason::AtMaxSlot: return "at-max-slot";
    case AdmissionReason::NoCapacity: return "no-capacity";
  }
  return "?";
}

struct AdmissionDecision {
  AdmissionOutcome outcome = AdmissionOutcome::Reject;
  int new_slot_percent = 0;  // meaningful on Admit
  AdmissionReason reason = AdmissionReason::NoCapacity;
  Bits remaining_after = 0;  // remaining load at new_slot_percent, on Admit

  bool admitted() const { return outcome == AdmissionOutcome::Admit; }
  Nanos new_slot_time(Nanos cycle_time) const { return cycle_time * new_slot_percent / 100; }
};

// Dry run: decides whether `spec` fits on `port` and at which slot, without
// touching the port.
inline AdmissionDecision try_admit(const PortResourceState& port, const StreamSpec& spec, const SlotPolicy& policy) {
  if (port.registered.contains(spec.flow_id)) throw std::logic_error("flow already registered on port");
  const Bits demand = port.registered_demand() + spec.demand_per_cycle();

  int slot = port.slot_percent;
  if (policy.growth) slot = std::max(slot, policy.floor_percent);
  bool moved = slot != port.slot_percent;

  while (port.capacity_at(slot) < demand) {
    if (!policy.growth) return {AdmissionOutcome::Reject, port.slot_percent, AdmissionReason::NoCapacity, 0};
    if (slot >= policy.max_percent) {
      return {AdmissionOutcome::Reject, port.slot_percent, AdmissionReason::AtMaxSlot, 0};
    }
    slot = std::min(slot + policy.step_percent, policy.max_percent);
    moved = true;
  }
  return {AdmissionOutcome::Admit, slot, moved ? AdmissionReason::Grown : AdmissionReason::FitsAsIs,
          port.capacity_at(slot) - demand};
}

// Applies an Admit decision produced by try_admit on the same port state.
inline void commit(PortResourceState& port, const StreamSpec& spec, const AdmissionDecision& d) {
  if (!d.admitted()) throw std::logic_error("cannot commit a rejected admission");
  port.registered.emplace(spec.flow_id, spec.demand_per_cycle());
  port.slot_percent = d.new_slot_percent;
  recompute_remaining_load(port);
}

// try_admit followed by commit when admitted.
inline AdmissionDecision admit(PortResourceState& port, const StreamSpec& spec, const SlotPolicy& policy) {
  auto d = try_admit(port, spec, policy);
  if (d.admitted()) commit(port, spec, d);
  return d;
}

// Smallest slot (a multiple of the step) whose capacity covers the demand
// currently registered, bounded by the policy.
inline int minimal_slot_percent(const PortResourceState& port, const SlotPolicy& policy) {
  if (port.registered.empty()) return policy.empty_percent;
  const Bits demand = port.registered_demand();
  int slot = policy.floor_percent;
  while (slot < policy.max_percent && port.capacity_at(slot) < demand) slot += policy.step_percent;
  return std::min(slot, policy.max_percent);
}

struct ReleaseResult {
  bool found = false;
  int slot_percent = 0;
  bool slot_changed = false;
};

// Removes a flow and shrinks the slot to the minimal sufficient value. An
// unknown flow leaves the port untouched and reports found == false.
inline ReleaseResult release(PortResourceState& port, FlowId flow, const SlotPolicy& policy) {
  auto it = port.registered.find(flow);
  if (it == port.registered.end()) return {false, port.slot_percent, false};
  port.registered.erase(it);
  const int before = port.slot_percent;
  if (policy.growth) port.slot_percent = std::min(before, minimal_slot_percent(port, policy));
  recompute_remaining_load(port);
  return {true, port.slot_percent, port.slot_percent != before};
}

// Two entries: {CDT, ST} for the slot, then {CDT, BE} for the rest of the
// cycle. A zero slot yields a single BE entry spanning the cycle.
inline GateControlList synthesize_gcl(Nanos st_slot_time, Nanos cycle_time) {
  if (cycle_time <= Nanos{0}) throw std::invalid_argument("cycle time must be positive");
  if (st_slot_time < Nanos{0} || st_slot_time * 10 > cycle_time * 9) {
    throw std::invalid_argument("ST slot must lie within [0, 90%] of the cycle");
  }
  GateControlList gcl{cycle_time, {}};
  if (st_slot_time > Nanos{0}) {
    gcl.entries.push_back({ClassSet{TrafficClass::Cdt, TrafficClass::St}, st_slot_time});
  }
  gcl.entries.push_back({ClassSet{TrafficClass::Cdt, TrafficClass::Be}, cycle_time - st_slot_time});
  return gcl;
}

inline GateControlList synthesize_gcl(const PortResourceState& port) {
  return synthesize_gcl(port.st_slot_time(), port.cycle_time);
}

}  // namespace tsn
