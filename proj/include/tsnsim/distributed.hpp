#pragma once

// Fully distributed registration: each switch runs admission for its own
// egress ports. Requests travel forward along the stream path with a dry-run
// feasibility check at every hop; the sink switch turns them around and
// resources are committed hop by hop on the way back to the gateway.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tsnsim/cnc.hpp"
#include "tsnsim/domain.hpp"
#include "tsnsim/reconfig.hpp"
#include "tsnsim/topology.hpp"

namespace tsn {

enum class EntryState { Pending, Registered };

struct LocalEntry {
  StreamSpec spec;
  EntryState state = EntryState::Pending;
  Bits demand = 0;
  Nanos expiry{0};
};

// Per egress port: flow -> entry.
using LocalRegistrationTable = std::map<PortId, std::map<FlowId, LocalEntry>>;

enum class StreamEventKind { Addition, Removal, Pending };

struct StreamEvent {
  StreamEventKind kind;
  FlowId flow;
};

inline constexpr SwitchId kToSource = -1;

struct Outgoing {
  CdtMessage msg;
  SwitchId to = kToSource;  // next switch, or kToSource for the talker
};

struct AgentActions {
  std::vector<Outgoing> messages;
  std::vector<GclUpdate> updates;
  std::vector<StreamEvent> events;
  std::optional<Nanos> expiry_check;  // earliest time expire_streams must run
  std::vector<std::string> diagnostics;
};

class SwitchAgent {
 public:
  // Registered streams are released `release_grace` after their expiry, which
  // leaves frames injected just before expiry time to drain.
  SwitchAgent(SwitchId id, const Topology& topo, Nanos cycle_time, SlotPolicy policy, Nanos release_grace = Nanos{0})
      : id_(id), policy_(policy), grace_(release_grace) {
    for (int dir : {kClockwise, kCounterClockwise}) {
      const PortId p = topo.port_id(id, dir);
      ports_.emplace(p, make_port_state(topo.core_rate, cycle_time, policy_.empty_percent));
      table_[p];
    }
  }

  SwitchId id() const { return id_; }
  const SlotPolicy& policy() const { return policy_; }
  const PortResourceState& port_state(PortId p) const { return ports_.at(p); }
  const LocalRegistrationTable& table() const { return table_; }

  std::optional<EntryState> state_of(FlowId flow) const {
    for (const auto& [port, entries] : table_) {
      if (auto it = entries.find(flow); it != entries.end()) return it->second.state;
    }
    return std::nullopt;
  }

  std::size_t pending_count() const {
    std::size_t n = 0;
    for (const auto& [port, entries] : table_) {
      for (const auto& [flow, e] : entries) n += e.state == EntryState::Pending ? 1 : 0;
    }
    return n;
  }

  AgentActions handle(const CdtMessage& msg, Nanos now) {
    switch (msg.kind) {
      case CdtKind::TransmissionRequest: return on_request_forward(msg, now);
      case CdtKind::PendingReservation: return on_reverse_reserve(msg, now);
      case CdtKind::Rejection: return on_rejection(msg, now);
      case CdtKind::Termination: return on_termination(msg, now);
      case CdtKind::ApprovalGranted: break;
    }
    AgentActions a;
    a.diagnostics.push_back("switch received a message addressed to a talker");
    return a;
  }

  // Forward phase: dry-run admission on this switch's egress port, then
  // either pass the request on or start a rejection back to the talker.
  AgentActions on_request_forward(const CdtMessage& msg, Nanos /*now*/) {
    AgentActions a;
    const std::size_t c = msg.cursor;
    if (c == msg.path.size()) {
      a.messages.push_back(upstream(msg, CdtKind::PendingReservation));
      return a;
    }
    const PortId port = msg.path[c].port;
    auto& entries = table_[port];
    if (entries.contains(msg.stream.flow_id)) {
      a.diagnostics.push_back("duplicate request for flow " + std::to_string(msg.stream.flow_id));
      return a;
    }
    const auto d = try_admit(ports_.at(port), msg.stream, policy_);
    if (d.admitted()) {
      entries.emplace(msg.stream.flow_id,
                      LocalEntry{msg.stream, EntryState::Pending, msg.stream.demand_per_cycle(), msg.stream.expiry() + grace_});
      a.events.push_back({StreamEventKind::Pending, msg.stream.flow_id});
      a.messages.push_back(downstream(msg, CdtKind::TransmissionRequest));
    } else {
      a.messages.push_back(upstream(msg, CdtKind::Rejection));
    }
    return a;
  }

  // Reverse phase: commit the pending entry. Slack consumed by another
  // stream since the dry run turns into a late rejection sent both ways.
  AgentActions on_reverse_reserve(const CdtMessage& msg, Nanos now) {
    AgentActions a;
    const std::size_t c = msg.cursor;
    if (c >= msg.path.size()) {
      a.diagnostics.push_back("reservation addressed past the last controlled hop");
      return a;
    }
    const PortId port = msg.path[c].port;
    auto& entries = table_[port];
    auto it = entries.find(msg.stream.flow_id);
    if (it == entries.end() || it->second.state != EntryState::Pending) {
      a.diagnostics.push_back("reservation without pending entry for flow " + std::to_string(msg.stream.flow_id));
      return a;
    }
    auto& state = ports_.at(port);
    const auto d = try_admit(state, msg.stream, policy_);
    if (!d.admitted()) {
      entries.erase(it);
      a.messages.push_back(upstream(msg, CdtKind::Rejection));
      if (c + 1 < msg.path.size()) a.messages.push_back(downstream(msg, CdtKind::Termination));
      return a;
    }
    const int before = state.slot_percent;
    commit(state, msg.stream, d);
    it->second.state = EntryState::Registered;
    if (state.slot_percent != before) a.updates.push_back({id_, port, state.slot_percent});
    a.events.push_back({StreamEventKind::Addition, msg.stream.flow_id});
    a.expiry_check = std::max(now, it->second.expiry);
    a.messages.push_back(upstream(msg, c == 0 ? CdtKind::ApprovalGranted : CdtKind::PendingReservation));
    return a;
  }

  AgentActions on_rejection(const CdtMessage& msg, Nanos /*now*/) {
    AgentActions a;
    const std::size_t c = msg.cursor;
    if (c < msg.path.size()) drop_entry(msg.path[c].port, msg.stream.flow_id, a);
    a.messages.push_back(upstream(msg, CdtKind::Rejection));
    return a;
  }

  // Tear-down of commitments downstream of a late rejection.
  AgentActions on_termination(const CdtMessage& msg, Nanos /*now*/) {
    AgentActions a;
    const std::size_t c = msg.cursor;
    if (c < msg.path.size()) drop_entry(msg.path[c].port, msg.stream.flow_id, a);
    if (c + 1 < msg.path.size()) a.messages.push_back(downstream(msg, CdtKind::Termination));
    return a;
  }

  // Releases every registered stream whose lifetime has run out. Each switch
  // stored the lifetime at registration, so no signaling is involved.
  std::vector<GclUpdate> expire_streams(Nanos now, std::vector<StreamEvent>* events = nullptr) {
    std::vector<GclUpdate> updates;
    for (auto& [port, entries] : table_) {
      bool changed = false;
      for (auto it = entries.begin(); it != entries.end();) {
        if (it->second.state == EntryState::Registered && it->second.expiry <= now) {
          changed = release(ports_.at(port), it->first, policy_).slot_changed || changed;
          if (events != nullptr) events->push_back({StreamEventKind::Removal, it->first});
          it = entries.erase(it);
        } else {
          ++it;
        }
      }
      if (changed) updates.push_back({id_, port, ports_.at(port).slot_percent});
    }
    return updates;
  }

 private:
  static Outgoing upstream(const CdtMessage& msg, CdtKind kind) {
    Outgoing o{msg, kToSource};
    o.msg.kind = kind;
    if (msg.cursor == 0) return o;
    o.msg.cursor = msg.cursor - 1;
    o.to = o.msg.current_switch();
    return o;
  }

  static Outgoing downstream(const CdtMessage& msg, CdtKind kind) {
    Outgoing o{msg, kToSource};
    o.msg.kind = kind;
    o.msg.cursor = msg.cursor + 1;
    o.to = o.msg.current_switch();
    return o;
  }

  void drop_entry(PortId port, FlowId flow, AgentActions& a) {
    auto& entries = table_[port];
    auto it = entries.find(flow);
    if (it == entries.end()) return;
    if (it->second.state == EntryState::Registered) {
      auto r = release(ports_.at(port), flow, policy_);
      if (r.slot_changed) a.updates.push_back({id_, port, r.slot_percent});
      a.events.push_back({StreamEventKind::Removal, flow});
    }
    entries.erase(it);
  }

  SwitchId id_;
  SlotPolicy policy_;
  Nanos grace_;
  std::map<PortId, PortResourceState> ports_;
  LocalRegistrationTable table_;
};

}  // namespace tsn
