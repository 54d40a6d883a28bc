#pragma once

// Central network controller for the hybrid model: global stream registration,
// static path computation, multi-link admission with slot growth, and the
// out-of-band management channel it talks over.

#include <map>
#include <optional>
#include <vector>

#include "tsnsim/domain.hpp"
#include "tsnsim/reconfig.hpp"
#include "tsnsim/topology.hpp"

namespace tsn {

struct GclUpdate {
  SwitchId switch_id = 0;
  PortId port = 0;
  int slot_percent = 0;

  friend bool operator==(const GclUpdate&, const GclUpdate&) = default;
};

struct GlobalRegistration {
  StreamSpec spec;
  Path path;
  std::vector<std::pair<PortId, Bits>> allocation;
  Nanos expiry{0};
};

enum class RegistrationStatus { Accepted, Rejected, Duplicate };

struct RegistrationOutcome {
  RegistrationStatus status = RegistrationStatus::Rejected;
  Path path;
  std::vector<GclUpdate> updates;       // ports whose slot changed, in path order
  std::optional<PortId> bottleneck;     // first port that refused, on rejection
  AdmissionReason reason = AdmissionReason::FitsAsIs;

  bool accepted() const { return status == RegistrationStatus::Accepted; }
};

struct TerminationOutcome {
  bool found = false;
  std::vector<GclUpdate> updates;
};

/// Fixed-delay lossless management link: serialization of the message at the
/// channel rate plus a constant propagation delay.
struct SignalingChannel {
  BitRate rate = kGigabitPerSecond;
  Nanos propagation = kMicrosecond;

  Nanos one_way(int bytes) const { return transmission_time(bytes, rate) + propagation; }
  Nanos deliver_at(Nanos now, const CdtMessage& msg) const { return now + one_way(msg.size_bytes); }
};

class CentralController {
 public:
  CentralController(Topology topo, Nanos cycle_time, SlotPolicy policy)
      : topo_(std::move(topo)), policy_(policy) {
    ports_.reserve(static_cast<std::size_t>(topo_.num_ports()));
    for (PortId p = 0; p < topo_.num_ports(); ++p) {
      ports_.push_back(make_port_state(topo_.core_rate, cycle_time, policy_.empty_percent));
    }
  }

  const Topology& topology() const { return topo_; }
  const SlotPolicy& policy() const { return policy_; }
  const PortResourceState& port_state(PortId p) const { return ports_.at(static_cast<std::size_t>(p)); }
  const std::map<FlowId, GlobalRegistration>& registrations() const { return table_; }

  // Admission over every egress port of the stream's path. Either all ports
  // take the stream or none does: growth is computed on copies of the
  // affected mirrors and written back only when every port admits.
  RegistrationOutcome handle_registration(const StreamSpec& spec) {
    RegistrationOutcome out;
    if (table_.contains(spec.flow_id)) {
      out.status = RegistrationStatus::Duplicate;
      return out;
    }
    out.path = compute_path(topo_, spec.gateway, spec.sink);

    std::vector<PortResourceState> tentative;
    tentative.reserve(out.path.length());
    bool grown = false;
    for (const auto& hop : out.path.hops) {
      PortResourceState copy = port_state(hop.port);
      const auto d = try_admit(copy, spec, policy_);
      if (!d.admitted()) {
        out.status = RegistrationStatus::Rejected;
        out.bottleneck = hop.port;
        out.reason = d.reason;
        return out;
      }
      grown = grown || d.reason == AdmissionReason::Grown;
      commit(copy, spec, d);
      tentative.push_back(std::move(copy));
    }

    GlobalRegistration reg{spec, out.path, {}, spec.expiry()};
    for (std::size_t i = 0; i < out.path.length(); ++i) {
      const auto& hop = out.path.hops[i];
      auto& mirror = ports_[static_cast<std::size_t>(hop.port)];
      if (tentative[i].slot_percent != mirror.slot_percent) {
        out.updates.push_back({hop.switch_id, hop.port, tentative[i].slot_percent});
      }
      mirror = std::move(tentative[i]);
      reg.allocation.emplace_back(hop.port, spec.demand_per_cycle());
    }
    table_.emplace(spec.flow_id, std::move(reg));
    out.status = RegistrationStatus::Accepted;
    out.reason = grown ? AdmissionReason::Grown : AdmissionReason::FitsAsIs;
    return out;
  }

  // Releases the flow on every port of its path. Unknown flows are a no-op.
  TerminationOutcome handle_termination(FlowId flow) {
    TerminationOutcome out;
    auto it = table_.find(flow);
    if (it == table_.end()) return out;
    out.found = true;
    for (const auto& hop : it->second.path.hops) {
      auto r = release(ports_[static_cast<std::size_t>(hop.port)], flow, policy_);
      if (r.slot_changed) out.updates.push_back({hop.switch_id, hop.port, r.slot_percent});
    }
    table_.erase(it);
    return out;
  }

 private:
  Topology topo_;
  SlotPolicy policy_;
  std::vector<PortResourceState> ports_;
  std::map<FlowId, GlobalRegistration> table_;
};

}  // namespace tsn
