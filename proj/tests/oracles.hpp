#pragma once

// Independent reference models used by the unit tests and the acceptance run.

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "tsnsim/distributed.hpp"
#include "tsnsim/reconfig.hpp"

namespace oracle {

using namespace tsn;

// Bits a slot of `percent` of CT carries, without the library's helpers.
inline std::int64_t slot_bits(std::int64_t ct_ns, std::int64_t rate_bps, int percent) {
  const std::int64_t slot_ns = ct_ns * percent / 100;
  return static_cast<std::int64_t>(static_cast<__int128>(slot_ns) * rate_bps / 1'000'000'000);
}

struct Verdict {
  bool admit = false;
  int slot = 0;
};

// Enumerates every 1% slot in [0, 90] and takes the smallest one reachable
// from the current slot (never below it, never below the floor) whose
// capacity covers the registered demand plus the new stream.
inline Verdict brute_force_admit(std::int64_t ct_ns, std::int64_t rate_bps, int current, std::int64_t registered_bits,
                                 std::int64_t new_bits, int floor, int max, bool growth) {
  const std::int64_t need = registered_bits + new_bits;
  if (!growth) return {slot_bits(ct_ns, rate_bps, current) >= need, current};
  std::optional<int> best;
  for (int s = 0; s <= 90; ++s) {
    if (s < current || s < floor || s > max) continue;
    if (slot_bits(ct_ns, rate_bps, s) >= need) {
      best = s;
      break;
    }
  }
  if (!best) return {false, current};
  return {true, *best};
}

// Message fabric for SwitchAgents: delivers outgoing messages in an order
// chosen by an RNG, so arbitrary interleavings of concurrent streams occur.
class Loopback {
 public:
  struct Delivered {
    CdtMessage msg;
    SwitchId from;
    SwitchId to;
  };

  Loopback(const Topology& topo, SlotPolicy policy, std::uint64_t seed) : topo_(topo), rng_(seed) {
    for (SwitchId s = 0; s < topo.switches; ++s) agents_.emplace_back(s, topo, Nanos{50'000}, policy);
  }

  std::vector<SwitchAgent>& agents() { return agents_; }
  const std::vector<Delivered>& log() const { return log_; }
  const std::map<FlowId, CdtKind>& outcomes() const { return outcomes_; }
  // Commit cursor order per flow, in the order the commits happened.
  const std::map<FlowId, std::vector<std::size_t>>& commit_order() const { return commits_; }
  std::size_t diagnostics() const { return diagnostics_; }

  void submit(const StreamSpec& s) {
    CdtMessage m;
    m.kind = CdtKind::TransmissionRequest;
    m.stream = s;
    const auto path = compute_path(topo_, s.gateway, s.sink);
    m.path = path.hops;
    m.cursor = 0;
    inflight_.push_back({m, kToSource, s.gateway});
  }

  bool idle() const { return inflight_.empty(); }

  // Delivers one randomly chosen in-flight message.
  void step(Nanos now = Nanos{0}) {
    std::uniform_int_distribution<std::size_t> pick(0, inflight_.size() - 1);
    const std::size_t i = pick(rng_);
    Delivered d = inflight_[i];
    inflight_.erase(inflight_.begin() + static_cast<std::ptrdiff_t>(i));
    if (d.from != kToSource) log_.push_back(d);
    if (d.to == kToSource) {
      outcomes_[d.msg.stream.flow_id] = d.msg.kind;
      return;
    }
    auto a = agents_[static_cast<std::size_t>(d.to)].handle(d.msg, now);
    diagnostics_ += a.diagnostics.size();
    if (d.msg.kind == CdtKind::PendingReservation) {
      for (auto& e : a.events) {
        if (e.kind == StreamEventKind::Addition) commits_[e.flow].push_back(d.msg.cursor);
      }
    }
    for (auto& o : a.messages) inflight_.push_back({o.msg, d.to, o.to});
  }

  void run(Nanos now = Nanos{0}) {
    while (!idle()) step(now);
  }

  // Bridge-to-bridge and bridge-to-talker messages for one flow.
  std::size_t messages_for(FlowId f) const {
    std::size_t n = 0;
    for (const auto& d : log_) n += d.msg.stream.flow_id == f ? 1 : 0;
    return n;
  }

 private:
  Topology topo_;
  std::mt19937_64 rng_;
  std::vector<SwitchAgent> agents_;
  std::vector<Delivered> inflight_;
  std::vector<Delivered> log_;
  std::map<FlowId, CdtKind> outcomes_;
  std::map<FlowId, std::vector<std::size_t>> commits_;
  std::size_t diagnostics_ = 0;
};

struct ProtocolCheck {
  int cases = 0;
  int failures = 0;
  std::string first_failure;
};

// Randomized interleavings of concurrent registrations on a six-switch ring.
// Per case: every stream reaches a terminal outcome, no Pending entry
// survives, commits run from the last hop back to the gateway, an accepted
// N-hop stream costs exactly 2N+1 messages, and every port's demand matches
// the streams that were approved.
inline ProtocolCheck check_protocol(int cases, std::uint64_t seed) {
  ProtocolCheck r;
  std::mt19937_64 rng(seed);
  auto fail = [&](int c, const std::string& why) {
    if (r.failures++ == 0) r.first_failure = "case " + std::to_string(c) + ": " + why;
  };
  for (int c = 0; c < cases; ++c) {
    ++r.cases;
    const auto kind = (rng() & 1) ? TopologyKind::BiRing : TopologyKind::UniRing;
    const auto topo = make_ring(kind);
    const bool growth = (rng() % 3) != 0;
    Loopback net(topo, SlotPolicy::distributed(growth, 1 + static_cast<int>(rng() % 20)), rng());
    const int n = 1 + static_cast<int>(rng() % 12);
    std::map<FlowId, StreamSpec> specs;
    for (int i = 0; i < n; ++i) {
      StreamSpec s;
      s.flow_id = static_cast<FlowId>(i + 1);
      s.gateway = static_cast<SwitchId>(rng() % 6);
      s.hop_count = 1 + static_cast<int>(rng() % 5);
      s.sink = (s.gateway + s.hop_count) % 6;
      s.frames_per_cycle = 1 + static_cast<int>(rng() % 8);
      s.packet_size = (rng() & 1) ? 1500 : 64;
      s.duration = kSecond;
      specs[s.flow_id] = s;
      net.submit(s);
      // Let a few messages through between submissions.
      for (int k = static_cast<int>(rng() % 4); k > 0 && !net.idle(); --k) net.step();
    }
    net.run();
    if (net.diagnostics()) fail(c, "agent diagnostics");
    for (auto& a : net.agents()) {
      if (a.pending_count()) fail(c, "pending entry leaked at switch " + std::to_string(a.id()));
    }
    std::map<PortId, Bits> approved_demand;
    for (const auto& [f, s] : specs) {
      auto it = net.outcomes().find(f);
      if (it == net.outcomes().end()) {
        fail(c, "flow " + std::to_string(f) + " has no outcome");
        continue;
      }
      const auto path = compute_path(topo, s.gateway, s.sink);
      const std::size_t hops = path.length();
      const auto commits = net.commit_order().count(f) ? net.commit_order().at(f) : std::vector<std::size_t>{};
      if (it->second == CdtKind::ApprovalGranted) {
        if (net.messages_for(f) != 2 * hops + 1) {
          fail(c, "flow " + std::to_string(f) + " used " + std::to_string(net.messages_for(f)) + " messages over " +
                      std::to_string(hops) + " hops");
        }
        std::vector<std::size_t> expect;
        for (std::size_t k = hops; k-- > 0;) expect.push_back(k);
        if (commits != expect) fail(c, "flow " + std::to_string(f) + " committed out of reverse order");
        for (const auto& h : path.hops) approved_demand[h.port] += s.demand_per_cycle();
      } else if (it->second != CdtKind::Rejection) {
        fail(c, "flow " + std::to_string(f) + " ended with an unexpected message");
      } else {
        for (std::size_t k = 1; k < commits.size(); ++k) {
          if (commits[k] >= commits[k - 1]) fail(c, "rejected flow committed out of reverse order");
        }
      }
    }
    for (auto& a : net.agents()) {
      for (PortId p : {topo.port_id(a.id(), kClockwise), topo.port_id(a.id(), kCounterClockwise)}) {
        const auto& st = a.port_state(p);
        const Bits want = approved_demand.count(p) ? approved_demand[p] : 0;
        if (st.registered_demand() != want) fail(c, "port " + std::to_string(p) + " demand mismatch");
        if (st.registered_demand() > st.capacity_at(st.slot_percent)) fail(c, "port " + std::to_string(p) + " oversubscribed");
      }
    }
  }
  return r;
}

struct OracleCheck {
  int cases = 0;
  int mismatches = 0;
  std::string first_mismatch;
};

// Random port states built on rings of at most three switches with at most
// eight streams, then one more try_admit per port compared with the
// enumeration above. Each port checked counts as one case.
inline OracleCheck check_reconfig_oracle(int cases, std::uint64_t seed) {
  OracleCheck r;
  std::mt19937_64 rng(seed);
  const std::int64_t ct = 50'000;
  for (int c = 0; r.cases < cases; ++c) {
    const int switches = 2 + static_cast<int>(rng() % 2);
    const auto topo = make_ring((rng() & 1) ? TopologyKind::BiRing : TopologyKind::UniRing, switches);
    SlotPolicy policy;
    switch (rng() % 3) {
      case 0: policy = SlotPolicy::centralized(static_cast<int>(rng() % 91), true); break;
      case 1: policy = SlotPolicy::distributed(true); break;
      default: policy = SlotPolicy::centralized(static_cast<int>(rng() % 91), false); break;
    }
    std::vector<PortResourceState> ports;
    for (PortId p = 0; p < topo.num_ports(); ++p) ports.push_back(make_port_state(topo.core_rate, Nanos{ct}, policy.empty_percent));
    const int streams = static_cast<int>(rng() % 9);
    FlowId next = 1;
    auto random_stream = [&] {
      StreamSpec s;
      s.flow_id = next++;
      s.frames_per_cycle = 1 + static_cast<int>(rng() % 4);
      s.packet_size = 64 + static_cast<int>(rng() % 1437);
      s.duration = kSecond;
      return s;
    };
    for (int i = 0; i < streams; ++i) {
      auto s = random_stream();
      auto& port = ports[rng() % ports.size()];
      admit(port, s, policy);
      if (rng() % 4 == 0 && !port.registered.empty()) release(port, port.registered.begin()->first, policy);
    }
    for (auto& port : ports) {
      if (r.cases == cases) break;
      ++r.cases;
      auto s = random_stream();
      const auto got = try_admit(port, s, policy);
      Bits reg = 0;
      for (auto& [f, b] : port.registered) reg += b;
      const auto want = brute_force_admit(ct, port.link_rate.bps, port.slot_percent, reg, s.demand_per_cycle(),
                                          policy.floor_percent, policy.max_percent, policy.growth);
      const bool ok = got.admitted() == want.admit && (!want.admit || got.new_slot_percent == want.slot);
      if (!ok && r.mismatches++ == 0) {
        r.first_mismatch = "case " + std::to_string(c) + ": slot " + std::to_string(port.slot_percent) + " demand " +
                           std::to_string(reg) + "+" + std::to_string(s.demand_per_cycle()) + " got " +
                           std::to_string(got.new_slot_percent) + " want " + std::to_string(want.slot);
      }
    }
  }
  return r;
}

}  // namespace oracle
