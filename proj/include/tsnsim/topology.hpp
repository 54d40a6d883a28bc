#pragma once

// Ring of core TSN switches. Every switch owns two core egress ports, one per
// ring direction; on the unidirectional ring only the clockwise ports carry
// data, the counter-clockwise ones exist for returning control traffic.

#include <string_view>
#include <vector>

#include "tsnsim/domain.hpp"

namespace tsn {

enum class TopologyKind { UniRing, BiRing };

constexpr std::string_view to_string(TopologyKind k) { return k == TopologyKind::UniRing ? "uni" : "bi"; }

inline constexpr int kClockwise = 0;
inline constexpr int kCounterClockwise = 1;

struct Topology {
  TopologyKind kind = TopologyKind::UniRing;
  int switches = 6;
  BitRate core_rate = kGigabitPerSecond;
  BitRate edge_rate = kGigabitPerSecond;
  Nanos core_propagation{500};
  Nanos edge_propagation{0};

  int num_ports() const { return switches * 2; }
  PortId port_id(SwitchId s, int direction) const { return s * 2 + direction; }
  SwitchId owner(PortId p) const { return p / 2; }
  int direction_of(PortId p) const { return p % 2; }
  SwitchId neighbor(SwitchId s, int direction) const {
    return direction == kClockwise ? (s + 1) % switches : (s + switches - 1) % switches;
  }
  bool contains(SwitchId s) const { return s >= 0 && s < switches; }
  bool carries_data(PortId p) const { return kind == TopologyKind::BiRing || direction_of(p) == kClockwise; }

  // Direction that leads from switch `from` to its ring neighbor `to`.
  int direction_towards(SwitchId from, SwitchId to) const {
    if (neighbor(from, kClockwise) == to) return kClockwise;
    if (neighbor(from, kCounterClockwise) == to) return kCounterClockwise;
    throw std::invalid_argument("switches are not ring neighbors");
  }
};

// Six switches, 1 Gb/s core, 0.5 us per core hop. Edge links run at 2 Gb/s on
// the bidirectional ring.
inline Topology make_ring(TopologyKind kind, int switches = 6) {
  Topology t;
  t.kind = kind;
  t.switches = switches;
  t.edge_rate = kind == TopologyKind::BiRing ? BitRate{2'000'000'000} : kGigabitPerSecond;
  return t;
}

struct Path {
  std::vector<Hop> hops;
  int direction = kClockwise;
  SwitchId sink = 0;

  std::size_t length() const { return hops.size(); }
};

// Static shortest path. Uni ring: the clockwise path. Bi ring: the shorter
// direction, ties broken clockwise.
inline Path compute_path(const Topology& topo, SwitchId gateway, SwitchId sink) {
  if (!topo.contains(gateway) || !topo.contains(sink)) throw std::invalid_argument("unknown switch");
  if (gateway == sink) throw std::invalid_argument("gateway and sink coincide");
  const int cw = (sink - gateway + topo.switches) % topo.switches;
  const int ccw = topo.switches - cw;
  Path p;
  p.sink = sink;
  p.direction = (topo.kind == TopologyKind::UniRing || cw <= ccw) ? kClockwise : kCounterClockwise;
  const int len = p.direction == kClockwise ? cw : ccw;
  SwitchId s = gateway;
  for (int i = 0; i < len; ++i) {
    p.hops.push_back({s, topo.port_id(s, p.direction)});
    s = topo.neighbor(s, p.direction);
  }
  return p;
}

}  // namespace tsn
