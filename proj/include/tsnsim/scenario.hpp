#pragma once

// One simulation scenario: configuration model, topology, traffic intensities
// and the modelling knobs the experiments hold fixed.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "tsnsim/domain.hpp"
#include "tsnsim/topology.hpp"

namespace tsn {

enum class Model { Centralized, Distributed };

constexpr std::string_view to_string(Model m) { return m == Model::Centralized ? "centralized" : "decentralized"; }

inline Model parse_model(std::string_view s) {
  if (s == "centralized" || s == "cnc" || s == "hybrid") return Model::Centralized;
  if (s == "decentralized" || s == "distributed") return Model::Distributed;
  throw std::invalid_argument("unknown model '" + std::string(s) + "'");
}

inline TopologyKind parse_topology(std::string_view s) {
  if (s == "uni" || s == "uni-ring") return TopologyKind::UniRing;
  if (s == "bi" || s == "bi-ring") return TopologyKind::BiRing;
  throw std::invalid_argument("unknown topology '" + std::string(s) + "'");
}

inline bool parse_switch(std::string_view s) {
  if (s == "on" || s == "true" || s == "1" || s == "yes") return true;
  if (s == "off" || s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("expected on/off, got '" + std::string(s) + "'");
}

// When an approved talker emits its frames within each cycle. Aligned: at the
// cycle boundary, which is where the gateway's ST window opens. Unsynchronized:
// at a per-stream offset drawn uniformly over the cycle.
enum class InjectionPhase { Aligned, Unsynchronized };

constexpr std::string_view to_string(InjectionPhase p) {
  return p == InjectionPhase::Aligned ? "aligned" : "unsynchronized";
}

inline InjectionPhase parse_phase(std::string_view s) {
  if (s == "aligned") return InjectionPhase::Aligned;
  if (s == "unsynchronized" || s == "random") return InjectionPhase::Unsynchronized;
  throw std::invalid_argument("unknown injection phase '" + std::string(s) + "'");
}

struct Scenario {
  Model model = Model::Centralized;
  TopologyKind topology = TopologyKind::UniRing;
  bool reconfig = true;
  double pi = 1.0;    // stream arrivals per second per talker
  double tau = 2.0;   // mean stream lifetime, seconds
  double rho = 0.1;   // BE intensity, fraction of the core rate per ring direction
  Nanos cycle_time{50'000};
  int init_ratio_percent = 20;
  double duration = 10.0;  // seconds
  std::uint64_t seed = 1;
  int replications = 1;

  int gamma = 1;
  int st_frame_bytes = 64;
  int be_frame_bytes = 1500;
  int cdt_bytes = 64;
  Bits queue_capacity_bits = 512'000;
  Nanos management_propagation = kMicrosecond;
  int static_slot_percent = 20;  // distributed model without reconfiguration
  int release_grace_cycles = 6;  // drain time between expiry and resource release
  InjectionPhase phase = InjectionPhase::Aligned;
  bool exclude_active_streams = true;
  bool allow_out_of_range = false;  // skip the Table I range checks

  Nanos horizon() const { return from_seconds(duration); }
  Nanos release_grace() const { return cycle_time * release_grace_cycles; }
};

// Throws std::invalid_argument naming the first offending field.
inline void validate(const Scenario& s) {
  auto fail = [](const std::string& m) { throw std::invalid_argument("invalid scenario: " + m); };
  if (!(s.pi >= 0) || !std::isfinite(s.pi)) fail("pi must be >= 0");
  if (!(s.tau > 0) || !std::isfinite(s.tau)) fail("tau must be > 0");
  if (!(s.rho >= 0) || !std::isfinite(s.rho)) fail("rho must be >= 0");
  if (s.cycle_time <= Nanos{0} || s.cycle_time.count() % 100 != 0) fail("cycle time must be a positive multiple of 100 ns");
  if (s.init_ratio_percent < 0 || s.init_ratio_percent > 90) fail("init ratio must be in [0, 90] percent");
  if (s.static_slot_percent < 0 || s.static_slot_percent > 90) fail("static slot must be in [0, 90] percent");
  if (!(s.duration > 0) || !std::isfinite(s.duration)) fail("duration must be > 0");
  if (s.replications < 1) fail("replications must be >= 1");
  if (s.gamma < 1) fail("gamma must be >= 1");
  if (s.st_frame_bytes < 1 || s.be_frame_bytes < 1 || s.cdt_bytes < 1) fail("frame sizes must be positive");
  if (s.queue_capacity_bits < 1) fail("queue capacity must be positive");
  if (s.management_propagation < Nanos{0}) fail("management propagation must be >= 0");
  if (s.release_grace_cycles < 0) fail("release grace must be >= 0");
  if (s.allow_out_of_range) return;
  if (s.pi < 1 || s.pi > 20) fail("pi outside [1, 20]");
  if (s.tau < 2 || s.tau > 5) fail("tau outside [2, 5]");
  if (s.rho != 0.1 && s.rho != 1.0 && s.rho != 2.0) fail("rho must be one of 0.1, 1.0, 2.0");
}

}  // namespace tsn
