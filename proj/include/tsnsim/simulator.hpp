#pragma once

// Discrete-event simulation of the TAS ring under dynamic stream admission,
// for the central-controller model and the fully distributed model.
//
// Data plane: every core egress port is an EgressPort fed by lanes of frames
// that become ready at known instants (transit from the upstream switch,
// local ST and BE injection over the edge links, locally generated CDT).
// Lanes are merged into the class queues when the port is serviced, so a
// frame costs one event per hop.

#include <algorithm>
#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tsnsim/cnc.hpp"
#include "tsnsim/distributed.hpp"
#include "tsnsim/domain.hpp"
#include "tsnsim/event_queue.hpp"
#include "tsnsim/metrics.hpp"
#include "tsnsim/reconfig.hpp"
#include "tsnsim/ring_queue.hpp"
#include "tsnsim/scenario.hpp"
#include "tsnsim/tas_port.hpp"
#include "tsnsim/topology.hpp"
#include "tsnsim/traffic.hpp"

namespace tsn {

// Optional observers. `from`/`to` of kToSource denote the talker.
struct SimHooks {
  std::function<void(PortId, const Frame&, Nanos start, Nanos end)> on_transmit;
  std::function<void(PortId, const Frame&, Nanos)> on_drop;
  std::function<void(const Frame&, Nanos)> on_delivery;
  std::function<void(const CdtMessage&, SwitchId from, SwitchId to, Nanos)> on_control;
  std::function<void(PortId, int slot_percent, Nanos activation)> on_gcl;
};

struct ClassBalance {
  std::uint64_t offered = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::uint64_t in_flight = 0;

  bool holds() const { return offered == delivered + dropped + in_flight; }
};

struct SimResult {
  MetricsReport report;
  std::array<ClassBalance, kNumClasses> balance{};
  std::array<std::uint64_t, kNumClasses> port_drops{};  // summed port counters
  std::uint64_t events = 0;
  std::vector<int> final_slot_percent;  // per port at the horizon
  std::vector<std::string> diagnostics;

  bool conservation_ok() const {
    for (auto c : kAllClasses) {
      if (!balance[index_of(c)].holds() || balance[index_of(c)].dropped != port_drops[index_of(c)]) return false;
    }
    return true;
  }
};

namespace detail {

enum class Ev : std::uint8_t {
  PortService,
  CycleTick,
  StreamCreate,
  CncRequest,
  TalkerResult,
  GclPush,
  StreamEnd,
  CncTerminate,
  ControlArrive,
  TalkerControl,
  AgentExpire,
};

struct EvPayload {
  Ev kind;
  std::int32_t a = 0;
  std::uint32_t b = 0;
};

class Simulation {
 public:
  Simulation(const Scenario& sc, const SimHooks& hooks)
      : sc_(sc),
        hooks_(hooks),
        topo_(make_ring(sc.topology)),
        horizon_(sc.horizon()),
        metrics_(sc.horizon()),
        channel_{topo_.edge_rate, sc.management_propagation} {
    validate(sc_);
    policy_ = sc_.model == Model::Centralized ? SlotPolicy::centralized(sc_.init_ratio_percent, sc_.reconfig)
                                              : SlotPolicy::distributed(sc_.reconfig, sc_.static_slot_percent);
    st_edge_tx_ = transmission_time(sc_.st_frame_bytes, topo_.edge_rate);
    be_edge_tx_ = transmission_time(sc_.be_frame_bytes, topo_.edge_rate);
    cdt_edge_tx_ = transmission_time(sc_.cdt_bytes, topo_.edge_rate);

    const auto initial = make_port_state(topo_.core_rate, sc_.cycle_time, policy_.empty_percent);
    for (PortId p = 0; p < topo_.num_ports(); ++p) {
      ports_.push_back(std::make_unique<PortCtx>(PortCtx{
          EgressPort<std::uint32_t>(topo_.core_rate, synthesize_gcl(initial), sc_.queue_capacity_bits),
          {},
          topo_.owner(p),
          topo_.direction_of(p),
          topo_.neighbor(topo_.owner(p), topo_.direction_of(p)),
          initial.slot_percent}));
    }
    wake_time_.assign(ports_.size(), kNever);
    init_calendar(ports_.size());
    route_dir_.assign(static_cast<std::size_t>(topo_.switches * topo_.switches), kClockwise);
    for (SwitchId a = 0; a < topo_.switches; ++a) {
      for (SwitchId b = 0; b < topo_.switches; ++b) {
        if (a != b) route_dir_[idx2(a, b)] = compute_path(topo_, a, b).direction;
      }
    }

    const double directions = topo_.kind == TopologyKind::BiRing ? 2.0 : 1.0;
    const double be_per_source = sc_.rho * static_cast<double>(topo_.core_rate.bps) * directions / topo_.switches;
    for (SwitchId s = 0; s < topo_.switches; ++s) {
      const auto us = static_cast<std::uint64_t>(s);
      talkers_.push_back(Talker{StStreamGenerator(s, topo_.switches, sc_.pi, from_seconds(sc_.tau),
                                                  derive_seed(sc_.seed, 0x100 + us), sc_.gamma, sc_.st_frame_bytes),
                                Rng(derive_seed(sc_.seed, 0x200 + us)),
                                std::nullopt,
                                {},
                                Nanos{0}});
      be_.push_back(BeSource{BeGenerator(be_per_source, sc_.be_frame_bytes, derive_seed(sc_.seed, 0x300 + us)), Nanos{0}});
    }

    if (sc_.model == Model::Centralized) {
      cnc_.emplace(topo_, sc_.cycle_time, policy_);
    } else {
      for (SwitchId s = 0; s < topo_.switches; ++s) {
        agents_.emplace_back(s, topo_, sc_.cycle_time, policy_, sc_.release_grace());
      }
    }
  }

  SimResult run() {
    q_.schedule(Nanos{0}, {Ev::CycleTick});
    for (SwitchId s = 0; s < topo_.switches; ++s) draw_next_stream(s);

    std::uint64_t events = 0;
    for (;;) {
      const int p = earliest_port();
      const auto pi = static_cast<std::size_t>(p);
      const bool port_first = p >= 0 && !q_.top_precedes(wake_time_[pi], static_cast<std::uint64_t>(key_[pi]));
      const Nanos t = port_first ? wake_time_[pi] : q_.next_time();
      if (t > horizon_) break;
      ++events;
      if (port_first) {
        wake_time_[pi] = kNever;
        set_key(pi, kIdleKey);
        q_.clock_to(t);
        service(p);
      } else {
        dispatch(q_.pop().payload);
      }
    }
    return finish(events);
  }

 private:
  struct LaneItem {
    Nanos ready;
    std::uint32_t frame;
  };

  static constexpr int kLaneCdt = 0;
  static constexpr int kLaneTransit = 1;
  static constexpr int kLaneSt = 2;
  static constexpr int kLaneBe = 3;
  static constexpr int kLanes = 4;

  struct PortCtx {
    EgressPort<std::uint32_t> port;
    std::array<RingQueue<LaneItem>, kLanes> lanes;
    SwitchId owner;
    int dir;
    SwitchId next_switch;
    int slot_percent;
  };

  struct Talker {
    StStreamGenerator gen;
    Rng phase_rng;
    std::optional<StreamSpec> next;
    std::vector<FlowId> active;  // injecting streams, ordered by (offset, flow)
    Nanos edge_busy;
  };

  struct BeSource {
    BeGenerator gen;
    Nanos edge_busy;
  };

  struct StreamRecord {
    StreamSpec spec;
    Path path;
    Nanos first_boundary{0};
    Nanos offset{0};
  };

  std::size_t idx2(SwitchId a, SwitchId b) const { return static_cast<std::size_t>(a * topo_.switches + b); }

  void dispatch(const EvPayload& p) {
    switch (p.kind) {
      case Ev::PortService: service(p.a); break;
      case Ev::CycleTick: cycle_tick(); break;
      case Ev::StreamCreate: stream_create(p.a); break;
      case Ev::CncRequest: cnc_request(p.b); break;
      case Ev::TalkerResult: resolve(p.b, p.a != 0); break;
      case Ev::GclPush: install(p.a, static_cast<int>(p.b)); break;
      case Ev::StreamEnd: stream_end(p.b); break;
      case Ev::CncTerminate: cnc_terminate(p.b); break;
      case Ev::ControlArrive: control_arrive(p.a, p.b); break;
      case Ev::TalkerControl: talker_control(p.b); break;
      case Ev::AgentExpire: agent_expire(p.a); break;
    }
  }

  // ---- frames -------------------------------------------------------------

  std::uint32_t alloc_frame(const Frame& f) {
    ++balance_[index_of(f.cls)].offered;
    ++live_[index_of(f.cls)];
    if (f.cls != TrafficClass::Cdt) metrics_.record_offered(f.cls);
    if (!free_frames_.empty()) {
      const auto i = free_frames_.back();
      free_frames_.pop_back();
      frames_[i] = f;
      return i;
    }
    frames_.push_back(f);
    return static_cast<std::uint32_t>(frames_.size() - 1);
  }

  void release_frame(std::uint32_t i) { free_frames_.push_back(i); }

  void push_lane(PortId p, int lane, Nanos ready, std::uint32_t frame) {
    auto& pc = *ports_[static_cast<std::size_t>(p)];
    pc.lanes[static_cast<std::size_t>(lane)].push_back({ready, frame});
    wake(p, std::max(ready, pc.port.busy_until()));
  }

  // Port services live in a calendar holding each port's earliest pending
  // service (a later request for the same port is subsumed by it). A winner
  // tree over the ports yields the earliest (time, seq) in O(log ports).
  using CalendarKey = unsigned __int128;
  static constexpr CalendarKey kIdleKey = ~CalendarKey{0};

  static CalendarKey calendar_key(Nanos t, std::uint64_t seq) {
    return (static_cast<CalendarKey>(static_cast<std::uint64_t>(t.count())) << 64) | seq;
  }

  void init_calendar(std::size_t n) {
    leaves_ = 1;
    while (leaves_ < n) leaves_ *= 2;
    key_.assign(leaves_, kIdleKey);
    tree_.assign(2 * leaves_, 0);
    for (std::size_t i = 0; i < leaves_; ++i) tree_[leaves_ + i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = leaves_ - 1; i >= 1; --i) tree_[i] = winner(tree_[2 * i], tree_[2 * i + 1]);
  }

  std::uint32_t winner(std::uint32_t a, std::uint32_t b) const { return key_[b] < key_[a] ? b : a; }

  void set_key(std::size_t i, CalendarKey k) {
    key_[i] = k;
    for (std::size_t n = (leaves_ + i) / 2; n >= 1; n /= 2) tree_[n] = winner(tree_[2 * n], tree_[2 * n + 1]);
  }

  void wake(PortId p, Nanos t) {
    const auto i = static_cast<std::size_t>(p);
    t = std::max(t, q_.now());
    if (t < wake_time_[i]) {
      wake_time_[i] = t;
      set_key(i, calendar_key(t, q_.claim_seq()));
    }
  }

  int earliest_port() const {
    const auto best = tree_[1];
    return key_[best] == kIdleKey ? -1 : static_cast<int>(best);
  }

  void service(PortId p) {
    auto& pc = *ports_[static_cast<std::size_t>(p)];
    auto& port = pc.port;
    const Nanos now = q_.now();
    port.advance(now);
    if (now < port.busy_until()) {
      wake(p, port.busy_until());
      return;
    }
    port.finish_transmission();
    merge_lanes(p, now);
    if (auto c = port.select_frame(now)) {
      const auto tx = port.start_transmission(*c, now);
      forward(p, tx.item, tx.start, tx.end);
      wake(p, tx.end);
      return;
    }
    Nanos next = port.has_backlog() ? port.next_eligibility(now) : kNever;
    for (const auto& lane : pc.lanes) {
      if (!lane.empty()) next = std::min(next, lane.front().ready);
    }
    if (next == kNever) return;
    if (next <= now) throw std::logic_error("port service would not make progress");
    wake(p, next);
  }

  void merge_lanes(PortId p, Nanos now) {
    auto& pc = *ports_[static_cast<std::size_t>(p)];
    int ready_lanes = 0;
    int only = -1;
    for (int i = 0; i < kLanes; ++i) {
      const auto& lane = pc.lanes[static_cast<std::size_t>(i)];
      if (!lane.empty() && lane.front().ready <= now) {
        ++ready_lanes;
        only = i;
      }
    }
    if (ready_lanes == 0) return;
    if (ready_lanes == 1) {
      // No other lane has anything due, so this one drains in order.
      auto& lane = pc.lanes[static_cast<std::size_t>(only)];
      while (!lane.empty() && lane.front().ready <= now) {
        const auto fi = lane.front().frame;
        lane.pop_front();
        admit_to_queue(p, fi, now);
      }
      return;
    }
    for (;;) {
      int best = -1;
      Nanos best_t = kNever;
      for (int i = 0; i < kLanes; ++i) {
        const auto& lane = pc.lanes[static_cast<std::size_t>(i)];
        if (!lane.empty() && lane.front().ready <= now && lane.front().ready < best_t) {
          best = i;
          best_t = lane.front().ready;
        }
      }
      if (best < 0) return;
      auto& lane = pc.lanes[static_cast<std::size_t>(best)];
      const auto fi = lane.front().frame;
      lane.pop_front();
      admit_to_queue(p, fi, now);
    }
  }

  void admit_to_queue(PortId p, std::uint32_t fi, Nanos now) {
    auto& pc = *ports_[static_cast<std::size_t>(p)];
    const Frame& f = frames_[fi];
    if (pc.port.enqueue(f.cls, fi, f.size) == EnqueueResult::Accepted) return;
    if (hooks_.on_drop) hooks_.on_drop(p, f, now);
    if (f.cls != TrafficClass::Cdt) {
      metrics_.record_drop(f.cls);
    } else {
      diagnostics_.push_back("CDT frame dropped at port " + std::to_string(p));
    }
    ++balance_[index_of(f.cls)].dropped;
    --live_[index_of(f.cls)];
    release_frame(fi);
  }

  void forward(PortId p, std::uint32_t fi, Nanos start, Nanos end) {
    const auto& pc = *ports_[static_cast<std::size_t>(p)];
    const Frame f = frames_[fi];
    if (hooks_.on_transmit) hooks_.on_transmit(p, f, start, end);
    const Nanos arrival = end + topo_.core_propagation;
    const SwitchId n = pc.next_switch;
    if (f.cls == TrafficClass::Cdt) {
      metrics_.record_cdt(2 * sc_.cdt_bytes);  // out at this port, in at the next switch
      ++balance_[index_of(f.cls)].delivered;
      --live_[index_of(f.cls)];
      release_frame(fi);
      q_.schedule(arrival, {Ev::ControlArrive, n, f.control_ref});
      return;
    }
    if (f.sink_switch == n) {
      deliver(fi, arrival + topo_.edge_propagation + edge_tx(f.size));
      return;
    }
    push_lane(topo_.port_id(n, pc.dir), kLaneTransit, arrival, fi);
  }

  Nanos edge_tx(int size) const {
    if (size == sc_.st_frame_bytes) return st_edge_tx_;
    if (size == sc_.be_frame_bytes) return be_edge_tx_;
    return transmission_time(size, topo_.edge_rate);
  }

  void deliver(std::uint32_t fi, Nanos at) {
    const Frame& f = frames_[fi];
    if (at <= horizon_) {
      metrics_.record_delivery(f, at);
      if (hooks_.on_delivery) hooks_.on_delivery(f, at);
      ++balance_[index_of(f.cls)].delivered;
      --live_[index_of(f.cls)];
    }
    release_frame(fi);
  }

  void install(PortId p, int slot) {
    auto& pc = *ports_[static_cast<std::size_t>(p)];
    pc.slot_percent = slot;
    const auto gcl = synthesize_gcl(sc_.cycle_time * slot / 100, sc_.cycle_time);
    if (auto act = pc.port.install_gcl(gcl, q_.now())) {
      if (hooks_.on_gcl) hooks_.on_gcl(p, slot, *act);
      wake(p, *act);
    } else {
      diagnostics_.push_back("GCL rejected at port " + std::to_string(p));
    }
  }

  // ---- traffic ------------------------------------------------------------

  void cycle_tick() {
    const Nanos b = q_.now();
    const Nanos end = std::min(b + sc_.cycle_time, horizon_);
    for (SwitchId s = 0; s < topo_.switches; ++s) inject_st(s, b);
    for (SwitchId s = 0; s < topo_.switches; ++s) inject_be(s, end);
    if (b + sc_.cycle_time < horizon_) q_.schedule(b + sc_.cycle_time, {Ev::CycleTick});
  }

  void inject_st(SwitchId s, Nanos b) {
    auto& t = talkers_[static_cast<std::size_t>(s)];
    std::erase_if(t.active, [&](FlowId f) { return streams_[f].spec.expiry() <= b; });
    for (const FlowId f : t.active) {
      const auto& rec = streams_[f];
      if (b < rec.first_boundary) continue;
      const Nanos created = b + rec.offset;
      if (created >= horizon_) continue;
      for (int g = 0; g < rec.spec.frames_per_cycle; ++g) {
        Frame fr;
        fr.cls = TrafficClass::St;
        fr.flow_id = f;
        fr.size = rec.spec.packet_size;
        fr.created_at = created;
        fr.source_switch = s;
        fr.sink_switch = rec.spec.sink;
        fr.direction = rec.path.direction;
        const Nanos ready = std::max(created, t.edge_busy) + st_edge_tx_ + topo_.edge_propagation;
        t.edge_busy = ready - topo_.edge_propagation;
        push_lane(rec.path.hops.front().port, kLaneSt, ready, alloc_frame(fr));
      }
    }
  }

  void inject_be(SwitchId s, Nanos end) {
    auto& src = be_[static_cast<std::size_t>(s)];
    src.gen.generate_until(end, [&](const BeArrival& a) {
      Frame fr;
      fr.cls = TrafficClass::Be;
      fr.size = sc_.be_frame_bytes;
      fr.created_at = a.created_at;
      fr.source_switch = s;
      fr.sink_switch = (s + a.hop_count) % topo_.switches;
      fr.direction = route_dir_[idx2(s, fr.sink_switch)];
      const Nanos ready = std::max(a.created_at, src.edge_busy) + be_edge_tx_;
      src.edge_busy = ready;
      push_lane(topo_.port_id(s, fr.direction), kLaneBe, ready + topo_.edge_propagation, alloc_frame(fr));
    });
  }

  void draw_next_stream(SwitchId s) {
    auto& t = talkers_[static_cast<std::size_t>(s)];
    t.next = t.gen.next(horizon_, 0);
    if (t.next) q_.schedule(t.next->start_time, {Ev::StreamCreate, s});
  }

  // ---- stream lifecycle ---------------------------------------------------

  void stream_create(SwitchId s) {
    auto& t = talkers_[static_cast<std::size_t>(s)];
    StreamSpec spec = *t.next;
    spec.flow_id = static_cast<FlowId>(streams_.size());
    StreamRecord rec{spec, compute_path(topo_, spec.gateway, spec.sink), Nanos{0}, Nanos{0}};
    if (sc_.phase == InjectionPhase::Unsynchronized) {
      rec.offset = Nanos{t.phase_rng.uniform_int(0, static_cast<int>(sc_.cycle_time.count() - 1))};
    }
    streams_.push_back(std::move(rec));
    metrics_.stream_generated(spec);
    draw_next_stream(s);

    const Nanos now = q_.now();
    if (sc_.model == Model::Centralized) {
      note_control(CdtKind::TransmissionRequest, spec, kToSource, kToSource);
      q_.schedule(now + channel_.one_way(sc_.cdt_bytes), {Ev::CncRequest, 0, spec.flow_id});
      return;
    }
    CdtMessage m;
    m.kind = CdtKind::TransmissionRequest;
    m.stream = spec;
    m.path = streams_[spec.flow_id].path.hops;
    m.size_bytes = sc_.cdt_bytes;
    m.sent_at = now;
    if (hooks_.on_control) hooks_.on_control(m, kToSource, spec.gateway, now);
    metrics_.record_control_message();
    metrics_.record_cdt(2 * sc_.cdt_bytes);
    q_.schedule(now + cdt_edge_tx_ + topo_.edge_propagation, {Ev::ControlArrive, spec.gateway, store_msg(std::move(m))});
  }

  // Talker side of a signaling outcome.
  void resolve(FlowId f, bool approved) {
    auto& rec = streams_[f];
    const Nanos now = q_.now();
    metrics_.record_signaling_delay(now - rec.spec.start_time);
    metrics_.stream_resolved(rec.spec, approved, now);
    if (sc_.model == Model::Centralized && approved) {
      q_.schedule(std::max(now, rec.spec.expiry() + sc_.release_grace()), {Ev::StreamEnd, 0, f});
    }
    if (!approved || now >= rec.spec.expiry()) return;
    rec.first_boundary = next_cycle_after(now, sc_.cycle_time);
    auto& active = talkers_[static_cast<std::size_t>(rec.spec.gateway)].active;
    const auto pos = std::lower_bound(active.begin(), active.end(), f, [&](FlowId a, FlowId b) {
      const auto oa = streams_[a].offset;
      const auto ob = streams_[b].offset;
      return oa < ob || (oa == ob && a < b);
    });
    active.insert(pos, f);
  }

  void note_control(CdtKind kind, const StreamSpec& spec, SwitchId from, SwitchId to) {
    metrics_.record_control_message();
    if (!hooks_.on_control) return;
    CdtMessage m;
    m.kind = kind;
    m.stream = spec;
    m.size_bytes = sc_.cdt_bytes;
    hooks_.on_control(m, from, to, q_.now());
  }

  // ---- central controller -------------------------------------------------

  void cnc_request(FlowId f) {
    const Nanos now = q_.now();
    const Nanos w = channel_.one_way(sc_.cdt_bytes);
    metrics_.record_cdt(sc_.cdt_bytes);
    const auto out = cnc_->handle_registration(streams_[f].spec);
    const bool ok = out.accepted();
    note_control(ok ? CdtKind::ApprovalGranted : CdtKind::Rejection, streams_[f].spec, kToSource, kToSource);
    metrics_.record_cdt(sc_.cdt_bytes);
    q_.schedule(now + w, {Ev::TalkerResult, ok ? 1 : 0, f});
    push_updates(out.updates, now + w);
  }

  void push_updates(const std::vector<GclUpdate>& updates, Nanos at) {
    for (const auto& u : updates) {
      metrics_.record_cdt(sc_.cdt_bytes);
      metrics_.record_control_message();
      q_.schedule(at, {Ev::GclPush, u.port, static_cast<std::uint32_t>(u.slot_percent)});
    }
  }

  void stream_end(FlowId f) {
    note_control(CdtKind::Termination, streams_[f].spec, kToSource, kToSource);
    q_.schedule(q_.now() + channel_.one_way(sc_.cdt_bytes), {Ev::CncTerminate, 0, f});
  }

  void cnc_terminate(FlowId f) {
    metrics_.record_cdt(sc_.cdt_bytes);
    const auto out = cnc_->handle_termination(f);
    push_updates(out.updates, q_.now() + channel_.one_way(sc_.cdt_bytes));
  }

  // ---- distributed --------------------------------------------------------

  std::uint32_t store_msg(CdtMessage m) {
    if (!free_msgs_.empty()) {
      const auto i = free_msgs_.back();
      free_msgs_.pop_back();
      msgs_[i] = std::move(m);
      return i;
    }
    msgs_.push_back(std::move(m));
    return static_cast<std::uint32_t>(msgs_.size() - 1);
  }

  CdtMessage take_msg(std::uint32_t i) {
    CdtMessage m = std::move(msgs_[i]);
    free_msgs_.push_back(i);
    return m;
  }

  void control_arrive(SwitchId s, std::uint32_t mi) {
    const CdtMessage m = take_msg(mi);
    auto actions = agents_[static_cast<std::size_t>(s)].handle(m, q_.now());
    apply(s, std::move(actions));
  }

  void apply(SwitchId s, AgentActions a) {
    const Nanos now = q_.now();
    for (const auto& u : a.updates) install(u.port, u.slot_percent);
    if (a.expiry_check) q_.schedule(*a.expiry_check, {Ev::AgentExpire, s});
    for (auto& d : a.diagnostics) diagnostics_.push_back("switch " + std::to_string(s) + ": " + d);
    for (auto& o : a.messages) {
      if (hooks_.on_control) hooks_.on_control(o.msg, s, o.to, now);
      metrics_.record_control_message();
      if (o.to == kToSource) {
        metrics_.record_cdt(2 * sc_.cdt_bytes);
        q_.schedule(now + cdt_edge_tx_ + topo_.edge_propagation, {Ev::TalkerControl, 0, store_msg(std::move(o.msg))});
        continue;
      }
      const PortId port = topo_.port_id(s, topo_.direction_towards(s, o.to));
      Frame fr;
      fr.cls = TrafficClass::Cdt;
      fr.size = o.msg.size_bytes;
      fr.created_at = now;
      fr.source_switch = s;
      fr.sink_switch = o.to;
      fr.direction = topo_.direction_of(port);
      fr.control_ref = store_msg(std::move(o.msg));
      push_lane(port, kLaneCdt, now, alloc_frame(fr));
    }
  }

  void talker_control(std::uint32_t mi) {
    const CdtMessage m = take_msg(mi);
    if (m.kind != CdtKind::ApprovalGranted && m.kind != CdtKind::Rejection) {
      diagnostics_.push_back("talker received " + std::string(to_string(m.kind)));
      return;
    }
    resolve(m.stream.flow_id, m.kind == CdtKind::ApprovalGranted);
  }

  void agent_expire(SwitchId s) {
    const auto updates = agents_[static_cast<std::size_t>(s)].expire_streams(q_.now());
    for (const auto& u : updates) install(u.port, u.slot_percent);
  }

  // ---- wrap-up ------------------------------------------------------------

  SimResult finish(std::uint64_t events) {
    SimResult r;
    for (auto c : kAllClasses) {
      balance_[index_of(c)].in_flight = live_[index_of(c)];
      if (c != TrafficClass::Cdt) metrics_.record_in_flight(c, live_[index_of(c)]);
    }
    r.report = metrics_.finalize();
    r.balance = balance_;
    r.events = events;
    for (const auto& pc : ports_) {
      for (auto c : kAllClasses) r.port_drops[index_of(c)] += pc->port.counters(c).dropped;
      r.final_slot_percent.push_back(pc->slot_percent);
    }
    r.diagnostics = std::move(diagnostics_);
    return r;
  }

  Scenario sc_;
  const SimHooks& hooks_;
  Topology topo_;
  Nanos horizon_;
  MetricsCollector metrics_;
  SignalingChannel channel_;
  SlotPolicy policy_;
  Nanos st_edge_tx_{0};
  Nanos be_edge_tx_{0};
  Nanos cdt_edge_tx_{0};

  EventQueue<EvPayload> q_;
  std::vector<std::unique_ptr<PortCtx>> ports_;
  std::vector<int> route_dir_;
  std::vector<Talker> talkers_;
  std::vector<BeSource> be_;
  std::vector<StreamRecord> streams_;
  std::optional<CentralController> cnc_;
  std::vector<SwitchAgent> agents_;

  std::vector<Frame> frames_;
  std::vector<std::uint32_t> free_frames_;
  std::vector<CdtMessage> msgs_;
  std::vector<std::uint32_t> free_msgs_;
  std::array<ClassBalance, kNumClasses> balance_{};
  std::array<std::uint64_t, kNumClasses> live_{};
  std::vector<std::string> diagnostics_;
  std::vector<Nanos> wake_time_;
  std::vector<CalendarKey> key_;
  std::vector<std::uint32_t> tree_;
  std::size_t leaves_ = 1;
};

}  // namespace detail

inline SimResult run_simulation(const Scenario& sc, const SimHooks& hooks = {}) {
  detail::Simulation sim(sc, hooks);
  return sim.run();
}

inline MetricsReport run(const Scenario& sc) { return run_simulation(sc).report; }

}  // namespace tsn
