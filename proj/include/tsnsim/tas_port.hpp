#pragma once

// 802.1Qbv egress port: three class queues gated by a cyclic gate control
// list, strict-priority transmission selection with the implicit guard band
// (a frame only starts if it finishes before its gate closes).

#include <algorithm>
#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "tsnsim/domain.hpp"
#include "tsnsim/ring_queue.hpp"

namespace tsn {

inline constexpr Bits kDefaultQueueCapacityBits = 512'000;

// Open classes at time t. Entry intervals are half-open [start, end).
inline ClassSet gate_state_at(const GateControlList& gcl, Nanos t) {
  Nanos offset{t.count() % gcl.cycle_time.count()};
  for (const auto& e : gcl.entries) {
    if (offset < e.duration) return e.open_classes;
    offset -= e.duration;
  }
  return {};
}

enum class EnqueueResult { Accepted, Dropped };

template <class Item>
class EgressPort {
 public:
  struct Queued {
    Item item;
    int size;  // bytes
    Nanos tx;  // serialization time on this port
  };

  struct Transmission {
    TrafficClass cls;
    Item item;
    int size;
    Nanos start;
    Nanos end;
  };

  struct ClassCounters {
    std::uint64_t enqueued = 0;
    std::uint64_t transmitted = 0;
    std::uint64_t dropped = 0;
  };

  EgressPort(BitRate rate, GateControlList gcl, Bits queue_capacity_bits = kDefaultQueueCapacityBits)
      : rate_(rate), capacity_(queue_capacity_bits), active_(std::move(gcl)) {
    if (!active_.well_formed()) throw std::invalid_argument("malformed gate control list");
    refresh_always_open();
  }

  BitRate link_rate() const { return rate_; }
  Nanos cycle_time() const { return active_.cycle_time; }
  Nanos busy_until() const { return busy_until_; }
  bool idle(Nanos now) const { return now >= busy_until_; }
  Bits queue_capacity() const { return capacity_; }
  Bits occupancy(TrafficClass c) const { return occupancy_[index_of(c)]; }
  std::size_t queue_length(TrafficClass c) const { return queues_[index_of(c)].size(); }
  const ClassCounters& counters(TrafficClass c) const { return counters_[index_of(c)]; }
  bool has_backlog() const {
    return !queues_[0].empty() || !queues_[1].empty() || !queues_[2].empty();
  }

  // The schedule in force during the cycle containing t.
  const GateControlList& gcl_at(Nanos t) const {
    for (auto it = pending_.rbegin(); it != pending_.rend(); ++it) {
      if (it->first <= t) return it->second;
    }
    return active_;
  }

  // Latest installed schedule, including ones not yet active.
  const GateControlList& latest_gcl() const { return pending_.empty() ? active_ : pending_.back().second; }

  ClassSet gates_at(Nanos t) const { return gate_state_at(gcl_at(t), t); }

  // End of the open interval of class c that contains t (t if c is closed at
  // t). Intervals that continue across cycle boundaries are merged; a class
  // that stays open for several cycles is reported as never closing.
  Nanos gate_close(TrafficClass c, Nanos t) const {
    if (always_open(c)) return kNever;
    const auto ct = active_.cycle_time;
    Nanos cycle_start = cycle_start_of(t);
    const GateControlList* g = &gcl_at(cycle_start);
    std::size_t i = 0;
    Nanos end = cycle_start;
    for (; i < g->entries.size(); ++i) {
      end += g->entries[i].duration;
      if (t < end) break;
    }
    if (!g->entries[i].open_classes.contains(c)) return t;
    const Nanos limit = t + ct * kOpenHorizonCycles;
    while (end < limit) {
      if (++i == g->entries.size()) {
        cycle_start += ct;
        g = &gcl_at(cycle_start);
        i = 0;
      }
      if (!g->entries[i].open_classes.contains(c)) return end;
      end += g->entries[i].duration;
    }
    return kNever;
  }

  // True when every entry of every known schedule opens class c.
  bool always_open(TrafficClass c) const { return always_open_.contains(c); }

  // Earliest instant >= t at which class c is open, or kNever if the known
  // schedule never opens it.
  Nanos next_gate_open(TrafficClass c, Nanos t) const {
    const auto ct = active_.cycle_time;
    Nanos cycle_start = cycle_start_of(t);
    const Nanos limit = t + ct * kOpenHorizonCycles;
    while (cycle_start < limit) {
      const auto& g = gcl_at(cycle_start);
      Nanos begin = cycle_start;
      for (const auto& e : g.entries) {
        const Nanos end = begin + e.duration;
        if (end > t && e.open_classes.contains(c)) return std::max(begin, t);
        begin = end;
      }
      cycle_start += ct;
    }
    return kNever;
  }

  // Schedules gcl to take over at the first cycle boundary >= effective_at.
  // A non-CDT frame still on the wire past that boundary pushes activation to
  // the boundary after it ends, so no transmission straddles a schedule
  // change. Returns the activation instant, or nothing if gcl is malformed or
  // uses a different cycle time.
  std::optional<Nanos> install_gcl(GateControlList gcl, Nanos effective_at) {
    if (!gcl.well_formed() || gcl.cycle_time != active_.cycle_time) return std::nullopt;
    const auto ct = active_.cycle_time;
    Nanos activation = ceil_to_cycle(effective_at, ct);
    if (in_flight_ && tx_class_ != TrafficClass::Cdt && busy_until_ > activation) {
      activation = ceil_to_cycle(busy_until_, ct);
    }
    while (!pending_.empty() && pending_.back().first >= activation) pending_.pop_back();
    if (gcl == gcl_at(activation)) {
      refresh_always_open();
      return activation;
    }
    pending_.emplace_back(activation, std::move(gcl));
    refresh_always_open();
    return activation;
  }

  // Folds schedules that became active at or before now into the active one.
  void advance(Nanos now) {
    std::size_t n = 0;
    while (n < pending_.size() && pending_[n].first <= now) ++n;
    if (n == 0) return;
    active_ = std::move(pending_[n - 1].second);
    pending_.erase(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(n));
    refresh_always_open();
  }

  EnqueueResult enqueue(TrafficClass c, Item item, int size) {
    auto& occ = occupancy_[index_of(c)];
    const Bits bits = static_cast<Bits>(size) * 8;
    if (occ + bits > capacity_) {
      ++counters_[index_of(c)].dropped;
      return EnqueueResult::Dropped;
    }
    occ += bits;
    ++counters_[index_of(c)].enqueued;
    queues_[index_of(c)].push_back(Queued{std::move(item), size, tx_time(size)});
    return EnqueueResult::Accepted;
  }

  const Queued* head(TrafficClass c) const {
    const auto& q = queues_[index_of(c)];
    return q.empty() ? nullptr : &q.front();
  }

  // Transmission selection at an idle port: highest-priority class whose gate
  // is open and whose head frame completes no later than the gate closes.
  std::optional<TrafficClass> select_frame(Nanos now) const {
    if (!idle(now)) return std::nullopt;
    for (auto c : kAllClasses) {
      const auto* h = head(c);
      if (h == nullptr) continue;
      const Nanos close = gate_close(c, now);
      if (close == now) continue;
      if (close == kNever || now + h->tx <= close) return c;
    }
    return std::nullopt;
  }

  Transmission start_transmission(TrafficClass c, Nanos now) {
    auto& q = queues_[index_of(c)];
    Queued q0 = std::move(q.front());
    q.pop_front();
    occupancy_[index_of(c)] -= static_cast<Bits>(q0.size) * 8;
    ++counters_[index_of(c)].transmitted;
    const Nanos end = now + q0.tx;
    busy_until_ = end;
    tx_class_ = c;
    in_flight_ = true;
    return Transmission{c, std::move(q0.item), q0.size, now, end};
  }

  void finish_transmission() { in_flight_ = false; }

  // When an idle port with backlog could next select something: the next
  // opening of each blocked class. kNever without backlog.
  Nanos next_eligibility(Nanos now) const {
    Nanos best = kNever;
    for (auto c : kAllClasses) {
      const auto* h = head(c);
      if (h == nullptr) continue;
      Nanos close = gate_close(c, now);
      Nanos t;
      if (close == now) {
        t = next_gate_open(c, now);
      } else if (close == kNever || now + h->tx <= close) {
        t = now;
      } else {
        t = next_gate_open(c, close);
      }
      best = std::min(best, t);
    }
    return best;
  }

 private:
  static constexpr int kOpenHorizonCycles = 4;

  // Frame sizes repeat, so divisions are cached.
  Nanos tx_time(int size) {
    for (auto& [sz, tx] : tx_cache_) {
      if (sz == size) return tx;
    }
    const Nanos tx = transmission_time(size, rate_);
    tx_cache_[tx_cache_next_] = {size, tx};
    tx_cache_next_ = (tx_cache_next_ + 1) % tx_cache_.size();
    return tx;
  }

  Nanos cycle_start_of(Nanos t) const {
    const auto ct = active_.cycle_time;
    if (t >= cached_cycle_start_ && t < cached_cycle_start_ + ct) return cached_cycle_start_;
    cached_cycle_start_ = Nanos{t.count() - t.count() % ct.count()};
    return cached_cycle_start_;
  }

  void refresh_always_open() {
    auto all = [](const GateControlList& g, TrafficClass c) {
      return std::all_of(g.entries.begin(), g.entries.end(), [c](const auto& e) { return e.open_classes.contains(c); });
    };
    always_open_ = {};
    for (auto c : kAllClasses) {
      bool open = all(active_, c);
      for (const auto& pg : pending_) open = open && all(pg.second, c);
      if (open) always_open_.insert(c);
    }
  }

  BitRate rate_;
  Bits capacity_;
  GateControlList active_;
  std::vector<std::pair<Nanos, GateControlList>> pending_;
  std::array<RingQueue<Queued>, kNumClasses> queues_;
  std::array<Bits, kNumClasses> occupancy_{};
  std::array<ClassCounters, kNumClasses> counters_{};
  Nanos busy_until_{0};
  TrafficClass tx_class_ = TrafficClass::Be;
  bool in_flight_ = false;
  ClassSet always_open_;
  std::array<std::pair<int, Nanos>, 4> tx_cache_{};
  std::size_t tx_cache_next_ = 0;
  mutable Nanos cached_cycle_start_{0};
};

}  // namespace tsn
