#pragma once

// Deterministic event kernel: a binary heap keyed on (time, insertion
// sequence), so equal-time events run in the order they were scheduled.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsnsim/domain.hpp"

namespace tsn {

template <class Payload>
class EventQueue {
 public:
  struct Event {
    Nanos time;
    std::uint64_t seq;
    Payload payload;
  };

  Nanos now() const { return now_; }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  std::uint64_t scheduled() const { return next_seq_; }
  Nanos next_time() const { return heap_.empty() ? kNever : heap_.front().time; }

  void schedule(Nanos t, Payload p) {
    if (t < now_) {
      throw std::logic_error("event scheduled in the past: " + std::to_string(t.count()) + " < " +
                             std::to_string(now_.count()));
    }
    heap_.push_back(Event{t, next_seq_++, std::move(p)});
    sift_up(heap_.size() - 1);
  }

  // Sequence numbers and clock moves for events kept outside the heap by a
  // caller-side calendar; they share the (time, seq) order with heap events.
  std::uint64_t claim_seq() { return next_seq_++; }

  bool top_precedes(Nanos t, std::uint64_t seq) const {
    if (heap_.empty()) return false;
    const auto& e = heap_.front();
    return e.time < t || (e.time == t && e.seq < seq);
  }

  void clock_to(Nanos t) {
    if (t < now_) throw std::logic_error("clock moved backwards");
    now_ = t;
  }

  // Removes the earliest event and advances the clock to it.
  Event pop() {
    Event e = std::move(heap_.front());
    if (heap_.size() > 1) {
      heap_.front() = std::move(heap_.back());
      heap_.pop_back();
      sift_down(0);
    } else {
      heap_.pop_back();
    }
    now_ = e.time;
    return e;
  }

 private:
  static bool before(const Event& a, const Event& b) {
    return a.time < b.time || (a.time == b.time && a.seq < b.seq);
  }

  void sift_up(std::size_t i) {
    while (i > 0) {
      const std::size_t parent = (i - 1) / 2;
      if (!before(heap_[i], heap_[parent])) break;
      std::swap(heap_[i], heap_[parent]);
      i = parent;
    }
  }

  void sift_down(std::size_t i) {
    const std::size_t n = heap_.size();
    for (;;) {
      std::size_t best = i;
      const std::size_t l = 2 * i + 1;
      const std::size_t r = l + 1;
      if (l < n && before(heap_[l], heap_[best])) best = l;
      if (r < n && before(heap_[r], heap_[best])) best = r;
      if (best == i) return;
      std::swap(heap_[i], heap_[best]);
      i = best;
    }
  }

  std::vector<Event> heap_;
  std::uint64_t next_seq_ = 0;
  Nanos now_{0};
};

}  // namespace tsn
