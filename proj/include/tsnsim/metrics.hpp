#pragma once

// Per-run measurement: end-to-end delay, sink throughput and loss per class,
// stream admission, and signaling delay/overhead.

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "tsnsim/domain.hpp"

namespace tsn {

struct ClassMetrics {
  double mean_delay_us = 0;
  double max_delay_us = 0;
  double throughput_bps = 0;
  double loss_ratio = 0;
  std::uint64_t offered = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::uint64_t in_flight = 0;
};

struct StreamMetrics {
  std::uint64_t generated = 0;
  std::uint64_t admitted = 0;
  std::uint64_t completed = 0;
  std::uint64_t rejected = 0;
  std::uint64_t excluded = 0;  // still inside their lifetime at the horizon
  double admission_ratio = 1.0;
  bool admission_undefined = false;
};

struct SignalingMetrics {
  std::uint64_t samples = 0;
  double mean_delay_us = 0;
  double min_delay_us = 0;
  double max_delay_us = 0;
  double delay_variance_us2 = 0;
  std::uint64_t messages = 0;
  std::uint64_t cdt_bytes = 0;
  double overhead_bps = 0;
};

struct MetricsReport {
  ClassMetrics st;
  ClassMetrics be;
  StreamMetrics streams;
  SignalingMetrics signaling;
  double duration_s = 0;
};

struct AdmissionRatio {
  double ratio = 1.0;
  bool undefined = false;  // nothing ran to completion inside the horizon
};

// Completed streams over generated streams, leaving out streams whose
// lifetime extends past the horizon.
inline AdmissionRatio admission_ratio(const StreamMetrics& s) {
  const auto eligible = s.generated - s.excluded;
  if (eligible == 0) return {1.0, true};
  return {static_cast<double>(s.completed) / static_cast<double>(eligible), false};
}

inline AdmissionRatio admission_ratio(const MetricsReport& r) { return admission_ratio(r.streams); }

inline double signaling_overhead(std::uint64_t cdt_bytes, double duration_s) {
  return duration_s > 0 ? static_cast<double>(cdt_bytes) * 8.0 / duration_s : 0.0;
}

inline double signaling_overhead(const MetricsReport& r) { return signaling_overhead(r.signaling.cdt_bytes, r.duration_s); }

class DelayAccumulator {
 public:
  void add(Nanos d) {
    ++count_;
    sum_ += d.count();
    max_ = std::max(max_, d.count());
  }
  std::uint64_t count() const { return count_; }
  double mean_us() const { return count_ == 0 ? 0.0 : static_cast<double>(sum_) / static_cast<double>(count_) / 1e3; }
  double max_us() const { return static_cast<double>(max_) / 1e3; }

 private:
  std::uint64_t count_ = 0;
  std::int64_t sum_ = 0;
  std::int64_t max_ = 0;
};

class MetricsCollector {
 public:
  explicit MetricsCollector(Nanos horizon) : horizon_(horizon) {}

  Nanos horizon() const { return horizon_; }

  void record_offered(TrafficClass c) { ++cls(c).offered; }
  void record_drop(TrafficClass c) { ++cls(c).dropped; }
  void record_in_flight(TrafficClass c, std::uint64_t n = 1) { cls(c).in_flight += n; }

  void record_delivery(const Frame& f, Nanos delivered_at) {
    auto& k = cls(f.cls);
    ++k.delivered;
    k.delivered_bits += static_cast<std::uint64_t>(f.size) * 8;
    k.delay.add(delivered_at - f.created_at);
  }

  void stream_generated(const StreamSpec& s) {
    ++streams_.generated;
    if (s.expiry() > horizon_) ++streams_.excluded;
  }

  // Signaling outcome seen by the talker. A stream counts as admitted only
  // when the approval arrives before its lifetime ends.
  void stream_resolved(const StreamSpec& s, bool approved, Nanos at) {
    const bool admitted = approved && at < s.expiry();
    if (admitted) {
      ++streams_.admitted;
      if (s.expiry() <= horizon_) ++streams_.completed;
    } else {
      ++streams_.rejected;
    }
  }

  void record_signaling_delay(Nanos d) {
    const double us = to_us(d);
    ++sig_n_;
    const double delta = us - sig_mean_;
    sig_mean_ += delta / static_cast<double>(sig_n_);
    sig_m2_ += delta * (us - sig_mean_);
    sig_min_ = sig_n_ == 1 ? us : std::min(sig_min_, us);
    sig_max_ = std::max(sig_max_, us);
  }

  void record_cdt(int bytes) { cdt_bytes_ += static_cast<std::uint64_t>(bytes); }
  void record_control_message() { ++messages_; }

  MetricsReport finalize() const {
    MetricsReport r;
    r.duration_s = to_seconds(horizon_);
    r.st = finish(st_, r.duration_s);
    r.be = finish(be_, r.duration_s);
    r.streams = streams_;
    const auto ar = admission_ratio(streams_);
    r.streams.admission_ratio = ar.ratio;
    r.streams.admission_undefined = ar.undefined;
    r.signaling.samples = sig_n_;
    r.signaling.mean_delay_us = sig_mean_;
    r.signaling.min_delay_us = sig_min_;
    r.signaling.max_delay_us = sig_max_;
    r.signaling.delay_variance_us2 = sig_n_ > 1 ? sig_m2_ / static_cast<double>(sig_n_) : 0.0;
    r.signaling.messages = messages_;
    r.signaling.cdt_bytes = cdt_bytes_;
    r.signaling.overhead_bps = signaling_overhead(cdt_bytes_, r.duration_s);
    return r;
  }

 private:
  struct ClassAccumulator {
    std::uint64_t offered = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
    std::uint64_t in_flight = 0;
    std::uint64_t delivered_bits = 0;
    DelayAccumulator delay;
  };

  ClassAccumulator& cls(TrafficClass c) { return c == TrafficClass::St ? st_ : be_; }

  static ClassMetrics finish(const ClassAccumulator& a, double duration_s) {
    ClassMetrics m;
    m.offered = a.offered;
    m.delivered = a.delivered;
    m.dropped = a.dropped;
    m.in_flight = a.in_flight;
    m.mean_delay_us = a.delay.mean_us();
    m.max_delay_us = a.delay.max_us();
    m.throughput_bps = duration_s > 0 ? static_cast<double>(a.delivered_bits) / duration_s : 0.0;
    m.loss_ratio = a.offered == 0 ? 0.0 : static_cast<double>(a.dropped) / static_cast<double>(a.offered);
    return m;
  }

  Nanos horizon_;
  ClassAccumulator st_;
  ClassAccumulator be_;
  StreamMetrics streams_;
  std::uint64_t sig_n_ = 0;
  double sig_mean_ = 0;
  double sig_m2_ = 0;
  double sig_min_ = 0;
  double sig_max_ = 0;
  std::uint64_t messages_ = 0;
  std::uint64_t cdt_bytes_ = 0;
};

}  // namespace tsn
