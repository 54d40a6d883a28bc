#pragma once

// Traffic generation: Poisson stream arrivals per ST talker, periodic
// per-stream frame injection, and Poisson best-effort background frames.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>

#include "tsnsim/domain.hpp"

namespace tsn {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent child seed for a named purpose (talker index, BE source, ...).
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
  return splitmix64(splitmix64(base) ^ (tag * 0xD1B54A32D192ED03ULL));
}

// mt19937_64 is fully specified by the standard; the std distributions are
// not, so variates are drawn by hand to keep traces identical across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on the open interval (0, 1).
  double uniform01() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53; }

  double exponential(double mean) { return -mean * std::log(uniform01()); }

  // Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return lo + static_cast<int>(x % span);
  }

 private:
  std::mt19937_64 engine_;
};

/// Stream arrivals of one talker: exponential inter-arrival times with mean
/// 1/pi, exponential lifetimes with mean tau, hop count uniform over 1..5.
class StStreamGenerator {
 public:
  StStreamGenerator(SwitchId gateway, int switches, double streams_per_second, Nanos mean_duration, std::uint64_t seed,
                    int frames_per_cycle = 1, int packet_size = 64)
      : gateway_(gateway),
        switches_(switches),
        rate_(streams_per_second),
        mean_duration_(mean_duration),
        gamma_(frames_per_cycle),
        packet_size_(packet_size),
        rng_(seed) {
    if (rate_ < 0) throw std::invalid_argument("stream arrival rate must be >= 0");
    if (mean_duration_ <= Nanos{0}) throw std::invalid_argument("mean stream duration must be positive");
  }

  // Next stream created before `horizon`, or nothing once the process has
  // passed it. Flow ids are supplied by the caller.
  std::optional<StreamSpec> next(Nanos horizon, FlowId flow_id) {
    if (rate_ <= 0) return std::nullopt;
    clock_ += from_seconds(rng_.exponential(1.0 / rate_));
    if (clock_ >= horizon) return std::nullopt;
    StreamSpec s;
    s.flow_id = flow_id;
    s.source_id = gateway_;
    s.gateway = gateway_;
    s.hop_count = rng_.uniform_int(1, 5);
    s.sink = (gateway_ + s.hop_count) % switches_;
    s.frames_per_cycle = gamma_;
    s.packet_size = packet_size_;
    s.start_time = clock_;
    s.duration = std::max(Nanos{1}, from_seconds(rng_.exponential(to_seconds(mean_duration_))));
    return s;
  }

 private:
  SwitchId gateway_;
  int switches_;
  double rate_;
  Nanos mean_duration_;
  int gamma_;
  int packet_size_;
  Rng rng_;
  Nanos clock_{0};
};

/// Periodic injection of an approved stream: gamma frames at every cycle
/// boundary in [first_boundary, expiry).
struct InjectionSchedule {
  Nanos first_boundary{0};
  Nanos expiry{0};
  Nanos cycle_time{50'000};
  int frames_per_cycle = 1;

  bool active_at(Nanos boundary) const { return boundary >= first_boundary && boundary < expiry; }

  std::uint64_t frames_offered() const { return frames_offered_until(kNever); }

  std::uint64_t frames_offered_until(Nanos horizon) const {
    Nanos stop = expiry;
    if (horizon < expiry) stop = horizon + Nanos{1};
    if (stop <= first_boundary) return 0;
    const auto cycles = (stop - first_boundary + cycle_time - Nanos{1}) / cycle_time;
    return static_cast<std::uint64_t>(cycles) * static_cast<std::uint64_t>(frames_per_cycle);
  }
};

// Injection plan for a stream approved at `approved_at`: it starts at the
// first cycle boundary after the approval and runs until its expiry.
inline InjectionSchedule injection_process(const StreamSpec& s, Nanos approved_at, Nanos cycle_time) {
  return InjectionSchedule{next_cycle_after(approved_at, cycle_time), s.expiry(), cycle_time, s.frames_per_cycle};
}

struct BeArrival {
  Nanos created_at;
  int hop_count;
};

/// Poisson best-effort frames of one source at a mean bit rate.
class BeGenerator {
 public:
  BeGenerator(double mean_bps, int frame_size, std::uint64_t seed)
      : frames_per_second_(mean_bps / (frame_size * 8.0)), rng_(seed) {
    if (mean_bps < 0) throw std::invalid_argument("BE rate must be >= 0");
    advance();
  }

  double frames_per_second() const { return frames_per_second_; }

  // Emits every arrival strictly before `end`, in time order.
  template <class Emit>
  void generate_until(Nanos end, Emit&& emit) {
    if (frames_per_second_ <= 0) return;
    while (next_ < end) {
      emit(BeArrival{next_, rng_.uniform_int(1, 5)});
      advance();
    }
  }

 private:
  void advance() {
    if (frames_per_second_ > 0) next_ += from_seconds(rng_.exponential(1.0 / frames_per_second_));
  }

  double frames_per_second_;
  Rng rng_;
  Nanos next_{0};
};

}  // namespace tsn
