#include "audio/events.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace aep::audio {

namespace {
constexpr double kPi = 3.14159265358979323846;

double unit_jitter(std::uint64_t& state) {
  // Uniform in [-1, 1).
  return 2.0 * (static_cast<double>(aep::splitmix64(state) >> 11) * 0x1.0p-53) - 1.0;
}
}  // namespace

EventKind event_kind_from_string(const std::string& s) {
  if (s == "coin") return EventKind::Coin;
  if (s == "hazard") return EventKind::Hazard;
  if (s == "fanfare") return EventKind::Fanfare;
  if (s == "footstep") return EventKind::Footstep;
  if (s == "silence") return EventKind::Silence;
  throw ConfigError("unknown event kind: " + s);
}

const char* event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::Coin:
      return "coin";
    case EventKind::Hazard:
      return "hazard";
    case EventKind::Fanfare:
      return "fanfare";
    case EventKind::Footstep:
      return "footstep";
    case EventKind::Silence:
      return "silence";
  }
  throw ConfigError("unknown event kind");
}

Waveform synth_event_jingle(EventKind kind, std::uint64_t rng_seed, int n_samples,
                            int sample_rate) {
  Waveform w = make_silence(n_samples, sample_rate);
  if (kind == EventKind::Silence) return w;

  std::uint64_t state = rng_seed ^ 0xa5a5a5a5deadbeefULL;
  const double fj = 1.0 + 0.01 * unit_jitter(state);  // ±1% pitch
  const double aj = 1.0 + 0.05 * unit_jitter(state);  // ±5% level
  const double dur = static_cast<double>(n_samples) / sample_rate;

  auto sample_time = [&](int t) { return static_cast<double>(t) / sample_rate; };

  switch (kind) {
    case EventKind::Coin: {
      // Two-note rising arpeggio high in the spectrum.
      const double f1 = 987.8 * fj, f2 = 1318.5 * fj;
      const double split = dur * 0.5;
      for (int t = 0; t < n_samples; ++t) {
        const double ts = sample_time(t);
        const bool second = ts >= split;
        const double f = second ? f2 : f1;
        const double t0 = second ? ts - split : ts;
        const double env = (1.0 - std::exp(-t0 / 0.002)) * std::exp(-22.0 * t0);
        w.samples[static_cast<std::size_t>(t)] =
            std::clamp(0.5 * aj * env * std::sin(2.0 * kPi * f * ts), -1.0, 1.0);
      }
      break;
    }
    case EventKind::Hazard: {
      // Low descending buzz.
      const double f_hi = 420.0 * fj, f_lo = 160.0 * fj;
      double phase = 0.0, phase2 = 0.0;
      for (int t = 0; t < n_samples; ++t) {
        const double ts = sample_time(t);
        const double f = f_hi + (f_lo - f_hi) * (ts / dur);
        phase += 2.0 * kPi * f / sample_rate;
        phase2 += 2.0 * kPi * (0.5 * f) / sample_rate;
        const double am = 1.0 - 0.35 * (0.5 + 0.5 * std::sin(2.0 * kPi * 30.0 * ts));
        w.samples[static_cast<std::size_t>(t)] =
            std::clamp(0.55 * aj * am * (std::sin(phase) + 0.4 * std::sin(phase2)), -1.0, 1.0);
      }
      break;
    }
    case EventKind::Fanfare: {
      // Sustained major triad with slow tremolo.
      const double fs[3] = {523.25 * fj, 659.25 * fj, 784.0 * fj};
      for (int t = 0; t < n_samples; ++t) {
        const double ts = sample_time(t);
        const double attack = 1.0 - std::exp(-ts / 0.005);
        const double trem = 1.0 - 0.2 * (0.5 + 0.5 * std::sin(2.0 * kPi * 8.0 * ts));
        double v = 0.0;
        for (double f : fs) v += std::sin(2.0 * kPi * f * ts);
        w.samples[static_cast<std::size_t>(t)] =
            std::clamp(0.28 * aj * attack * trem * v, -1.0, 1.0);
      }
      break;
    }
    case EventKind::Footstep: {
      // Short low thump with a brief noise burst on top.
      const double f = 85.0 * fj;
      const int noise_len = std::min(n_samples, sample_rate / 125);  // 8 ms
      std::vector<double> noise(static_cast<std::size_t>(noise_len));
      for (auto& v : noise) v = unit_jitter(state);
      for (int t = 0; t < n_samples; ++t) {
        const double ts = sample_time(t);
        double v = 0.6 * std::exp(-60.0 * ts) * std::sin(2.0 * kPi * f * ts);
        if (t < noise_len) {
          // Crude low-pass: average the last 4 noise samples.
          double s = 0.0;
          int cnt = 0;
          for (int j = std::max(0, t - 3); j <= t; ++j, ++cnt)
            s += noise[static_cast<std::size_t>(j)];
          v += 0.12 * std::exp(-200.0 * ts) * (s / cnt);
        }
        w.samples[static_cast<std::size_t>(t)] = std::clamp(aj * v, -1.0, 1.0);
      }
      break;
    }
    case EventKind::Silence:
      break;
  }
  return w;
}

}  // namespace aep::audio
