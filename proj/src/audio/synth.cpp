#include "audio/synth.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace aep::audio {

namespace {
constexpr double kPi = 3.14159265358979323846;

const MaterialProfile kWood{"wood", {450.0, 1180.0, 2800.0}, {60.0, 80.0, 105.0},
                            {1.0, 0.6, 0.35}, 0.8};
const MaterialProfile kMetal{"metal", {720.0, 1920.0, 4500.0}, {9.0, 12.0, 16.0},
                             {1.0, 0.7, 0.45}, 0.9};
const MaterialProfile kGlass{"glass", {1500.0, 3600.0, 6800.0}, {26.0, 36.0, 52.0},
                             {1.0, 0.65, 0.4}, 0.85};
}  // namespace

const MaterialProfile& material_profile(Material m) {
  switch (m) {
    case Material::Wood:
      return kWood;
    case Material::Metal:
      return kMetal;
    case Material::Glass:
      return kGlass;
  }
  throw ConfigError("unknown material");
}

Waveform make_silence(int n_samples, int sample_rate) {
  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.assign(static_cast<std::size_t>(n_samples), 0.0);
  return w;
}

double rms(const Waveform& w) {
  if (w.samples.empty()) return 0.0;
  double s = 0.0;
  for (double v : w.samples) s += v * v;
  return std::sqrt(s / static_cast<double>(w.samples.size()));
}

bool is_silent(const Waveform& w) { return rms(w) < kSilenceRms; }

void mix_into(Waveform& dst, const Waveform& src, int offset) {
  if (offset < 0) throw ConfigError("mix_into: negative offset");
  const std::size_t n = dst.samples.size();
  for (std::size_t i = 0; i < src.samples.size(); ++i) {
    const std::size_t j = static_cast<std::size_t>(offset) + i;
    if (j >= n) break;
    dst.samples[j] = std::clamp(dst.samples[j] + src.samples[i], -1.0, 1.0);
  }
}

Waveform synth_impact(const MaterialProfile& profile, double impulse, int n_samples,
                      int sample_rate) {
  const double nyquist = sample_rate / 2.0;
  for (double f : profile.mode_hz)
    if (f <= 0.0 || f >= nyquist) throw ConfigError("impact mode frequency out of range");
  for (double d : profile.decay)
    if (d <= 0.0) throw ConfigError("impact decay must be positive");

  Waveform w = make_silence(n_samples, sample_rate);
  const double amp = profile.gain * std::max(0.0, impulse);
  if (amp == 0.0) return w;
  for (int t = 0; t < n_samples; ++t) {
    const double ts = static_cast<double>(t) / sample_rate;
    double v = 0.0;
    for (int m = 0; m < 3; ++m)
      v += profile.mode_amp[static_cast<std::size_t>(m)] *
           std::exp(-profile.decay[static_cast<std::size_t>(m)] * ts) *
           std::sin(2.0 * kPi * profile.mode_hz[static_cast<std::size_t>(m)] * ts);
    w.samples[static_cast<std::size_t>(t)] = std::clamp(amp * v, -1.0, 1.0);
  }
  return w;
}

}  // namespace aep::audio
