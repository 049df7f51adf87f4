#pragma once

#include <vector>

namespace aep::audio {

inline constexpr int kSampleRate = 16000;

// Mono clip; samples live in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = kSampleRate;
};

Waveform make_silence(int n_samples, int sample_rate = kSampleRate);

double rms(const Waveform& w);

// Clips with RMS below this are treated as silent everywhere downstream.
inline constexpr double kSilenceRms = 1e-4;
bool is_silent(const Waveform& w);

// Adds src into dst starting at sample `offset`, clipping to [-1, 1].
// Samples that fall past the end of dst are dropped.
void mix_into(Waveform& dst, const Waveform& src, int offset);

}  // namespace aep::audio
