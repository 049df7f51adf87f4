#pragma once

#include <array>
#include <vector>

#include "audio/waveform.hpp"

namespace aep::audio {

inline constexpr int kTextureBands = 8;
inline constexpr int kTextureDim = 3 * kTextureBands + (kTextureBands - 1);  // 31

// Subband-envelope statistics: per-band envelope mean/std/skewness plus the
// Pearson correlation of each adjacent envelope pair.
// Layout: [mean x8, std x8, skew x8, corr x7].
struct SoundTexture {
  std::vector<double> features;
};

// The 10 mel-spaced triangular band vertices in Hz spanning 100 Hz - 8 kHz;
// band b rises from edge[b] to edge[b+1] and falls to edge[b+2].
std::array<double, kTextureBands + 2> texture_band_edges_hz();

// Deterministic pipeline: FFT -> triangular mel band weights -> subband
// reconstruction -> rectified 2 ms moving-average envelope -> statistics.
// Waveforms shorter than 256 samples are rejected.
SoundTexture extract_texture(const Waveform& w);

double texture_distance(const SoundTexture& a, const SoundTexture& b);

}  // namespace aep::audio
