#pragma once

#include <array>
#include <string>

#include "audio/waveform.hpp"

namespace aep::audio {

enum class Material { Wood, Metal, Glass };

// Three damped modes per material; enough to make materials audibly and
// spectrally distinct while staying below the 8 kHz Nyquist limit.
struct MaterialProfile {
  std::string id;
  std::array<double, 3> mode_hz;
  std::array<double, 3> decay;  // 1/s
  std::array<double, 3> mode_amp;
  double gain;
};

const MaterialProfile& material_profile(Material m);

// Sum of exponentially damped sinusoids at the profile's modes, amplitude
// proportional to the (clamped non-negative) impulse, clipped to [-1, 1].
Waveform synth_impact(const MaterialProfile& profile, double impulse, int n_samples,
                      int sample_rate = kSampleRate);

}  // namespace aep::audio
