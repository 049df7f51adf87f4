#pragma once

#include <string>

#include "audio/waveform.hpp"

namespace aep::audio {

// PCM16 mono WAV for human inspection of synthesized clips.
void write_wav(const std::string& path, const Waveform& w);

}  // namespace aep::audio
