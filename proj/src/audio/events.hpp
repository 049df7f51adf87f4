#pragma once

#include <cstdint>
#include <string>

#include "audio/waveform.hpp"

namespace aep::audio {

enum class EventKind { Coin, Hazard, Fanfare, Footstep, Silence };

EventKind event_kind_from_string(const std::string& s);
const char* event_kind_name(EventKind kind);

// Deterministic per (kind, seed); the seed drives small frequency/amplitude
// jitter so instances of a kind differ slightly but stay tightly clustered.
Waveform synth_event_jingle(EventKind kind, std::uint64_t rng_seed, int n_samples,
                            int sample_rate = kSampleRate);

}  // namespace aep::audio
