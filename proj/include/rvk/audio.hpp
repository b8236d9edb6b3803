#pragma once

// Audio front end: decode to mono, rational resampling to 44.1 kHz, peak
// normalization to +-1 and sample-level sound-activity gating.

#include "rvk/common.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rvk {

inline constexpr uint32_t kTargetRate = 44100;
inline constexpr float kSadThreshold = 0.01f;
inline constexpr double kMinPostSadSeconds = 0.5;

struct AudioClip {
    std::vector<float> samples;  // amplitudes in [-1, 1]
    uint32_t sample_rate = 0;
    std::string source_path;
    bool silence = false;  // set by normalize() when the input is all-zero
};

// Reads a PCM WAV file; multichannel input is averaged to mono.
AudioClip decode(const std::string& path);

// Polyphase windowed-sinc (Kaiser) resampler at the reduced rational ratio
// target/input. Pass-through (bit-identical) when the rate already matches.
AudioClip resample(const AudioClip& clip, uint32_t target_rate = kTargetRate);

// Divides by the peak magnitude. All-zero input is returned unchanged with
// the silence flag set.
AudioClip normalize(const AudioClip& clip);

// Drops every sample with |amplitude| < threshold, concatenating the rest in
// order. Throws TooShortError when the gated clip is shorter than
// min_duration_s (the clip is unusable downstream).
AudioClip sad_gate(const AudioClip& clip, float threshold = kSadThreshold,
                   double min_duration_s = kMinPostSadSeconds);

// decode -> resample -> normalize -> sad_gate.
AudioClip preprocess_file(const std::string& path);

}  // namespace rvk
