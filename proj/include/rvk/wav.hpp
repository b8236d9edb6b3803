#pragma once

// RIFF/WAVE PCM reading and writing.
//
// The reader accepts 8-bit unsigned, 16/24/32-bit signed integer and 32-bit
// float sample formats (plain PCM or WAVE_FORMAT_EXTENSIBLE wrapping them),
// any channel count and rate. Integer samples are scaled to [-1, 1] by the
// type maximum. The writer emits 16-bit mono PCM.

#include <cstdint>
#include <string>
#include <vector>

namespace rvk {

struct WavContent {
    uint32_t sample_rate = 0;
    uint16_t channels = 0;
    std::vector<float> interleaved;  // frame-major, scaled to [-1, 1]

    size_t frame_count() const { return channels ? interleaved.size() / channels : 0; }
};

// Throws Error(data) on malformed, truncated, zero-length or unsupported files.
WavContent read_wav(const std::string& path);

// Samples are clamped to [-1, 1] and rounded to 16-bit.
void write_wav16(const std::string& path, const std::vector<float>& samples,
                 uint32_t sample_rate);

}  // namespace rvk
