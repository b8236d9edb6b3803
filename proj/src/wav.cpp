#include "rvk/wav.hpp"

#include "rvk/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace rvk {

namespace {

constexpr uint16_t kFormatPcm = 0x0001;
constexpr uint16_t kFormatFloat = 0x0003;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint32_t read_u32(const uint8_t* p) {
    return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 | uint32_t(p[3]) << 24;
}

uint16_t read_u16(const uint8_t* p) {
    return uint16_t(p[0]) | uint16_t(p[1]) << 8;
}

struct FmtInfo {
    uint16_t format = 0;
    uint16_t channels = 0;
    uint32_t sample_rate = 0;
    uint16_t bits = 0;
};

float decode_sample(const uint8_t* p, uint16_t bits, uint16_t format) {
    if (format == kFormatFloat) {
        float f;
        std::memcpy(&f, p, 4);
        return f;
    }
    switch (bits) {
        case 8:
            return (int(p[0]) - 128) / 128.0f;
        case 16: {
            int16_t v = int16_t(read_u16(p));
            return float(v) / 32768.0f;
        }
        case 24: {
            int32_t v = int32_t(uint32_t(p[0]) << 8 | uint32_t(p[1]) << 16 | uint32_t(p[2]) << 24) >> 8;
            return float(v) / 8388608.0f;
        }
        case 32: {
            int32_t v;
            std::memcpy(&v, p, 4);
            return float(double(v) / 2147483648.0);
        }
        default:
            break;
    }
    throw_data("unsupported PCM bit depth " + std::to_string(bits));
}

}  // namespace

WavContent read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_data("cannot open WAV file: " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
    if (bytes.size() < 12) throw_data("truncated WAV header: " + path);
    if (std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw_data("not a RIFF/WAVE file: " + path);

    FmtInfo fmt;
    bool have_fmt = false;
    const uint8_t* data = nullptr;
    size_t data_size = 0;

    size_t off = 12;
    while (off + 8 <= bytes.size()) {
        const char* id = reinterpret_cast<const char*>(bytes.data() + off);
        uint32_t size = read_u32(bytes.data() + off + 4);
        size_t body = off + 8;
        if (body + size > bytes.size())
            throw_data("truncated chunk in WAV file: " + path);
        if (std::strncmp(id, "fmt ", 4) == 0) {
            if (size < 16) throw_data("short fmt chunk: " + path);
            fmt.format = read_u16(bytes.data() + body);
            fmt.channels = read_u16(bytes.data() + body + 2);
            fmt.sample_rate = read_u32(bytes.data() + body + 4);
            fmt.bits = read_u16(bytes.data() + body + 14);
            if (fmt.format == kFormatExtensible) {
                if (size < 40) throw_data("short extensible fmt chunk: " + path);
                // First two bytes of the SubFormat GUID carry the real format tag.
                fmt.format = read_u16(bytes.data() + body + 24);
            }
            have_fmt = true;
        } else if (std::strncmp(id, "data", 4) == 0) {
            data = bytes.data() + body;
            data_size = size;
        }
        off = body + size + (size & 1);  // chunks are word-aligned
    }

    if (!have_fmt) throw_data("missing fmt chunk: " + path);
    if (!data) throw_data("missing data chunk: " + path);
    if (fmt.channels == 0 || fmt.sample_rate == 0)
        throw_data("invalid fmt chunk: " + path);
    if (fmt.format == kFormatFloat) {
        if (fmt.bits != 32) throw_data("only 32-bit float WAV supported: " + path);
    } else if (fmt.format != kFormatPcm) {
        throw_data("unsupported WAV codec tag " + std::to_string(fmt.format) + ": " + path);
    }
    if (fmt.format == kFormatPcm && fmt.bits != 8 && fmt.bits != 16 && fmt.bits != 24 && fmt.bits != 32)
        throw_data("unsupported PCM bit depth: " + path);

    size_t bytes_per_sample = fmt.bits / 8;
    size_t frame_bytes = bytes_per_sample * fmt.channels;
    size_t frames = frame_bytes ? data_size / frame_bytes : 0;
    if (frames == 0) throw_data("zero-length audio: " + path);

    WavContent out;
    out.sample_rate = fmt.sample_rate;
    out.channels = fmt.channels;
    out.interleaved.resize(frames * fmt.channels);
    for (size_t f = 0; f < frames; ++f) {
        const uint8_t* p = data + f * frame_bytes;
        for (uint16_t c = 0; c < fmt.channels; ++c) {
            out.interleaved[f * fmt.channels + c] =
                decode_sample(p + c * bytes_per_sample, fmt.bits, fmt.format);
        }
    }
    return out;
}

void write_wav16(const std::string& path, const std::vector<float>& samples,
                 uint32_t sample_rate) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_data("cannot write WAV file: " + path);

    auto put_u32 = [&](uint32_t v) {
        uint8_t b[4] = {uint8_t(v), uint8_t(v >> 8), uint8_t(v >> 16), uint8_t(v >> 24)};
        out.write(reinterpret_cast<char*>(b), 4);
    };
    auto put_u16 = [&](uint16_t v) {
        uint8_t b[2] = {uint8_t(v), uint8_t(v >> 8)};
        out.write(reinterpret_cast<char*>(b), 2);
    };

    uint32_t data_bytes = uint32_t(samples.size() * 2);
    out.write("RIFF", 4);
    put_u32(36 + data_bytes);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    put_u32(16);
    put_u16(kFormatPcm);
    put_u16(1);  // mono
    put_u32(sample_rate);
    put_u32(sample_rate * 2);
    put_u16(2);
    put_u16(16);
    out.write("data", 4);
    put_u32(data_bytes);
    for (float s : samples) {
        float clamped = std::clamp(s, -1.0f, 1.0f);
        auto v = int16_t(std::lrintf(clamped * 32767.0f));
        put_u16(uint16_t(v));
    }
    if (!out) throw_data("short write to WAV file: " + path);
}

}  // namespace rvk
