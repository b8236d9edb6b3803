#include "rvk/audio.hpp"

#include "rvk/wav.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>

namespace rvk {

namespace {

// Modified Bessel function of the first kind, order zero (power series).
double bessel_i0(double x) {
    double sum = 1.0;
    double term = 1.0;
    double half_x = x / 2.0;
    for (int k = 1; k < 64; ++k) {
        term *= (half_x / k) * (half_x / k);
        sum += term;
        if (term < sum * 1e-16) break;
    }
    return sum;
}

// Polyphase filter bank for one rational ratio. Phase p holds taps
// h[p], h[p+L], ... so that one output sample is a dot product of
// taps_per_phase input samples.
struct PolyphaseBank {
    uint32_t up = 1;    // L
    uint32_t down = 1;  // M
    int taps_per_phase = 0;
    std::vector<float> phases;  // up * taps_per_phase, phase-major
    int64_t delay = 0;          // group delay in upsampled samples
};

constexpr int kTapsPerPhase = 64;
constexpr double kKaiserStopbandDb = 80.0;

PolyphaseBank design_bank(uint32_t in_rate, uint32_t out_rate) {
    PolyphaseBank bank;
    uint32_t g = std::gcd(in_rate, out_rate);
    bank.up = out_rate / g;
    bank.down = in_rate / g;
    bank.taps_per_phase = kTapsPerPhase;

    const int64_t total = int64_t(bank.up) * bank.taps_per_phase;
    const int64_t n_taps = total | 1;  // odd length, exact integer group delay
    bank.delay = (n_taps - 1) / 2;

    // Lowpass at the tighter of the two Nyquist limits, in the upsampled
    // domain, pulled in slightly so the transition band stays inside.
    const double cutoff = 0.92 * M_PI / double(std::max(bank.up, bank.down));
    const double beta = 0.1102 * (kKaiserStopbandDb - 8.7);
    const double i0_beta = bessel_i0(beta);

    std::vector<double> h;
    h.resize(size_t(n_taps));
    const double mid = double(n_taps - 1) / 2.0;
    for (int64_t i = 0; i < n_taps; ++i) {
        double t = double(i) - mid;
        double sinc = (t == 0.0) ? cutoff / M_PI : std::sin(cutoff * t) / (M_PI * t);
        double w = 2.0 * double(i) / double(n_taps - 1) - 1.0;
        double kaiser = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - w * w))) / i0_beta;
        h[size_t(i)] = sinc * kaiser;
    }

    // Split into phases and normalize each phase to unit DC gain, which
    // removes amplitude ripple across output sample positions.
    bank.phases.assign(size_t(bank.up) * bank.taps_per_phase, 0.0f);
    for (uint32_t p = 0; p < bank.up; ++p) {
        double sum = 0.0;
        for (int j = 0; j < bank.taps_per_phase; ++j) {
            int64_t idx = int64_t(p) + int64_t(j) * bank.up;
            if (idx < n_taps) sum += h[size_t(idx)];
        }
        double scale = (sum != 0.0) ? 1.0 / sum : 0.0;
        for (int j = 0; j < bank.taps_per_phase; ++j) {
            int64_t idx = int64_t(p) + int64_t(j) * bank.up;
            if (idx < n_taps)
                bank.phases[size_t(p) * bank.taps_per_phase + j] = float(h[size_t(idx)] * scale);
        }
    }
    return bank;
}

const PolyphaseBank& bank_for(uint32_t in_rate, uint32_t out_rate) {
    static std::mutex mu;
    static std::map<std::pair<uint32_t, uint32_t>, std::unique_ptr<PolyphaseBank>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{in_rate, out_rate}];
    if (!slot) slot = std::make_unique<PolyphaseBank>(design_bank(in_rate, out_rate));
    return *slot;
}

}  // namespace

AudioClip decode(const std::string& path) {
    WavContent wav = read_wav(path);
    AudioClip clip;
    clip.sample_rate = wav.sample_rate;
    clip.source_path = path;
    size_t frames = wav.frame_count();
    clip.samples.resize(frames);
    if (wav.channels == 1) {
        clip.samples = std::move(wav.interleaved);
    } else {
        for (size_t f = 0; f < frames; ++f) {
            double acc = 0.0;
            for (uint16_t c = 0; c < wav.channels; ++c)
                acc += wav.interleaved[f * wav.channels + c];
            clip.samples[f] = float(acc / wav.channels);
        }
    }
    return clip;
}

AudioClip resample(const AudioClip& clip, uint32_t target_rate) {
    if (clip.sample_rate == 0) throw_data("resample: clip has no sample rate");
    if (clip.sample_rate == target_rate) return clip;

    const PolyphaseBank& bank = bank_for(clip.sample_rate, target_rate);
    const int64_t in_len = int64_t(clip.samples.size());
    const int64_t out_len =
        (in_len * bank.up + bank.down - 1) / bank.down;  // ceil(in * L / M)

    AudioClip out;
    out.sample_rate = target_rate;
    out.source_path = clip.source_path;
    out.silence = clip.silence;
    out.samples.resize(size_t(out_len));

    const int P = bank.taps_per_phase;
    for (int64_t k = 0; k < out_len; ++k) {
        // Output sample k sits at upsampled index k*M; center the filter there.
        int64_t pos = k * bank.down + bank.delay;
        int64_t phase = pos % bank.up;
        int64_t n0 = pos / bank.up;
        const float* taps = &bank.phases[size_t(phase) * P];
        double acc = 0.0;
        int64_t j_lo = std::max<int64_t>(0, n0 - in_len + 1);
        int64_t j_hi = std::min<int64_t>(P - 1, n0);
        for (int64_t j = j_lo; j <= j_hi; ++j)
            acc += double(taps[j]) * double(clip.samples[size_t(n0 - j)]);
        out.samples[size_t(k)] = float(acc);
    }
    return out;
}

AudioClip normalize(const AudioClip& clip) {
    float peak = 0.0f;
    for (float s : clip.samples) peak = std::max(peak, std::abs(s));
    AudioClip out = clip;
    if (peak == 0.0f) {
        out.silence = true;
        return out;
    }
    for (float& s : out.samples) s /= peak;
    return out;
}

AudioClip sad_gate(const AudioClip& clip, float threshold, double min_duration_s) {
    AudioClip out;
    out.sample_rate = clip.sample_rate;
    out.source_path = clip.source_path;
    out.silence = clip.silence;
    out.samples.reserve(clip.samples.size());
    for (float s : clip.samples) {
        if (std::abs(s) >= threshold) out.samples.push_back(s);
    }
    const auto min_samples = size_t(std::ceil(min_duration_s * clip.sample_rate));
    if (out.samples.size() < min_samples) {
        throw TooShortError("post-SAD audio below " + std::to_string(min_duration_s) +
                            " s: " + clip.source_path);
    }
    return out;
}

AudioClip preprocess_file(const std::string& path) {
    return sad_gate(normalize(resample(decode(path))));
}

}  // namespace rvk
