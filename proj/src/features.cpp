#include "rvk/features.hpp"

#include "rvk/fft.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

namespace rvk {

namespace {

constexpr char kCacheMagic[4] = {'R', 'V', 'K', 'F'};
constexpr uint32_t kCacheVersion = 1;

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

}  // namespace

int stft_frame_count(size_t num_samples, int window, int hop) {
    if (num_samples < size_t(window)) return 0;
    return 1 + int((num_samples - size_t(window)) / size_t(hop));
}

MatrixF stft_power(const AudioClip& clip, int window, int hop) {
    const int n_frames = stft_frame_count(clip.samples.size(), window, hop);
    if (n_frames == 0)
        throw TooShortError("clip shorter than one analysis window: " + clip.source_path);
    const int n_bins = window / 2 + 1;

    // Periodic Hann.
    std::vector<double> hann;
    hann.resize(size_t(window));
    for (int i = 0; i < window; ++i)
        hann[size_t(i)] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / window);

    MatrixF power(n_bins, n_frames);
    std::vector<std::complex<double>> buf;
    buf.resize(size_t(window));
    for (int t = 0; t < n_frames; ++t) {
        const size_t start = size_t(t) * size_t(hop);
        for (int i = 0; i < window; ++i)
            buf[size_t(i)] = {double(clip.samples[start + size_t(i)]) * hann[size_t(i)], 0.0};
        fft_inplace(buf);
        for (int b = 0; b < n_bins; ++b)
            power(b, t) = float(std::norm(buf[size_t(b)]));
    }
    return power;
}

MatrixF mel_filterbank(int n_mels, int n_bins, double sample_rate) {
    const double f_max = sample_rate / 2.0;
    const double mel_lo = hz_to_mel(0.0);
    const double mel_hi = hz_to_mel(f_max);

    // n_mels + 2 edge frequencies; filter m is the triangle
    // (edge[m], edge[m+1], edge[m+2]) with peak 1 at edge[m+1].
    std::vector<double> edges(size_t(n_mels) + 2);
    for (int i = 0; i < n_mels + 2; ++i)
        edges[size_t(i)] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (n_mels + 1));
    // the band endpoints are exact by definition, not round-tripped
    edges.front() = 0.0;
    edges.back() = f_max;

    const int fft_size = (n_bins - 1) * 2;
    MatrixF fb = MatrixF::Zero(n_mels, n_bins);
    for (int m = 0; m < n_mels; ++m) {
        const double lo = edges[size_t(m)];
        const double mid = edges[size_t(m) + 1];
        const double hi = edges[size_t(m) + 2];
        for (int b = 0; b < n_bins; ++b) {
            const double f = sample_rate * b / fft_size;
            double w = 0.0;
            if (f > lo && f < mid) w = (f - lo) / (mid - lo);
            else if (f == mid) w = 1.0;
            else if (f > mid && f < hi) w = (hi - f) / (hi - mid);
            fb(m, b) = float(w);
        }
    }
    return fb;
}

MatrixF mel_project(const MatrixF& power, const MatrixF& filterbank) {
    if (power.rows() != filterbank.cols())
        throw_numeric("mel_project: spectrogram bin count does not match filter bank");
    return filterbank * power;
}

MatrixF log_compress(const MatrixF& mel, double floor) {
    return mel.unaryExpr([floor](float v) {
        return float(std::log(std::max(double(v), floor)));
    });
}

MatrixF append_deltas(const MatrixF& logmel) {
    const Eigen::Index rows = logmel.rows();
    const Eigen::Index n = logmel.cols();
    MatrixF out(rows * 3, n);
    out.topRows(rows) = logmel;

    // denominator 2 * (1^2 + 2^2) = 10; edges replicate the first/last frame
    auto delta_of = [n](const auto& src, MatrixF& dst) {
        auto col = [&](Eigen::Index t) {
            return src.col(std::clamp<Eigen::Index>(t, 0, n - 1));
        };
        for (Eigen::Index t = 0; t < n; ++t) {
            dst.col(t) = ((col(t + 1) - col(t - 1)) + 2.0f * (col(t + 2) - col(t - 2))) / 10.0f;
        }
    };

    MatrixF d1(rows, n), d2(rows, n);
    delta_of(logmel, d1);
    delta_of(d1, d2);
    out.middleRows(rows, rows) = d1;
    out.bottomRows(rows) = d2;
    return out;
}

VectorF average_vector(const MatrixF& features) {
    if (features.cols() == 0) throw_numeric("average_vector: empty feature matrix");
    return features.rowwise().mean();
}

MatrixF extract_features(const AudioClip& clip) {
    static const MatrixF fb = mel_filterbank();
    MatrixF power = stft_power(clip);
    return append_deltas(log_compress(mel_project(power, fb)));
}

void write_feature_cache(const std::string& path, const MatrixF& features) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_data("cannot write feature cache: " + path);
    const uint32_t rows = uint32_t(features.rows());
    const uint32_t cols = uint32_t(features.cols());
    out.write(kCacheMagic, 4);
    auto put_u32 = [&](uint32_t v) {
        uint8_t b[4] = {uint8_t(v), uint8_t(v >> 8), uint8_t(v >> 16), uint8_t(v >> 24)};
        out.write(reinterpret_cast<char*>(b), 4);
    };
    put_u32(kCacheVersion);
    put_u32(rows);
    put_u32(cols);
    std::vector<float> row(cols);
    for (uint32_t r = 0; r < rows; ++r) {
        for (uint32_t c = 0; c < cols; ++c) row[c] = features(r, c);
        out.write(reinterpret_cast<const char*>(row.data()), std::streamsize(cols) * 4);
    }
    if (!out) throw_data("short write to feature cache: " + path);
}

namespace {

bool read_cache_header(std::ifstream& in, uint32_t& rows, uint32_t& cols) {
    char magic[4];
    uint8_t b[4];
    auto get_u32 = [&](uint32_t& v) {
        in.read(reinterpret_cast<char*>(b), 4);
        v = uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 | uint32_t(b[3]) << 24;
    };
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kCacheMagic, 4) != 0) return false;
    uint32_t version;
    get_u32(version);
    get_u32(rows);
    get_u32(cols);
    return bool(in) && version == kCacheVersion && rows > 0 && cols > 0;
}

}  // namespace

MatrixF read_feature_cache(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_data("cannot open feature cache: " + path);
    uint32_t rows = 0, cols = 0;
    if (!read_cache_header(in, rows, cols))
        throw_data("invalid feature cache header: " + path);
    MatrixF m(rows, cols);
    std::vector<float> row(cols);
    for (uint32_t r = 0; r < rows; ++r) {
        in.read(reinterpret_cast<char*>(row.data()), std::streamsize(cols) * 4);
        if (!in) throw_data("truncated feature cache: " + path);
        for (uint32_t c = 0; c < cols; ++c) m(r, c) = row[c];
    }
    return m;
}

bool feature_cache_valid(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    uint32_t rows = 0, cols = 0;
    if (!read_cache_header(in, rows, cols)) return false;
    in.seekg(0, std::ios::end);
    const auto size = in.tellg();
    return size == std::streamoff(16 + int64_t(rows) * cols * 4);
}

}  // namespace rvk
