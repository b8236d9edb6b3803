#pragma once

// Log mel-spectrogram features with delta and delta-delta appended:
// 192 rows per frame laid out as [64 log-mel | 64 delta | 64 delta-delta],
// at 100 frames/s (window 1024, hop 441 at 44.1 kHz). Also the on-disk
// feature cache (RVKF files plus a JSON index).

#include "rvk/audio.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>

namespace rvk {

using MatrixF = Eigen::MatrixXf;
using VectorF = Eigen::VectorXf;

inline constexpr int kStftWindow = 1024;
inline constexpr int kStftHop = 441;
inline constexpr int kStftBins = kStftWindow / 2 + 1;  // 513
inline constexpr int kNumMels = 64;
inline constexpr int kFeatureRows = 3 * kNumMels;  // 192
inline constexpr double kLogFloor = 1e-10;

// 1 + floor((n - window)/hop) for n >= window, else 0.
int stft_frame_count(size_t num_samples, int window = kStftWindow, int hop = kStftHop);

// Hann-windowed power spectrogram, 513 x N. Frames start at sample 0 with no
// padding. Throws TooShortError when the clip is shorter than one window.
MatrixF stft_power(const AudioClip& clip, int window = kStftWindow, int hop = kStftHop);

// Triangular filters with unit peak on the HTK mel scale
// (2595 * log10(1 + f/700)), spanning 0..sample_rate/2. Returns n_mels x n_bins.
MatrixF mel_filterbank(int n_mels = kNumMels, int n_bins = kStftBins,
                       double sample_rate = double(kTargetRate));

MatrixF mel_project(const MatrixF& power, const MatrixF& filterbank);

// Natural log of max(entry, floor).
MatrixF log_compress(const MatrixF& mel, double floor = kLogFloor);

// Regression deltas with window M = 2 and edge replication:
// d_t = sum_{n=1..2} n * (c_{t+n} - c_{t-n}) / 10. Output stacks
// [input | delta | delta-delta] to 3x the input rows.
MatrixF append_deltas(const MatrixF& logmel);

// Arithmetic mean across frames, one value per row.
VectorF average_vector(const MatrixF& features);

// stft -> mel -> log -> deltas on an already preprocessed clip.
MatrixF extract_features(const AudioClip& clip);

// Cache file: magic "RVKF", u32 version = 1, u32 rows, u32 cols, then
// rows*cols little-endian f32 in row-major order.
void write_feature_cache(const std::string& path, const MatrixF& features);
MatrixF read_feature_cache(const std::string& path);
bool feature_cache_valid(const std::string& path);

}  // namespace rvk
