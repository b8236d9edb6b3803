#pragma once

// Fixed-width segment extraction from feature matrices, plus the
// class-balancing epoch sampler.

#include "rvk/features.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rvk {

inline constexpr int kSegmentWindow = 51;
inline constexpr int kSegmentStride = 10;

struct Segment {
    MatrixF frames;  // rows x window
    int label = 0;   // binary
    std::string source_file_id;
};

// Windows start at columns 0, stride, 2*stride, ...; count is
// floor((N - window)/stride) + 1. A file shorter than one window is
// padded by cyclic frame repetition and yields a single segment.
// Throws Error(data) on an empty matrix.
std::vector<Segment> segment_file(const MatrixF& fm, int label, const std::string& file_id,
                                  int window = kSegmentWindow, int stride = kSegmentStride);

// Epoch sample: every original index once, plus minority-class indices
// drawn with replacement until the class counts match, shuffled. Throws
// Error(data) when only one class is present.
std::vector<size_t> oversample(const std::vector<Segment>& segments, uint64_t seed);

}  // namespace rvk
