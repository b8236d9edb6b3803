#pragma once

// File-level inference: segment, run the net over the batch, average the
// segment probabilities.

#include "rvk/blstm.hpp"
#include "rvk/segments.hpp"

#include <vector>

namespace rvk {

// Repacks segments into per-time batch matrices: xs[t] row b is
// segment b's frame t. All segments must share rows and cols.
std::vector<MatX<float>> pack_segments(const std::vector<const Segment*>& batch);

struct ScoreResult {
    double probability = 0.0;  // mean over segments
    int n_segments = 0;
};

ScoreResult score_feature_matrix(const BlstmNetF& net, const MatrixF& fm);

}  // namespace rvk
