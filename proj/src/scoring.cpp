#include "rvk/scoring.hpp"

namespace rvk {

std::vector<MatX<float>> pack_segments(const std::vector<const Segment*>& batch) {
    if (batch.empty()) throw_numeric("empty segment batch");
    const Eigen::Index rows = batch[0]->frames.rows();
    const Eigen::Index T = batch[0]->frames.cols();
    for (const Segment* s : batch)
        if (s->frames.rows() != rows || s->frames.cols() != T)
            throw_numeric("segment shape mismatch in batch");

    std::vector<MatX<float>> xs;
    xs.resize(size_t(T));
    for (Eigen::Index t = 0; t < T; ++t) {
        xs[size_t(t)].resize(Eigen::Index(batch.size()), rows);
        for (size_t b = 0; b < batch.size(); ++b)
            xs[size_t(t)].row(Eigen::Index(b)) = batch[b]->frames.col(t).transpose();
    }
    return xs;
}

ScoreResult score_feature_matrix(const BlstmNetF& net, const MatrixF& fm) {
    const std::vector<Segment> segs = segment_file(fm, 0, "");
    std::vector<const Segment*> batch;
    batch.reserve(segs.size());
    for (const auto& s : segs) batch.push_back(&s);
    const MatX<float> p = forward_batch(net, pack_segments(batch));
    ScoreResult r;
    r.n_segments = int(segs.size());
    r.probability = double(p.sum()) / double(p.rows());
    return r;
}

}  // namespace rvk
