#include "rvk/segments.hpp"

#include "rvk/rng.hpp"

#include <algorithm>

namespace rvk {

std::vector<Segment> segment_file(const MatrixF& fm, int label, const std::string& file_id,
                                  int window, int stride) {
    if (window <= 0 || stride <= 0) throw_config("segment window and stride must be positive");
    const Eigen::Index n = fm.cols();
    if (n <= 0) throw_data("cannot segment an empty feature matrix: " + file_id);

    std::vector<Segment> out;
    if (n < window) {
        Segment s;
        s.frames.resize(fm.rows(), window);
        for (int j = 0; j < window; ++j) s.frames.col(j) = fm.col(j % n);
        s.label = label;
        s.source_file_id = file_id;
        out.push_back(std::move(s));
        return out;
    }

    const Eigen::Index count = (n - window) / stride + 1;
    out.reserve(size_t(count));
    for (Eigen::Index k = 0; k < count; ++k) {
        Segment s;
        s.frames = fm.middleCols(k * stride, window);
        s.label = label;
        s.source_file_id = file_id;
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<size_t> oversample(const std::vector<Segment>& segments, uint64_t seed) {
    std::vector<size_t> pos, neg;
    for (size_t i = 0; i < segments.size(); ++i)
        (segments[i].label ? pos : neg).push_back(i);
    if (pos.empty() || neg.empty())
        throw_data("oversampling needs both classes present");

    std::vector<size_t> out;
    out.reserve(2 * std::max(pos.size(), neg.size()));
    out.insert(out.end(), neg.begin(), neg.end());
    out.insert(out.end(), pos.begin(), pos.end());

    Rng rng(seed);
    auto& minority = (pos.size() < neg.size()) ? pos : neg;
    const size_t deficit = std::max(pos.size(), neg.size()) - minority.size();
    for (size_t k = 0; k < deficit; ++k)
        out.push_back(minority[rng.below(minority.size())]);

    rng.shuffle(out);
    return out;
}

}  // namespace rvk
