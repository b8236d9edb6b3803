#include "rvk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rvk {

RocReport roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw_numeric("scores/labels length mismatch");
    if (scores.empty()) throw_numeric("ROC over empty score list");
    int64_t n_pos = 0, n_neg = 0;
    for (int l : labels) (l ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0) throw_numeric("ROC needs both classes present");

    std::vector<size_t> order(scores.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scores[a] > scores[b]; });

    RocReport rep;
    rep.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
    int64_t tp = 0, fp = 0;
    size_t i = 0;
    while (i < order.size()) {
        const double s = scores[order[i]];
        // consume the whole tie group before emitting a point
        while (i < order.size() && scores[order[i]] == s) {
            (labels[order[i]] ? tp : fp)++;
            ++i;
        }
        rep.points.push_back({double(fp) / double(n_neg), double(tp) / double(n_pos), s});
    }

    double auc = 0.0;
    for (size_t k = 1; k < rep.points.size(); ++k) {
        const auto& a = rep.points[k - 1];
        const auto& b = rep.points[k];
        auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
    }
    rep.auc = auc;
    rep.sens_at_95_spec = sensitivity_at_specificity(rep, 0.95);
    return rep;
}

double sensitivity_at_specificity(const RocReport& report, double specificity) {
    const double max_fpr = 1.0 - specificity;
    double best = 0.0;
    for (const auto& pt : report.points)
        if (pt.fpr <= max_fpr) best = std::max(best, pt.tpr);
    return best;
}

double fuse(const std::vector<double>& probabilities) {
    if (probabilities.empty()) throw_numeric("fusion over zero modalities");
    double sum = 0.0;
    for (double p : probabilities) sum += p;
    return sum / double(probabilities.size());
}

double youden_threshold(const RocReport& report) {
    double best_j = -std::numeric_limits<double>::infinity();
    double best_threshold = std::numeric_limits<double>::infinity();
    for (const auto& pt : report.points) {
        const double j = pt.tpr - pt.fpr;
        if (j > best_j) {
            best_j = j;
            best_threshold = pt.threshold;
        }
    }
    return best_threshold;
}

SubjectCategory hierarchical_classify(double pos_vs_h, double omi_vs_del, double theta1,
                                      double theta2) {
    if (pos_vs_h < theta1) return SubjectCategory::healthy;
    return (omi_vs_del >= theta2) ? SubjectCategory::omicron : SubjectCategory::delta;
}

ConfusionMatrix3 confusion_3class(const std::vector<SubjectCategory>& predicted,
                                  const std::vector<SubjectCategory>& truth) {
    if (predicted.size() != truth.size())
        throw_numeric("prediction/truth length mismatch");
    ConfusionMatrix3 m;
    for (size_t i = 0; i < truth.size(); ++i)
        m.counts[int(truth[i])][int(predicted[i])]++;
    return m;
}

}  // namespace rvk
