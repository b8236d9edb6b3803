#pragma once

// Score-level evaluation: ROC/AUC, sensitivity at fixed specificity,
// modality fusion, threshold calibration, and the two-stage three-class
// decision rule.
//
// ROC convention: thresholds at unique score values, descending, ties
// grouped; a point predicts positive where score >= threshold. The curve
// starts at (0,0) (threshold +inf) and ends at (1,1). Under this
// convention the trapezoidal AUC equals the pair-counting statistic
// (concordant + 0.5*tied) / (n_pos * n_neg) exactly.

#include "rvk/manifest.hpp"

#include <vector>

namespace rvk {

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    double threshold = 0.0;
};

struct RocReport {
    std::vector<RocPoint> points;
    double auc = 0.0;
    double sens_at_95_spec = 0.0;
};

// labels are 0/1; both classes must be present.
RocReport roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Max TPR among points with FPR <= 1 - specificity; conservative step,
// no interpolation.
double sensitivity_at_specificity(const RocReport& report, double specificity);

// Arithmetic mean over the modalities that produced a score.
double fuse(const std::vector<double>& probabilities);

// Threshold maximizing Youden's J = TPR - FPR; of equal-J points the
// highest threshold wins (fewest predicted positives).
double youden_threshold(const RocReport& report);

// Stage 1 gates on the positive-vs-healthy score, stage 2 splits the
// variants. A subject below theta1 is Healthy and never reaches stage 2.
SubjectCategory hierarchical_classify(double pos_vs_h, double omi_vs_del, double theta1,
                                      double theta2);

struct ConfusionMatrix3 {
    // rows: true category, cols: predicted; index order healthy, delta, omicron
    int64_t counts[3][3] = {};

    int64_t row_sum(int r) const {
        return counts[r][0] + counts[r][1] + counts[r][2];
    }
    int64_t total() const { return row_sum(0) + row_sum(1) + row_sum(2); }
    int64_t diagonal() const { return counts[0][0] + counts[1][1] + counts[2][2]; }
};

ConfusionMatrix3 confusion_3class(const std::vector<SubjectCategory>& predicted,
                                  const std::vector<SubjectCategory>& truth);

}  // namespace rvk
