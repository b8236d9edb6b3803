#pragma once

// Self-contained SVG charts for the run reports: ROC curves, the
// significance bar chart with its -log10(p) = 3 reference line, and a
// box plot of per-seed validation AUCs. Output is deterministic down to
// the byte for identical inputs.

#include "rvk/metrics.hpp"

#include <string>
#include <vector>

namespace rvk {

struct RocCurve {
    std::string label;
    std::vector<RocPoint> points;
};

std::string svg_roc(const std::string& title, const std::vector<RocCurve>& curves);

// Grouped bars: one group per row label, one bar per series entry.
// values[group][series]; a dashed horizontal line marks `reference`.
std::string svg_bars(const std::string& title, const std::vector<std::string>& groups,
                     const std::vector<std::string>& series,
                     const std::vector<std::vector<double>>& values, double reference);

// One box (min / quartiles / max) per label.
std::string svg_box(const std::string& title, const std::vector<std::string>& labels,
                    const std::vector<std::vector<double>>& samples);

}  // namespace rvk
