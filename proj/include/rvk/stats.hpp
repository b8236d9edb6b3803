#pragma once

// Mann-Whitney U testing and harmonic-mean-of-p-values summarization.
//
// U counts pairs (x_i > y_j) plus half-credit for ties, so
// U(x,y) + U(y,x) = |x|*|y|. Two-sided p-values throughout: exact
// enumeration when the combined sample is small (<= 20) and tie-free,
// otherwise a normal approximation with tie and continuity corrections.

#include "rvk/features.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rvk {

enum class UMethod { exact, normal_approx };

struct UTestResult {
    int dimension_index = 0;
    double u_statistic = 0.0;
    double p_value = 1.0;  // in (0, 1]
    UMethod method = UMethod::exact;
};

struct PopulationComparison {
    std::string label_a;
    std::string label_b;
    std::vector<UTestResult> per_dim;
    double hmp = 1.0;
    double neg_log10_hmp = 0.0;
};

inline constexpr int kExactModeMaxCombined = 20;

UTestResult mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y);

// Count of tie-free arrangements with statistic u, for u in [0, n*m].
// Counts are exact in double up to n+m = 20 (max total C(20,10) < 2^53).
std::vector<double> mwu_exact_distribution(int n, int m);

// Equal weights: L / sum(1/p_i). Throws Error(numeric) unless every
// p is in (0, 1].
double hmp(const std::vector<double>& p_values);

struct CompareOptions {
    std::string label_a = "A";
    std::string label_b = "B";
    size_t subsample_cap = 200;  // equal-size cap per population
    uint64_t seed = 1;
};

// One U test per dimension plus the HMP summary. Populations are
// subsampled (seeded) to min(cap, min size) each so neither side
// dominates by count.
PopulationComparison compare_populations(const std::vector<VectorF>& a,
                                         const std::vector<VectorF>& b,
                                         const CompareOptions& options);

// CSV `dimension,u,p,neg_log10_p` with a final `hmp` footer row.
void write_comparison_csv(const std::string& path, const PopulationComparison& cmp);

}  // namespace rvk
