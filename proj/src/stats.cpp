#include "rvk/stats.hpp"

#include "rvk/csv.hpp"
#include "rvk/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

namespace rvk {

namespace {

// Sum over combined-sample tie groups of t^3 - t, the correction term in
// the rank-variance formula.
double tie_term(std::vector<double> combined) {
    std::sort(combined.begin(), combined.end());
    double total = 0.0;
    size_t i = 0;
    while (i < combined.size()) {
        size_t j = i + 1;
        while (j < combined.size() && combined[j] == combined[i]) ++j;
        const double t = double(j - i);
        total += t * t * t - t;
        i = j;
    }
    return total;
}

double exact_two_sided_p(double u, int n, int m) {
    const std::vector<double> dist = mwu_exact_distribution(n, m);
    const double total = std::accumulate(dist.begin(), dist.end(), 0.0);
    // Tie-free, so U is an integer; double the smaller tail.
    const int64_t ui = std::llround(u);
    const int64_t lower = std::min<int64_t>(ui, int64_t(n) * m - ui);
    double tail = 0.0;
    for (int64_t k = 0; k <= lower; ++k) tail += dist[size_t(k)];
    return std::min(1.0, 2.0 * tail / total);
}

double approx_two_sided_p(double u, int n, int m, double ties) {
    const double nm = double(n) * double(m);
    const double big_n = double(n + m);
    const double mu = nm / 2.0;
    const double var =
        nm / 12.0 * ((big_n + 1.0) - ties / (big_n * (big_n - 1.0)));
    if (var <= 1e-12) return 1.0;  // every value tied; no evidence either way
    const double z = std::max(0.0, std::abs(u - mu) - 0.5) / std::sqrt(var);
    const double p = std::erfc(z / std::sqrt(2.0));
    return std::max(p, 1e-300);  // keep p strictly positive
}

}  // namespace

std::vector<double> mwu_exact_distribution(int n, int m) {
    if (n < 0 || m < 0) throw_numeric("negative sample size");
    const size_t width = size_t(n) * size_t(m) + 1;
    // In a sorted arrangement the per-x "y's exceeded" counts form a
    // non-decreasing sequence, so arrangements with U = u are partitions
    // of u into at most n parts, each at most m:
    //   f(n, m, u) = f(n, m-1, u) + f(n-1, m, u-m)
    // (no part equals m, or strip one part of size m). Two slices over n
    // suffice; each slice is indexed [m'][u].
    auto at = [&](std::vector<double>& slice, int mm, size_t u) -> double& {
        return slice[size_t(mm) * width + u];
    };
    std::vector<double> prev((size_t(m) + 1) * width, 0.0);
    for (int mm = 0; mm <= m; ++mm) at(prev, mm, 0) = 1.0;  // n' = 0
    std::vector<double> cur((size_t(m) + 1) * width, 0.0);
    for (int nn = 1; nn <= n; ++nn) {
        std::fill(cur.begin(), cur.end(), 0.0);
        at(cur, 0, 0) = 1.0;  // m' = 0
        for (int mm = 1; mm <= m; ++mm) {
            const size_t hi = size_t(nn) * size_t(mm);
            for (size_t u = 0; u <= hi; ++u) {
                double v = at(cur, mm - 1, u);
                if (u >= size_t(mm)) v += at(prev, mm, u - size_t(mm));
                at(cur, mm, u) = v;
            }
        }
        prev.swap(cur);
    }
    return std::vector<double>(prev.begin() + ptrdiff_t(size_t(m) * width), prev.end());
}

UTestResult mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.empty() || y.empty()) throw_numeric("Mann-Whitney U needs non-empty samples");
    const int n = int(x.size());
    const int m = int(y.size());

    // Direct pair counting; population sizes here stay small enough that
    // O(n*m) beats rank bookkeeping for clarity.
    double u = 0.0;
    bool any_tie = false;
    for (double xv : x) {
        for (double yv : y) {
            if (xv > yv) u += 1.0;
            else if (xv == yv) {
                u += 0.5;
                any_tie = true;
            }
        }
    }

    std::vector<double> combined;
    combined.reserve(x.size() + y.size());
    combined.insert(combined.end(), x.begin(), x.end());
    combined.insert(combined.end(), y.begin(), y.end());
    const double ties = tie_term(std::move(combined));
    any_tie = any_tie || ties > 0.0;

    UTestResult r;
    r.u_statistic = u;
    if (n + m <= kExactModeMaxCombined && !any_tie) {
        r.method = UMethod::exact;
        r.p_value = exact_two_sided_p(u, n, m);
    } else {
        r.method = UMethod::normal_approx;
        r.p_value = approx_two_sided_p(u, n, m, ties);
    }
    return r;
}

double hmp(const std::vector<double>& p_values) {
    if (p_values.empty()) throw_numeric("HMP of empty p-value list");
    double denom = 0.0;
    for (double p : p_values) {
        if (!(p > 0.0) || p > 1.0) throw_numeric("p-values must lie in (0, 1]");
        denom += 1.0 / p;
    }
    return double(p_values.size()) / denom;
}

PopulationComparison compare_populations(const std::vector<VectorF>& a,
                                         const std::vector<VectorF>& b,
                                         const CompareOptions& options) {
    if (a.empty() || b.empty()) throw_numeric("population comparison needs non-empty sets");
    const Eigen::Index dim = a[0].size();
    for (const auto& v : a)
        if (v.size() != dim) throw_numeric("dimension mismatch in population A");
    for (const auto& v : b)
        if (v.size() != dim) throw_numeric("dimension mismatch in population B");

    const size_t k = std::min(options.subsample_cap, std::min(a.size(), b.size()));
    Rng rng(Rng::mix(options.seed, fnv1a64(options.label_a + "|" + options.label_b)));
    auto pick = [&](size_t pool) {
        std::vector<size_t> idx(pool);
        std::iota(idx.begin(), idx.end(), size_t{0});
        rng.shuffle(idx);
        idx.resize(k);
        return idx;
    };
    const std::vector<size_t> ia = pick(a.size());
    const std::vector<size_t> ib = pick(b.size());

    PopulationComparison cmp;
    cmp.label_a = options.label_a;
    cmp.label_b = options.label_b;
    cmp.per_dim.reserve(size_t(dim));
    std::vector<double> ps;
    ps.reserve(size_t(dim));
    std::vector<double> x(k), y(k);
    for (Eigen::Index d = 0; d < dim; ++d) {
        for (size_t i = 0; i < k; ++i) x[i] = double(a[ia[i]][d]);
        for (size_t i = 0; i < k; ++i) y[i] = double(b[ib[i]][d]);
        UTestResult r = mann_whitney_u(x, y);
        r.dimension_index = int(d);
        ps.push_back(r.p_value);
        cmp.per_dim.push_back(r);
    }
    cmp.hmp = hmp(ps);
    cmp.neg_log10_hmp = -std::log10(cmp.hmp);
    return cmp;
}

void write_comparison_csv(const std::string& path, const PopulationComparison& cmp) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_data("cannot write " + path);
    csv::write_record(out, {"dimension", "u", "p", "neg_log10_p"});
    char buf[64];
    auto fmt = [&](double v) {
        snprintf(buf, sizeof(buf), "%.9g", v);
        return std::string(buf);
    };
    for (const auto& r : cmp.per_dim) {
        csv::write_record(out, {std::to_string(r.dimension_index), fmt(r.u_statistic),
                                fmt(r.p_value), fmt(-std::log10(r.p_value))});
    }
    csv::write_record(out, {"hmp", "", fmt(cmp.hmp), fmt(cmp.neg_log10_hmp)});
    if (!out) throw_data("failed writing " + path);
}

}  // namespace rvk
