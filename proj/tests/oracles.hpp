#pragma once

// Brute-force reference implementations the tests check the library
// against. Everything here favors obviousness over speed and shares no
// code with the implementations under test.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

namespace oracle {

// Quadratic-time DFT.
inline std::vector<std::complex<double>> dft(const std::vector<double>& x) {
    const size_t n = x.size();
    std::vector<std::complex<double>> out;
    out.resize(n);
    for (size_t k = 0; k < n; ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (size_t i = 0; i < n; ++i) {
            const double ang = -2.0 * M_PI * double(k) * double(i) / double(n);
            acc += x[i] * std::complex<double>{std::cos(ang), std::sin(ang)};
        }
        out[k] = acc;
    }
    return out;
}

// U statistic by literal pair counting.
inline double mwu_u(const std::vector<double>& x, const std::vector<double>& y) {
    double u = 0.0;
    for (double xv : x)
        for (double yv : y) {
            if (xv > yv) u += 1.0;
            else if (xv == yv) u += 0.5;
        }
    return u;
}

// Exact two-sided p-value by enumerating every way to assign the combined
// (tie-free) values to the two groups: doubled smaller tail of the U
// distribution. Usable up to n+m around 20.
inline double mwu_exact_p(const std::vector<double>& x, const std::vector<double>& y) {
    const int n = int(x.size());
    const int m = int(y.size());
    std::vector<double> all(x);
    all.insert(all.end(), y.begin(), y.end());
    const int total = n + m;

    const double u_obs = mwu_u(x, y);
    const double tail_cut = std::min(u_obs, double(n) * m - u_obs);

    int64_t count_tail = 0, count_all = 0;
    for (uint32_t mask = 0; mask < (uint32_t(1) << total); ++mask) {
        if (__builtin_popcount(mask) != n) continue;
        ++count_all;
        std::vector<double> gx, gy;
        for (int i = 0; i < total; ++i)
            ((mask >> i) & 1u ? gx : gy).push_back(all[size_t(i)]);
        const double u = mwu_u(gx, gy);
        if (u <= tail_cut) ++count_tail;
    }
    return std::min(1.0, 2.0 * double(count_tail) / double(count_all));
}

// AUC as the concordant-pair fraction over all pos x neg pairs.
inline double auc_pairs(const std::vector<double>& scores, const std::vector<int>& labels) {
    double num = 0.0;
    int64_t pairs = 0;
    for (size_t i = 0; i < scores.size(); ++i) {
        if (!labels[i]) continue;
        for (size_t j = 0; j < scores.size(); ++j) {
            if (labels[j]) continue;
            ++pairs;
            if (scores[i] > scores[j]) num += 1.0;
            else if (scores[i] == scores[j]) num += 0.5;
        }
    }
    return num / double(pairs);
}

// Max TPR over every threshold with FPR <= 1 - specificity, trying each
// distinct score and +inf as candidate thresholds (predict positive at
// score >= threshold).
inline double sens_at_spec_sweep(const std::vector<double>& scores,
                                 const std::vector<int>& labels, double specificity) {
    std::vector<double> cands(scores);
    cands.push_back(std::numeric_limits<double>::infinity());
    int64_t n_pos = 0, n_neg = 0;
    for (int l : labels) (l ? n_pos : n_neg)++;
    double best = 0.0;
    for (double th : cands) {
        int64_t tp = 0, fp = 0;
        for (size_t i = 0; i < scores.size(); ++i) {
            if (scores[i] >= th) (labels[i] ? tp : fp)++;
        }
        const double fpr = double(fp) / double(n_neg);
        const double tpr = double(tp) / double(n_pos);
        if (fpr <= 1.0 - specificity) best = std::max(best, tpr);
    }
    return best;
}

// Scalar LSTM recurrence, one sequence, no batching. Weights follow the
// library layout (Wx: in x 4H, Wh: H x 4H, b: 4H, gate order i,f,g,o)
// but are consumed as plain nested vectors.
struct ScalarLstm {
    std::vector<std::vector<double>> Wx, Wh;  // [row][col]
    std::vector<double> b;
    int hidden = 0;

    // xs: one vector per time step. Returns h per step (original order if
    // reverse, the recurrence just runs t = T-1..0).
    std::vector<std::vector<double>> run(const std::vector<std::vector<double>>& xs,
                                         bool reverse) const {
        const int T = int(xs.size());
        const int H = hidden;
        std::vector<std::vector<double>> hs;
        hs.assign(size_t(T), std::vector<double>(size_t(H), 0.0));
        std::vector<double> h(size_t(H), 0.0), c(size_t(H), 0.0);
        for (int j = 0; j < T; ++j) {
            const int t = reverse ? (T - 1 - j) : j;
            std::vector<double> gates(b);
            for (size_t r = 0; r < xs[size_t(t)].size(); ++r)
                for (size_t col = 0; col < gates.size(); ++col)
                    gates[col] += xs[size_t(t)][r] * Wx[r][col];
            for (size_t r = 0; r < size_t(H); ++r)
                for (size_t col = 0; col < gates.size(); ++col)
                    gates[col] += h[r] * Wh[r][col];
            auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
            for (int k = 0; k < H; ++k) {
                const double gi = sig(gates[size_t(k)]);
                const double gf = sig(gates[size_t(H + k)]);
                const double gg = std::tanh(gates[size_t(2 * H + k)]);
                const double go = sig(gates[size_t(3 * H + k)]);
                c[size_t(k)] = gf * c[size_t(k)] + gi * gg;
                h[size_t(k)] = go * std::tanh(c[size_t(k)]);
            }
            hs[size_t(t)] = h;
        }
        return hs;
    }
};

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / double(v.size());
}

}  // namespace oracle
