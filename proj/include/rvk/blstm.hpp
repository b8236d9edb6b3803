#pragma once

// Bidirectional LSTM segment classifier: two BLSTM layers, a tanh dense
// layer, and a sigmoid output neuron. Batched forward/backward over
// Eigen GEMMs; templated on the scalar so gradient checks can run in
// double while production trains in float.
//
// Weight layout per LSTM cell, gate order (i, f, g, o):
//   Wx: in x 4H,  Wh: H x 4H,  b: 1 x 4H
// A time step over a batch of B rows:
//   G = x_t Wx + h_{t-1} Wh + b;  i,f,o = sigmoid, g = tanh
//   c_t = f (.) c_{t-1} + i (.) g;  h_t = o (.) tanh(c_t)
// The classifier head consumes [forward h at t=T-1 | backward h at t=0]
// of layer 2.

#include "rvk/common.hpp"
#include "rvk/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace rvk {

template <typename S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

template <typename S>
struct LstmCell {
    MatX<S> Wx, Wh, b;
};

template <typename S>
struct BlstmNet {
    int in_dim = 0;
    int hidden = 0;
    int ff_dim = 0;
    LstmCell<S> l1f, l1b;  // layer 1, input in_dim
    LstmCell<S> l2f, l2b;  // layer 2, input 2*hidden
    MatX<S> Wff, bff;      // 2*hidden x ff_dim, 1 x ff_dim
    MatX<S> Wo, bo;        // ff_dim x 1, 1 x 1

    // Uniform +-1/sqrt(fan-in) weights, zero biases except forget-gate
    // bias +1. Draw order is pinned (tensor order, then row-major) so a
    // seed fully determines the model.
    static BlstmNet init(int in_dim, int hidden, int ff_dim, Rng& rng) {
        BlstmNet net = zeros(in_dim, hidden, ff_dim);
        auto fill = [&rng](MatX<S>& w, int fan_in) {
            const double k = 1.0 / std::sqrt(double(fan_in));
            for (Eigen::Index r = 0; r < w.rows(); ++r)
                for (Eigen::Index c = 0; c < w.cols(); ++c)
                    w(r, c) = S(rng.uniform(-k, k));
        };
        auto init_cell = [&](LstmCell<S>& cell, int in) {
            fill(cell.Wx, in);
            fill(cell.Wh, hidden);
            cell.b.middleCols(hidden, hidden).setConstant(S(1));  // forget gate
        };
        init_cell(net.l1f, in_dim);
        init_cell(net.l1b, in_dim);
        init_cell(net.l2f, 2 * hidden);
        init_cell(net.l2b, 2 * hidden);
        fill(net.Wff, 2 * hidden);
        fill(net.Wo, ff_dim);
        return net;
    }

    static BlstmNet zeros(int in_dim, int hidden, int ff_dim) {
        if (in_dim <= 0 || hidden <= 0 || ff_dim <= 0)
            throw_config("model dimensions must be positive");
        BlstmNet net;
        net.in_dim = in_dim;
        net.hidden = hidden;
        net.ff_dim = ff_dim;
        auto zero_cell = [&](LstmCell<S>& cell, int in) {
            cell.Wx = MatX<S>::Zero(in, 4 * hidden);
            cell.Wh = MatX<S>::Zero(hidden, 4 * hidden);
            cell.b = MatX<S>::Zero(1, 4 * hidden);
        };
        zero_cell(net.l1f, in_dim);
        zero_cell(net.l1b, in_dim);
        zero_cell(net.l2f, 2 * hidden);
        zero_cell(net.l2b, 2 * hidden);
        net.Wff = MatX<S>::Zero(2 * hidden, ff_dim);
        net.bff = MatX<S>::Zero(1, ff_dim);
        net.Wo = MatX<S>::Zero(ff_dim, 1);
        net.bo = MatX<S>::Zero(1, 1);
        return net;
    }

    // Declared parameter order; checkpoints and the optimizer both walk it.
    std::vector<MatX<S>*> tensors() {
        return {&l1f.Wx, &l1f.Wh, &l1f.b, &l1b.Wx, &l1b.Wh, &l1b.b,
                &l2f.Wx, &l2f.Wh, &l2f.b, &l2b.Wx, &l2b.Wh, &l2b.b,
                &Wff,    &bff,    &Wo,    &bo};
    }
    std::vector<const MatX<S>*> tensors() const {
        return {&l1f.Wx, &l1f.Wh, &l1f.b, &l1b.Wx, &l1b.Wh, &l1b.b,
                &l2f.Wx, &l2f.Wh, &l2f.b, &l2b.Wx, &l2b.Wh, &l2b.b,
                &Wff,    &bff,    &Wo,    &bo};
    }

    bool all_finite() const {
        for (const auto* t : tensors())
            if (!t->allFinite()) return false;
        return true;
    }

    template <typename T>
    BlstmNet<T> cast() const {
        BlstmNet<T> out = BlstmNet<T>::zeros(in_dim, hidden, ff_dim);
        auto src = tensors();
        auto dst = out.tensors();
        for (size_t i = 0; i < src.size(); ++i) *dst[i] = src[i]->template cast<T>();
        return out;
    }
};

using BlstmNetF = BlstmNet<float>;
using BlstmNetD = BlstmNet<double>;

// Per-direction activation cache for BPTT, indexed by original time.
template <typename S>
struct DirTrace {
    std::vector<MatX<S>> gates;  // post-activation (i,f,g,o), B x 4H
    std::vector<MatX<S>> c;      // cell state, B x H
    std::vector<MatX<S>> tc;     // tanh(c), B x H
};

namespace detail {

template <typename S>
MatX<S> sigmoid(const MatX<S>& a) {
    return (S(1) / (S(1) + (-a.array()).exp())).matrix();
}

}  // namespace detail

// One LSTM direction over xs (length T, each B x in). reverse=true runs
// t = T-1 .. 0. Returns h per original time index; fills `tr` if given.
template <typename S>
std::vector<MatX<S>> lstm_forward(const LstmCell<S>& cell, const std::vector<MatX<S>>& xs,
                                  bool reverse, DirTrace<S>* tr = nullptr) {
    const int T = int(xs.size());
    if (T == 0) throw_numeric("LSTM forward over empty sequence");
    const Eigen::Index B = xs[0].rows();
    const Eigen::Index H = cell.Wh.rows();

    std::vector<MatX<S>> hs;
    hs.resize(size_t(T));
    if (tr) {
        tr->gates.assign(size_t(T), {});
        tr->c.assign(size_t(T), {});
        tr->tc.assign(size_t(T), {});
    }
    MatX<S> h = MatX<S>::Zero(B, H);
    MatX<S> c = MatX<S>::Zero(B, H);
    for (int j = 0; j < T; ++j) {
        const int t = reverse ? (T - 1 - j) : j;
        MatX<S> G = xs[size_t(t)] * cell.Wx + h * cell.Wh;
        G.rowwise() += cell.b.row(0);
        G.middleCols(0, H) = detail::sigmoid<S>(G.middleCols(0, H));
        G.middleCols(H, H) = detail::sigmoid<S>(G.middleCols(H, H));
        G.middleCols(2 * H, H) = G.middleCols(2 * H, H).array().tanh().matrix();
        G.middleCols(3 * H, H) = detail::sigmoid<S>(G.middleCols(3 * H, H));
        c = G.middleCols(H, H).cwiseProduct(c) + G.middleCols(0, H).cwiseProduct(G.middleCols(2 * H, H));
        MatX<S> tc = c.array().tanh().matrix();
        h = G.middleCols(3 * H, H).cwiseProduct(tc);
        hs[size_t(t)] = h;
        if (tr) {
            tr->gates[size_t(t)] = std::move(G);
            tr->c[size_t(t)] = c;
            tr->tc[size_t(t)] = std::move(tc);
        }
    }
    return hs;
}

// BPTT for one direction. dh_ext[t] is the loss gradient injected into
// h_t by downstream consumers. Accumulates into `grad`; when dxs is
// given, writes dLoss/dx_t (assigned, not accumulated).
template <typename S>
void lstm_backward(const LstmCell<S>& cell, const std::vector<MatX<S>>& xs,
                   const std::vector<MatX<S>>& hs, const DirTrace<S>& tr,
                   const std::vector<MatX<S>>& dh_ext, bool reverse, LstmCell<S>& grad,
                   std::vector<MatX<S>>* dxs = nullptr) {
    const int T = int(xs.size());
    const Eigen::Index B = xs[0].rows();
    const Eigen::Index H = cell.Wh.rows();
    if (dxs) dxs->assign(size_t(T), {});

    MatX<S> dc = MatX<S>::Zero(B, H);
    MatX<S> dh_rec = MatX<S>::Zero(B, H);
    MatX<S> dG(B, 4 * H);
    for (int j = T - 1; j >= 0; --j) {
        const int t = reverse ? (T - 1 - j) : j;
        const int tp = reverse ? t + 1 : t - 1;  // previous step in processing order
        const bool has_prev = j > 0;

        const MatX<S>& G = tr.gates[size_t(t)];
        const auto i = G.middleCols(0, H);
        const auto f = G.middleCols(H, H);
        const auto g = G.middleCols(2 * H, H);
        const auto o = G.middleCols(3 * H, H);
        const MatX<S>& tc = tr.tc[size_t(t)];

        MatX<S> dh = dh_ext[size_t(t)] + dh_rec;
        MatX<S> do_ = dh.cwiseProduct(tc);
        dc.array() += dh.array() * o.array() * (S(1) - tc.array().square());

        dG.middleCols(0, H) =
            (dc.array() * g.array() * i.array() * (S(1) - i.array())).matrix();
        if (has_prev)
            dG.middleCols(H, H) = (dc.array() * tr.c[size_t(tp)].array() * f.array() *
                                   (S(1) - f.array()))
                                      .matrix();
        else
            dG.middleCols(H, H).setZero();  // c_{prev} = 0
        dG.middleCols(2 * H, H) =
            (dc.array() * i.array() * (S(1) - g.array().square())).matrix();
        dG.middleCols(3 * H, H) =
            (do_.array() * o.array() * (S(1) - o.array())).matrix();

        grad.Wx.noalias() += xs[size_t(t)].transpose() * dG;
        if (has_prev) grad.Wh.noalias() += hs[size_t(tp)].transpose() * dG;
        grad.b.row(0) += dG.colwise().sum();
        if (dxs) (*dxs)[size_t(t)] = dG * cell.Wx.transpose();
        dh_rec.noalias() = dG * cell.Wh.transpose();
        dc = dc.cwiseProduct(f);
    }
}

// Full-network activation cache for one batch.
template <typename S>
struct NetTrace {
    DirTrace<S> l1f, l1b, l2f, l2b;
    std::vector<MatX<S>> h1f, h1b, h2f, h2b;
    std::vector<MatX<S>> z1;  // [h1f | h1b] per t, layer-2 input
    MatX<S> r;                // readout, B x 2H
    MatX<S> u;                // tanh dense output, B x ff
    MatX<S> p;                // sigmoid output, B x 1
};

// Probabilities for a batch of segments given as xs (T entries, B x in).
// Pass `tr` to keep activations for backward_batch.
template <typename S>
MatX<S> forward_batch(const BlstmNet<S>& net, const std::vector<MatX<S>>& xs,
                      NetTrace<S>* tr = nullptr) {
    const int T = int(xs.size());
    if (T == 0) throw_numeric("forward over empty sequence");
    if (xs[0].cols() != net.in_dim)
        throw_numeric("input dimension mismatch: net expects " + std::to_string(net.in_dim) +
                      ", got " + std::to_string(xs[0].cols()));
    const Eigen::Index B = xs[0].rows();
    const Eigen::Index H = net.hidden;

    NetTrace<S> local;
    NetTrace<S>& w = tr ? *tr : local;

    w.h1f = lstm_forward(net.l1f, xs, false, tr ? &w.l1f : nullptr);
    w.h1b = lstm_forward(net.l1b, xs, true, tr ? &w.l1b : nullptr);
    w.z1.assign(size_t(T), {});
    for (int t = 0; t < T; ++t) {
        w.z1[size_t(t)].resize(B, 2 * H);
        w.z1[size_t(t)].leftCols(H) = w.h1f[size_t(t)];
        w.z1[size_t(t)].rightCols(H) = w.h1b[size_t(t)];
    }
    w.h2f = lstm_forward(net.l2f, w.z1, false, tr ? &w.l2f : nullptr);
    w.h2b = lstm_forward(net.l2b, w.z1, true, tr ? &w.l2b : nullptr);

    w.r.resize(B, 2 * H);
    w.r.leftCols(H) = w.h2f[size_t(T - 1)];  // forward final state
    w.r.rightCols(H) = w.h2b[0];             // backward final state
    MatX<S> a = w.r * net.Wff;
    a.rowwise() += net.bff.row(0);
    w.u = a.array().tanh().matrix();
    MatX<S> s = w.u * net.Wo;
    s.array() += net.bo(0, 0);
    w.p = detail::sigmoid<S>(s);
    return w.p;
}

// Backward through the whole net. ds is dLoss/dlogit (B x 1); gradients
// accumulate into `grads` (same shapes as the net, zero on entry).
template <typename S>
void backward_batch(const BlstmNet<S>& net, const std::vector<MatX<S>>& xs,
                    const NetTrace<S>& tr, const MatX<S>& ds, BlstmNet<S>& grads) {
    const int T = int(xs.size());
    const Eigen::Index B = xs[0].rows();
    const Eigen::Index H = net.hidden;

    grads.Wo.noalias() += tr.u.transpose() * ds;
    grads.bo(0, 0) += ds.sum();
    MatX<S> du = ds * net.Wo.transpose();
    MatX<S> da = (du.array() * (S(1) - tr.u.array().square())).matrix();
    grads.Wff.noalias() += tr.r.transpose() * da;
    grads.bff.row(0) += da.colwise().sum();
    MatX<S> dr = da * net.Wff.transpose();

    const MatX<S> zero_h = MatX<S>::Zero(B, H);
    std::vector<MatX<S>> dh2f(size_t(T), zero_h), dh2b(size_t(T), zero_h);
    dh2f[size_t(T - 1)] = dr.leftCols(H);
    dh2b[0] = dr.rightCols(H);

    std::vector<MatX<S>> dz1f, dz1b;
    lstm_backward(net.l2f, tr.z1, tr.h2f, tr.l2f, dh2f, false, grads.l2f, &dz1f);
    lstm_backward(net.l2b, tr.z1, tr.h2b, tr.l2b, dh2b, true, grads.l2b, &dz1b);

    std::vector<MatX<S>> dh1f, dh1b;
    dh1f.resize(size_t(T));
    dh1b.resize(size_t(T));
    for (int t = 0; t < T; ++t) {
        MatX<S> dz = dz1f[size_t(t)] + dz1b[size_t(t)];
        dh1f[size_t(t)] = dz.leftCols(H);
        dh1b[size_t(t)] = dz.rightCols(H);
    }
    lstm_backward(net.l1f, xs, tr.h1f, tr.l1f, dh1f, false, grads.l1f);
    lstm_backward(net.l1b, xs, tr.h1b, tr.l1b, dh1b, true, grads.l1b);
}

// Mean binary cross entropy. Probabilities are clamped to
// [1e-7, 1 - 1e-7] inside the logs; the logit gradient (p - y)/B is the
// exact unclamped composite. y entries are 0/1.
template <typename S>
S bce_loss(const MatX<S>& p, const std::vector<int>& y, MatX<S>* dlogit) {
    if (size_t(p.rows()) != y.size() || p.cols() != 1)
        throw_numeric("BCE shape mismatch");
    const S lo = S(1e-7), hi = S(1) - S(1e-7);
    S loss = S(0);
    if (dlogit) dlogit->resize(p.rows(), 1);
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        const S pc = std::min(hi, std::max(lo, p(i, 0)));
        loss -= y[size_t(i)] ? std::log(pc) : std::log(S(1) - pc);
        if (dlogit) (*dlogit)(i, 0) = (p(i, 0) - S(y[size_t(i)])) / S(p.rows());
    }
    return loss / S(p.rows());
}

// Checkpoint: magic RVKM, u32 version=1, u32 in/hidden/ff dims, then the
// declared tensors row-major as little-endian f32.
void save_checkpoint(const std::string& path, const BlstmNetF& net);
BlstmNetF load_checkpoint(const std::string& path);

}  // namespace rvk
