#include "rvk/train.hpp"

#include "rvk/metrics.hpp"
#include "rvk/scoring.hpp"

#include <cmath>

namespace rvk {

namespace {

struct AdamState {
    std::vector<MatX<float>> m, v;
    int64_t step = 0;
};

AdamState make_adam_state(BlstmNetF& net) {
    AdamState st;
    for (auto* t : net.tensors()) {
        st.m.push_back(MatX<float>::Zero(t->rows(), t->cols()));
        st.v.push_back(MatX<float>::Zero(t->rows(), t->cols()));
    }
    return st;
}

void adam_step(BlstmNetF& net, BlstmNetF& grads, AdamState& st, const TrainConfig& cfg) {
    ++st.step;
    const float b1 = float(cfg.beta1);
    const float b2 = float(cfg.beta2);
    const float bias1 = 1.0f - std::pow(b1, float(st.step));
    const float bias2 = 1.0f - std::pow(b2, float(st.step));
    const float lr = float(cfg.learning_rate);
    const float eps = float(cfg.eps);
    auto ts = net.tensors();
    auto gs = grads.tensors();
    for (size_t i = 0; i < ts.size(); ++i) {
        auto& m = st.m[i];
        auto& v = st.v[i];
        const auto& g = *gs[i];
        m = b1 * m + (1.0f - b1) * g;
        v = (b2 * v.array() + (1.0f - b2) * g.array().square()).matrix();
        ts[i]->array() -= lr * (m.array() / bias1) / ((v.array() / bias2).sqrt() + eps);
    }
}

double validation_auc(const BlstmNetF& net, const std::vector<LabeledFile>& val_files) {
    std::vector<double> scores;
    std::vector<int> labels;
    scores.reserve(val_files.size());
    labels.reserve(val_files.size());
    for (const auto& f : val_files) {
        scores.push_back(score_feature_matrix(net, f.features).probability);
        labels.push_back(f.label);
    }
    return roc_auc(scores, labels).auc;
}

}  // namespace

TrainResult train_blstm(const std::vector<Segment>& train_segments,
                        const std::vector<LabeledFile>& val_files, const TrainConfig& cfg) {
    if (cfg.learning_rate <= 0 || cfg.beta1 <= 0 || cfg.beta2 <= 0 || cfg.eps <= 0 ||
        cfg.batch_size <= 0 || cfg.max_epochs <= 0 || cfg.patience <= 0 || cfg.hidden <= 0 ||
        cfg.ff_dim <= 0)
        throw_config("training hyperparameters must be positive");
    if (train_segments.empty()) throw_data("no training segments");
    if (val_files.empty()) throw_data("no validation files");

    const int in_dim = int(train_segments[0].frames.rows());
    Rng rng(cfg.seed);
    BlstmNetF net = BlstmNetF::init(in_dim, cfg.hidden, cfg.ff_dim, rng);
    BlstmNetF grads = BlstmNetF::zeros(in_dim, cfg.hidden, cfg.ff_dim);
    AdamState adam = make_adam_state(net);

    TrainResult result{net, {}, 0, -1.0, false};
    int stale_epochs = 0;
    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const BlstmNetF epoch_start = net;
        const std::vector<size_t> order =
            oversample(train_segments, Rng::mix(cfg.seed, uint64_t(epoch)));

        double loss_sum = 0.0;
        size_t n_samples = 0;
        std::vector<const Segment*> batch;
        std::vector<int> labels;
        for (size_t begin = 0; begin < order.size(); begin += size_t(cfg.batch_size)) {
            const size_t end = std::min(order.size(), begin + size_t(cfg.batch_size));
            batch.clear();
            labels.clear();
            for (size_t k = begin; k < end; ++k) {
                batch.push_back(&train_segments[order[k]]);
                labels.push_back(train_segments[order[k]].label);
            }
            const std::vector<MatX<float>> xs = pack_segments(batch);
            NetTrace<float> trace;
            const MatX<float> p = forward_batch(net, xs, &trace);
            MatX<float> dlogit;
            const float loss = bce_loss(p, labels, &dlogit);
            for (auto* g : grads.tensors()) g->setZero();
            backward_batch(net, xs, trace, dlogit, grads);
            adam_step(net, grads, adam, cfg);
            loss_sum += double(loss) * double(end - begin);
            n_samples += end - begin;
        }
        const double train_loss = loss_sum / double(n_samples);

        if (!std::isfinite(train_loss) || !net.all_finite()) {
            // Keep the last finite state; the best checkpoint (if any)
            // still wins below.
            net = epoch_start;
            result.diverged = true;
            break;
        }

        const double auc = validation_auc(net, val_files);
        result.log.push_back({epoch, train_loss, auc});
        if (auc > result.best_val_auc) {
            result.best_val_auc = auc;
            result.best_epoch = epoch;
            result.model = net;
            stale_epochs = 0;
        } else if (++stale_epochs >= cfg.patience) {
            break;
        }
    }

    if (result.best_epoch == 0) {
        // No finite validation pass ever completed.
        result.model = net;
        result.best_val_auc = 0.0;
    }
    return result;
}

}  // namespace rvk
