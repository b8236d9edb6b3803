#pragma once

// Oversampled minibatch training with Adam, file-level validation AUC,
// best-checkpoint tracking, and early stopping.

#include "rvk/blstm.hpp"
#include "rvk/segments.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rvk {

struct TrainConfig {
    uint64_t seed = 1;
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    int batch_size = 64;  // segments
    int max_epochs = 50;
    int patience = 10;  // epochs without val-AUC improvement
    int hidden = 128;
    int ff_dim = 64;
};

struct LabeledFile {
    std::string id;
    MatrixF features;
    int label = 0;
};

struct EpochLog {
    int epoch = 0;
    double train_loss = 0.0;
    double val_auc = 0.0;
};

struct TrainResult {
    BlstmNetF model;  // best-validation parameters
    std::vector<EpochLog> log;
    int best_epoch = 0;
    double best_val_auc = 0.0;
    bool diverged = false;
};

// The input dimension comes from the segments; hidden/ff sizes from the
// config. Training is single-threaded and fully determined by cfg.seed.
// Validation must contain both classes (file-level AUC is the stopping
// metric). A non-finite epoch aborts training, keeping the best finite
// checkpoint seen.
TrainResult train_blstm(const std::vector<Segment>& train_segments,
                        const std::vector<LabeledFile>& val_files, const TrainConfig& cfg);

}  // namespace rvk
