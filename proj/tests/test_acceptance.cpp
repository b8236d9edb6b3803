// Acceptance gate: nine checks covering the statistical kernels, the
// network gradients, feature determinism, and the full synthetic
// pipeline. Prints one PASS/FAIL line per criterion and exits nonzero
// if any fail. Tolerances are pinned next to each check.

#include "rvk/blstm.hpp"
#include "rvk/config.hpp"
#include "rvk/features.hpp"
#include "rvk/metrics.hpp"
#include "rvk/pipeline.hpp"
#include "rvk/segments.hpp"
#include "rvk/splits.hpp"
#include "rvk/stats.hpp"
#include "rvk/synth.hpp"
#include "rvk/train.hpp"

#include "oracles.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace rvk;
namespace fs = std::filesystem;
using njson = nlohmann::json;

namespace {

struct Gate {
    bool all_passed = true;

    void report(int n, const char* label, bool ok, const std::string& detail) {
        std::printf("criterion %d: %s  %s%s%s\n", n, ok ? "PASS" : "FAIL", label,
                    detail.empty() ? "" : "  ", detail.c_str());
        std::fflush(stdout);
        all_passed = all_passed && ok;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

bool has_ties(std::vector<double> both) {
    std::sort(both.begin(), both.end());
    return std::adjacent_find(both.begin(), both.end()) != both.end();
}

njson jload(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw_data("missing " + path.string());
    return njson::parse(in);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_data("missing " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---- criterion 1: Mann-Whitney against the enumeration oracle ----------

bool criterion_mwu(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 eng(1234);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    int cases = 0;
    double worst_p_diff = 0.0;
    while (cases < 1000) {
        const int n = 1 + int(eng() % 7), m = 1 + int(eng() % 7);
        std::vector<double> x(n), y(m), both;
        for (double& v : x) v = unif(eng);
        for (double& v : y) v = unif(eng);
        both = x;
        both.insert(both.end(), y.begin(), y.end());
        if (has_ties(both)) continue;

        const UTestResult r = mann_whitney_u(x, y);
        if (r.method != UMethod::exact) return false;
        if (r.u_statistic != oracle::mwu_u(x, y)) return false;
        const double diff = std::abs(r.p_value - oracle::mwu_exact_p(x, y));
        worst_p_diff = std::max(worst_p_diff, diff);
        if (diff > 1e-12) return false;
        ++cases;
    }

    // exact vs the tie-free normal approximation at n = m = 8
    double worst_approx = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> x(8), y(8), both;
        for (double& v : x) v = unif(eng);
        for (double& v : y) v = unif(eng);
        both = x;
        both.insert(both.end(), y.begin(), y.end());
        if (has_ties(both)) {
            --rep;
            continue;
        }
        const UTestResult r = mann_whitney_u(x, y);  // exact at n + m = 16
        const double mu = 32.0, var = 64.0 * 17.0 / 12.0;
        const double z = std::max(0.0, std::abs(r.u_statistic - mu) - 0.5) / std::sqrt(var);
        const double approx = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
        worst_approx = std::max(worst_approx, std::abs(r.p_value - approx));
    }

    const double elapsed = seconds_since(t0);
    detail = "1000 cases, worst exact-p gap " + fmt("%.1e", worst_p_diff) +
             ", worst approx gap " + fmt("%.3f", worst_approx) + ", " + fmt("%.1f", elapsed) + "s";
    return worst_approx <= 0.03 && elapsed < 60.0;
}

// ---- criterion 2: harmonic mean p-value ---------------------------------

bool criterion_hmp(std::string& detail) {
    const double pinned = hmp({0.01, 0.04});
    if (std::abs(pinned - 0.016) > 1e-12) {
        detail = "hmp({0.01,0.04}) = " + fmt("%.12f", pinned);
        return false;
    }
    std::mt19937_64 eng(99);
    std::uniform_real_distribution<double> unif(1e-6, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double p0 = unif(eng);
        const std::vector<double> ps(size_t(1 + i % 10), p0);
        worst = std::max(worst, std::abs(hmp(ps) - p0));
    }
    detail = "worst equal-p deviation " + fmt("%.1e", worst);
    return worst <= 1e-12;
}

// ---- criterion 3: AUC trapezoid vs pair counting -------------------------

bool criterion_auc(std::string& detail) {
    const RocReport pinned = roc_auc({0.8, 0.4, 0.6, 0.2}, {1, 1, 0, 0});
    if (pinned.auc != 0.75) {
        detail = "pinned case gave " + fmt("%.6f", pinned.auc);
        return false;
    }
    std::mt19937_64 eng(4321);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double worst = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        const int n = 2 + int(eng() % 19), m = 2 + int(eng() % 19);
        std::vector<double> scores;
        std::vector<int> labels;
        for (int i = 0; i < n + m; ++i) {
            double s = unif(eng);
            if (rep % 2) s = std::round(s * 4.0) / 4.0;  // force tied scores
            scores.push_back(s);
            labels.push_back(i < n ? 1 : 0);
        }
        worst = std::max(worst,
                         std::abs(roc_auc(scores, labels).auc - oracle::auc_pairs(scores, labels)));
        if (worst > 1e-12) break;
    }
    detail = "1000 sets, worst gap " + fmt("%.1e", worst);
    return worst <= 1e-12;
}

// ---- criterion 4: gradient check on a reduced double-precision net ------

bool criterion_gradcheck(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(77);
    BlstmNet<double> net = BlstmNet<double>::init(4, 2, 2, rng);  // 2 cells per layer

    std::vector<MatX<double>> xs(3);  // 3 frames, batch of 2
    for (auto& x : xs) {
        x.resize(2, 4);
        for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = 0.5 * rng.gaussian();
    }
    const std::vector<int> y{1, 0};

    NetTrace<double> tr;
    const MatX<double> p = forward_batch(net, xs, &tr);
    MatX<double> ds;
    bce_loss(p, y, &ds);
    BlstmNet<double> grads = net;
    for (auto* t : grads.tensors()) t->setZero();
    backward_batch(net, xs, tr, ds, grads);

    const auto loss_at = [&](const BlstmNet<double>& w) {
        return bce_loss<double>(forward_batch(w, xs), y, nullptr);
    };

    const double h = 1e-5;
    BlstmNet<double> work = net;
    auto wt = work.tensors();
    auto gt = grads.tensors();
    double worst = 0.0;
    for (size_t k = 0; k < wt.size(); ++k)
        for (Eigen::Index idx = 0; idx < wt[k]->size(); ++idx) {
            double& w = wt[k]->data()[idx];
            const double orig = w;
            w = orig + h;
            const double lp = loss_at(work);
            w = orig - h;
            const double lm = loss_at(work);
            w = orig;
            const double numeric = (lp - lm) / (2.0 * h);
            const double exact = gt[k]->data()[idx];
            // denominator floored: differences on near-zero gradients are
            // finite-difference noise, not signal
            const double rel =
                std::abs(exact - numeric) / std::max(1e-6, std::abs(exact) + std::abs(numeric));
            worst = std::max(worst, rel);
        }

    const double elapsed = seconds_since(t0);
    detail = "worst relative error " + fmt("%.2e", worst) + ", " + fmt("%.1f", elapsed) + "s";
    return worst < 1e-4 && elapsed < 60.0;
}

// ---- criterion 5: segmentation arithmetic --------------------------------

bool criterion_segmentation(std::string& detail) {
    MatrixF fm(192, 101);
    for (Eigen::Index i = 0; i < fm.size(); ++i) fm.data()[i] = float(i % 37) * 0.1f;

    const auto six = segment_file(fm, 1, "a");
    const auto one = segment_file(MatrixF(fm.leftCols(51)), 0, "b");
    const auto padded = segment_file(MatrixF(fm.leftCols(30)), 1, "c");
    if (six.size() != 6 || one.size() != 1 || padded.size() != 1) {
        detail = "counts " + std::to_string(six.size()) + "/" + std::to_string(one.size()) + "/" +
                 std::to_string(padded.size());
        return false;
    }
    for (Eigen::Index j = 0; j < 51; ++j)
        if (padded[0].frames.col(j) != fm.col(j % 30)) {
            detail = "cyclic padding broken at column " + std::to_string(j);
            return false;
        }
    detail = "101 -> 6, 51 -> 1, 30 -> 1 padded";
    return true;
}

// ---- criterion 6: feature shape, determinism, cache round-trip -----------

bool criterion_features(std::string& detail) {
    AudioClip clip;
    clip.sample_rate = 44100;
    clip.samples.resize(44100);
    Rng rng(5);
    for (size_t i = 0; i < clip.samples.size(); ++i) {
        const double t = double(i) / 44100.0;
        clip.samples[i] = float(0.6 * std::sin(2.0 * M_PI * 220.0 * t) + 0.05 * rng.gaussian());
    }

    const MatrixF a = extract_features(clip);
    const MatrixF b = extract_features(clip);
    if (a.rows() != 192) {
        detail = "rows = " + std::to_string(a.rows());
        return false;
    }
    const size_t bytes = size_t(a.size()) * sizeof(float);
    if (a.cols() != b.cols() || std::memcmp(a.data(), b.data(), bytes) != 0) {
        detail = "repeated extraction not bit-identical";
        return false;
    }

    const fs::path tmp = fs::temp_directory_path() / "rvk_acceptance_cache.rvkf";
    write_feature_cache(tmp.string(), a);
    const MatrixF c = read_feature_cache(tmp.string());
    fs::remove(tmp);
    if (c.rows() != a.rows() || c.cols() != a.cols() ||
        std::memcmp(a.data(), c.data(), bytes) != 0) {
        detail = "cache round-trip not bit-exact";
        return false;
    }
    detail = "192 rows, " + std::to_string(a.cols()) + " frames, bit-stable";
    return true;
}

// ---- criterion 7: synthetic end-to-end -----------------------------------

void run_all_stages(const RunConfig& cfg) {
    cmd_ingest(cfg);
    cmd_extract(cfg);
    cmd_split(cfg);
    cmd_stats(cfg);
    cmd_train(cfg);
    cmd_evaluate(cfg);
}

std::vector<SubjectRecord> labeled_cohort(const RunConfig& cfg) {
    ManifestLoadResult loaded = load_manifest(cfg.manifest);
    std::vector<SubjectRecord> kept = filter_subjects(loaded.records, cfg.filter);
    apply_variant_labels(kept, cfg.variant_cutoff);
    std::erase_if(kept, [](const SubjectRecord& r) { return !r.category.has_value(); });
    std::sort(kept.begin(), kept.end(), [](const SubjectRecord& a, const SubjectRecord& b) {
        return a.subject_id < b.subject_id;
    });
    return kept;
}

bool criterion_end_to_end(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path root = fs::temp_directory_path() / "rvk_acceptance_e2e";
    fs::remove_all(root);
    fs::create_directories(root);

    SynthConfig sc;
    sc.out_dir = (root / "corpus").string();
    sc.per_class = 200;
    sc.seed = 1;
    generate_corpus(sc);

    RunConfig cfg;
    cfg.manifest = (root / "corpus" / "manifest.csv").string();
    cfg.cache_dir = (root / "cache").string();
    cfg.output_dir = (root / "runs").string();
    cfg.task = Task::hierarchical;
    cfg.modalities.assign(all_sound_categories().begin(), all_sound_categories().end());
    cfg.seeds = {1};
    cfg.train.learning_rate = 3e-3;
    cfg.train.batch_size = 32;
    cfg.train.max_epochs = 5;
    cfg.train.patience = 5;
    cfg.train.hidden = 16;
    cfg.train.ff_dim = 8;
    run_all_stages(cfg);

    const RunPaths paths = RunPaths::make(cfg);

    // (a) population statistics reproduce the expected pattern
    const njson stats = jload(paths.stats_dir / "summary.json");
    double worst_null = 0.0, weakest_signal = 1e9;
    for (SoundCategory mod : cfg.modalities) {
        const std::string& name = sound_category_name(mod);
        worst_null = std::max(worst_null, stats.at("h_vs_h2").at(name).at("neg_log10_hmp").get<double>());
        for (const char* pair : {"del_vs_h", "omi_vs_h", "omi_vs_del", "pos_vs_h"})
            weakest_signal = std::min(
                weakest_signal, stats.at(pair).at(name).at("neg_log10_hmp").get<double>());
    }
    const bool stats_ok = worst_null < 3.0 && weakest_signal > 3.0;

    // (b) every per-modality test AUC at or above 0.90
    const njson eval = jload(paths.eval_dir / "report.json");
    double min_auc = 1.0;
    for (const char* stage : {"pos_vs_h", "omi_vs_del"})
        for (SoundCategory mod : cfg.modalities)
            min_auc = std::min(min_auc, eval.at("stages")
                                            .at(stage)
                                            .at("per_modality")
                                            .at(sound_category_name(mod))
                                            .at("auc")
                                            .get<double>());
    const bool auc_ok = min_auc >= 0.90;

    // (b) label-shuffled control lands at chance
    const std::vector<SubjectRecord> cohort = labeled_cohort(cfg);
    const auto splits = read_splits_json((paths.run_dir / "splits.json").string());
    const SplitAssignment& split = splits.front();
    const SoundCategory mod = SoundCategory::breathing_deep;

    const auto features_of = [&](const std::string& id) {
        return read_feature_cache(cache_path(paths.cache_dir, id, mod).string());
    };
    std::vector<std::string> train_ids, val_ids;
    std::vector<int> train_labels, val_labels;
    for (const SubjectRecord& r : cohort) {
        const int label = r.category == SubjectCategory::healthy ? 0 : 1;
        if (split.train.count(r.subject_id)) {
            train_ids.push_back(r.subject_id);
            train_labels.push_back(label);
        } else if (split.val.count(r.subject_id)) {
            val_ids.push_back(r.subject_id);
            val_labels.push_back(label);
        }
    }
    Rng shuffle_rng(777);
    shuffle_rng.shuffle(train_labels);  // break the label-feature pairing
    shuffle_rng.shuffle(val_labels);

    std::vector<Segment> train_segments;
    for (size_t i = 0; i < train_ids.size(); ++i)
        for (Segment& s : segment_file(features_of(train_ids[i]), train_labels[i], train_ids[i]))
            train_segments.push_back(std::move(s));
    std::vector<LabeledFile> val_files;
    for (size_t i = 0; i < val_ids.size(); ++i)
        val_files.push_back({val_ids[i], features_of(val_ids[i]), val_labels[i]});

    TrainConfig tc = cfg.train;
    tc.seed = 4242;
    const TrainResult control = train_blstm(train_segments, val_files, tc);

    // no learnable signal: the validation AUC of the selected checkpoint
    // must sit at chance
    const double control_auc = control.best_val_auc;
    const bool control_ok = control_auc >= 0.4 && control_auc <= 0.6;

    // (c) hierarchical confusion matrix diagonally dominant per row
    const njson cm = eval.at("confusion").at("matrix");
    bool dominant = true;
    for (int r = 0; r < 3; ++r) {
        const int64_t diag = cm.at(r).at(r).get<int64_t>();
        int64_t off = 0;
        for (int c = 0; c < 3; ++c)
            if (c != r) off += cm.at(r).at(c).get<int64_t>();
        dominant = dominant && diag > off;
    }

    const double elapsed = seconds_since(t0);
    detail = "null " + fmt("%.2f", worst_null) + ", weakest signal " + fmt("%.1f", weakest_signal) +
             ", min AUC " + fmt("%.3f", min_auc) + ", control AUC " + fmt("%.3f", control_auc) +
             (dominant ? ", diagonal" : ", NOT diagonal") + ", " + fmt("%.0f", elapsed) + "s";
    return stats_ok && auc_ok && control_ok && dominant && elapsed < 900.0;
}

// ---- criterion 8: real-corpus cohort counts (documented) -----------------

bool criterion_real_manifest(std::string& detail) {
    const char* path = std::getenv("RVK_REAL_MANIFEST");
    if (!path) {
        detail = "documented; set RVK_REAL_MANIFEST=<manifest.csv> to verify 1169/346/214";
        return true;
    }
    ManifestLoadResult loaded = load_manifest(path);
    std::vector<SubjectRecord> kept = filter_subjects(loaded.records, FilterConfig{});
    const VariantCounts counts = apply_variant_labels(kept, Date{2021, 12, 1});
    detail = "healthy " + std::to_string(counts.healthy) + ", delta " +
             std::to_string(counts.delta) + ", omicron " + std::to_string(counts.omicron);
    return counts.healthy == 1169 && counts.delta == 346 && counts.omicron == 214;
}

// ---- criterion 9: byte-identical reports ---------------------------------

bool criterion_determinism(std::string& detail) {
    const fs::path root = fs::temp_directory_path() / "rvk_acceptance_det";
    fs::remove_all(root);
    fs::create_directories(root);

    SynthConfig sc;
    sc.out_dir = (root / "corpus").string();
    sc.per_class = 20;
    sc.seed = 21;
    generate_corpus(sc);

    RunConfig cfg;
    cfg.manifest = (root / "corpus" / "manifest.csv").string();
    cfg.task = Task::hierarchical;
    cfg.modalities = {SoundCategory::cough_heavy, SoundCategory::vowel_o};
    cfg.seeds = {1, 2};
    cfg.train.learning_rate = 2e-3;
    cfg.train.batch_size = 32;
    cfg.train.max_epochs = 3;
    cfg.train.patience = 3;
    cfg.train.hidden = 8;
    cfg.train.ff_dim = 6;

    RunConfig a = cfg, b = cfg;
    a.cache_dir = (root / "cache_a").string();
    a.output_dir = (root / "runs_a").string();
    b.cache_dir = (root / "cache_b").string();
    b.output_dir = (root / "runs_b").string();
    run_all_stages(a);
    cmd_report(a);
    run_all_stages(b);
    cmd_report(b);

    const RunPaths pa = RunPaths::make(a), pb = RunPaths::make(b);
    if (pa.run_dir.filename() != pb.run_dir.filename()) {
        detail = "config hashes differ across roots";
        return false;
    }
    for (const char* f : {"report.json", "roc_pos_vs_h.svg", "roc_omi_vs_del.svg",
                          "significance.svg", "val_auc_pos_vs_h.svg", "val_auc_omi_vs_del.svg"})
        if (read_file(pa.run_dir / f) != read_file(pb.run_dir / f)) {
            detail = std::string("differs: ") + f;
            return false;
        }
    detail = "two runs, " + std::string("report.json + 5 charts byte-identical");
    return true;
}

}  // namespace

int main() {
    Gate gate;
    std::string d;

    d.clear(); gate.report(1, "mann-whitney oracle equivalence", criterion_mwu(d), d);
    d.clear(); gate.report(2, "harmonic mean p-value", criterion_hmp(d), d);
    d.clear(); gate.report(3, "auc dual-definition equivalence", criterion_auc(d), d);
    d.clear(); gate.report(4, "gradient check", criterion_gradcheck(d), d);
    d.clear(); gate.report(5, "segmentation arithmetic", criterion_segmentation(d), d);
    d.clear(); gate.report(6, "feature shape and determinism", criterion_features(d), d);
    d.clear(); gate.report(7, "synthetic end-to-end", criterion_end_to_end(d), d);
    d.clear(); gate.report(8, "real-corpus cohort counts", criterion_real_manifest(d), d);
    d.clear(); gate.report(9, "byte-identical reports", criterion_determinism(d), d);

    std::printf("%s\n", gate.all_passed ? "all criteria passed" : "ACCEPTANCE FAILURE");
    return gate.all_passed ? 0 : 1;
}
