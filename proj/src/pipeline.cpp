#include "rvk/pipeline.hpp"

#include "rvk/audio.hpp"
#include "rvk/csv.hpp"
#include "rvk/features.hpp"
#include "rvk/metrics.hpp"
#include "rvk/scoring.hpp"
#include "rvk/segments.hpp"
#include "rvk/splits.hpp"
#include "rvk/stats.hpp"
#include "rvk/svg.hpp"
#include "rvk/train.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <thread>

namespace rvk {

namespace {

using ojson = nlohmann::ordered_json;

void write_text(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_data("cannot write " + path.string());
    out << body;
    if (!out) throw_data("short write to " + path.string());
}

void write_json(const std::filesystem::path& path, const ojson& j) {
    write_text(path, j.dump(2) + "\n");
}

ojson read_json(const std::filesystem::path& path, const std::string& hint) {
    std::ifstream in(path);
    if (!in) throw_data("missing " + path.string() + " (" + hint + ")");
    try {
        return ojson::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw_data("corrupt JSON in " + path.string() + ": " + e.what());
    }
}

// The manifest after filtering and variant labeling; every record has a
// resolved category. This is the subject pool every stage agrees on.
struct Cohort {
    std::vector<SubjectRecord> records;  // sorted by subject_id
    size_t parsed_rows = 0;
    size_t filtered_out = 0;
    VariantCounts counts;
    std::vector<RowError> parse_errors;
};

Cohort load_cohort(const RunConfig& cfg) {
    ManifestLoadResult loaded = load_manifest(cfg.manifest);
    Cohort c;
    c.parsed_rows = loaded.records.size();
    c.parse_errors = std::move(loaded.errors);

    std::vector<SubjectRecord> kept = filter_subjects(loaded.records, cfg.filter);
    c.filtered_out = loaded.records.size() - kept.size();
    c.counts = apply_variant_labels(kept, cfg.variant_cutoff);
    std::erase_if(kept, [](const SubjectRecord& r) { return !r.category.has_value(); });
    std::sort(kept.begin(), kept.end(),
              [](const SubjectRecord& a, const SubjectRecord& b) {
                  return a.subject_id < b.subject_id;
              });
    for (size_t i = 1; i < kept.size(); ++i)
        if (kept[i].subject_id == kept[i - 1].subject_id)
            throw_data("duplicate subject_id in manifest: " + kept[i].subject_id);
    c.records = std::move(kept);
    return c;
}

void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn) {
    const size_t workers = std::min<size_t>(size_t(std::max(1, jobs)), n);
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (size_t i; (i = next.fetch_add(1)) < n;) fn(i);
        });
    for (auto& t : pool) t.join();
}

std::string hex16(uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

int label_pos_h(SubjectCategory c) { return c == SubjectCategory::healthy ? 0 : 1; }
int label_del_h(SubjectCategory c) {
    if (c == SubjectCategory::delta) return 1;
    return c == SubjectCategory::healthy ? 0 : -1;
}
int label_omi_h(SubjectCategory c) {
    if (c == SubjectCategory::omicron) return 1;
    return c == SubjectCategory::healthy ? 0 : -1;
}
int label_omi_del(SubjectCategory c) {
    if (c == SubjectCategory::omicron) return 1;
    return c == SubjectCategory::delta ? 0 : -1;
}

std::filesystem::path resolve_sound_path(const RunPaths& paths, const std::string& rel) {
    const std::filesystem::path p(rel);
    return p.is_absolute() ? p : paths.manifest_dir / p;
}

std::filesystem::path model_path(const RunPaths& paths, const std::string& stage,
                                 SoundCategory mod, uint64_t seed) {
    return paths.models_dir /
           (stage + "_" + sound_category_name(mod) + "_s" + std::to_string(seed) + ".rvkm");
}

// Features for one modality over a set of subjects; absent cache entries
// are simply missing keys.
std::map<std::string, MatrixF> load_modality_features(const RunPaths& paths,
                                                      const std::vector<SubjectRecord>& records,
                                                      SoundCategory mod) {
    std::map<std::string, MatrixF> out;
    for (const SubjectRecord& r : records) {
        if (!r.sound_paths.count(mod)) continue;
        const auto path = cache_path(paths.cache_dir, r.subject_id, mod);
        if (!feature_cache_valid(path.string())) continue;
        out.emplace(r.subject_id, read_feature_cache(path.string()));
    }
    return out;
}

std::vector<SplitAssignment> load_splits(const RunConfig& cfg, const RunPaths& paths) {
    const auto path = paths.run_dir / "splits.json";
    if (!std::filesystem::exists(path))
        throw_data("missing " + path.string() + " (run the split command first)");
    std::vector<SplitAssignment> splits = read_splits_json(path.string());
    for (uint64_t seed : cfg.seeds) {
        const bool found = std::any_of(splits.begin(), splits.end(),
                                       [&](const SplitAssignment& s) { return s.seed == seed; });
        if (!found)
            throw_data("splits.json lacks seed " + std::to_string(seed) +
                       " (rerun the split command)");
    }
    return splits;
}

const SplitAssignment& split_for(const std::vector<SplitAssignment>& splits, uint64_t seed) {
    for (const auto& s : splits)
        if (s.seed == seed) return s;
    throw_data("split for seed " + std::to_string(seed) + " not found");
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ojson roc_points_json(const std::vector<RocPoint>& points) {
    ojson arr = ojson::array();
    for (const RocPoint& p : points) arr.push_back({p.fpr, p.tpr, p.threshold});
    return arr;
}

std::vector<RocPoint> roc_points_from_json(const ojson& arr) {
    std::vector<RocPoint> out;
    for (const auto& p : arr) {
        // the curve's first threshold is +inf, which JSON stores as null
        const double th = p.at(2).is_null() ? std::numeric_limits<double>::infinity()
                                            : p.at(2).get<double>();
        out.push_back({p.at(0).get<double>(), p.at(1).get<double>(), th});
    }
    return out;
}

}  // namespace

RunPaths RunPaths::make(const RunConfig& cfg) {
    RunPaths p;
    p.run_dir = std::filesystem::path(cfg.output_dir) / ("run-" + config_hash_hex(cfg));
    p.ingest_dir = p.run_dir / "ingest";
    p.stats_dir = p.run_dir / "stats";
    p.models_dir = p.run_dir / "models";
    p.eval_dir = p.run_dir / "eval";
    p.cache_dir = cfg.cache_dir;
    p.manifest_dir = std::filesystem::path(cfg.manifest).parent_path();
    return p;
}

std::vector<Stage> task_stages(Task t) {
    switch (t) {
        case Task::omi_del: return {{"omi_vs_del", label_omi_del}};
        case Task::del_h: return {{"del_vs_h", label_del_h}};
        case Task::omi_h: return {{"omi_vs_h", label_omi_h}};
        case Task::pos_h: return {{"pos_vs_h", label_pos_h}};
        case Task::hierarchical: return {{"pos_vs_h", label_pos_h}, {"omi_vs_del", label_omi_del}};
    }
    throw_config("invalid task");
}

std::filesystem::path cache_path(const std::filesystem::path& cache_dir,
                                 const std::string& subject_id, SoundCategory modality) {
    std::string safe = subject_id;
    for (char& c : safe)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    const std::string& mod = sound_category_name(modality);
    // short content-free hash keeps sanitized names collision-proof
    const uint64_t tag = fnv1a64(subject_id + "|" + mod);
    return cache_dir / (safe + "_" + mod + "-" + hex16(tag).substr(8) + ".rvkf");
}

void cmd_ingest(const RunConfig& cfg) {
    const RunPaths paths = RunPaths::make(cfg);
    std::filesystem::create_directories(paths.ingest_dir);
    const Cohort cohort = load_cohort(cfg);

    {
        std::ofstream out(paths.ingest_dir / "subjects.csv");
        if (!out) throw_data("cannot write subjects.csv");
        csv::write_record(out, {"subject_id", "category", "age", "gender", "severity",
                                "record_date", "n_modalities"});
        for (const SubjectRecord& r : cohort.records) {
            std::string severity;
            if (r.severity == Severity::asymptomatic) severity = "asymptomatic";
            else if (r.severity == Severity::mild) severity = "mild";
            else if (r.severity == Severity::moderate) severity = "moderate";
            csv::write_record(out, {r.subject_id, subject_category_name(*r.category),
                                    std::to_string(r.age),
                                    r.gender == Gender::male     ? "male"
                                    : r.gender == Gender::female ? "female"
                                                                 : "other",
                                    severity,
                                    r.record_date ? r.record_date->to_string() : "",
                                    std::to_string(r.sound_paths.size())});
        }
    }

    {
        std::ofstream out(paths.ingest_dir / "errors.csv");
        if (!out) throw_data("cannot write errors.csv");
        csv::write_record(out, {"kind", "row", "message"});
        for (const RowError& e : cohort.parse_errors)
            csv::write_record(out, {"parse", std::to_string(e.row), e.message});
        for (const RowError& e : cohort.counts.errors)
            csv::write_record(out, {"variant", std::to_string(e.row), e.message});
    }

    ojson counts;
    counts["parsed_rows"] = cohort.parsed_rows;
    counts["row_errors"] = cohort.parse_errors.size();
    counts["filtered_out"] = cohort.filtered_out;
    counts["healthy"] = cohort.counts.healthy;
    counts["delta"] = cohort.counts.delta;
    counts["omicron"] = cohort.counts.omicron;
    counts["label_errors"] = cohort.counts.errors.size();
    counts["cohort"] = cohort.records.size();
    write_json(paths.ingest_dir / "variant_counts.json", counts);

    const auto is_delta = [](const SubjectRecord& r) {
        return r.category == SubjectCategory::delta;
    };
    const auto is_omicron = [](const SubjectRecord& r) {
        return r.category == SubjectCategory::omicron;
    };
    const auto is_positive = [](const SubjectRecord& r) {
        return r.status == CovidStatus::positive;
    };
    write_odds_csv((paths.ingest_dir / "odds_delta.csv").string(),
                   odds_ratios(cohort.records, is_delta));
    write_odds_csv((paths.ingest_dir / "odds_omicron.csv").string(),
                   odds_ratios(cohort.records, is_omicron));
    write_odds_csv((paths.ingest_dir / "odds_positive.csv").string(),
                   odds_ratios(cohort.records, is_positive));
}

void cmd_extract(const RunConfig& cfg) {
    const RunPaths paths = RunPaths::make(cfg);
    std::filesystem::create_directories(paths.run_dir);
    std::filesystem::create_directories(paths.cache_dir);
    const Cohort cohort = load_cohort(cfg);

    struct Job {
        std::string subject;
        SoundCategory modality;
        std::filesystem::path wav;
        std::filesystem::path cache;
    };
    std::vector<Job> jobs;
    for (const SubjectRecord& r : cohort.records)
        for (SoundCategory mod : cfg.modalities) {
            const auto it = r.sound_paths.find(mod);
            if (it == r.sound_paths.end()) continue;
            jobs.push_back({r.subject_id, mod, resolve_sound_path(paths, it->second),
                            cache_path(paths.cache_dir, r.subject_id, mod)});
        }

    enum class Outcome { written, skipped, failed, too_short };
    struct Result {
        Outcome outcome = Outcome::skipped;
        std::string message;
    };
    std::vector<Result> results(jobs.size());

    parallel_for(jobs.size(), cfg.jobs, [&](size_t i) {
        const Job& job = jobs[i];
        if (feature_cache_valid(job.cache.string())) {
            results[i].outcome = Outcome::skipped;
            return;
        }
        try {
            const AudioClip clip = preprocess_file(job.wav.string());
            write_feature_cache(job.cache.string(), extract_features(clip));
            results[i].outcome = Outcome::written;
        } catch (const TooShortError& e) {
            results[i] = {Outcome::too_short, e.what()};
        } catch (const Error& e) {
            results[i] = {Outcome::failed, e.what()};
        }
    });

    size_t written = 0, skipped = 0;
    ojson failed = ojson::array(), too_short = ojson::array();
    for (size_t i = 0; i < jobs.size(); ++i) {
        switch (results[i].outcome) {
            case Outcome::written: ++written; break;
            case Outcome::skipped: ++skipped; break;
            case Outcome::failed:
                failed.push_back({{"subject", jobs[i].subject},
                                  {"modality", sound_category_name(jobs[i].modality)},
                                  {"error", results[i].message}});
                break;
            case Outcome::too_short:
                too_short.push_back({{"subject", jobs[i].subject},
                                     {"modality", sound_category_name(jobs[i].modality)},
                                     {"error", results[i].message}});
                break;
        }
    }

    ojson summary;
    summary["recordings"] = jobs.size();
    summary["written"] = written;
    summary["skipped"] = skipped;
    summary["failed"] = failed;
    summary["too_short"] = too_short;
    write_json(paths.run_dir / "extract_summary.json", summary);
}

void cmd_split(const RunConfig& cfg) {
    const RunPaths paths = RunPaths::make(cfg);
    std::filesystem::create_directories(paths.run_dir);
    const Cohort cohort = load_cohort(cfg);
    std::vector<SplitAssignment> splits;
    splits.reserve(cfg.seeds.size());
    for (uint64_t seed : cfg.seeds) splits.push_back(make_splits(cohort.records, seed));
    write_splits_json((paths.run_dir / "splits.json").string(), splits);
}

void cmd_stats(const RunConfig& cfg) {
    const RunPaths paths = RunPaths::make(cfg);
    std::filesystem::create_directories(paths.stats_dir);
    const Cohort cohort = load_cohort(cfg);

    // Disjoint halves of the healthy pool give the null-control pair: the
    // two subsets come from one population, so nothing should light up.
    std::vector<std::string> healthy_ids;
    for (const SubjectRecord& r : cohort.records)
        if (r.category == SubjectCategory::healthy) healthy_ids.push_back(r.subject_id);
    Rng half_rng(Rng::mix(cfg.stats.seed, fnv1a64("h_split")));
    half_rng.shuffle(healthy_ids);
    const std::set<std::string> half_a(healthy_ids.begin(),
                                       healthy_ids.begin() + ptrdiff_t(healthy_ids.size() / 2));

    struct Pair {
        std::string name;
        std::string group_a, group_b;  // selector tags
    };
    const std::vector<Pair> pairs{{"h_vs_h2", "h1", "h2"},
                                  {"del_vs_h", "del", "h"},
                                  {"omi_vs_h", "omi", "h"},
                                  {"omi_vs_del", "omi", "del"},
                                  {"pos_vs_h", "pos", "h"}};

    const auto in_group = [&](const SubjectRecord& r, const std::string& tag) {
        const SubjectCategory c = *r.category;
        if (tag == "h") return c == SubjectCategory::healthy;
        if (tag == "h1") return c == SubjectCategory::healthy && half_a.count(r.subject_id) > 0;
        if (tag == "h2") return c == SubjectCategory::healthy && half_a.count(r.subject_id) == 0;
        if (tag == "del") return c == SubjectCategory::delta;
        if (tag == "omi") return c == SubjectCategory::omicron;
        if (tag == "pos") return c != SubjectCategory::healthy;
        return false;
    };

    // modality outer so each cache entry is read once, not once per pair
    ojson summary;
    for (SoundCategory mod : cfg.modalities) {
        const auto features = load_modality_features(paths, cohort.records, mod);
        for (const Pair& pair : pairs) {
            std::vector<VectorF> a, b;
            for (const SubjectRecord& r : cohort.records) {
                const auto it = features.find(r.subject_id);
                if (it == features.end()) continue;
                if (in_group(r, pair.group_a)) a.push_back(average_vector(it->second));
                else if (in_group(r, pair.group_b)) b.push_back(average_vector(it->second));
            }
            if (a.size() < 2 || b.size() < 2)
                throw_data("pair " + pair.name + ", modality " + sound_category_name(mod) +
                           ": need at least 2 subjects per side, got " +
                           std::to_string(a.size()) + "/" + std::to_string(b.size()) +
                           " (did extract run?)");

            CompareOptions opt;
            opt.label_a = pair.name + "|" + sound_category_name(mod) + "|a";
            opt.label_b = pair.name + "|" + sound_category_name(mod) + "|b";
            opt.subsample_cap = cfg.stats.subsample_cap;
            opt.seed = cfg.stats.seed;
            const PopulationComparison cmp = compare_populations(a, b, opt);

            write_comparison_csv(
                (paths.stats_dir / (std::string(sound_category_name(mod)) + "_" + pair.name +
                                    ".csv"))
                    .string(),
                cmp);
            summary[pair.name][sound_category_name(mod)] = {
                {"hmp", cmp.hmp},
                {"neg_log10_hmp", cmp.neg_log10_hmp},
                {"n_a", a.size()},
                {"n_b", b.size()}};
        }
    }
    write_json(paths.stats_dir / "summary.json", summary);
}

void cmd_train(const RunConfig& cfg) {
    const RunPaths paths = RunPaths::make(cfg);
    std::filesystem::create_directories(paths.models_dir);
    const Cohort cohort = load_cohort(cfg);
    const std::vector<SplitAssignment> splits = load_splits(cfg, paths);

    std::map<std::string, const SubjectRecord*> by_id;
    for (const SubjectRecord& r : cohort.records) by_id[r.subject_id] = &r;

    // modality outer so each cache entry is read once across stages/seeds
    for (SoundCategory mod : cfg.modalities) {
        const auto features = load_modality_features(paths, cohort.records, mod);
        for (const Stage& stage : task_stages(cfg.task)) {
            for (uint64_t seed : cfg.seeds) {
                const auto mpath = model_path(paths, stage.name, mod, seed);
                const auto spath = mpath.string() + ".json";
                if (std::filesystem::exists(mpath) && std::filesystem::exists(spath)) {
                    try {
                        load_checkpoint(mpath.string());
                        continue;  // resume: finished model, skip retraining
                    } catch (const Error&) {
                        // fall through and retrain over the corrupt file
                    }
                }

                const SplitAssignment& split = split_for(splits, seed);
                std::vector<Segment> train_segments;
                for (const std::string& id : split.train) {
                    const auto it = features.find(id);
                    if (it == features.end()) continue;
                    const int label = stage.label_of(*by_id.at(id)->category);
                    if (label < 0) continue;
                    for (Segment& s : segment_file(it->second, label, id))
                        train_segments.push_back(std::move(s));
                }
                std::vector<LabeledFile> val_files;
                bool val_pos = false, val_neg = false;
                for (const std::string& id : split.val) {
                    const auto it = features.find(id);
                    if (it == features.end()) continue;
                    const int label = stage.label_of(*by_id.at(id)->category);
                    if (label < 0) continue;
                    val_files.push_back({id, it->second, label});
                    (label ? val_pos : val_neg) = true;
                }
                const std::string tag = stage.name + ", " + sound_category_name(mod) +
                                        ", seed " + std::to_string(seed);
                if (train_segments.empty())
                    throw_data("no training segments for " + tag + " (did extract run?)");
                if (!val_pos || !val_neg)
                    throw_data("validation lacks a class for " + tag +
                               "; use more subjects or different seeds");

                TrainConfig tc = cfg.train;
                tc.seed = Rng::mix(seed, fnv1a64(stage.name + "|" + sound_category_name(mod)));
                const TrainResult result = train_blstm(train_segments, val_files, tc);

                save_checkpoint(mpath.string(), result.model);
                ojson sidecar;
                sidecar["stage"] = stage.name;
                sidecar["modality"] = sound_category_name(mod);
                sidecar["seed"] = seed;
                sidecar["hidden"] = tc.hidden;
                sidecar["ff_dim"] = tc.ff_dim;
                sidecar["best_epoch"] = result.best_epoch;
                sidecar["best_val_auc"] = result.best_val_auc;
                sidecar["diverged"] = result.diverged;
                ojson log = ojson::array();
                for (const EpochLog& e : result.log)
                    log.push_back(
                        {{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"val_auc", e.val_auc}});
                sidecar["epochs"] = log;
                write_json(spath, sidecar);
            }
        }
    }

    // Summary is rebuilt from sidecars so interrupted runs converge.
    ojson summary;
    for (const Stage& stage : task_stages(cfg.task)) {
        ojson per_modality;
        for (SoundCategory mod : cfg.modalities) {
            ojson seeds = ojson::array(), aucs = ojson::array();
            std::vector<double> auc_values;
            for (uint64_t seed : cfg.seeds) {
                const auto spath = model_path(paths, stage.name, mod, seed).string() + ".json";
                const ojson sidecar = read_json(spath, "training incomplete");
                seeds.push_back(seed);
                const double auc = sidecar.at("best_val_auc").get<double>();
                aucs.push_back(auc);
                auc_values.push_back(auc);
            }
            per_modality[sound_category_name(mod)] = {{"seeds", seeds},
                                                      {"val_auc", aucs},
                                                      {"median_val_auc", median(auc_values)}};
        }
        summary[stage.name] = per_modality;
    }
    write_json(paths.models_dir / "summary.json", summary);
}

void cmd_evaluate(const RunConfig& cfg) {
    const RunPaths paths = RunPaths::make(cfg);
    std::filesystem::create_directories(paths.eval_dir);
    const Cohort cohort = load_cohort(cfg);
    const std::vector<SplitAssignment> splits = load_splits(cfg, paths);

    // The test subset is seed-invariant by construction; trust nothing.
    const std::set<std::string>& test_ids = split_for(splits, cfg.seeds.front()).test;
    for (uint64_t seed : cfg.seeds)
        if (split_for(splits, seed).test != test_ids)
            throw_data("test subsets differ across seeds; splits.json is inconsistent");

    std::map<std::string, const SubjectRecord*> by_id;
    for (const SubjectRecord& r : cohort.records) by_id[r.subject_id] = &r;

    // threshold calibration uses the first seed's validation pool
    const std::set<std::string>& val_ids = split_for(splits, cfg.seeds.front()).val;
    std::vector<SubjectRecord> scored_records;
    for (const SubjectRecord& r : cohort.records)
        if (test_ids.count(r.subject_id) || val_ids.count(r.subject_id))
            scored_records.push_back(r);

    // fused scores per stage for the hierarchical decision
    std::map<std::string, std::map<std::string, double>> fused_by_stage;
    ojson report;
    ojson stages_json;

    for (const Stage& stage : task_stages(cfg.task)) {
        // subject -> (modality -> score); plus per-modality segment counts
        std::map<std::string, std::map<std::string, double>> test_scores, val_scores;
        std::map<std::string, std::map<std::string, int>> test_segments;

        ojson per_modality;
        for (SoundCategory mod : cfg.modalities) {
            const auto features = load_modality_features(paths, scored_records, mod);

            std::vector<BlstmNetF> models;
            for (uint64_t seed : cfg.seeds) {
                const auto mpath = model_path(paths, stage.name, mod, seed);
                if (!std::filesystem::exists(mpath))
                    throw_data("missing checkpoint " + mpath.string() +
                               " (run the train command first)");
                models.push_back(load_checkpoint(mpath.string()));
            }

            // Seed-ensemble score: mean probability over the per-seed models.
            const auto score_subject = [&](const std::string& id, int& n_segments) {
                const MatrixF& fm = features.at(id);
                double sum = 0.0;
                int segs = 0;
                for (const BlstmNetF& m : models) {
                    const ScoreResult s = score_feature_matrix(m, fm);
                    sum += s.probability;
                    segs = s.n_segments;
                }
                n_segments = segs;
                return sum / double(models.size());
            };

            std::vector<double> roc_scores;
            std::vector<int> roc_labels;
            for (const std::string& id : test_ids) {
                if (!features.count(id)) continue;
                int segs = 0;
                const double p = score_subject(id, segs);
                test_scores[id][sound_category_name(mod)] = p;
                test_segments[id][sound_category_name(mod)] = segs;
                const int label = stage.label_of(*by_id.at(id)->category);
                if (label >= 0) {
                    roc_scores.push_back(p);
                    roc_labels.push_back(label);
                }
            }
            for (const std::string& id : val_ids) {
                if (!features.count(id)) continue;
                int segs = 0;
                val_scores[id][sound_category_name(mod)] = score_subject(id, segs);
            }

            const RocReport roc = roc_auc(roc_scores, roc_labels);
            per_modality[sound_category_name(mod)] = {
                {"auc", roc.auc},
                {"sens_at_95_spec", roc.sens_at_95_spec},
                {"n_scored", roc_scores.size()},
                {"roc", roc_points_json(roc.points)}};
        }

        // fusion: mean over available modalities
        const auto fuse_map = [](const std::map<std::string, std::map<std::string, double>>& in) {
            std::map<std::string, double> out;
            for (const auto& [id, mods] : in) {
                std::vector<double> ps;
                for (const auto& [_, p] : mods) ps.push_back(p);
                if (!ps.empty()) out[id] = fuse(ps);
            }
            return out;
        };
        const std::map<std::string, double> fused_test = fuse_map(test_scores);
        const std::map<std::string, double> fused_val = fuse_map(val_scores);
        fused_by_stage[stage.name] = fused_test;

        std::vector<double> fused_scores;
        std::vector<int> fused_labels;
        for (const auto& [id, p] : fused_test) {
            const int label = stage.label_of(*by_id.at(id)->category);
            if (label >= 0) {
                fused_scores.push_back(p);
                fused_labels.push_back(label);
            }
        }
        const RocReport fused_roc = roc_auc(fused_scores, fused_labels);

        // stage threshold from fused validation scores, Youden's J
        double theta = 0.5;
        std::string theta_source = "default";
        {
            std::vector<double> vs;
            std::vector<int> vl;
            for (const auto& [id, p] : fused_val) {
                const int label = stage.label_of(*by_id.at(id)->category);
                if (label >= 0) {
                    vs.push_back(p);
                    vl.push_back(label);
                }
            }
            try {
                const RocReport val_roc = roc_auc(vs, vl);
                const double th = youden_threshold(val_roc);
                if (std::isfinite(th)) {
                    theta = th;
                    theta_source = "youden_validation";
                }
            } catch (const Error&) {
                // validation degenerate: keep the 0.5 fallback
            }
        }

        // scores CSVs: one row per (modality, subject), then the fused file
        {
            std::ofstream out(paths.eval_dir / ("scores_" + stage.name + ".csv"));
            if (!out) throw_data("cannot write scores CSV");
            csv::write_record(
                out, {"subject_id", "category", "modality", "probability", "n_segments", "label"});
            char num[32];
            for (SoundCategory mod : cfg.modalities) {
                const std::string mod_name = sound_category_name(mod);
                for (const auto& [id, mods] : test_scores) {
                    const auto it = mods.find(mod_name);
                    if (it == mods.end()) continue;
                    std::snprintf(num, sizeof num, "%.9g", it->second);
                    csv::write_record(
                        out, {id, subject_category_name(*by_id.at(id)->category), mod_name, num,
                              std::to_string(test_segments.at(id).at(mod_name)),
                              std::to_string(stage.label_of(*by_id.at(id)->category))});
                }
            }
        }
        {
            std::ofstream out(paths.eval_dir / ("fused_scores_" + stage.name + ".csv"));
            if (!out) throw_data("cannot write fused scores CSV");
            csv::write_record(
                out, {"subject_id", "category", "modality", "probability", "n_segments", "label"});
            char num[32];
            for (const auto& [id, p] : fused_test) {
                std::snprintf(num, sizeof num, "%.9g", p);
                csv::write_record(out,
                                  {id, subject_category_name(*by_id.at(id)->category), "fused",
                                   num, std::to_string(test_scores.at(id).size()),
                                   std::to_string(stage.label_of(*by_id.at(id)->category))});
            }
        }

        stages_json[stage.name] = {{"per_modality", per_modality},
                                   {"fused",
                                    {{"auc", fused_roc.auc},
                                     {"sens_at_95_spec", fused_roc.sens_at_95_spec},
                                     {"n_scored", fused_scores.size()},
                                     {"roc", roc_points_json(fused_roc.points)}}},
                                   {"threshold", theta},
                                   {"threshold_source", theta_source}};
    }
    report["stages"] = stages_json;
    report["n_test"] = test_ids.size();

    if (cfg.task == Task::hierarchical) {
        const auto& stage1 = fused_by_stage.at("pos_vs_h");
        const auto& stage2 = fused_by_stage.at("omi_vs_del");
        const double theta1 = stages_json.at("pos_vs_h").at("threshold").get<double>();
        const double theta2 = stages_json.at("omi_vs_del").at("threshold").get<double>();

        std::vector<SubjectCategory> predicted, truth;
        for (const std::string& id : test_ids) {
            const auto p1 = stage1.find(id);
            const auto p2 = stage2.find(id);
            if (p1 == stage1.end() || p2 == stage2.end()) continue;  // no usable audio
            predicted.push_back(
                hierarchical_classify(p1->second, p2->second, theta1, theta2));
            truth.push_back(*by_id.at(id)->category);
        }
        const ConfusionMatrix3 cm = confusion_3class(predicted, truth);
        ojson matrix = ojson::array();
        for (int r = 0; r < 3; ++r) matrix.push_back({cm.counts[r][0], cm.counts[r][1], cm.counts[r][2]});
        report["confusion"] = {{"order", {"healthy", "delta", "omicron"}},
                               {"matrix", matrix},
                               {"diagonal", cm.diagonal()},
                               {"total", cm.total()}};
    }

    write_json(paths.eval_dir / "report.json", report);
}

void cmd_report(const RunConfig& cfg) {
    const RunPaths paths = RunPaths::make(cfg);
    const ojson counts =
        read_json(paths.ingest_dir / "variant_counts.json", "run the ingest command first");
    const ojson stats = read_json(paths.stats_dir / "summary.json", "run the stats command first");
    const ojson train =
        read_json(paths.models_dir / "summary.json", "run the train command first");
    const ojson eval =
        read_json(paths.eval_dir / "report.json", "run the evaluate command first");

    ojson master;
    ojson config;
    config["hash"] = config_hash_hex(cfg);
    config["task"] = task_name(cfg.task);
    ojson mods = ojson::array();
    for (SoundCategory c : cfg.modalities) mods.push_back(sound_category_name(c));
    config["modalities"] = mods;
    config["seeds"] = cfg.seeds;
    config["variant_cutoff"] = cfg.variant_cutoff.to_string();
    master["config"] = config;
    master["ingest"] = counts;
    master["stats"] = stats;
    master["train"] = train;
    master["eval"] = eval;
    write_json(paths.run_dir / "report.json", master);

    // charts: ROC per stage, the significance bars, per-seed val-AUC boxes
    for (const Stage& stage : task_stages(cfg.task)) {
        const ojson& st = eval.at("stages").at(stage.name);
        std::vector<RocCurve> curves;
        for (SoundCategory mod : cfg.modalities) {
            const ojson& pm = st.at("per_modality").at(sound_category_name(mod));
            curves.push_back(
                {sound_category_name(mod), roc_points_from_json(pm.at("roc"))});
        }
        curves.push_back({"fused", roc_points_from_json(st.at("fused").at("roc"))});
        write_text(paths.run_dir / ("roc_" + stage.name + ".svg"),
                   svg_roc("ROC, " + stage.name, curves));

        std::vector<std::string> labels;
        std::vector<std::vector<double>> samples;
        for (SoundCategory mod : cfg.modalities) {
            labels.push_back(sound_category_name(mod));
            samples.push_back(
                train.at(stage.name).at(sound_category_name(mod)).at("val_auc").get<std::vector<double>>());
        }
        write_text(paths.run_dir / ("val_auc_" + stage.name + ".svg"),
                   svg_box("validation AUC by seed, " + stage.name, labels, samples));
    }

    std::vector<std::string> groups, series;
    std::vector<std::vector<double>> values;
    for (SoundCategory mod : cfg.modalities) series.push_back(sound_category_name(mod));
    for (const auto& [pair, per_modality] : stats.items()) {
        groups.push_back(pair);
        std::vector<double> row;
        for (SoundCategory mod : cfg.modalities)
            row.push_back(per_modality.at(sound_category_name(mod)).at("neg_log10_hmp").get<double>());
        values.push_back(row);
    }
    write_text(paths.run_dir / "significance.svg",
               svg_bars("population separation, -log10 HMP", groups, series, values, 3.0));
}

}  // namespace rvk
