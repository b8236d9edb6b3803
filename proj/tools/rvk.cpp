// rvk: respiratory-sound variant klassifier, command-line front end.
//
// One subcommand per pipeline stage plus `synth` for building a test
// corpus. Every stage subcommand takes --config and a handful of
// overrides; exit codes follow the error kinds (1 config, 2 data,
// 3 numeric).

#include "rvk/config.hpp"
#include "rvk/pipeline.hpp"
#include "rvk/synth.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

namespace {

struct Overrides {
    std::string config_path;
    std::string manifest;
    std::string task;
    std::string modalities;  // comma list or "all"
    std::string seeds;       // comma list
    std::string output_dir;
    std::string cache_dir;
    int jobs = 0;
};

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    size_t start = 0;
    while (start <= s.size()) {
        const size_t comma = s.find(',', start);
        const size_t end = comma == std::string::npos ? s.size() : comma;
        if (end > start) out.push_back(s.substr(start, end - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

rvk::RunConfig resolve_config(const Overrides& ov) {
    rvk::RunConfig cfg = rvk::load_run_config(ov.config_path);
    if (!ov.manifest.empty()) cfg.manifest = ov.manifest;
    if (!ov.task.empty()) {
        const auto t = rvk::parse_task(ov.task);
        if (!t) rvk::throw_config("unknown task: " + ov.task);
        cfg.task = *t;
    }
    if (!ov.modalities.empty()) {
        if (ov.modalities == "all") {
            cfg.modalities.assign(rvk::all_sound_categories().begin(),
                                  rvk::all_sound_categories().end());
        } else {
            cfg.modalities.clear();
            for (const std::string& name : split_commas(ov.modalities)) {
                const auto m = rvk::parse_sound_category(name);
                if (!m) rvk::throw_config("unknown modality: " + name);
                cfg.modalities.push_back(*m);
            }
            if (cfg.modalities.empty()) rvk::throw_config("empty --modalities list");
        }
    }
    if (!ov.seeds.empty()) {
        cfg.seeds.clear();
        for (const std::string& tok : split_commas(ov.seeds)) {
            try {
                const unsigned long long v = std::stoull(tok);
                if (v == 0) rvk::throw_config("seed 0 is reserved for the test split");
                cfg.seeds.push_back(v);
            } catch (const std::logic_error&) {
                rvk::throw_config("bad seed value: " + tok);
            }
        }
        if (cfg.seeds.empty()) rvk::throw_config("empty --seeds list");
    }
    if (!ov.output_dir.empty()) cfg.output_dir = ov.output_dir;
    if (!ov.cache_dir.empty()) cfg.cache_dir = ov.cache_dir;
    if (ov.jobs > 0) cfg.jobs = ov.jobs;
    return cfg;
}

void add_stage_options(CLI::App* sub, Overrides& ov) {
    sub->add_option("--config", ov.config_path, "run configuration JSON")->required();
    sub->add_option("--manifest", ov.manifest, "override the manifest path");
    sub->add_option("--task", ov.task, "override the task");
    sub->add_option("--modalities", ov.modalities, "comma-separated modality list, or 'all'");
    sub->add_option("--seeds", ov.seeds, "comma-separated split seeds");
    sub->add_option("--output-dir", ov.output_dir, "override the output directory");
    sub->add_option("--cache-dir", ov.cache_dir, "override the feature cache directory");
    sub->add_option("--jobs", ov.jobs, "worker threads for extraction");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"respiratory sound analysis pipeline"};
    app.require_subcommand(1);

    rvk::SynthConfig synth_cfg;
    bool no_decoys = false;
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic corpus");
    synth->add_option("--out", synth_cfg.out_dir, "corpus output directory")->required();
    synth->add_option("--per-class", synth_cfg.per_class, "subjects per class");
    synth->add_option("--seed", synth_cfg.seed, "corpus seed");
    synth->add_option("--duration", synth_cfg.duration_s, "nominal clip seconds");
    synth->add_flag("--no-decoys", no_decoys, "omit the filter-exercising rows");

    Overrides ov;
    struct StageCmd {
        const char* name;
        const char* help;
        void (*run)(const rvk::RunConfig&);
    };
    const StageCmd stages[] = {
        {"ingest", "parse and filter the manifest, write cohort tables", rvk::cmd_ingest},
        {"extract", "decode audio and fill the feature cache", rvk::cmd_extract},
        {"split", "assign train/val/test subjects per seed", rvk::cmd_split},
        {"stats", "population separation tests per modality", rvk::cmd_stats},
        {"train", "train one model per stage/modality/seed", rvk::cmd_train},
        {"evaluate", "score the test subjects and calibrate thresholds", rvk::cmd_evaluate},
        {"report", "assemble the master report and charts", rvk::cmd_report},
    };
    for (const StageCmd& sc : stages)
        add_stage_options(app.add_subcommand(sc.name, sc.help), ov);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the usage message
        return 1;     // any usage problem is a config error
    }

    try {
        if (synth->parsed()) {
            synth_cfg.decoys = !no_decoys;
            const int rows = rvk::generate_corpus(synth_cfg);
            std::printf("wrote %d manifest rows under %s\n", rows, synth_cfg.out_dir.c_str());
            return 0;
        }
        for (const StageCmd& sc : stages)
            if (app.get_subcommand(sc.name)->parsed()) {
                sc.run(resolve_config(ov));
                return 0;
            }
    } catch (const rvk::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.exit_code();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 3;
    }
    return 0;
}
