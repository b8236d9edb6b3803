#pragma once

// Stage orchestration. Each command consumes the run configuration,
// reads the outputs of its predecessors from the per-run directory, and
// persists its own. Stages are resumable: completed artifacts are
// detected and skipped, and identical configs always converge to
// byte-identical reports.

#include "rvk/config.hpp"
#include "rvk/manifest.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace rvk {

struct RunPaths {
    std::filesystem::path run_dir;    // output_dir / run-<config hash>
    std::filesystem::path ingest_dir;
    std::filesystem::path stats_dir;
    std::filesystem::path models_dir;
    std::filesystem::path eval_dir;
    std::filesystem::path cache_dir;
    std::filesystem::path manifest_dir;  // base for relative sound paths

    static RunPaths make(const RunConfig& cfg);
};

// One binary decision within a task: hierarchical expands to two stages,
// every other task to itself.
struct Stage {
    std::string name;
    // 1 = stage positive, 0 = stage negative, -1 = outside this stage
    int (*label_of)(SubjectCategory);
};

std::vector<Stage> task_stages(Task t);

// Feature cache entry for one recording; shared across runs.
std::filesystem::path cache_path(const std::filesystem::path& cache_dir,
                                 const std::string& subject_id, SoundCategory modality);

void cmd_ingest(const RunConfig& cfg);
void cmd_extract(const RunConfig& cfg);
void cmd_split(const RunConfig& cfg);
void cmd_stats(const RunConfig& cfg);
void cmd_train(const RunConfig& cfg);
void cmd_evaluate(const RunConfig& cfg);
void cmd_report(const RunConfig& cfg);

}  // namespace rvk
