#pragma once

// Declarative run configuration: one JSON file drives every pipeline
// stage. Validation is strict (unknown keys are errors, not warnings) and
// the semantic fields hash to the per-run directory name, so two configs
// that hash alike describe the same experiment.

#include "rvk/manifest.hpp"
#include "rvk/train.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rvk {

enum class Task { omi_del, del_h, omi_h, pos_h, hierarchical };

const std::string& task_name(Task t);
std::optional<Task> parse_task(const std::string& name);

struct StatsConfig {
    int subsample_cap = 200;
    uint64_t seed = 1;
};

struct RunConfig {
    std::string manifest;
    std::string cache_dir = "cache";
    std::string output_dir = "runs";
    Task task = Task::hierarchical;
    std::vector<SoundCategory> modalities;  // canonical order; never empty
    std::vector<uint64_t> seeds;            // split seeds; never empty, never 0
    FilterConfig filter;
    Date variant_cutoff{2021, 12, 1};
    StatsConfig stats;
    TrainConfig train;  // train.seed is ignored; per-model seeds are derived
    int jobs = 1;
};

// Parses and validates. Rejects unknown keys at every nesting level,
// wrong JSON types, empty seed lists, the reserved seed 0, and unknown
// task/modality names. Does not check that paths exist.
RunConfig load_run_config(const std::string& path);

// FNV-1a over the canonical form of the semantic fields. The manifest
// enters by content, not by path; cache_dir, output_dir, and jobs are
// excluded, so relocating a run or changing parallelism keeps the hash.
uint64_t config_hash(const RunConfig& cfg);
std::string config_hash_hex(const RunConfig& cfg);

}  // namespace rvk
