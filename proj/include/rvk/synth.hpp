#pragma once

// Synthetic corpus generator: a labeled WAV corpus with class-dependent
// spectral shifts and per-(subject, modality) independent noise, plus a
// manifest in the ingest schema. Everything is a pure function of the
// seed, so regenerated corpora are byte-identical.

#include "rvk/manifest.hpp"

#include <cstdint>
#include <string>

namespace rvk {

struct SynthConfig {
    std::string out_dir;
    int per_class = 20;       // subjects per category (healthy/delta/omicron)
    uint64_t seed = 1;
    double duration_s = 0.9;  // nominal clip length; each clip adds up to 0.3 s
    bool decoys = true;       // rows the filter/labeling stages must drop
};

// Writes wav/<subject>_<modality>.wav for every subject and modality and
// manifest.csv under out_dir. Returns the number of manifest rows.
int generate_corpus(const SynthConfig& cfg);

}  // namespace rvk
