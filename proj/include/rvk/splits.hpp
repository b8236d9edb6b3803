#pragma once

// Stratified train/val/test assignment.
//
// Strata are (category x severity) for positives and a single healthy
// stratum. Per stratum of size n: train gets floor(0.65*n), val gets
// floor(0.15*n), the remainder is test. The test subset is drawn first
// with a reserved seed so it is identical for every run seed.

#include "rvk/manifest.hpp"

#include <set>
#include <string>
#include <vector>

namespace rvk {

inline constexpr uint64_t kReservedTestSeed = 0;

struct SplitRatios {
    double train = 0.65;
    double val = 0.15;
    double test = 0.20;
};

struct SplitAssignment {
    uint64_t seed = 0;
    std::set<std::string> train;
    std::set<std::string> val;
    std::set<std::string> test;
};

// `records` must be filtered and variant-labeled (category resolved,
// severity present on positives); violations throw Error(data).
SplitAssignment make_splits(const std::vector<SubjectRecord>& records, uint64_t seed,
                            const SplitRatios& ratios = {});

void write_splits_json(const std::string& path, const std::vector<SplitAssignment>& splits);
std::vector<SplitAssignment> read_splits_json(const std::string& path);

}  // namespace rvk
