#include "rvk/splits.hpp"

#include "rvk/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_set>

namespace rvk {

namespace {

const char* severity_tag(Severity s) {
    switch (s) {
        case Severity::asymptomatic: return "asymptomatic";
        case Severity::mild: return "mild";
        case Severity::moderate: return "moderate";
    }
    return "?";
}

}  // namespace

SplitAssignment make_splits(const std::vector<SubjectRecord>& records, uint64_t seed,
                            const SplitRatios& ratios) {
    if (seed == kReservedTestSeed)
        throw_config("split seed 0 is reserved for test-set selection");
    if (ratios.train < 0 || ratios.val < 0 || ratios.test < 0 ||
        std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9)
        throw_config("split ratios must be nonnegative and sum to 1");

    // std::map keeps stratum order deterministic regardless of input order.
    std::map<std::string, std::vector<std::string>> strata;
    std::unordered_set<std::string> seen;
    for (const auto& r : records) {
        if (!seen.insert(r.subject_id).second)
            throw_data("duplicate subject_id in split input: " + r.subject_id);
        if (!r.category)
            throw_data("subject " + r.subject_id + " has no resolved category");
        std::string key;
        if (*r.category == SubjectCategory::healthy) {
            key = "healthy";
        } else {
            if (!r.severity)
                throw_data("positive subject " + r.subject_id + " has no severity");
            key = subject_category_name(*r.category) + std::string("/") + severity_tag(*r.severity);
        }
        strata[key].push_back(r.subject_id);
    }

    SplitAssignment out;
    out.seed = seed;
    for (auto& [name, ids] : strata) {
        std::sort(ids.begin(), ids.end());
        const size_t n = ids.size();
        const size_t n_train = static_cast<size_t>(std::floor(ratios.train * double(n)));
        const size_t n_val = static_cast<size_t>(std::floor(ratios.val * double(n)));
        const size_t n_test = n - n_train - n_val;

        // Test members depend only on the reserved seed, so they are the
        // same for every run seed.
        Rng test_rng(Rng::mix(kReservedTestSeed, fnv1a64(name)));
        test_rng.shuffle(ids);
        for (size_t i = 0; i < n_test; ++i) out.test.insert(ids[i]);

        std::vector<std::string> rest(ids.begin() + static_cast<ptrdiff_t>(n_test), ids.end());
        Rng run_rng(Rng::mix(seed, fnv1a64(name)));
        run_rng.shuffle(rest);
        for (size_t i = 0; i < rest.size(); ++i)
            (i < n_train ? out.train : out.val).insert(rest[i]);
    }
    return out;
}

void write_splits_json(const std::string& path, const std::vector<SplitAssignment>& splits) {
    nlohmann::json doc = nlohmann::json::object();
    for (const auto& s : splits) {
        nlohmann::json entry;
        entry["train"] = std::vector<std::string>(s.train.begin(), s.train.end());
        entry["val"] = std::vector<std::string>(s.val.begin(), s.val.end());
        entry["test"] = std::vector<std::string>(s.test.begin(), s.test.end());
        doc[std::to_string(s.seed)] = std::move(entry);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_data("cannot write " + path);
    out << doc.dump(2) << "\n";
    if (!out) throw_data("failed writing " + path);
}

std::vector<SplitAssignment> read_splits_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_data("cannot open splits file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw_data(std::string("bad splits JSON: ") + e.what());
    }
    if (!doc.is_object()) throw_data("splits JSON root must be an object");

    std::vector<SplitAssignment> splits;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        SplitAssignment s;
        try {
            s.seed = std::stoull(it.key());
        } catch (const std::exception&) {
            throw_data("splits JSON key is not a seed: " + it.key());
        }
        const auto& entry = it.value();
        for (const char* part : {"train", "val", "test"}) {
            if (!entry.contains(part) || !entry[part].is_array())
                throw_data(std::string("splits entry missing array: ") + part);
            auto& dst = (part == std::string("train")) ? s.train
                      : (part == std::string("val")) ? s.val
                                                     : s.test;
            for (const auto& id : entry[part]) {
                if (!id.is_string()) throw_data("split ids must be strings");
                dst.insert(id.get<std::string>());
            }
        }
        splits.push_back(std::move(s));
    }
    std::sort(splits.begin(), splits.end(),
              [](const SplitAssignment& a, const SplitAssignment& b) { return a.seed < b.seed; });
    return splits;
}

}  // namespace rvk
