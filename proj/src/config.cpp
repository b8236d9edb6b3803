#include "rvk/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace rvk {

namespace {

const std::array<std::string, 5> kTaskNames{"omi-del", "del-h", "omi-h", "pos-h",
                                            "hierarchical"};

using json = nlohmann::json;

// Every object in the schema goes through this: typos never pass.
void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw_config("unknown config key \"" + it.key() + "\" in " + where);
}

std::string need_string(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) throw_config("missing required key \"" + key + "\" in " + where);
    if (!obj[key].is_string()) throw_config("\"" + key + "\" must be a string in " + where);
    return obj[key].get<std::string>();
}

std::string opt_string(const json& obj, const std::string& key, const std::string& fallback,
                       const std::string& where) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_string()) throw_config("\"" + key + "\" must be a string in " + where);
    return obj[key].get<std::string>();
}

int opt_int(const json& obj, const std::string& key, int fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer())
        throw_config("\"" + key + "\" must be an integer in " + where);
    return obj[key].get<int>();
}

double opt_double(const json& obj, const std::string& key, double fallback,
                  const std::string& where) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw_config("\"" + key + "\" must be a number in " + where);
    return obj[key].get<double>();
}

bool opt_bool(const json& obj, const std::string& key, bool fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_boolean()) throw_config("\"" + key + "\" must be a boolean in " + where);
    return obj[key].get<bool>();
}

}  // namespace

const std::string& task_name(Task t) { return kTaskNames[static_cast<size_t>(t)]; }

std::optional<Task> parse_task(const std::string& name) {
    for (size_t i = 0; i < kTaskNames.size(); ++i)
        if (kTaskNames[i] == name) return Task(i);
    return std::nullopt;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_config("cannot open config file: " + path);
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw_config("config is not valid JSON: " + std::string(e.what()));
    }
    if (!root.is_object()) throw_config("config root must be a JSON object");

    reject_unknown(root,
                   {"manifest", "cache_dir", "output_dir", "task", "modalities", "seeds",
                    "filter", "variant_cutoff", "stats", "train", "jobs"},
                   "config root");

    RunConfig cfg;
    cfg.manifest = need_string(root, "manifest", "config root");
    cfg.cache_dir = opt_string(root, "cache_dir", cfg.cache_dir, "config root");
    cfg.output_dir = opt_string(root, "output_dir", cfg.output_dir, "config root");

    const std::string task = need_string(root, "task", "config root");
    const auto parsed_task = parse_task(task);
    if (!parsed_task) throw_config("unknown task \"" + task + "\"");
    cfg.task = *parsed_task;

    if (root.contains("modalities")) {
        const json& mods = root["modalities"];
        if (!mods.is_array() || mods.empty())
            throw_config("\"modalities\" must be a non-empty array");
        std::set<SoundCategory> picked;
        for (const json& m : mods) {
            if (!m.is_string()) throw_config("modality names must be strings");
            const std::string name = m.get<std::string>();
            if (name == "all") {
                for (SoundCategory c : all_sound_categories()) picked.insert(c);
                continue;
            }
            const auto cat = parse_sound_category(name);
            if (!cat) throw_config("unknown modality \"" + name + "\"");
            picked.insert(*cat);
        }
        cfg.modalities.assign(picked.begin(), picked.end());
    } else {
        const auto& all = all_sound_categories();
        cfg.modalities.assign(all.begin(), all.end());
    }

    if (root.contains("seeds")) {
        const json& seeds = root["seeds"];
        if (!seeds.is_array() || seeds.empty())
            throw_config("\"seeds\" must be a non-empty array");
        for (const json& s : seeds) {
            if (!s.is_number_integer() || s.get<int64_t>() <= 0)
                throw_config("seeds must be positive integers (0 is reserved)");
            cfg.seeds.push_back(s.get<uint64_t>());
        }
    } else {
        for (uint64_t s = 1; s <= 10; ++s) cfg.seeds.push_back(s);
    }

    if (root.contains("filter")) {
        const json& f = root["filter"];
        if (!f.is_object()) throw_config("\"filter\" must be an object");
        reject_unknown(f, {"country", "age_min", "age_max", "require_quality"}, "filter");
        if (f.contains("country")) {
            const std::string c = need_string(f, "country", "filter");
            cfg.filter.country = c.empty() ? std::nullopt : std::optional<std::string>(c);
        }
        if (f.contains("age_min")) cfg.filter.age_min = opt_int(f, "age_min", 0, "filter");
        if (f.contains("age_max")) cfg.filter.age_max = opt_int(f, "age_max", 0, "filter");
        cfg.filter.require_quality =
            opt_bool(f, "require_quality", cfg.filter.require_quality, "filter");
    }

    if (root.contains("variant_cutoff")) {
        const std::string d = need_string(root, "variant_cutoff", "config root");
        const auto date = Date::parse(d);
        if (!date) throw_config("variant_cutoff must be YYYY-MM-DD, got \"" + d + "\"");
        cfg.variant_cutoff = *date;
    }

    if (root.contains("stats")) {
        const json& s = root["stats"];
        if (!s.is_object()) throw_config("\"stats\" must be an object");
        reject_unknown(s, {"subsample_cap", "seed"}, "stats");
        cfg.stats.subsample_cap = opt_int(s, "subsample_cap", cfg.stats.subsample_cap, "stats");
        const int seed = opt_int(s, "seed", int(cfg.stats.seed), "stats");
        if (cfg.stats.subsample_cap < 2) throw_config("stats.subsample_cap must be at least 2");
        if (seed <= 0) throw_config("stats.seed must be positive");
        cfg.stats.seed = uint64_t(seed);
    }

    if (root.contains("train")) {
        const json& t = root["train"];
        if (!t.is_object()) throw_config("\"train\" must be an object");
        reject_unknown(t,
                       {"learning_rate", "beta1", "beta2", "eps", "batch_size", "max_epochs",
                        "patience", "hidden", "ff_dim"},
                       "train");
        TrainConfig& tc = cfg.train;
        tc.learning_rate = opt_double(t, "learning_rate", tc.learning_rate, "train");
        tc.beta1 = opt_double(t, "beta1", tc.beta1, "train");
        tc.beta2 = opt_double(t, "beta2", tc.beta2, "train");
        tc.eps = opt_double(t, "eps", tc.eps, "train");
        tc.batch_size = opt_int(t, "batch_size", tc.batch_size, "train");
        tc.max_epochs = opt_int(t, "max_epochs", tc.max_epochs, "train");
        tc.patience = opt_int(t, "patience", tc.patience, "train");
        tc.hidden = opt_int(t, "hidden", tc.hidden, "train");
        tc.ff_dim = opt_int(t, "ff_dim", tc.ff_dim, "train");
    }

    cfg.jobs = opt_int(root, "jobs", cfg.jobs, "config root");
    if (cfg.jobs < 1) throw_config("jobs must be at least 1");
    return cfg;
}

uint64_t config_hash(const RunConfig& cfg) {
    // Manifest content, not path: the same corpus moved elsewhere is the
    // same experiment.
    std::ifstream in(cfg.manifest, std::ios::binary);
    if (!in) throw_data("cannot open manifest for hashing: " + cfg.manifest);
    uint64_t manifest_hash = 14695981039346656037ull;
    char buf[65536];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            manifest_hash ^= uint8_t(buf[i]);
            manifest_hash *= 1099511628211ull;
        }
    }

    std::ostringstream canon;
    canon << "manifest=" << manifest_hash << '\n';
    canon << "task=" << task_name(cfg.task) << '\n';
    canon << "modalities=";
    for (SoundCategory c : cfg.modalities) canon << sound_category_name(c) << ',';
    canon << '\n';
    canon << "seeds=";
    for (uint64_t s : cfg.seeds) canon << s << ',';
    canon << '\n';
    canon << "filter.country=" << (cfg.filter.country ? *cfg.filter.country : "") << '\n';
    canon << "filter.age_min=" << (cfg.filter.age_min ? *cfg.filter.age_min : -1) << '\n';
    canon << "filter.age_max=" << (cfg.filter.age_max ? *cfg.filter.age_max : -1) << '\n';
    canon << "filter.require_quality=" << cfg.filter.require_quality << '\n';
    canon << "variant_cutoff=" << cfg.variant_cutoff.to_string() << '\n';
    canon << "stats.subsample_cap=" << cfg.stats.subsample_cap << '\n';
    canon << "stats.seed=" << cfg.stats.seed << '\n';
    char num[32];
    std::snprintf(num, sizeof num, "%.17g", cfg.train.learning_rate);
    canon << "train.learning_rate=" << num << '\n';
    std::snprintf(num, sizeof num, "%.17g", cfg.train.beta1);
    canon << "train.beta1=" << num << '\n';
    std::snprintf(num, sizeof num, "%.17g", cfg.train.beta2);
    canon << "train.beta2=" << num << '\n';
    std::snprintf(num, sizeof num, "%.17g", cfg.train.eps);
    canon << "train.eps=" << num << '\n';
    canon << "train.batch_size=" << cfg.train.batch_size << '\n';
    canon << "train.max_epochs=" << cfg.train.max_epochs << '\n';
    canon << "train.patience=" << cfg.train.patience << '\n';
    canon << "train.hidden=" << cfg.train.hidden << '\n';
    canon << "train.ff_dim=" << cfg.train.ff_dim << '\n';
    return fnv1a64(canon.str());
}

std::string config_hash_hex(const RunConfig& cfg) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
    return buf;
}

}  // namespace rvk
