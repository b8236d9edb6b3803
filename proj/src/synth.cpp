#include "rvk/synth.hpp"

#include "rvk/csv.hpp"
#include "rvk/rng.hpp"
#include "rvk/wav.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace rvk {

namespace {

// Fundamental per modality, in canonical SoundCategory order. The class
// multiplier scales these, so every modality carries the class signal.
constexpr double kBaseHz[kNumSoundCategories] = {130.0, 170.0, 210.0, 260.0, 310.0,
                                                 360.0, 420.0, 480.0, 540.0};

// Amplitude-modulation rate in Hz: slow for breathing, burst-like for
// coughs, syllabic for counting, near-steady for vowels.
constexpr double kAmRate[kNumSoundCategories] = {0.8, 1.0, 4.0, 5.0, 2.5, 3.0, 0.3, 0.3, 0.3};

double class_multiplier(SubjectCategory c) {
    switch (c) {
        case SubjectCategory::healthy: return 1.0;
        case SubjectCategory::delta: return 1.3;
        case SubjectCategory::omicron: return 1.65;
    }
    return 1.0;
}

// Per-class probability that a subject reports each symptom, indexed by
// the Symptom enum: cough, fever, sore_throat, muscle_pain, loss_of_smell,
// breathing_difficulty, diarrhea, cold, fatigue.
constexpr double kSymptomRates[3][kNumSymptoms] = {
    {0.04, 0.04, 0.04, 0.04, 0.04, 0.04, 0.04, 0.04, 0.04},  // healthy
    {0.72, 0.60, 0.30, 0.35, 0.55, 0.40, 0.12, 0.25, 0.45},  // delta
    {0.60, 0.45, 0.68, 0.25, 0.10, 0.20, 0.10, 0.40, 0.55},  // omicron
};

struct SynthRow {
    std::string id;
    std::string category;  // manifest value: "healthy" or "positive"
    SubjectCategory sound_class = SubjectCategory::healthy;
    int age = 0;
    std::string gender;
    std::string country = "India";
    std::string severity;
    std::string symptoms;
    std::string date;
    std::string quality = "1";
};

std::string pick_gender(Rng& rng) {
    const uint64_t g = rng.below(100);
    if (g < 48) return "male";
    if (g < 96) return "female";
    return "other";
}

std::string pick_severity(Rng& rng) {
    const uint64_t s = rng.below(100);
    if (s < 25) return "asymptomatic";
    if (s < 75) return "mild";
    return "moderate";
}

std::string pick_symptoms(Rng& rng, SubjectCategory c) {
    std::string out;
    for (Symptom s : all_symptoms()) {
        if (rng.unit() < kSymptomRates[int(c)][size_t(s)]) {
            if (!out.empty()) out += ';';
            out += symptom_name(s);
        }
    }
    return out;
}

std::string format_date(int year, int month, int day) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    return buf;
}

// Delta recordings predate the 2021-12-01 variant cutoff; omicron ones
// follow it. Healthy subjects span both windows.
std::string pick_date(Rng& rng, SubjectCategory c) {
    const int day = 1 + int(rng.below(28));
    if (c == SubjectCategory::delta) return format_date(2021, 4 + int(rng.below(8)), day);
    if (c == SubjectCategory::omicron) {
        const int slot = int(rng.below(3));  // Dec 21, Jan 22, Feb 22
        return slot == 0 ? format_date(2021, 12, day) : format_date(2022, slot, day);
    }
    const int slot = int(rng.below(11));  // Apr 2021 .. Feb 2022
    if (slot < 8) return format_date(2021, 4 + slot, day);
    if (slot == 8) return format_date(2021, 12, day);
    return format_date(2022, slot - 8, day);
}

// One recording: three harmonics at a class-scaled fundamental with a
// per-recording pitch jitter, modality-specific amplitude modulation,
// edge fades, and additive gaussian noise from this recording's own
// stream.
std::vector<float> synth_wave(Rng& rng, SoundCategory modality, SubjectCategory klass,
                              double nominal_s) {
    const double rate = 44100.0;
    const double dur = nominal_s + 0.3 * rng.unit();
    const size_t n = size_t(dur * rate);

    const double jitter = 1.0 + 0.02 * rng.gaussian();
    const double f0 = kBaseHz[size_t(modality)] * class_multiplier(klass) * jitter;
    const double phase1 = rng.uniform(0.0, 2.0 * M_PI);
    const double phase2 = rng.uniform(0.0, 2.0 * M_PI);
    const double phase3 = rng.uniform(0.0, 2.0 * M_PI);
    const double am_phase = rng.uniform(0.0, 2.0 * M_PI);
    const double am_rate = kAmRate[size_t(modality)];

    std::vector<float> out;
    out.resize(n);
    for (size_t i = 0; i < n; ++i) {
        const double t = double(i) / rate;
        const double w = 2.0 * M_PI * f0 * t;
        double s = std::sin(w + phase1) + 0.5 * std::sin(2.0 * w + phase2) +
                   0.25 * std::sin(3.0 * w + phase3);
        const double am = 0.65 + 0.35 * std::sin(2.0 * M_PI * am_rate * t + am_phase);
        const double fade = std::min({1.0, t / 0.05, (dur - t) / 0.05});
        s = s * am * std::max(0.0, fade) + 0.04 * rng.gaussian();
        out[i] = float(s);
    }

    float peak = 0.0f;
    for (float v : out) peak = std::max(peak, std::abs(v));
    if (peak > 0.0f)
        for (float& v : out) v = v * 0.9f / peak;
    return out;
}

}  // namespace

int generate_corpus(const SynthConfig& cfg) {
    if (cfg.per_class < 1) throw_config("per_class must be positive");
    if (cfg.duration_s < 0.75) throw_config("duration too short for a full analysis window");
    if (cfg.out_dir.empty()) throw_config("synth output directory not set");

    const std::filesystem::path root(cfg.out_dir);
    const std::filesystem::path wav_dir = root / "wav";
    std::filesystem::create_directories(wav_dir);

    std::vector<SynthRow> rows;
    auto add_class = [&](SubjectCategory c, char prefix, const std::string& cat_field) {
        for (int i = 0; i < cfg.per_class; ++i) {
            char idbuf[16];
            std::snprintf(idbuf, sizeof idbuf, "%c%04d", prefix, i + 1);
            SynthRow row;
            row.id = idbuf;
            row.category = cat_field;
            row.sound_class = c;
            Rng rng(Rng::mix(cfg.seed, fnv1a64(row.id)));
            row.age = 18 + int(rng.below(60));
            row.gender = pick_gender(rng);
            if (c != SubjectCategory::healthy) row.severity = pick_severity(rng);
            row.symptoms = pick_symptoms(rng, c);
            row.date = pick_date(rng, c);
            rows.push_back(std::move(row));
        }
    };
    add_class(SubjectCategory::healthy, 'h', "healthy");
    add_class(SubjectCategory::delta, 'd', "positive");
    add_class(SubjectCategory::omicron, 'o', "positive");

    if (cfg.decoys) {
        // Rows the downstream stages must reject: each one trips exactly
        // one rule so the tests can count what fell where.
        auto decoy = [&](const std::string& id) {
            SynthRow row;
            row.id = id;
            row.category = "healthy";
            row.sound_class = SubjectCategory::healthy;
            Rng rng(Rng::mix(cfg.seed, fnv1a64(id)));
            row.age = 18 + int(rng.below(60));
            row.gender = pick_gender(rng);
            row.symptoms = pick_symptoms(rng, SubjectCategory::healthy);
            row.date = pick_date(rng, SubjectCategory::healthy);
            return row;
        };
        SynthRow country = decoy("x_country");
        country.country = "USA";
        SynthRow young = decoy("x_age_low");
        young.age = 12;
        SynthRow old = decoy("x_age_high");
        old.age = 93;
        SynthRow quality = decoy("x_quality");
        quality.quality = "0";
        SynthRow undated = decoy("x_nodate");
        undated.category = "positive";
        undated.sound_class = SubjectCategory::delta;
        undated.severity = "mild";
        undated.date.clear();
        rows.push_back(country);
        rows.push_back(young);
        rows.push_back(old);
        rows.push_back(quality);
        rows.push_back(undated);
    }

    std::ofstream manifest(root / "manifest.csv");
    if (!manifest) throw_data("cannot write manifest under " + cfg.out_dir);
    std::vector<std::string> header{"subject_id", "category",    "age",
                                    "gender",     "country",     "severity",
                                    "symptoms",   "record_date", "quality_ok"};
    for (SoundCategory c : all_sound_categories()) header.push_back(sound_category_name(c));
    csv::write_record(manifest, header);

    for (const SynthRow& row : rows) {
        std::vector<std::string> fields{row.id,      row.category, std::to_string(row.age),
                                        row.gender,  row.country,  row.severity,
                                        row.symptoms, row.date,    row.quality};
        for (SoundCategory c : all_sound_categories()) {
            const std::string name = row.id + "_" + sound_category_name(c) + ".wav";
            Rng rng(Rng::mix(cfg.seed, fnv1a64(row.id + "|" + sound_category_name(c))));
            const std::vector<float> wave = synth_wave(rng, c, row.sound_class, cfg.duration_s);
            write_wav16((wav_dir / name).string(), wave, 44100);
            fields.push_back("wav/" + name);
        }
        csv::write_record(manifest, fields);
    }
    if (!manifest) throw_data("short write to manifest under " + cfg.out_dir);
    return int(rows.size());
}

}  // namespace rvk
