#include "rvk/manifest.hpp"

#include "rvk/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace rvk {

namespace {

const std::array<SoundCategory, kNumSoundCategories> kCategories = {
    SoundCategory::breathing_deep,  SoundCategory::breathing_shallow,
    SoundCategory::cough_heavy,     SoundCategory::cough_shallow,
    SoundCategory::counting_fast,   SoundCategory::counting_normal,
    SoundCategory::vowel_a,         SoundCategory::vowel_e,
    SoundCategory::vowel_o,
};

const std::array<std::string, kNumSoundCategories> kCategoryNames = {
    "breathing_deep",  "breathing_shallow", "cough_heavy",
    "cough_shallow",   "counting_fast",     "counting_normal",
    "vowel_a",         "vowel_e",           "vowel_o",
};

const std::array<Symptom, kNumSymptoms> kSymptoms = {
    Symptom::cough,         Symptom::fever,
    Symptom::sore_throat,   Symptom::muscle_pain,
    Symptom::loss_of_smell, Symptom::breathing_difficulty,
    Symptom::diarrhea,      Symptom::cold,
    Symptom::fatigue,
};

const std::array<std::string, kNumSymptoms> kSymptomNames = {
    "cough",         "fever",    "sore_throat",          "muscle_pain",
    "loss_of_smell", "breathing_difficulty", "diarrhea", "cold",
    "fatigue",
};

const std::array<std::string, 3> kSubjectCategoryNames = {"healthy", "delta", "omicron"};

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::optional<int> parse_int(const std::string& s) {
    if (s.empty()) return std::nullopt;
    size_t i = (s[0] == '-') ? 1 : 0;
    if (i == s.size()) return std::nullopt;
    long v = 0;
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') return std::nullopt;
        v = v * 10 + (s[i] - '0');
        if (v > std::numeric_limits<int>::max()) return std::nullopt;
    }
    return static_cast<int>(s[0] == '-' ? -v : v);
}

}  // namespace

const std::array<SoundCategory, kNumSoundCategories>& all_sound_categories() {
    return kCategories;
}

const std::string& sound_category_name(SoundCategory c) {
    return kCategoryNames[static_cast<size_t>(c)];
}

std::optional<SoundCategory> parse_sound_category(const std::string& name) {
    for (size_t i = 0; i < kCategoryNames.size(); ++i)
        if (kCategoryNames[i] == name) return kCategories[i];
    return std::nullopt;
}

const std::string& subject_category_name(SubjectCategory c) {
    return kSubjectCategoryNames[static_cast<size_t>(c)];
}

const std::array<Symptom, kNumSymptoms>& all_symptoms() { return kSymptoms; }

const std::string& symptom_name(Symptom s) { return kSymptomNames[static_cast<size_t>(s)]; }

std::optional<Symptom> parse_symptom(const std::string& name) {
    for (size_t i = 0; i < kSymptomNames.size(); ++i)
        if (kSymptomNames[i] == name) return kSymptoms[i];
    return std::nullopt;
}

ManifestLoadResult load_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_data("cannot open manifest: " + path);

    std::vector<std::string> header;
    if (!csv::read_record(in, header)) throw_data("manifest is empty: " + path);

    // Column lookup by header name; fixed columns plus one per sound category.
    std::unordered_map<std::string, size_t> col;
    for (size_t i = 0; i < header.size(); ++i) col[trim(header[i])] = i;

    auto need = [&](const std::string& name) {
        auto it = col.find(name);
        if (it == col.end()) throw_data("manifest missing column: " + name);
        return it->second;
    };

    const size_t c_id = need("subject_id");
    const size_t c_cat = need("category");
    const size_t c_age = need("age");
    const size_t c_gender = need("gender");
    const size_t c_country = need("country");
    const size_t c_severity = need("severity");
    const size_t c_symptoms = need("symptoms");
    const size_t c_date = need("record_date");
    const size_t c_quality = need("quality_ok");
    std::array<size_t, kNumSoundCategories> c_sound{};
    for (int i = 0; i < kNumSoundCategories; ++i) c_sound[i] = need(kCategoryNames[i]);

    ManifestLoadResult out;
    std::vector<std::string> fields;
    size_t row = 1;
    while (csv::read_record(in, fields)) {
        ++row;
        if (fields.size() == 1 && trim(fields[0]).empty()) continue;
        auto fail = [&](const std::string& msg) { out.errors.push_back({row, msg}); };
        if (fields.size() != header.size()) {
            std::ostringstream msg;
            msg << "expected " << header.size() << " fields, got " << fields.size();
            fail(msg.str());
            continue;
        }

        SubjectRecord rec;
        rec.subject_id = trim(fields[c_id]);
        if (rec.subject_id.empty()) {
            fail("empty subject_id");
            continue;
        }

        const std::string cat = trim(fields[c_cat]);
        if (cat == "healthy") {
            rec.status = CovidStatus::healthy;
            rec.category = SubjectCategory::healthy;
        } else if (cat == "positive") {
            rec.status = CovidStatus::positive;
        } else {
            fail("unknown category: " + cat);
            continue;
        }

        auto age = parse_int(trim(fields[c_age]));
        if (!age) {
            fail("bad age: " + fields[c_age]);
            continue;
        }
        rec.age = *age;

        const std::string gender = trim(fields[c_gender]);
        if (gender == "male") rec.gender = Gender::male;
        else if (gender == "female") rec.gender = Gender::female;
        else if (gender == "other" || gender.empty()) rec.gender = Gender::other;
        else {
            fail("unknown gender: " + gender);
            continue;
        }

        rec.country = trim(fields[c_country]);

        const std::string sev = trim(fields[c_severity]);
        if (!sev.empty()) {
            if (sev == "asymptomatic") rec.severity = Severity::asymptomatic;
            else if (sev == "mild") rec.severity = Severity::mild;
            else if (sev == "moderate") rec.severity = Severity::moderate;
            else {
                fail("unknown severity: " + sev);
                continue;
            }
        }

        bool symptom_err = false;
        std::stringstream tags(fields[c_symptoms]);
        std::string tag;
        while (std::getline(tags, tag, ';')) {
            tag = trim(tag);
            if (tag.empty()) continue;
            auto sym = parse_symptom(tag);
            if (!sym) {
                fail("unknown symptom: " + tag);
                symptom_err = true;
                break;
            }
            rec.symptoms.insert(*sym);
        }
        if (symptom_err) continue;

        const std::string date = trim(fields[c_date]);
        if (!date.empty()) {
            rec.record_date = Date::parse(date);
            if (!rec.record_date) {
                fail("bad record_date: " + date);
                continue;
            }
        }

        const std::string quality = trim(fields[c_quality]);
        if (quality == "1") rec.quality_ok = true;
        else if (quality == "0") rec.quality_ok = false;
        else {
            fail("quality_ok must be 0 or 1, got: " + quality);
            continue;
        }

        for (int i = 0; i < kNumSoundCategories; ++i) {
            const std::string p = trim(fields[c_sound[i]]);
            if (!p.empty()) rec.sound_paths[kCategories[i]] = p;
        }

        out.records.push_back(std::move(rec));
    }
    return out;
}

std::vector<SubjectRecord> filter_subjects(const std::vector<SubjectRecord>& records,
                                           const FilterConfig& rules) {
    std::vector<SubjectRecord> kept;
    for (const auto& r : records) {
        if (rules.country && r.country != *rules.country) continue;
        if (rules.age_min && r.age < *rules.age_min) continue;
        if (rules.age_max && r.age > *rules.age_max) continue;
        if (rules.require_quality && !r.quality_ok) continue;
        kept.push_back(r);
    }
    return kept;
}

SubjectCategory assign_variant(const SubjectRecord& record, const Date& cutoff) {
    if (record.status != CovidStatus::positive)
        throw_data("variant label requested for non-positive subject " + record.subject_id);
    if (!record.record_date)
        throw_data("subject " + record.subject_id + " has no recording date");
    return (*record.record_date < cutoff) ? SubjectCategory::delta : SubjectCategory::omicron;
}

VariantCounts apply_variant_labels(std::vector<SubjectRecord>& records, const Date& cutoff) {
    VariantCounts counts;
    for (size_t i = 0; i < records.size(); ++i) {
        auto& r = records[i];
        if (r.status == CovidStatus::healthy) {
            r.category = SubjectCategory::healthy;
            ++counts.healthy;
            continue;
        }
        if (!r.record_date) {
            counts.errors.push_back({i, "subject " + r.subject_id + " has no recording date"});
            r.category.reset();
            continue;
        }
        r.category = assign_variant(r, cutoff);
        if (*r.category == SubjectCategory::delta) ++counts.delta;
        else ++counts.omicron;
    }
    return counts;
}

std::vector<OddsRatioEntry> odds_ratios(
    const std::vector<SubjectRecord>& records,
    const std::function<bool(const SubjectRecord&)>& target) {
    if (records.empty()) throw_data("odds ratios over empty population");
    std::vector<OddsRatioEntry> table;
    table.reserve(kNumSymptoms);
    for (Symptom s : kSymptoms) {
        OddsRatioEntry e;
        e.symptom = s;
        for (const auto& r : records) {
            const bool has = r.symptoms.count(s) > 0;
            const bool tgt = target(r);
            if (has && tgt) ++e.a;
            else if (has) ++e.b;
            else if (tgt) ++e.c;
            else ++e.d;
        }
        if (e.a + e.b == 0 || e.c + e.d == 0 || (e.b == 0 && e.c == 0)) {
            // A margin is empty, or both "discordant" cells vanish: the ratio
            // carries no information.
            e.odds_ratio = std::numeric_limits<double>::quiet_NaN();
            e.flag = OddsFlag::degenerate;
        } else if (e.b == 0 || e.c == 0) {
            e.odds_ratio = std::numeric_limits<double>::infinity();
            e.flag = OddsFlag::infinite;
        } else {
            e.odds_ratio = (static_cast<double>(e.a) * static_cast<double>(e.d)) /
                           (static_cast<double>(e.b) * static_cast<double>(e.c));
            e.flag = OddsFlag::finite;
        }
        table.push_back(e);
    }
    return table;
}

void write_odds_csv(const std::string& path, const std::vector<OddsRatioEntry>& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_data("cannot write " + path);
    csv::write_record(out, {"symptom", "a", "b", "c", "d", "odds_ratio"});
    for (const auto& e : table) {
        std::string ratio;
        switch (e.flag) {
            case OddsFlag::finite: {
                char buf[64];
                snprintf(buf, sizeof(buf), "%.6g", e.odds_ratio);
                ratio = buf;
                break;
            }
            case OddsFlag::infinite: ratio = "inf"; break;
            case OddsFlag::degenerate: ratio = "nan"; break;
        }
        csv::write_record(out, {symptom_name(e.symptom), std::to_string(e.a),
                                std::to_string(e.b), std::to_string(e.c),
                                std::to_string(e.d), ratio});
    }
    if (!out) throw_data("failed writing " + path);
}

}  // namespace rvk
