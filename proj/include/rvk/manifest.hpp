#pragma once

// Dataset manifest: subject records, inclusion filtering, variant labeling
// from recording dates, and symptom odds ratios.
//
// Manifest CSV schema (UTF-8, header required):
//   subject_id,category,age,gender,country,severity,symptoms,record_date,
//   quality_ok,<9 sound-path columns named after the sound categories>
// `category` is healthy|positive, `symptoms` a `;`-separated tag list,
// `record_date` ISO-8601 YYYY-MM-DD, `quality_ok` 0|1.

#include "rvk/common.hpp"

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace rvk {

enum class SoundCategory {
    breathing_deep,
    breathing_shallow,
    cough_heavy,
    cough_shallow,
    counting_fast,
    counting_normal,
    vowel_a,
    vowel_e,
    vowel_o,
};

inline constexpr int kNumSoundCategories = 9;

// Canonical report-column order.
const std::array<SoundCategory, kNumSoundCategories>& all_sound_categories();
const std::string& sound_category_name(SoundCategory c);
std::optional<SoundCategory> parse_sound_category(const std::string& name);

enum class CovidStatus { healthy, positive };
enum class SubjectCategory { healthy, delta, omicron };

const std::string& subject_category_name(SubjectCategory c);

enum class Gender { male, female, other };
enum class Severity { asymptomatic, mild, moderate };

enum class Symptom {
    cough,
    fever,
    sore_throat,
    muscle_pain,
    loss_of_smell,
    breathing_difficulty,
    diarrhea,
    cold,
    fatigue,
};

inline constexpr int kNumSymptoms = 9;

const std::array<Symptom, kNumSymptoms>& all_symptoms();
const std::string& symptom_name(Symptom s);
std::optional<Symptom> parse_symptom(const std::string& name);

struct SubjectRecord {
    std::string subject_id;
    CovidStatus status = CovidStatus::healthy;
    // healthy immediately; delta/omicron once assign_variant has run
    std::optional<SubjectCategory> category;
    int age = 0;
    Gender gender = Gender::other;
    std::string country;
    std::optional<Severity> severity;  // present iff positive
    std::set<Symptom> symptoms;
    std::optional<Date> record_date;
    bool quality_ok = false;
    std::map<SoundCategory, std::string> sound_paths;  // absent key = no file
};

struct RowError {
    size_t row = 0;  // 1-based physical row (header is row 1)
    std::string message;
};

struct ManifestLoadResult {
    std::vector<SubjectRecord> records;
    std::vector<RowError> errors;
};

// Malformed rows land in `errors`, never silently dropped. Throws
// Error(data) on a missing file or missing required column.
ManifestLoadResult load_manifest(const std::string& path);

struct FilterConfig {
    std::optional<std::string> country = "India";
    std::optional<int> age_min = 15;
    std::optional<int> age_max = 90;
    bool require_quality = true;
};

std::vector<SubjectRecord> filter_subjects(const std::vector<SubjectRecord>& records,
                                           const FilterConfig& rules);

// Delta if the recording date precedes the cutoff, Omicron otherwise.
// Throws Error(data) for non-positive records or a missing date.
SubjectCategory assign_variant(const SubjectRecord& record, const Date& cutoff);

// Resolves `category` on every record (healthy directly, positives by date).
// Records whose variant cannot be assigned land in `errors`.
struct VariantCounts {
    size_t healthy = 0, delta = 0, omicron = 0;
    std::vector<RowError> errors;
};
VariantCounts apply_variant_labels(std::vector<SubjectRecord>& records, const Date& cutoff);

enum class OddsFlag { finite, infinite, degenerate };

struct OddsRatioEntry {
    Symptom symptom = Symptom::cough;
    int64_t a = 0;  //  symptom and target
    int64_t b = 0;  //  symptom, not target
    int64_t c = 0;  // !symptom and target
    int64_t d = 0;  // !symptom, not target
    double odds_ratio = 0.0;  // (a*d)/(b*c); inf / NaN per flag
    OddsFlag flag = OddsFlag::finite;
};

// One 2x2 table per symptom against the target predicate. Throws on an
// empty population.
std::vector<OddsRatioEntry> odds_ratios(
    const std::vector<SubjectRecord>& records,
    const std::function<bool(const SubjectRecord&)>& target);

void write_odds_csv(const std::string& path, const std::vector<OddsRatioEntry>& table);

}  // namespace rvk
