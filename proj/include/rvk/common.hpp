#pragma once

// Shared error types and calendar dates.
//
// Error kinds map to the CLI exit codes: config/usage = 1, data = 2,
// numeric = 3.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rvk {

enum class ErrKind { config, data, numeric };

class Error : public std::runtime_error {
public:
    Error(ErrKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    ErrKind kind() const noexcept { return kind_; }

    int exit_code() const noexcept {
        switch (kind_) {
            case ErrKind::config: return 1;
            case ErrKind::data: return 2;
            case ErrKind::numeric: return 3;
        }
        return 3;
    }

private:
    ErrKind kind_;
};

// A clip whose post-SAD duration is below the usable minimum. Extraction
// catches this separately so the subject keeps its other modalities.
class TooShortError : public Error {
public:
    explicit TooShortError(const std::string& msg) : Error(ErrKind::data, msg) {}
};

[[noreturn]] inline void throw_config(const std::string& msg) { throw Error(ErrKind::config, msg); }
[[noreturn]] inline void throw_data(const std::string& msg) { throw Error(ErrKind::data, msg); }
[[noreturn]] inline void throw_numeric(const std::string& msg) { throw Error(ErrKind::numeric, msg); }

// 64-bit FNV-1a. Stable across platforms; used wherever a reproducible
// string hash is needed (stratum seeding, run-directory naming).
constexpr uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Calendar date, day resolution, UTC.
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    // Parses strict ISO-8601 "YYYY-MM-DD"; rejects impossible dates.
    static std::optional<Date> parse(const std::string& iso);

    std::string to_string() const;
    int64_t to_days() const;  // days since 1970-01-01

    friend bool operator==(const Date&, const Date&) = default;
    friend auto operator<=>(const Date&, const Date&) = default;
};

}  // namespace rvk
