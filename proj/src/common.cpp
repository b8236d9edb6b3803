#include "rvk/common.hpp"

#include <chrono>
#include <cstdio>

namespace rvk {

std::optional<Date> Date::parse(const std::string& iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
    for (size_t i = 0; i < iso.size(); ++i) {
        if (i == 4 || i == 7) continue;
        if (iso[i] < '0' || iso[i] > '9') return std::nullopt;
    }
    Date d;
    d.year = std::stoi(iso.substr(0, 4));
    d.month = std::stoi(iso.substr(5, 2));
    d.day = std::stoi(iso.substr(8, 2));
    std::chrono::year_month_day ymd{std::chrono::year{d.year},
                                    std::chrono::month{unsigned(d.month)},
                                    std::chrono::day{unsigned(d.day)}};
    if (!ymd.ok()) return std::nullopt;
    return d;
}

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

int64_t Date::to_days() const {
    std::chrono::year_month_day ymd{std::chrono::year{year},
                                    std::chrono::month{unsigned(month)},
                                    std::chrono::day{unsigned(day)}};
    return std::chrono::sys_days{ymd}.time_since_epoch().count();
}

}  // namespace rvk
