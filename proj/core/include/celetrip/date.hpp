#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>

namespace celetrip {

// Proleptic Gregorian calendar date. Thin value wrapper over
// std::chrono::year_month_day so that day arithmetic and weekday
// queries stay exact across month/year boundaries and leap days.
struct Date {
    int year = 0;
    int month = 0;  // 1..12
    int day = 0;    // 1..31

    Date() = default;
    Date(int y, int m, int d) : year(y), month(m), day(d) {}

    bool valid() const {
        return std::chrono::year_month_day{
            std::chrono::year{year}, std::chrono::month{unsigned(month)},
            std::chrono::day{unsigned(day)}}
            .ok();
    }

    std::chrono::sys_days to_sys_days() const {
        return std::chrono::sys_days{std::chrono::year_month_day{
            std::chrono::year{year}, std::chrono::month{unsigned(month)},
            std::chrono::day{unsigned(day)}}};
    }

    static Date from_sys_days(std::chrono::sys_days sd) {
        std::chrono::year_month_day ymd{sd};
        return Date{int(ymd.year()), int(unsigned(ymd.month())),
                    int(unsigned(ymd.day()))};
    }

    Date plus_days(int n) const {
        return from_sys_days(to_sys_days() + std::chrono::days{n});
    }

    // 0 = Sunday .. 6 = Saturday
    int weekday() const {
        return int(std::chrono::weekday{to_sys_days()}.c_encoding());
    }

    auto operator<=>(const Date&) const = default;

    std::string to_iso() const;

    // Strict "YYYY-MM-DD"; rejects calendar-invalid combinations.
    static std::optional<Date> parse_iso(const std::string& s);
};

inline int days_between(const Date& a, const Date& b) {
    return int((b.to_sys_days() - a.to_sys_days()).count());
}

}  // namespace celetrip
