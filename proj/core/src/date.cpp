#include "celetrip/date.hpp"

#include <cctype>
#include <cstdio>

namespace celetrip {

std::string Date::to_iso() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

std::optional<Date> Date::parse_iso(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    for (size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return std::nullopt;
    }
    Date d{std::stoi(s.substr(0, 4)), std::stoi(s.substr(5, 2)),
           std::stoi(s.substr(8, 2))};
    if (!d.valid()) return std::nullopt;
    return d;
}

}  // namespace celetrip
