#include "celetrip/dates.hpp"

#include <algorithm>
#include <regex>
#include <set>

#include "celetrip/text.hpp"

namespace celetrip {

namespace {

const char* kMonthAlt =
    "(jan(?:uary)?|feb(?:ruary)?|mar(?:ch)?|apr(?:il)?|may|jun(?:e)?|jul(?:y)?|"
    "aug(?:ust)?|sep(?:t(?:ember)?)?|oct(?:ober)?|nov(?:ember)?|dec(?:ember)?)";

const char* kWeekdayAlt =
    "(monday|tuesday|wednesday|thursday|friday|saturday|sunday)";

int month_number(std::string name) {
    name = lowercase(name).substr(0, 3);
    static const char* abbr[12] = {"jan", "feb", "mar", "apr", "may", "jun",
                                   "jul", "aug", "sep", "oct", "nov", "dec"};
    for (int i = 0; i < 12; i++)
        if (name == abbr[i]) return i + 1;
    return 0;
}

int weekday_number(std::string name) {
    name = lowercase(name);
    static const char* days[7] = {"sunday", "monday", "tuesday", "wednesday",
                                  "thursday", "friday", "saturday"};
    for (int i = 0; i < 7; i++)
        if (name == days[i]) return i;
    return -1;
}

enum class Rule {
    MonthDayCommaYear,  // July 16, 2022
    MonthDayYear,       // July 16 2022
    DayMonthYear,       // 16 July 2022
    Iso,                // 2022-07-16
    Slash,              // 07/16/2022 (US order)
    MonthDay,           // July 16 (year from publish date)
    LastWeekday,        // last Friday
    NextWeekday,        // next Friday
    BareWeekday,        // Friday
    YesterdayToday,     // yesterday | today | tomorrow
};

struct Candidate {
    size_t begin;
    size_t end;
    Rule rule;
    std::smatch match;
};

struct Pattern {
    Rule rule;
    std::regex re;
};

const std::vector<Pattern>& patterns() {
    static const std::vector<Pattern> pats = [] {
        auto rx = [](const std::string& s) {
            return std::regex(s, std::regex::icase | std::regex::optimize);
        };
        std::string month = kMonthAlt;
        std::string wd = kWeekdayAlt;
        std::string ord = "(?:st|nd|rd|th)?";
        std::vector<Pattern> v;
        v.push_back({Rule::MonthDayCommaYear,
                     rx("\\b" + month + "\\.?\\s+(\\d{1,2})" + ord +
                        "\\s*,\\s*(\\d{4})\\b")});
        v.push_back({Rule::MonthDayYear,
                     rx("\\b" + month + "\\.?\\s+(\\d{1,2})" + ord +
                        "\\s+(\\d{4})\\b")});
        v.push_back({Rule::DayMonthYear,
                     rx("\\b(\\d{1,2})" + ord + "\\s+" + month +
                        "\\.?\\s+(\\d{4})\\b")});
        v.push_back({Rule::Iso, rx("\\b(\\d{4})-(\\d{2})-(\\d{2})\\b")});
        v.push_back({Rule::Slash, rx("\\b(\\d{1,2})/(\\d{1,2})/(\\d{4})\\b")});
        v.push_back({Rule::MonthDay,
                     rx("\\b" + month + "\\.?\\s+(\\d{1,2})" + ord + "\\b")});
        v.push_back({Rule::LastWeekday, rx("\\blast\\s+" + wd + "\\b")});
        v.push_back({Rule::NextWeekday, rx("\\bnext\\s+" + wd + "\\b")});
        v.push_back({Rule::BareWeekday, rx("\\b" + wd + "\\b")});
        v.push_back({Rule::YesterdayToday, rx("\\b(yesterday|today|tomorrow)\\b")});
        return v;
    }();
    return pats;
}

std::optional<Date> checked_date(int y, int m, int d) {
    Date date{y, m, d};
    if (!date.valid()) return std::nullopt;
    return date;
}

// Latest date with the wanted weekday at most `latest_offset` days after
// `anchor`, searching backwards from there.
Date weekday_on_or_before(const Date& anchor, int wanted, int latest_offset) {
    Date d = anchor.plus_days(latest_offset);
    while (d.weekday() != wanted) d = d.plus_days(-1);
    return d;
}

Date weekday_after(const Date& anchor, int wanted) {
    Date d = anchor.plus_days(1);
    while (d.weekday() != wanted) d = d.plus_days(1);
    return d;
}

struct Resolution {
    DateKind kind;
    std::optional<Date> date;
    bool calendar_invalid = false;  // match must be skipped entirely
};

Resolution resolve(const Candidate& c, const std::optional<Date>& publish) {
    auto absolute = [](std::optional<Date> d) {
        Resolution r{DateKind::Absolute, d, !d.has_value()};
        return r;
    };
    switch (c.rule) {
        case Rule::MonthDayCommaYear:
        case Rule::MonthDayYear:
            return absolute(checked_date(std::stoi(c.match[3]),
                                         month_number(c.match[1]),
                                         std::stoi(c.match[2])));
        case Rule::DayMonthYear:
            return absolute(checked_date(std::stoi(c.match[3]),
                                         month_number(c.match[2]),
                                         std::stoi(c.match[1])));
        case Rule::Iso:
            return absolute(checked_date(std::stoi(c.match[1]), std::stoi(c.match[2]),
                                         std::stoi(c.match[3])));
        case Rule::Slash:
            return absolute(checked_date(std::stoi(c.match[3]), std::stoi(c.match[1]),
                                         std::stoi(c.match[2])));
        case Rule::MonthDay: {
            Resolution r{DateKind::Relative, std::nullopt};
            int month = month_number(c.match[1]);
            int day = std::stoi(c.match[2]);
            // Reject combinations invalid in every year (2000 is a leap year,
            // so Feb 29 survives this check and only fails against a
            // non-leap publish year).
            if (!checked_date(2000, month, day)) {
                r.calendar_invalid = true;
                return r;
            }
            if (publish) {
                auto d = checked_date(publish->year, month, day);
                if (!d) {
                    r.calendar_invalid = true;
                } else {
                    r.date = d;
                }
            }
            return r;
        }
        case Rule::LastWeekday: {
            Resolution r{DateKind::Relative, std::nullopt};
            if (publish)
                r.date = weekday_on_or_before(*publish, weekday_number(c.match[1]), -1);
            return r;
        }
        case Rule::NextWeekday: {
            Resolution r{DateKind::Relative, std::nullopt};
            if (publish) r.date = weekday_after(*publish, weekday_number(c.match[1]));
            return r;
        }
        case Rule::BareWeekday: {
            Resolution r{DateKind::Relative, std::nullopt};
            if (publish)
                r.date = weekday_on_or_before(*publish, weekday_number(c.match[1]), 0);
            return r;
        }
        case Rule::YesterdayToday: {
            Resolution r{DateKind::Relative, std::nullopt};
            if (publish) {
                std::string w = lowercase(c.match[1]);
                int off = w == "yesterday" ? -1 : (w == "tomorrow" ? 1 : 0);
                r.date = publish->plus_days(off);
            }
            return r;
        }
    }
    return Resolution{DateKind::Relative, std::nullopt};
}

}  // namespace

std::vector<DateMatch> extract_dates(const std::string& text,
                                     std::optional<Date> publish_date) {
    std::vector<Candidate> candidates;
    for (const auto& pat : patterns()) {
        auto begin = std::sregex_iterator(text.begin(), text.end(), pat.re);
        for (auto it = begin; it != std::sregex_iterator(); ++it) {
            Candidate c;
            c.begin = size_t(it->position());
            c.end = c.begin + size_t(it->length());
            c.rule = pat.rule;
            c.match = *it;
            candidates.push_back(std::move(c));
        }
    }
    // Longest match wins at equal start; spans are consumed left to right,
    // so a skipped invalid long form does not expose its sub-patterns.
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) {
                         if (a.begin != b.begin) return a.begin < b.begin;
                         return (a.end - a.begin) > (b.end - b.begin);
                     });
    std::vector<DateMatch> out;
    size_t consumed_until = 0;
    for (const auto& c : candidates) {
        if (c.begin < consumed_until) continue;
        Resolution r = resolve(c, publish_date);
        consumed_until = c.end;
        if (r.calendar_invalid) continue;
        DateMatch m;
        m.begin = c.begin;
        m.end = c.end;
        m.kind = r.kind;
        m.resolved = r.date;
        out.push_back(m);
    }
    return out;
}

void annotate_corpus_dates(Corpus& corpus) {
    for (auto& art : corpus.articles()) {
        std::set<Date> dates;
        for (const auto& m : extract_dates(art.text, art.publish_date))
            if (m.resolved) dates.insert(*m.resolved);
        art.mentioned_dates.assign(dates.begin(), dates.end());
    }
}

}  // namespace celetrip
