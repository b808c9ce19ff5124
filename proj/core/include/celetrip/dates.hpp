#pragma once

#include <optional>
#include <string>
#include <vector>

#include "celetrip/corpus.hpp"
#include "celetrip/date.hpp"

namespace celetrip {

enum class DateKind { Absolute, Relative };

struct DateMatch {
    size_t begin = 0;  // character span [begin, end)
    size_t end = 0;
    DateKind kind = DateKind::Absolute;
    std::optional<Date> resolved;
};

// Rule-based date extraction. Absolute patterns carry their own year and
// always resolve; relative patterns (month-day forms, weekday names,
// yesterday/today/tomorrow, last/next <weekday>) resolve only against a
// known publish date. Matches are non-overlapping, longest match wins,
// and calendar-invalid combinations are skipped.
std::vector<DateMatch> extract_dates(const std::string& text,
                                     std::optional<Date> publish_date);

// Fills article.mentioned_dates with the deduplicated, sorted resolved
// dates found in its text.
void annotate_corpus_dates(Corpus& corpus);

}  // namespace celetrip
