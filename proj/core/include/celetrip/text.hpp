#pragma once

#include <string>
#include <vector>

namespace celetrip {

// Sentence-split on [.!?] runs, then tokenize each sentence.
// A token is a maximal run of alphanumerics, possibly joined by single
// internal apostrophes ("Korea's", "don't"). Original casing is kept so
// entity and gazetteer matching can see the raw surface.
std::vector<std::vector<std::string>> tokenize_sentences(const std::string& text);

std::vector<std::string> tokenize(const std::string& text);

std::string lowercase(const std::string& s);

// Drops a trailing "'s" or bare "'" from a token.
std::string strip_possessive(const std::string& token);

// Canonical comparison key for surface forms: tokenize, lowercase, strip
// possessives, join with single spaces ("North  Korea's" -> "north korea").
std::string normalize_phrase(const std::string& s);

// Fixed English stopword list shipped with the library (checked against
// the lowercased, possessive-stripped form of a token).
bool is_stopword(const std::string& lower_token);
const std::vector<std::string>& stopword_list();

// Porter (1980) stemming algorithm, original rule set. Expects a
// lowercase word; words of length <= 2 are returned unchanged.
std::string porter_stem(const std::string& word);

// Lowercase, strip possessives and punctuation, drop stopwords, stem.
// Empty result is allowed (a sentence may consist of stopwords only).
std::vector<std::string> stem_tokens(const std::vector<std::string>& raw_tokens);

// Full preprocessing pipeline: one stemmed token list per sentence.
// Sentence count matches tokenize_sentences(text); individual sentences
// may come back empty.
std::vector<std::vector<std::string>> preprocess(const std::string& text);

}  // namespace celetrip
