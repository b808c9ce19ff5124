#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "celetrip/corpus.hpp"

namespace celetrip {

enum class FeatureClass { Country, Region, City, Other };

std::optional<FeatureClass> parse_feature_class(const std::string& s);
std::string feature_class_name(FeatureClass f);

struct GazetteerEntry {
    std::string id;
    std::string canonical;
    std::vector<std::string> aliases;
    std::vector<std::string> admin_chain;  // ancestor canonical names, country first
    FeatureClass feature_class = FeatureClass::Other;
};

struct LocationMention {
    std::string surface;
    std::string canonical;
    std::string gazetteer_id;
    int sentence_index = 0;
    int token_begin = 0;  // [begin, end) over raw sentence tokens
    int token_end = 0;
};

class GazetteerError : public std::runtime_error {
public:
    explicit GazetteerError(const std::string& msg) : std::runtime_error(msg) {}
};

// Case-insensitive longest-match index over canonical names and aliases.
// Surface-form ties prefer the more specific feature class
// (city > region > country > other), then the lexicographically
// smallest id.
class GazetteerIndex {
public:
    static GazetteerIndex from_entries(std::vector<GazetteerEntry> entries);

    const std::vector<GazetteerEntry>& entries() const { return entries_; }
    const GazetteerEntry* entry_by_id(const std::string& id) const;

    // Normalized multi-token surface lookup ("nyc" -> New York City).
    const GazetteerEntry* lookup(const std::string& surface) const;

    int max_surface_tokens() const { return max_surface_tokens_; }

    // True when `ancestor` appears in the admin chain of `entry`.
    bool is_admin_ancestor(const std::string& ancestor_canonical,
                           const GazetteerEntry& entry) const;

private:
    std::vector<GazetteerEntry> entries_;
    std::unordered_map<std::string, size_t> by_id_;
    std::unordered_map<std::string, size_t> by_surface_;  // normalized -> entry
    int max_surface_tokens_ = 0;
};

// TSV columns: id, canonical, aliases (|-separated), admin_chain
// (>-separated, country first), feature_class. Cyclic admin ancestry is a
// load error naming the ids involved.
GazetteerIndex build_gazetteer_index(const std::string& path);
GazetteerIndex parse_gazetteer(const std::string& tsv, const std::string& origin = "<memory>");

// Longest-match scan over raw sentence tokens; possessives are stripped
// before lookup and overlapping shorter matches are suppressed.
std::vector<LocationMention> match_locations(const Article& article,
                                             const GazetteerIndex& index);

// Per-article containment resolution: a location that is an admin
// ancestor of a co-occurring location is dropped. Returns the surviving
// canonical names, deduplicated and sorted.
std::vector<std::string> resolve_containment(const std::vector<LocationMention>& mentions,
                                             const GazetteerIndex& index);

struct ArticleGeo {
    std::vector<LocationMention> mentions;
    std::vector<std::string> candidates;  // canonicals after containment resolution
};

// Runs match_locations + resolve_containment over the whole corpus.
std::unordered_map<std::string, ArticleGeo> extract_geo_corpus(const Corpus& corpus,
                                                               const GazetteerIndex& index);

std::unordered_map<std::string, std::vector<std::string>> article_candidate_map(
    const std::unordered_map<std::string, ArticleGeo>& geo);

}  // namespace celetrip
