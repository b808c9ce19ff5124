#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "celetrip/date.hpp"

namespace celetrip {

enum class EntityType { Person, Norp, Facility, Organization, GpeLoc, Event, Date };

std::optional<EntityType> parse_entity_type(const std::string& s);
std::string entity_type_name(EntityType t);

struct EntityMention {
    std::string surface;
    EntityType type = EntityType::Person;
    int sentence_index = 0;
    int token_begin = 0;  // [begin, end) over the raw sentence tokens
    int token_end = 0;
};

struct Article {
    std::string id;
    std::string text;
    std::optional<Date> publish_date;
    std::vector<std::vector<std::string>> sentences;      // stemmed, stopwords removed
    std::vector<std::vector<std::string>> raw_sentences;  // original tokens
    std::vector<EntityMention> mentions;
    std::vector<Date> mentioned_dates;  // filled by annotate_corpus_dates
};

struct TripInstance {
    std::string celebrity;
    std::string location;
    Date date;
    std::vector<std::string> article_ids;
    std::optional<bool> positive;  // absent at predict time
};

struct GroundTruthRow {
    std::string celebrity;
    Date date;
    std::string location;
};

class CorpusError : public std::runtime_error {
public:
    explicit CorpusError(const std::string& msg) : std::runtime_error(msg) {}
};

class Corpus {
public:
    void add(Article article);

    size_t size() const { return articles_.size(); }
    bool empty() const { return articles_.empty(); }

    const std::vector<Article>& articles() const { return articles_; }
    std::vector<Article>& articles() { return articles_; }

    const Article* find(const std::string& id) const;
    const Article& get(const std::string& id) const;  // throws on unknown id

    const std::vector<std::string>& warnings() const { return warnings_; }
    void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

private:
    std::vector<Article> articles_;
    std::unordered_map<std::string, size_t> by_id_;
    std::vector<std::string> warnings_;
};

// JSONL loader; one article object per line with keys `id`, `text`,
// `publish_date` (ISO or null) and optional `mentions`
// ({surface, type, sentence, start, end}). Malformed lines and duplicate
// ids raise CorpusError naming the offending line numbers; an unparseable
// date only downgrades to a warning.
Corpus load_corpus(const std::string& path);
Corpus load_corpus_from_string(const std::string& jsonl, const std::string& origin = "<memory>");

// `celebrity,date,location` CSV with ISO dates and an optional header row.
std::vector<GroundTruthRow> load_ground_truth(const std::string& path);
std::vector<GroundTruthRow> parse_ground_truth(const std::string& csv, const std::string& origin = "<memory>");

// True when the full name occurs in the article: every name token, in
// order and adjacent, case-insensitive, at token boundaries (possessives
// stripped). "Trump Tower" does not match "Donald Trump".
bool article_mentions_name(const Article& article, const std::string& full_name);

// A_{c,d}: articles published on `date` or mentioning it in the text,
// and containing the celebrity's full name. Ids in corpus order.
std::vector<std::string> select_articles(const Corpus& corpus, const std::string& celebrity, const Date& date);

// A_{c,d,loc}: the subset of A_{c,d} whose extracted location set
// contains `loc`. `article_locations` maps article id -> canonical
// candidate locations from extract_geo.
std::vector<std::string> select_articles_for_location(
    const std::vector<std::string>& a_cd, const std::string& loc,
    const std::unordered_map<std::string, std::vector<std::string>>& article_locations);

struct TripInstanceBuild {
    std::vector<TripInstance> instances;
    std::vector<std::string> missed_trips;  // ground-truth locations absent from candidates
};

// For every ground-truth (celebrity, date): candidates are all locations
// extracted from A_{c,d}; each candidate becomes one labeled instance.
TripInstanceBuild build_trip_instances(
    const Corpus& corpus, const std::vector<GroundTruthRow>& ground_truth,
    const std::unordered_map<std::string, std::vector<std::string>>& article_locations);

}  // namespace celetrip
