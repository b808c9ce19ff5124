#include "celetrip/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "celetrip/text.hpp"
#include "json.hpp"

namespace celetrip {

using nlohmann::json;

std::optional<EntityType> parse_entity_type(const std::string& s) {
    static const std::unordered_map<std::string, EntityType> table = {
        {"PERSON", EntityType::Person},
        {"NORP", EntityType::Norp},
        {"FACILITY", EntityType::Facility},
        {"ORGANIZATION", EntityType::Organization},
        {"GPE_LOC", EntityType::GpeLoc},
        {"EVENT", EntityType::Event},
        {"DATE", EntityType::Date},
    };
    auto it = table.find(s);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

std::string entity_type_name(EntityType t) {
    switch (t) {
        case EntityType::Person: return "PERSON";
        case EntityType::Norp: return "NORP";
        case EntityType::Facility: return "FACILITY";
        case EntityType::Organization: return "ORGANIZATION";
        case EntityType::GpeLoc: return "GPE_LOC";
        case EntityType::Event: return "EVENT";
        case EntityType::Date: return "DATE";
    }
    return "PERSON";
}

void Corpus::add(Article article) {
    by_id_[article.id] = articles_.size();
    articles_.push_back(std::move(article));
}

const Article* Corpus::find(const std::string& id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &articles_[it->second];
}

const Article& Corpus::get(const std::string& id) const {
    const Article* a = find(id);
    if (!a) throw CorpusError("unknown article id: " + id);
    return *a;
}

namespace {

Article article_from_json(const json& obj, int line_no, const std::string& origin,
                          Corpus& corpus_for_warnings) {
    if (!obj.is_object() || !obj.contains("id") || !obj.contains("text") ||
        !obj["id"].is_string() || !obj["text"].is_string()) {
        throw CorpusError(origin + ":" + std::to_string(line_no) +
                          ": article object requires string `id` and `text`");
    }
    Article art;
    art.id = obj["id"].get<std::string>();
    art.text = obj["text"].get<std::string>();

    if (obj.contains("publish_date") && !obj["publish_date"].is_null()) {
        if (obj["publish_date"].is_string()) {
            auto d = Date::parse_iso(obj["publish_date"].get<std::string>());
            if (d) {
                art.publish_date = *d;
            } else {
                corpus_for_warnings.add_warning(
                    origin + ":" + std::to_string(line_no) + ": article " + art.id +
                    ": unparseable publish_date '" +
                    obj["publish_date"].get<std::string>() + "', loaded without one");
            }
        } else {
            corpus_for_warnings.add_warning(origin + ":" + std::to_string(line_no) +
                                            ": article " + art.id +
                                            ": publish_date is not a string, ignored");
        }
    }

    art.raw_sentences = tokenize_sentences(art.text);
    art.sentences.reserve(art.raw_sentences.size());
    for (const auto& sent : art.raw_sentences) art.sentences.push_back(stem_tokens(sent));

    if (obj.contains("mentions")) {
        if (!obj["mentions"].is_array()) {
            throw CorpusError(origin + ":" + std::to_string(line_no) +
                              ": `mentions` must be an array");
        }
        for (const auto& m : obj["mentions"]) {
            if (!m.is_object() || !m.contains("surface") || !m.contains("type") ||
                !m.contains("sentence") || !m.contains("start") || !m.contains("end")) {
                corpus_for_warnings.add_warning(origin + ":" + std::to_string(line_no) +
                                                ": article " + art.id +
                                                ": incomplete mention dropped");
                continue;
            }
            auto type = parse_entity_type(m["type"].get<std::string>());
            if (!type) {
                corpus_for_warnings.add_warning(
                    origin + ":" + std::to_string(line_no) + ": article " + art.id +
                    ": unknown mention type '" + m["type"].get<std::string>() +
                    "' dropped");
                continue;
            }
            EntityMention em;
            em.surface = m["surface"].get<std::string>();
            em.type = *type;
            em.sentence_index = m["sentence"].get<int>();
            em.token_begin = m["start"].get<int>();
            em.token_end = m["end"].get<int>();
            bool in_bounds =
                em.sentence_index >= 0 &&
                em.sentence_index < int(art.raw_sentences.size()) &&
                em.token_begin >= 0 && em.token_begin < em.token_end &&
                em.token_end <= int(art.raw_sentences[em.sentence_index].size());
            if (!in_bounds) {
                corpus_for_warnings.add_warning(origin + ":" + std::to_string(line_no) +
                                                ": article " + art.id +
                                                ": mention span out of bounds, dropped");
                continue;
            }
            art.mentions.push_back(std::move(em));
        }
    }
    return art;
}

Corpus load_corpus_stream(std::istream& in, const std::string& origin) {
    Corpus corpus;
    std::map<std::string, int> first_line_of_id;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw CorpusError(origin + ":" + std::to_string(line_no) +
                              ": malformed JSON line: " + e.what());
        }
        Article art = article_from_json(obj, line_no, origin, corpus);
        auto seen = first_line_of_id.find(art.id);
        if (seen != first_line_of_id.end()) {
            throw CorpusError(origin + ": duplicate article id '" + art.id +
                              "' on lines " + std::to_string(seen->second) + " and " +
                              std::to_string(line_no));
        }
        first_line_of_id[art.id] = line_no;
        corpus.add(std::move(art));
    }
    return corpus;
}

}  // namespace

Corpus load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CorpusError("cannot open corpus file: " + path);
    return load_corpus_stream(in, path);
}

Corpus load_corpus_from_string(const std::string& jsonl, const std::string& origin) {
    std::istringstream in(jsonl);
    return load_corpus_stream(in, origin);
}

std::vector<GroundTruthRow> parse_ground_truth(const std::string& csv,
                                               const std::string& origin) {
    std::vector<GroundTruthRow> rows;
    std::istringstream in(csv);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> parts;
        std::string cur;
        for (char c : line) {
            if (c == ',' && parts.size() < 2) {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        parts.push_back(cur);
        if (parts.size() != 3) {
            throw CorpusError(origin + ":" + std::to_string(line_no) +
                              ": expected `celebrity,date,location`");
        }
        if (line_no == 1 && lowercase(parts[0]) == "celebrity") continue;  // header
        auto date = Date::parse_iso(parts[1]);
        if (!date) {
            throw CorpusError(origin + ":" + std::to_string(line_no) +
                              ": bad ISO date '" + parts[1] + "'");
        }
        rows.push_back(GroundTruthRow{parts[0], *date, parts[2]});
    }
    return rows;
}

std::vector<GroundTruthRow> load_ground_truth(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CorpusError("cannot open ground truth file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_ground_truth(buf.str(), path);
}

bool article_mentions_name(const Article& article, const std::string& full_name) {
    std::vector<std::string> name_tokens;
    for (const auto& t : tokenize(full_name)) name_tokens.push_back(lowercase(t));
    if (name_tokens.empty()) return false;
    for (const auto& sent : article.raw_sentences) {
        if (sent.size() < name_tokens.size()) continue;
        for (size_t i = 0; i + name_tokens.size() <= sent.size(); i++) {
            bool all = true;
            for (size_t j = 0; j < name_tokens.size(); j++) {
                if (strip_possessive(lowercase(sent[i + j])) != name_tokens[j]) {
                    all = false;
                    break;
                }
            }
            if (all) return true;
        }
    }
    return false;
}

std::vector<std::string> select_articles(const Corpus& corpus, const std::string& celebrity,
                                         const Date& date) {
    std::vector<std::string> out;
    for (const auto& art : corpus.articles()) {
        bool date_ok = (art.publish_date && *art.publish_date == date) ||
                       std::find(art.mentioned_dates.begin(), art.mentioned_dates.end(),
                                 date) != art.mentioned_dates.end();
        if (!date_ok) continue;
        if (article_mentions_name(art, celebrity)) out.push_back(art.id);
    }
    return out;
}

std::vector<std::string> select_articles_for_location(
    const std::vector<std::string>& a_cd, const std::string& loc,
    const std::unordered_map<std::string, std::vector<std::string>>& article_locations) {
    std::vector<std::string> out;
    for (const auto& id : a_cd) {
        auto it = article_locations.find(id);
        if (it == article_locations.end()) continue;
        if (std::find(it->second.begin(), it->second.end(), loc) != it->second.end())
            out.push_back(id);
    }
    return out;
}

TripInstanceBuild build_trip_instances(
    const Corpus& corpus, const std::vector<GroundTruthRow>& ground_truth,
    const std::unordered_map<std::string, std::vector<std::string>>& article_locations) {
    // Group visited locations by (celebrity, date).
    std::map<std::pair<std::string, Date>, std::set<std::string>> visited;
    for (const auto& row : ground_truth)
        visited[{row.celebrity, row.date}].insert(lowercase(row.location));

    TripInstanceBuild out;
    for (const auto& [key, visited_set] : visited) {
        const auto& [celebrity, date] = key;
        auto a_cd = select_articles(corpus, celebrity, date);
        std::vector<std::string> candidates;
        for (const auto& id : a_cd) {
            auto it = article_locations.find(id);
            if (it == article_locations.end()) continue;
            for (const auto& loc : it->second) {
                if (std::find(candidates.begin(), candidates.end(), loc) ==
                    candidates.end())
                    candidates.push_back(loc);
            }
        }
        std::sort(candidates.begin(), candidates.end());

        std::set<std::string> covered;
        for (const auto& loc : candidates) {
            TripInstance inst;
            inst.celebrity = celebrity;
            inst.location = loc;
            inst.date = date;
            inst.article_ids = select_articles_for_location(a_cd, loc, article_locations);
            inst.positive = visited_set.count(lowercase(loc)) > 0;
            if (*inst.positive) covered.insert(lowercase(loc));
            out.instances.push_back(std::move(inst));
        }
        for (const auto& v : visited_set) {
            if (!covered.count(v)) {
                out.missed_trips.push_back("missed trip: " + celebrity + " " +
                                           date.to_iso() + " " + v +
                                           " (not among extracted candidates)");
            }
        }
    }
    return out;
}

}  // namespace celetrip
