#include "celetrip/geo.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "celetrip/text.hpp"

namespace celetrip {

namespace {

int specificity(FeatureClass f) {
    switch (f) {
        case FeatureClass::City: return 3;
        case FeatureClass::Region: return 2;
        case FeatureClass::Country: return 1;
        case FeatureClass::Other: return 0;
    }
    return 0;
}

std::string normalize_surface(const std::string& s) { return normalize_phrase(s); }

std::string normalize_tokens(const std::vector<std::string>& tokens, size_t begin,
                             size_t end) {
    std::string out;
    for (size_t i = begin; i < end; i++) {
        std::string t = strip_possessive(lowercase(tokens[i]));
        if (t.empty()) continue;
        if (!out.empty()) out.push_back(' ');
        out += t;
    }
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::optional<FeatureClass> parse_feature_class(const std::string& s) {
    std::string t = lowercase(trim(s));
    if (t == "country") return FeatureClass::Country;
    if (t == "region") return FeatureClass::Region;
    if (t == "city") return FeatureClass::City;
    if (t == "other") return FeatureClass::Other;
    return std::nullopt;
}

std::string feature_class_name(FeatureClass f) {
    switch (f) {
        case FeatureClass::Country: return "country";
        case FeatureClass::Region: return "region";
        case FeatureClass::City: return "city";
        case FeatureClass::Other: return "other";
    }
    return "other";
}

GazetteerIndex GazetteerIndex::from_entries(std::vector<GazetteerEntry> entries) {
    GazetteerIndex index;
    index.entries_ = std::move(entries);

    for (size_t i = 0; i < index.entries_.size(); i++) {
        const auto& e = index.entries_[i];
        if (e.canonical.empty())
            throw GazetteerError("gazetteer entry " + e.id + " has empty canonical name");
        if (index.by_id_.count(e.id))
            throw GazetteerError("duplicate gazetteer id: " + e.id);
        index.by_id_[e.id] = i;
    }

    // Detect cyclic admin ancestry. Chains name canonical ancestors, so we
    // walk name -> entry -> chain names.
    std::unordered_map<std::string, size_t> by_canonical;
    for (size_t i = 0; i < index.entries_.size(); i++) {
        const auto& key = normalize_surface(index.entries_[i].canonical);
        if (!by_canonical.count(key)) by_canonical[key] = i;
    }
    for (const auto& e : index.entries_) {
        std::set<std::string> seen{normalize_surface(e.canonical)};
        std::vector<std::string> frontier;
        for (const auto& a : e.admin_chain) frontier.push_back(normalize_surface(a));
        size_t steps = 0;
        while (!frontier.empty()) {
            if (++steps > index.entries_.size() * 4 + 16)
                throw GazetteerError("admin chain cycle involving id " + e.id);
            std::string name = frontier.back();
            frontier.pop_back();
            if (seen.count(name)) {
                auto it = by_canonical.find(name);
                std::string other = it == by_canonical.end()
                                        ? name
                                        : index.entries_[it->second].id;
                if (name == normalize_surface(e.canonical))
                    throw GazetteerError("admin chain cycle between ids " + e.id +
                                         " and " + other);
                continue;
            }
            seen.insert(name);
            auto it = by_canonical.find(name);
            if (it == by_canonical.end()) continue;
            for (const auto& a : index.entries_[it->second].admin_chain)
                frontier.push_back(normalize_surface(a));
        }
    }

    auto consider = [&](const std::string& surface, size_t idx) {
        std::string key = normalize_surface(surface);
        if (key.empty()) return;
        int tokens = int(std::count(key.begin(), key.end(), ' ')) + 1;
        index.max_surface_tokens_ = std::max(index.max_surface_tokens_, tokens);
        auto it = index.by_surface_.find(key);
        if (it == index.by_surface_.end()) {
            index.by_surface_[key] = idx;
            return;
        }
        const auto& incumbent = index.entries_[it->second];
        const auto& challenger = index.entries_[idx];
        int si = specificity(incumbent.feature_class);
        int sc = specificity(challenger.feature_class);
        if (sc > si || (sc == si && challenger.id < incumbent.id))
            it->second = idx;
    };
    for (size_t i = 0; i < index.entries_.size(); i++) {
        consider(index.entries_[i].canonical, i);
        for (const auto& a : index.entries_[i].aliases) consider(a, i);
    }
    return index;
}

const GazetteerEntry* GazetteerIndex::entry_by_id(const std::string& id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &entries_[it->second];
}

const GazetteerEntry* GazetteerIndex::lookup(const std::string& surface) const {
    auto it = by_surface_.find(normalize_surface(surface));
    return it == by_surface_.end() ? nullptr : &entries_[it->second];
}

bool GazetteerIndex::is_admin_ancestor(const std::string& ancestor_canonical,
                                       const GazetteerEntry& entry) const {
    std::string key = normalize_surface(ancestor_canonical);
    for (const auto& a : entry.admin_chain)
        if (normalize_surface(a) == key) return true;
    return false;
}

GazetteerIndex parse_gazetteer(const std::string& tsv, const std::string& origin) {
    std::vector<GazetteerEntry> entries;
    std::istringstream in(tsv);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto cols = split(line, '\t');
        if (cols.size() != 5)
            throw GazetteerError(origin + ":" + std::to_string(line_no) +
                                 ": expected 5 tab-separated columns, got " +
                                 std::to_string(cols.size()));
        GazetteerEntry e;
        e.id = trim(cols[0]);
        e.canonical = trim(cols[1]);
        for (const auto& a : split(cols[2], '|')) {
            std::string t = trim(a);
            if (!t.empty()) e.aliases.push_back(t);
        }
        for (const auto& a : split(cols[3], '>')) {
            std::string t = trim(a);
            if (!t.empty()) e.admin_chain.push_back(t);
        }
        auto fc = parse_feature_class(cols[4]);
        if (!fc)
            throw GazetteerError(origin + ":" + std::to_string(line_no) +
                                 ": unknown feature class '" + cols[4] + "'");
        e.feature_class = *fc;
        entries.push_back(std::move(e));
    }
    return GazetteerIndex::from_entries(std::move(entries));
}

GazetteerIndex build_gazetteer_index(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw GazetteerError("cannot open gazetteer file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_gazetteer(buf.str(), path);
}

std::vector<LocationMention> match_locations(const Article& article,
                                             const GazetteerIndex& index) {
    std::vector<LocationMention> out;
    int max_len = std::max(index.max_surface_tokens(), 1);
    for (size_t s = 0; s < article.raw_sentences.size(); s++) {
        const auto& tokens = article.raw_sentences[s];
        size_t i = 0;
        while (i < tokens.size()) {
            const GazetteerEntry* hit = nullptr;
            size_t hit_len = 0;
            size_t longest = std::min(size_t(max_len), tokens.size() - i);
            for (size_t len = longest; len >= 1; len--) {
                const GazetteerEntry* e =
                    index.lookup(normalize_tokens(tokens, i, i + len));
                if (e) {
                    hit = e;
                    hit_len = len;
                    break;
                }
            }
            if (hit) {
                LocationMention m;
                m.surface = tokens[i];
                for (size_t k = 1; k < hit_len; k++) m.surface += " " + tokens[i + k];
                m.canonical = hit->canonical;
                m.gazetteer_id = hit->id;
                m.sentence_index = int(s);
                m.token_begin = int(i);
                m.token_end = int(i + hit_len);
                out.push_back(std::move(m));
                i += hit_len;
            } else {
                i++;
            }
        }
    }
    return out;
}

std::vector<std::string> resolve_containment(const std::vector<LocationMention>& mentions,
                                             const GazetteerIndex& index) {
    std::set<std::string> canonicals;
    for (const auto& m : mentions) canonicals.insert(m.canonical);

    std::vector<std::string> out;
    for (const auto& cand : canonicals) {
        bool is_ancestor_of_other = false;
        for (const auto& other : canonicals) {
            if (other == cand) continue;
            const GazetteerEntry* e = index.lookup(other);
            if (e && index.is_admin_ancestor(cand, *e)) {
                is_ancestor_of_other = true;
                break;
            }
        }
        if (!is_ancestor_of_other) out.push_back(cand);
    }
    return out;  // set iteration keeps this sorted
}

std::unordered_map<std::string, ArticleGeo> extract_geo_corpus(const Corpus& corpus,
                                                               const GazetteerIndex& index) {
    std::unordered_map<std::string, ArticleGeo> out;
    for (const auto& art : corpus.articles()) {
        ArticleGeo g;
        g.mentions = match_locations(art, index);
        g.candidates = resolve_containment(g.mentions, index);
        out[art.id] = std::move(g);
    }
    return out;
}

std::unordered_map<std::string, std::vector<std::string>> article_candidate_map(
    const std::unordered_map<std::string, ArticleGeo>& geo) {
    std::unordered_map<std::string, std::vector<std::string>> out;
    for (const auto& [id, g] : geo) out[id] = g.candidates;
    return out;
}

}  // namespace celetrip
