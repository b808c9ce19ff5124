#include "celetrip/graphs.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "celetrip/text.hpp"

namespace celetrip {

WordArticleGraph build_word_article_graph(const std::vector<const Article*>& articles,
                                          const std::string& location,
                                          const std::string& celebrity,
                                          const WordVectors& wv, const TfidfModel& tfidf,
                                          int window) {
    if (articles.empty())
        throw GraphError("word-article graph: empty article set for '" + location + "'");
    if (window < 1) throw GraphError("word-article graph: window must be >= 1");

    WordArticleGraph g;
    std::unordered_map<std::string, int> word_index;
    auto intern = [&](const std::string& stem) {
        auto it = word_index.find(stem);
        if (it != word_index.end()) return it->second;
        int id = int(g.word_nodes.size());
        word_index[stem] = id;
        g.word_nodes.push_back(stem);
        return id;
    };

    // First pass interns words in first-occurrence order and collects the
    // per-sentence stem ids and the per-article occurrence sets.
    std::vector<std::vector<std::vector<int>>> article_sentences(articles.size());
    for (size_t a = 0; a < articles.size(); a++) {
        g.article_nodes.push_back(articles[a]->id);
        for (const auto& sent : articles[a]->sentences) {
            std::vector<int> ids;
            ids.reserve(sent.size());
            for (const auto& stem : sent) ids.push_back(intern(stem));
            article_sentences[a].push_back(std::move(ids));
        }
    }

    auto stems_of = [](const std::string& name) {
        std::vector<std::string> stems;
        for (const auto& sent : preprocess(name))
            stems.insert(stems.end(), sent.begin(), sent.end());
        return stems;
    };
    auto resolve_name = [&](const std::string& name, const char* role) {
        std::vector<int> idx;
        auto stems = stems_of(name);
        if (stems.empty())
            throw GraphError(std::string("word-article graph: ") + role + " '" + name +
                             "' has no content stems");
        for (const auto& s : stems) {
            auto it = word_index.find(s);
            if (it == word_index.end())
                throw GraphError(std::string("word-article graph: ") + role + " stem '" +
                                 s + "' of '" + name + "' absent from the articles");
            if (std::find(idx.begin(), idx.end(), it->second) == idx.end())
                idx.push_back(it->second);
        }
        return idx;
    };
    g.lw_idx = resolve_name(location, "location");
    g.cw_idx = resolve_name(celebrity, "celebrity");

    const int iota = g.word_count();
    const int tau = g.article_count();
    const int n = iota + tau;
    g.adjacency = DenseMatrix(n, n);
    for (int i = 0; i < n; i++) g.adjacency.at(i, i) = 1.0;
    auto connect = [&](int i, int j) {
        g.adjacency.at(i, j) = 1.0;
        g.adjacency.at(j, i) = 1.0;
    };

    for (size_t a = 0; a < articles.size(); a++) {
        const int article_node = iota + int(a);
        for (const auto& ids : article_sentences[a]) {
            for (size_t i = 0; i < ids.size(); i++) {
                connect(ids[i], article_node);
                // Pair stems within `window` consecutive tokens.
                const size_t last = std::min(ids.size(), i + size_t(window));
                for (size_t j = i + 1; j < last; j++) connect(ids[i], ids[j]);
            }
        }
    }

    g.word_features = DenseMatrix(iota, wv.dim());
    for (int i = 0; i < iota; i++) {
        auto vec = wv.vector_for(g.word_nodes[size_t(i)]);
        std::copy(vec.begin(), vec.end(), g.word_features.data.begin() + size_t(i) * wv.dim());
    }
    g.article_features = DenseMatrix(tau, tfidf.dim());
    for (int a = 0; a < tau; a++) {
        auto vec = tfidf_transform(*articles[size_t(a)], tfidf);
        std::copy(vec.begin(), vec.end(),
                  g.article_features.data.begin() + size_t(a) * tfidf.dim());
    }
    return g;
}

KnowledgeBase KnowledgeBase::from_strings(const std::string& triples_tsv,
                                          const std::string& entity_vec_text,
                                          const std::string& relation_vec_text) {
    KnowledgeBase kb;
    std::istringstream in(triples_tsv);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cols;
        std::string cur;
        for (char c : line) {
            if (c == '\t') {
                cols.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        cols.push_back(cur);
        if (cols.size() != 3)
            throw GraphError("kb triples line " + std::to_string(line_no) +
                             ": expected head<TAB>relation<TAB>tail");
        kb.triples_.push_back(KbTriple{cols[0], cols[1], cols[2]});
    }
    kb.entity_vectors_ = parse_word_vectors(entity_vec_text, "<kb entities>");
    kb.relation_vectors_ = parse_word_vectors(relation_vec_text, "<kb relations>");
    if (kb.entity_vectors_.dim() != kb.relation_vectors_.dim())
        throw GraphError("kb: entity and relation embedding dimensions differ");
    kb.dim_ = kb.entity_vectors_.dim();

    auto add_label = [&](const std::string& label) {
        std::string key = normalize_phrase(label);
        if (!key.empty() && !kb.labels_.count(key)) kb.labels_[key] = label;
    };
    for (const auto& t : kb.triples_) {
        add_label(t.head);
        add_label(t.tail);
        kb.by_entity_[normalize_phrase(t.head)].push_back(t);
        kb.by_entity_[normalize_phrase(t.tail)].push_back(t);
    }
    for (const auto& w : kb.entity_vectors_.words) add_label(w);
    return kb;
}

KnowledgeBase KnowledgeBase::load(const std::string& triples_path,
                                  const std::string& entity_vec_path,
                                  const std::string& relation_vec_path) {
    auto slurp = [](const std::string& path) {
        std::ifstream in(path);
        if (!in) throw GraphError("cannot open kb file: " + path);
        std::stringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    return from_strings(slurp(triples_path), slurp(entity_vec_path),
                        slurp(relation_vec_path));
}

std::optional<std::string> KnowledgeBase::link(const std::string& surface) const {
    auto it = labels_.find(normalize_phrase(surface));
    if (it == labels_.end()) return std::nullopt;
    return it->second;
}

const std::vector<KbTriple>& KnowledgeBase::triples_of(const std::string& entity_label) const {
    static const std::vector<KbTriple> kEmpty;
    auto it = by_entity_.find(normalize_phrase(entity_label));
    return it == by_entity_.end() ? kEmpty : it->second;
}

std::vector<double> KnowledgeBase::entity_embedding(const std::string& entity_label) const {
    // Embedding files may key either the raw or the normalized label.
    if (entity_vectors_.contains(entity_label))
        return entity_vectors_.vector_for(entity_label);
    return entity_vectors_.vector_for(normalize_phrase(entity_label));
}

std::vector<double> KnowledgeBase::relation_embedding(const std::string& relation) const {
    return relation_vectors_.vector_for(relation);
}

EntitySubgraph build_entity_subgraph(const std::string& entity_label,
                                     const KnowledgeBase& kb) {
    EntitySubgraph g;
    g.center = entity_label;
    g.nodes.push_back(entity_label);
    std::unordered_map<std::string, int> node_index{{normalize_phrase(entity_label), 0}};

    const std::string center_key = normalize_phrase(entity_label);
    std::vector<std::pair<int, std::string>> edges;
    for (const auto& t : kb.triples_of(entity_label)) {
        const bool center_is_head = normalize_phrase(t.head) == center_key;
        const std::string& other = center_is_head ? t.tail : t.head;
        const std::string other_key = normalize_phrase(other);
        auto it = node_index.find(other_key);
        int idx;
        if (it == node_index.end()) {
            idx = int(g.nodes.size());
            node_index[other_key] = idx;
            g.nodes.push_back(other);
        } else {
            idx = it->second;
        }
        g.edges.push_back(EntitySubgraph::Edge{idx, t.relation});
    }

    const int dim = kb.embedding_dim();
    g.node_init = DenseMatrix(int(g.nodes.size()), dim);
    for (size_t i = 0; i < g.nodes.size(); i++) {
        auto vec = kb.entity_embedding(g.nodes[i]);
        std::copy(vec.begin(), vec.end(), g.node_init.data.begin() + i * size_t(dim));
    }
    g.relation_init = DenseMatrix(int(g.edges.size()), dim);
    for (size_t e = 0; e < g.edges.size(); e++) {
        auto vec = kb.relation_embedding(g.edges[e].relation);
        std::copy(vec.begin(), vec.end(), g.relation_init.data.begin() + e * size_t(dim));
    }
    return g;
}

TripGraphStructure build_trip_graph(
    const Corpus& corpus, const std::vector<std::string>& candidates,
    const std::vector<std::vector<std::string>>& per_location_articles) {
    if (candidates.empty()) throw GraphError("trip graph: no candidate locations");
    if (candidates.size() != per_location_articles.size())
        throw GraphError("trip graph: candidates and article sets differ in length");

    TripGraphStructure g;
    g.locations = candidates;
    g.location_articles = per_location_articles;
    g.labels.assign(candidates.size(), -1);

    // Collect entity/event surfaces per location, interning nodes in
    // first-occurrence order.
    std::unordered_map<std::string, int> entity_index;
    std::unordered_map<std::string, int> event_index;
    std::vector<std::set<int>> loc_entities(candidates.size());
    std::vector<std::set<int>> loc_events(candidates.size());
    for (size_t l = 0; l < candidates.size(); l++) {
        for (const auto& id : per_location_articles[l]) {
            const Article* art = corpus.find(id);
            if (!art) throw GraphError("trip graph: unknown article id " + id);
            for (const auto& m : art->mentions) {
                const std::string key = normalize_phrase(m.surface);
                if (key.empty()) continue;
                switch (m.type) {
                    case EntityType::Person:
                    case EntityType::Norp:
                    case EntityType::Facility:
                    case EntityType::Organization: {
                        auto it = entity_index.find(key);
                        int idx;
                        if (it == entity_index.end()) {
                            idx = int(g.entities.size());
                            entity_index[key] = idx;
                            g.entities.push_back(key);
                        } else {
                            idx = it->second;
                        }
                        loc_entities[l].insert(idx);
                        break;
                    }
                    case EntityType::Event: {
                        auto it = event_index.find(key);
                        int idx;
                        if (it == event_index.end()) {
                            idx = int(g.events.size());
                            event_index[key] = idx;
                            g.events.push_back(key);
                        } else {
                            idx = it->second;
                        }
                        loc_events[l].insert(idx);
                        break;
                    }
                    default:
                        break;
                }
            }
        }
    }

    const int k = g.location_count(), n = g.entity_count(), m = g.event_count();
    const int total = k + n + m;
    g.adjacency = DenseMatrix(total, total);
    for (int i = 0; i < total; i++) g.adjacency.at(i, i) = 1.0;
    for (int l = 0; l < k; l++) {
        for (int e : loc_entities[size_t(l)]) {
            g.adjacency.at(l, k + e) = 1.0;
            g.adjacency.at(k + e, l) = 1.0;
        }
        for (int ev : loc_events[size_t(l)]) {
            g.adjacency.at(l, k + n + ev) = 1.0;
            g.adjacency.at(k + n + ev, l) = 1.0;
        }
    }
    return g;
}

}  // namespace celetrip
