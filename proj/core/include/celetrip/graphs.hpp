#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "celetrip/corpus.hpp"
#include "celetrip/features.hpp"
#include "celetrip/linalg.hpp"

namespace celetrip {

class GraphError : public std::runtime_error {
public:
    explicit GraphError(const std::string& msg) : std::runtime_error(msg) {}
};

// Heterogeneous graph over the unique stems and the articles of one
// candidate location. Word nodes come first (first-occurrence order),
// then article nodes; the adjacency is symmetric 0/1 with self-loops.
struct WordArticleGraph {
    std::vector<std::string> word_nodes;
    std::vector<std::string> article_nodes;
    DenseMatrix adjacency;         // (iota+tau)^2
    DenseMatrix word_features;     // iota x wv dim
    DenseMatrix article_features;  // tau x tfidf dim
    std::vector<int> lw_idx;       // word-node indices of the location stems
    std::vector<int> cw_idx;       // word-node indices of the celebrity stems

    int word_count() const { return int(word_nodes.size()); }
    int article_count() const { return int(article_nodes.size()); }
    int node_count() const { return word_count() + article_count(); }
};

// Word-word edges connect stems co-occurring within `window` consecutive
// tokens of one sentence; article-word edges mark occurrence. Throws
// GraphError when the location or celebrity stems are absent.
WordArticleGraph build_word_article_graph(const std::vector<const Article*>& articles,
                                          const std::string& location,
                                          const std::string& celebrity,
                                          const WordVectors& wv, const TfidfModel& tfidf,
                                          int window = 15);

struct KbTriple {
    std::string head;
    std::string relation;
    std::string tail;
};

// Offline knowledge base: triples TSV plus entity/relation embedding
// files in the word-vector text format. Labels are compared through
// normalize_phrase, with no fuzzy fallback.
class KnowledgeBase {
public:
    static KnowledgeBase load(const std::string& triples_path,
                              const std::string& entity_vec_path,
                              const std::string& relation_vec_path);
    static KnowledgeBase from_strings(const std::string& triples_tsv,
                                      const std::string& entity_vec_text,
                                      const std::string& relation_vec_text);

    // Strict text matching of the normalized surface against KB labels.
    std::optional<std::string> link(const std::string& surface) const;

    const std::vector<KbTriple>& triples_of(const std::string& entity_label) const;
    std::vector<double> entity_embedding(const std::string& entity_label) const;
    std::vector<double> relation_embedding(const std::string& relation) const;
    int embedding_dim() const { return dim_; }
    size_t triple_count() const { return triples_.size(); }

private:
    std::vector<KbTriple> triples_;
    std::unordered_map<std::string, std::vector<KbTriple>> by_entity_;
    WordVectors entity_vectors_;
    WordVectors relation_vectors_;
    std::unordered_map<std::string, std::string> labels_;  // normalized -> stored
    int dim_ = 0;
};

// 1-hop neighborhood of one entity: all triples with the entity as head
// or tail, treated as undirected incidence on the center.
struct EntitySubgraph {
    std::string center;
    std::vector<std::string> nodes;  // center first, then neighbors
    struct Edge {
        int neighbor = 0;  // index into nodes
        std::string relation;
    };
    std::vector<Edge> edges;
    DenseMatrix node_init;      // per node, KB embedding dim
    DenseMatrix relation_init;  // per edge, KB embedding dim
};

EntitySubgraph build_entity_subgraph(const std::string& entity_label,
                                     const KnowledgeBase& kb);

// Per-(celebrity, date) graph over candidate locations, co-occurring
// entities and events. Locations are never directly connected; shared
// entities/events provide indirect paths.
struct TripGraphStructure {
    std::vector<std::string> locations;  // canonical names, k
    std::vector<std::string> entities;   // normalized surfaces, n
    std::vector<std::string> events;     // normalized surfaces, m
    std::vector<std::vector<std::string>> location_articles;  // per location
    DenseMatrix adjacency;  // (k+n+m)^2 with self-loops
    std::vector<int> labels;  // per location, -1 when unknown

    int location_count() const { return int(locations.size()); }
    int entity_count() const { return int(entities.size()); }
    int event_count() const { return int(events.size()); }
    int node_count() const { return location_count() + entity_count() + event_count(); }
};

// Entity nodes come from PERSON/NORP/FACILITY/ORGANIZATION mentions and
// event nodes from EVENT mentions found in each candidate's article set.
TripGraphStructure build_trip_graph(
    const Corpus& corpus, const std::vector<std::string>& candidates,
    const std::vector<std::vector<std::string>>& per_location_articles);

}  // namespace celetrip
