#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "celetrip/corpus.hpp"
#include "celetrip/linalg.hpp"

namespace celetrip {

class FeatureError : public std::runtime_error {
public:
    explicit FeatureError(const std::string& msg) : std::runtime_error(msg) {}
};

struct WordVectors {
    std::unordered_map<std::string, int> vocab;  // stem -> row
    DenseMatrix matrix;                          // |V| x dim
    std::vector<std::string> words;              // row -> stem

    int dim() const { return matrix.cols; }
    // Row for a stem; out-of-vocabulary stems share a zero vector.
    std::vector<double> vector_for(const std::string& stem) const;
    bool contains(const std::string& stem) const { return vocab.count(stem) > 0; }
};

struct CbowOptions {
    int dim = 100;
    int window = 5;
    int negatives = 5;
    int epochs = 15;
    uint64_t seed = 1;
    double learning_rate = 0.05;
    int min_count = 1;
};

struct CbowResult {
    WordVectors vectors;
    std::vector<double> epoch_loss;  // mean negative-sampling loss per epoch
};

// CBOW word2vec with negative sampling over the corpus stem sentences.
// Single-threaded and fully deterministic under a fixed seed.
CbowResult train_cbow(const Corpus& corpus, const CbowOptions& opts);

// Text format: header "count dim", then "word v1 .. vD" per line.
WordVectors load_word_vectors(const std::string& path);
WordVectors parse_word_vectors(const std::string& text, const std::string& origin,
                               std::vector<std::string>* warnings = nullptr);
void save_word_vectors(const WordVectors& wv, const std::string& path);
std::string format_word_vectors(const WordVectors& wv);

struct TfidfModel {
    std::vector<std::string> vocab;            // selected stems, index = component
    std::vector<double> idf;                   // aligned with vocab
    std::unordered_map<std::string, int> index;

    int dim() const { return int(vocab.size()); }
    std::string to_json() const;
    static TfidfModel from_json(const std::string& json_text);
};

// Vocabulary = top `max_features` stems by document frequency (ties
// lexicographic); idf = ln((1+N)/(1+df)) + 1.
TfidfModel tfidf_fit(const std::vector<const Article*>& articles, int max_features = 1000);
TfidfModel tfidf_fit(const Corpus& corpus, int max_features = 1000);

// tf = raw stem count / article stem count; L2-normalized output.
std::vector<double> tfidf_transform(const Article& article, const TfidfModel& model);

// Mean of in-vocabulary stem vectors; zero vector when none are known.
std::vector<double> sentence_vector(const std::vector<std::string>& stems,
                                    const WordVectors& wv);

}  // namespace celetrip
