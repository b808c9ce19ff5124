#include "celetrip/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

namespace celetrip {

std::vector<double> WordVectors::vector_for(const std::string& stem) const {
    auto it = vocab.find(stem);
    if (it == vocab.end()) return std::vector<double>(size_t(dim()), 0.0);
    const double* row = &matrix.data[size_t(it->second) * matrix.cols];
    return std::vector<double>(row, row + matrix.cols);
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

CbowResult train_cbow(const Corpus& corpus, const CbowOptions& opts) {
    // Collect sentences and count stems.
    std::vector<std::vector<std::string>> sentences;
    std::map<std::string, long> counts;
    for (const auto& art : corpus.articles()) {
        for (const auto& sent : art.sentences) {
            if (sent.empty()) continue;
            sentences.push_back(sent);
            for (const auto& w : sent) counts[w]++;
        }
    }
    std::vector<std::pair<std::string, long>> by_freq;
    for (const auto& [w, c] : counts)
        if (c >= opts.min_count) by_freq.emplace_back(w, c);
    if (by_freq.empty()) throw FeatureError("train_cbow: corpus has no stems");
    std::sort(by_freq.begin(), by_freq.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    WordVectors wv;
    wv.matrix = DenseMatrix(int(by_freq.size()), opts.dim);
    wv.words.reserve(by_freq.size());
    for (int i = 0; i < int(by_freq.size()); i++) {
        wv.vocab[by_freq[i].first] = i;
        wv.words.push_back(by_freq[i].first);
    }
    const int V = wv.matrix.rows;
    const int D = opts.dim;

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unif(-0.5 / D, 0.5 / D);
    for (auto& x : wv.matrix.data) x = unif(rng);
    DenseMatrix output(V, D);  // context ("output") vectors start at zero

    // Unigram^0.75 negative-sampling table.
    std::vector<double> cdf(V);
    double acc = 0.0;
    for (int i = 0; i < V; i++) {
        acc += std::pow(double(by_freq[i].second), 0.75);
        cdf[i] = acc;
    }
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto sample_negative = [&]() {
        double r = u01(rng) * acc;
        return int(std::lower_bound(cdf.begin(), cdf.end(), r) - cdf.begin());
    };

    long total_tokens = 0;
    for (const auto& s : sentences) total_tokens += long(s.size());
    const long steps_total = std::max<long>(1, total_tokens * opts.epochs);
    long steps_done = 0;

    CbowResult result;
    std::vector<double> h(D), grad_h(D);
    for (int epoch = 0; epoch < opts.epochs; epoch++) {
        double loss_sum = 0.0;
        long loss_count = 0;
        for (const auto& sent : sentences) {
            std::vector<int> ids;
            ids.reserve(sent.size());
            for (const auto& w : sent) {
                auto it = wv.vocab.find(w);
                if (it != wv.vocab.end()) ids.push_back(it->second);
            }
            for (size_t t = 0; t < ids.size(); t++) {
                steps_done++;
                double lr = opts.learning_rate *
                            std::max(1e-4, 1.0 - double(steps_done) / double(steps_total));
                int shrink = int(rng() % uint64_t(opts.window)) + 1;
                std::vector<int> context;
                for (int off = -shrink; off <= shrink; off++) {
                    long p = long(t) + off;
                    if (off == 0 || p < 0 || p >= long(ids.size())) continue;
                    context.push_back(ids[p]);
                }
                if (context.empty()) continue;

                std::fill(h.begin(), h.end(), 0.0);
                for (int c : context) {
                    const double* row = &wv.matrix.data[size_t(c) * D];
                    for (int k = 0; k < D; k++) h[k] += row[k];
                }
                for (int k = 0; k < D; k++) h[k] /= double(context.size());

                std::fill(grad_h.begin(), grad_h.end(), 0.0);
                double loss = 0.0;
                int target = ids[t];
                for (int n = 0; n <= opts.negatives; n++) {
                    int word;
                    double label;
                    if (n == 0) {
                        word = target;
                        label = 1.0;
                    } else {
                        word = sample_negative();
                        if (word == target) continue;
                        label = 0.0;
                    }
                    double* out_row = &output.data[size_t(word) * D];
                    double dot = 0.0;
                    for (int k = 0; k < D; k++) dot += out_row[k] * h[k];
                    double pred = sigmoid(dot);
                    loss -= label > 0.5 ? std::log(std::max(pred, 1e-12))
                                        : std::log(std::max(1.0 - pred, 1e-12));
                    double g = pred - label;
                    for (int k = 0; k < D; k++) {
                        grad_h[k] += g * out_row[k];
                        out_row[k] -= lr * g * h[k];
                    }
                }
                for (int c : context) {
                    double* row = &wv.matrix.data[size_t(c) * D];
                    for (int k = 0; k < D; k++) row[k] -= lr * grad_h[k];
                }
                loss_sum += loss;
                loss_count++;
            }
        }
        result.epoch_loss.push_back(loss_count > 0 ? loss_sum / double(loss_count) : 0.0);
    }
    result.vectors = std::move(wv);
    return result;
}

WordVectors parse_word_vectors(const std::string& text, const std::string& origin,
                               std::vector<std::string>* warnings) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw FeatureError(origin + ": empty word-vector file");
    std::istringstream header(line);
    long count = 0, dim = 0;
    if (!(header >> count >> dim) || count < 0 || dim <= 0)
        throw FeatureError(origin + ":1: expected header `count dim`");

    WordVectors wv;
    wv.matrix = DenseMatrix(int(count), int(dim));
    wv.words.resize(size_t(count));
    int line_no = 1;
    int next_row = 0;
    while (std::getline(in, line)) {
        line_no++;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        std::vector<double> vals;
        vals.reserve(size_t(dim));
        double v;
        while (ls >> v) vals.push_back(v);
        if (long(vals.size()) != dim)
            throw FeatureError(origin + ":" + std::to_string(line_no) + ": row has " +
                               std::to_string(vals.size()) + " values, expected " +
                               std::to_string(dim));
        int row;
        auto it = wv.vocab.find(word);
        if (it != wv.vocab.end()) {
            row = it->second;  // last occurrence wins
            if (warnings)
                warnings->push_back(origin + ":" + std::to_string(line_no) +
                                    ": duplicate word '" + word + "', keeping last");
        } else {
            if (next_row >= int(count))
                throw FeatureError(origin + ":" + std::to_string(line_no) +
                                   ": more rows than the declared count " +
                                   std::to_string(count));
            row = next_row++;
            wv.vocab[word] = row;
            wv.words[size_t(row)] = word;
        }
        std::copy(vals.begin(), vals.end(), wv.matrix.data.begin() + size_t(row) * dim);
    }
    if (next_row != int(count)) {
        // Duplicates shrink the distinct-word count; compact the matrix.
        wv.matrix.rows = next_row;
        wv.matrix.data.resize(size_t(next_row) * size_t(dim));
        wv.words.resize(size_t(next_row));
    }
    return wv;
}

WordVectors load_word_vectors(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FeatureError("cannot open word-vector file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_word_vectors(buf.str(), path);
}

std::string format_word_vectors(const WordVectors& wv) {
    std::ostringstream out;
    out.precision(17);
    out << wv.matrix.rows << " " << wv.matrix.cols << "\n";
    for (int i = 0; i < wv.matrix.rows; i++) {
        out << wv.words[size_t(i)];
        for (int k = 0; k < wv.matrix.cols; k++)
            out << " " << wv.matrix.at(i, k);
        out << "\n";
    }
    return out.str();
}

void save_word_vectors(const WordVectors& wv, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FeatureError("cannot write word-vector file: " + path);
    out << format_word_vectors(wv);
}

TfidfModel tfidf_fit(const std::vector<const Article*>& articles, int max_features) {
    std::map<std::string, long> df;
    for (const Article* art : articles) {
        std::set<std::string> seen;
        for (const auto& sent : art->sentences)
            for (const auto& w : sent) seen.insert(w);
        for (const auto& w : seen) df[w]++;
    }
    std::vector<std::pair<std::string, long>> ranked(df.begin(), df.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (int(ranked.size()) > max_features) ranked.resize(size_t(max_features));
    std::sort(ranked.begin(), ranked.end());  // stable component order

    TfidfModel model;
    const double n = double(articles.size());
    for (const auto& [w, d] : ranked) {
        model.index[w] = int(model.vocab.size());
        model.vocab.push_back(w);
        model.idf.push_back(std::log((1.0 + n) / (1.0 + double(d))) + 1.0);
    }
    return model;
}

TfidfModel tfidf_fit(const Corpus& corpus, int max_features) {
    std::vector<const Article*> arts;
    arts.reserve(corpus.size());
    for (const auto& a : corpus.articles()) arts.push_back(&a);
    return tfidf_fit(arts, max_features);
}

std::vector<double> tfidf_transform(const Article& article, const TfidfModel& model) {
    std::vector<double> vec(model.vocab.size(), 0.0);
    long total = 0;
    std::unordered_map<int, long> counts;
    for (const auto& sent : article.sentences) {
        for (const auto& w : sent) {
            total++;
            auto it = model.index.find(w);
            if (it != model.index.end()) counts[it->second]++;
        }
    }
    if (total == 0) return vec;
    double norm_sq = 0.0;
    for (const auto& [i, c] : counts) {
        vec[size_t(i)] = (double(c) / double(total)) * model.idf[size_t(i)];
        norm_sq += vec[size_t(i)] * vec[size_t(i)];
    }
    if (norm_sq > 0.0) {
        double inv = 1.0 / std::sqrt(norm_sq);
        for (auto& x : vec) x *= inv;
    }
    return vec;
}

std::string TfidfModel::to_json() const {
    nlohmann::ordered_json j;
    j["vocab"] = vocab;
    j["idf"] = idf;
    return j.dump();
}

TfidfModel TfidfModel::from_json(const std::string& json_text) {
    auto j = nlohmann::json::parse(json_text);
    TfidfModel m;
    m.vocab = j.at("vocab").get<std::vector<std::string>>();
    m.idf = j.at("idf").get<std::vector<double>>();
    if (m.vocab.size() != m.idf.size())
        throw FeatureError("tfidf model: vocab/idf size mismatch");
    for (int i = 0; i < int(m.vocab.size()); i++) m.index[m.vocab[size_t(i)]] = i;
    return m;
}

std::vector<double> sentence_vector(const std::vector<std::string>& stems,
                                    const WordVectors& wv) {
    std::vector<double> out(size_t(wv.dim()), 0.0);
    int known = 0;
    for (const auto& w : stems) {
        auto it = wv.vocab.find(w);
        if (it == wv.vocab.end()) continue;
        known++;
        const double* row = &wv.matrix.data[size_t(it->second) * wv.matrix.cols];
        for (int k = 0; k < wv.matrix.cols; k++) out[size_t(k)] += row[k];
    }
    if (known > 0)
        for (auto& x : out) x /= double(known);
    return out;
}

}  // namespace celetrip
