#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "celetrip/corpus.hpp"
#include "celetrip/features.hpp"
#include "celetrip/geo.hpp"
#include "celetrip/graphs.hpp"
#include "celetrip/model.hpp"

namespace celetrip {

class TrainError : public std::runtime_error {
public:
    explicit TrainError(const std::string& msg) : std::runtime_error(msg) {}
};

struct EvalReport {
    double precision = 0.0;  // percentages
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
    long tp = 0, fp = 0, tn = 0, fn = 0;

    std::string to_json() const;
};

// P, R, F1, Acc from confusion counts; zero denominators yield 0.
EvalReport report_from_counts(long tp, long fp, long tn, long fn);

struct DatasetSplit {
    std::vector<TripInstance> train;
    std::vector<TripInstance> val;
    std::vector<TripInstance> test;
};

// Test = instances dated >= split_date. Validation samples whole
// (celebrity, date) groups from the remainder until it holds ~val_frac of
// the remaining instances, keeping each trip graph on one side.
DatasetSplit split_dataset(const std::vector<TripInstance>& instances,
                           const Date& split_date = Date{2019, 7, 1},
                           double val_frac = 0.1, uint64_t seed = 1);

// One (celebrity, date) classification unit with everything the model
// needs, precomputed once; forward passes only read it.
struct TripExample {
    std::string celebrity;
    Date date;
    TripGraphStructure graph;
    std::vector<WordArticleGraph> location_graphs;  // aligned with graph.locations
    std::vector<EntityInput> entities;              // aligned with graph.entities
    std::vector<EventInput> events;                 // aligned with graph.events
    std::vector<int> labels;                        // per location, -1 when unknown
};

struct PipelineData {
    const Corpus* corpus = nullptr;
    const GazetteerIndex* gazetteer = nullptr;
    const std::unordered_map<std::string, ArticleGeo>* geo = nullptr;
    const WordVectors* word_vectors = nullptr;
    const TfidfModel* tfidf = nullptr;
    const KnowledgeBase* kb = nullptr;  // optional
};

struct PrepareResult {
    std::vector<TripExample> examples;
    std::vector<std::string> dropped;  // instances lost to graph construction
};

PrepareResult prepare_examples(const PipelineData& data,
                               const std::vector<TripInstance>& instances,
                               const ModelConfig& config);

// Full forward pass for one example; returns [k, 1] probabilities.
Tensor forward_example(Tape& tape, const TripExample& example, ModelParams& params);

struct TrainOptions {
    int max_epochs = 200;
    int patience = 10;
    double learning_rate = 0.001;
    double threshold = 0.5;
    double pos_weight = 1.0;
};

struct EpochLog {
    int epoch = 0;
    double train_loss = 0.0;
    double val_f1 = 0.0;
};

struct TrainResult {
    std::unordered_map<std::string, std::vector<double>> best_values;
    int best_epoch = 0;
    double best_val_f1 = 0.0;
    std::vector<EpochLog> history;
    AdamState adam;
};

// One Adam step per (celebrity, date) trip graph; early stop on
// validation F1. Leaves the best parameters restored into `params`.
TrainResult train_model(const std::vector<TripExample>& train_set,
                        const std::vector<TripExample>& val_set, ModelParams& params,
                        const TrainOptions& options);

struct Prediction {
    std::string celebrity;
    Date date;
    std::string location;
    double probability = 0.0;
    int label = -1;
    bool predicted_positive = false;
};

struct EvalResult {
    EvalReport report;
    std::vector<Prediction> predictions;
};

EvalResult evaluate_examples(const std::vector<TripExample>& examples,
                             ModelParams& params, double threshold = 0.5);

// Frequency-style baselines operate on per-group candidate statistics and
// never touch model parameters.
struct BaselineGroup {
    std::string celebrity;
    Date date;
    std::vector<std::string> candidates;
    std::vector<int> labels;
    std::vector<double> frequency;                        // mention counts over A_{c,d}
    std::vector<std::vector<std::string>> loc_articles;   // per candidate
    std::vector<std::string> celeb_articles;              // within the pool
};

// Exactly the argmax-frequency candidate goes positive; ties pick the
// lexicographically smallest canonical name.
std::vector<bool> baseline_locfre(const BaselineGroup& group);
// Jaccard overlap between each candidate's articles and the celebrity's.
std::vector<bool> baseline_locjaccard(const BaselineGroup& group);

std::vector<BaselineGroup> make_baseline_groups(
    const Corpus& corpus, const std::unordered_map<std::string, ArticleGeo>& geo,
    const std::vector<TripInstance>& instances);

EvalResult evaluate_baseline(const std::vector<BaselineGroup>& groups,
                             const std::string& method);

}  // namespace celetrip
