#pragma once

#include <stdexcept>
#include <string>

#include "celetrip/model.hpp"
#include "celetrip/train.hpp"

namespace celetrip {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Everything a run needs: model hyperparameters, training knobs, CBOW
// settings and input/output paths. Sources are layered: built-in
// defaults, then a key=value config file, then CELETRIP_* environment
// variables, then command-line flags.
struct RunConfig {
    ModelConfig model;

    int max_epochs = 200;
    int patience = 10;
    double learning_rate = 0.001;
    double threshold = 0.5;
    double pos_weight = 1.0;
    double val_frac = 0.1;
    Date split_date{2019, 7, 1};
    uint64_t seed = 1;

    int cbow_window = 5;
    int cbow_negatives = 5;
    int cbow_epochs = 15;
    double cbow_learning_rate = 0.05;

    std::string corpus_path;
    std::string gazetteer_path;
    std::string kb_triples_path;
    std::string kb_entity_vectors_path;
    std::string kb_relation_vectors_path;
    std::string word_vectors_path;
    std::string ground_truth_path;
    std::string checkpoint_path;
    std::string tfidf_path;
    std::string output_dir;

    TrainOptions train_options() const {
        TrainOptions t;
        t.max_epochs = max_epochs;
        t.patience = patience;
        t.learning_rate = learning_rate;
        t.threshold = threshold;
        t.pos_weight = pos_weight;
        return t;
    }
};

// Applies one `key = value` assignment; unknown keys raise ConfigError.
// Aliases: F/feature_dim, Q/date_offset, lr/learning_rate.
void apply_config_entry(RunConfig& config, const std::string& key,
                        const std::string& value);

RunConfig parse_run_config(const std::string& text, const std::string& origin = "<memory>");
RunConfig load_run_config(const std::string& path);

// CELETRIP_<UPPERCASED KEY> environment variables override file values.
void apply_env_overrides(RunConfig& config);

// Range checks (epsilon in (0,1), Q >= 0, dims positive, ...); throws
// ConfigError naming the offending field.
void validate_config(const RunConfig& config);

// Round-trippable key=value dump of every setting.
std::string dump_run_config(const RunConfig& config);

}  // namespace celetrip
