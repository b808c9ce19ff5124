#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "CLI11.hpp"
#include "celetrip/config.hpp"
#include "celetrip/corpus.hpp"
#include "celetrip/dates.hpp"
#include "celetrip/features.hpp"
#include "celetrip/geo.hpp"
#include "celetrip/graphs.hpp"
#include "celetrip/model.hpp"
#include "celetrip/synth.hpp"
#include "celetrip/text.hpp"
#include "celetrip/train.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace celetrip;

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << content;
}

void require_path(const std::string& path, const std::string& flag) {
    if (path.empty()) throw ConfigError("missing required path: " + flag);
    if (!fs::exists(path)) throw ConfigError(flag + ": no such file: " + path);
}

// Flags override config-file and environment values; the file is applied
// first so later CLI11 callbacks win.
struct ConfigLayering {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides;

    RunConfig resolve() const {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_run_config(config_path);
        apply_env_overrides(cfg);
        for (const auto& [key, value] : overrides) apply_config_entry(cfg, key, value);
        validate_config(cfg);
        return cfg;
    }
};

void add_common_options(CLI::App* cmd, ConfigLayering& layers) {
    cmd->add_option("--config", layers.config_path, "key=value config file");
    auto grab = [&layers](const std::string& key) {
        return [&layers, key](const std::string& value) {
            layers.overrides.emplace_back(key, value);
        };
    };
    cmd->add_option_function<std::string>("--seed", grab("seed"), "RNG seed");
    cmd->add_option_function<std::string>("--hidden-dim", grab("hidden_dim"));
    cmd->add_option_function<std::string>("--feature-dim,--F", grab("feature_dim"));
    cmd->add_option_function<std::string>("--blocks", grab("blocks"));
    cmd->add_option_function<std::string>("--epsilon", grab("epsilon"));
    cmd->add_option_function<std::string>("--window", grab("window"));
    cmd->add_option_function<std::string>("--date-offset,--Q", grab("date_offset"));
    cmd->add_option_function<std::string>("--lr", grab("learning_rate"));
    cmd->add_option_function<std::string>("--patience", grab("patience"));
    cmd->add_option_function<std::string>("--max-epochs", grab("max_epochs"));
    cmd->add_option_function<std::string>("--threshold", grab("threshold"));
    cmd->add_option_function<std::string>("--pos-weight", grab("pos_weight"));
    cmd->add_option_function<std::string>("--val-frac", grab("val_frac"));
    cmd->add_option_function<std::string>("--split-date", grab("split_date"));
    cmd->add_option_function<std::string>("--wv-dim", grab("wv_dim"));
    cmd->add_option_function<std::string>("--tfidf-dim", grab("tfidf_dim"));
    cmd->add_option_function<std::string>("--kb-dim", grab("kb_dim"));
    cmd->add_option_function<std::string>("--trip-gat-layers", grab("trip_gat_layers"));
    cmd->add_option_function<std::string>("--use-oriented-pooling",
                                          grab("use_oriented_pooling"));
    cmd->add_option_function<std::string>("--use-entity-module", grab("use_entity_module"));
    cmd->add_option_function<std::string>("--use-event-module", grab("use_event_module"));
    cmd->add_option_function<std::string>("--corpus", grab("corpus"));
    cmd->add_option_function<std::string>("--gazetteer", grab("gazetteer"));
    cmd->add_option_function<std::string>("--truth,--ground-truth", grab("ground_truth"));
    cmd->add_option_function<std::string>("--word-vectors", grab("word_vectors"));
    cmd->add_option_function<std::string>("--kb-triples", grab("kb_triples"));
    cmd->add_option_function<std::string>("--kb-entity-vectors", grab("kb_entity_vectors"));
    cmd->add_option_function<std::string>("--kb-relation-vectors",
                                          grab("kb_relation_vectors"));
    cmd->add_option_function<std::string>("--checkpoint", grab("checkpoint"));
    cmd->add_option_function<std::string>("--tfidf", grab("tfidf"));
    cmd->add_option_function<std::string>("--out-dir,--output-dir", grab("output_dir"));
}

struct LoadedData {
    Corpus corpus;
    GazetteerIndex gazetteer;
    std::unordered_map<std::string, ArticleGeo> geo;
    std::vector<TripInstance> instances;
    std::vector<std::string> missed;
};

// Canonicalize ground-truth location names through the gazetteer so CSV
// rows may use aliases.
std::vector<GroundTruthRow> canonicalize_truth(std::vector<GroundTruthRow> rows,
                                               const GazetteerIndex& index) {
    for (auto& row : rows) {
        const GazetteerEntry* e = index.lookup(row.location);
        if (e) row.location = e->canonical;
    }
    return rows;
}

LoadedData load_data(const RunConfig& cfg, bool need_truth) {
    require_path(cfg.corpus_path, "--corpus");
    require_path(cfg.gazetteer_path, "--gazetteer");
    LoadedData data;
    data.corpus = load_corpus(cfg.corpus_path);
    for (const auto& w : data.corpus.warnings()) std::cerr << "warning: " << w << "\n";
    annotate_corpus_dates(data.corpus);
    data.gazetteer = build_gazetteer_index(cfg.gazetteer_path);
    data.geo = extract_geo_corpus(data.corpus, data.gazetteer);
    if (need_truth) {
        require_path(cfg.ground_truth_path, "--truth");
        auto truth = canonicalize_truth(load_ground_truth(cfg.ground_truth_path),
                                        data.gazetteer);
        auto built = build_trip_instances(data.corpus, truth,
                                          article_candidate_map(data.geo));
        data.instances = std::move(built.instances);
        data.missed = std::move(built.missed_trips);
        for (const auto& m : data.missed) std::cerr << "log: " << m << "\n";
    }
    return data;
}

std::optional<KnowledgeBase> load_kb(const RunConfig& cfg) {
    if (cfg.kb_triples_path.empty() && cfg.kb_entity_vectors_path.empty() &&
        cfg.kb_relation_vectors_path.empty())
        return std::nullopt;
    require_path(cfg.kb_triples_path, "--kb-triples");
    require_path(cfg.kb_entity_vectors_path, "--kb-entity-vectors");
    require_path(cfg.kb_relation_vectors_path, "--kb-relation-vectors");
    return KnowledgeBase::load(cfg.kb_triples_path, cfg.kb_entity_vectors_path,
                               cfg.kb_relation_vectors_path);
}

int run_synth(const ConfigLayering& layers, int days, int candidates,
              const std::string& out_dir) {
    RunConfig cfg = layers.resolve();
    if (out_dir.empty()) throw ConfigError("missing required path: --out-dir");
    fs::create_directories(out_dir);
    SynthOptions opts;
    opts.n_days = days;
    opts.candidates_per_day = candidates;
    opts.seed = cfg.seed;
    SynthData data = synth_generate(opts);
    write_file(out_dir + "/corpus.jsonl", data.corpus_jsonl);
    write_file(out_dir + "/truth.csv", data.truth_csv);
    write_file(out_dir + "/gazetteer.tsv", data.gazetteer_tsv);
    write_file(out_dir + "/kb_triples.tsv", data.kb_triples_tsv);
    write_file(out_dir + "/kb_entities.vec", data.kb_entity_vectors);
    write_file(out_dir + "/kb_relations.vec", data.kb_relation_vectors);
    ordered_json j;
    j["days"] = days;
    j["candidates_per_day"] = candidates;
    j["implicit_days"] = data.implicit_keys.size();
    j["out_dir"] = out_dir;
    std::cout << j.dump() << "\n";
    return 0;
}

int run_extract_dates(const ConfigLayering& layers, const std::string& out_path) {
    RunConfig cfg = layers.resolve();
    require_path(cfg.corpus_path, "--corpus");
    Corpus corpus = load_corpus(cfg.corpus_path);
    std::ostringstream out;
    for (const auto& art : corpus.articles()) {
        ordered_json j;
        j["article_id"] = art.id;
        j["matches"] = ordered_json::array();
        for (const auto& m : extract_dates(art.text, art.publish_date)) {
            ordered_json jm;
            jm["span"] = {m.begin, m.end};
            jm["kind"] = m.kind == DateKind::Absolute ? "absolute" : "relative";
            if (m.resolved)
                jm["date"] = m.resolved->to_iso();
            else
                jm["date"] = nullptr;
            j["matches"].push_back(jm);
        }
        out << j.dump() << "\n";
    }
    if (out_path.empty())
        std::cout << out.str();
    else
        write_file(out_path, out.str());
    return 0;
}

int run_extract_locations(const ConfigLayering& layers, const std::string& out_path) {
    RunConfig cfg = layers.resolve();
    require_path(cfg.corpus_path, "--corpus");
    require_path(cfg.gazetteer_path, "--gazetteer");
    Corpus corpus = load_corpus(cfg.corpus_path);
    GazetteerIndex index = build_gazetteer_index(cfg.gazetteer_path);
    std::ostringstream out;
    for (const auto& art : corpus.articles()) {
        ArticleGeo geo;
        geo.mentions = match_locations(art, index);
        geo.candidates = resolve_containment(geo.mentions, index);
        ordered_json j;
        j["article_id"] = art.id;
        j["mentions"] = ordered_json::array();
        for (const auto& m : geo.mentions) {
            ordered_json jm;
            jm["surface"] = m.surface;
            jm["canonical"] = m.canonical;
            jm["id"] = m.gazetteer_id;
            jm["sentence"] = m.sentence_index;
            jm["start"] = m.token_begin;
            jm["end"] = m.token_end;
            j["mentions"].push_back(jm);
        }
        j["candidates"] = geo.candidates;
        out << j.dump() << "\n";
    }
    if (out_path.empty())
        std::cout << out.str();
    else
        write_file(out_path, out.str());
    return 0;
}

int run_build_dataset(const ConfigLayering& layers, const std::string& out_path) {
    RunConfig cfg = layers.resolve();
    LoadedData data = load_data(cfg, true);
    std::ostringstream out;
    out << "celebrity,location,date,articles,label\n";
    for (const auto& inst : data.instances) {
        out << inst.celebrity << "," << inst.location << "," << inst.date.to_iso() << ",";
        for (size_t i = 0; i < inst.article_ids.size(); i++) {
            if (i > 0) out << ";";
            out << inst.article_ids[i];
        }
        out << "," << (*inst.positive ? "positive" : "negative") << "\n";
    }
    if (out_path.empty())
        std::cout << out.str();
    else
        write_file(out_path, out.str());
    std::cerr << "log: " << data.instances.size() << " instances, "
              << data.missed.size() << " missed trips\n";
    return 0;
}

int run_train_embeddings(const ConfigLayering& layers, const std::string& out_path) {
    RunConfig cfg = layers.resolve();
    require_path(cfg.corpus_path, "--corpus");
    if (out_path.empty()) throw ConfigError("missing required path: --out");
    Corpus corpus = load_corpus(cfg.corpus_path);
    CbowOptions opts;
    opts.dim = cfg.model.wv_dim;
    opts.window = cfg.cbow_window;
    opts.negatives = cfg.cbow_negatives;
    opts.epochs = cfg.cbow_epochs;
    opts.learning_rate = cfg.cbow_learning_rate;
    opts.seed = cfg.seed;
    CbowResult result = train_cbow(corpus, opts);
    save_word_vectors(result.vectors, out_path);
    ordered_json j;
    j["words"] = result.vectors.matrix.rows;
    j["dim"] = result.vectors.dim();
    j["final_loss"] = result.epoch_loss.back();
    std::cout << j.dump() << "\n";
    return 0;
}

struct PreparedPipeline {
    LoadedData data;
    WordVectors wv;
    TfidfModel tfidf;
    std::optional<KnowledgeBase> kb;
    RunConfig cfg;

    PipelineData pipeline_data() const {
        PipelineData pd;
        pd.corpus = &data.corpus;
        pd.gazetteer = &data.gazetteer;
        pd.geo = &data.geo;
        pd.word_vectors = &wv;
        pd.tfidf = &tfidf;
        pd.kb = kb ? &*kb : nullptr;
        return pd;
    }
};

PreparedPipeline prepare_pipeline(RunConfig cfg, bool need_truth, bool fit_tfidf_on_train) {
    PreparedPipeline p;
    p.data = load_data(cfg, need_truth);
    require_path(cfg.word_vectors_path, "--word-vectors");
    p.wv = load_word_vectors(cfg.word_vectors_path);
    cfg.model.wv_dim = p.wv.dim();
    p.kb = load_kb(cfg);
    if (p.kb) cfg.model.kb_dim = p.kb->embedding_dim();

    if (!cfg.tfidf_path.empty() && fs::exists(cfg.tfidf_path)) {
        std::ifstream in(cfg.tfidf_path);
        std::stringstream buf;
        buf << in.rdbuf();
        p.tfidf = TfidfModel::from_json(buf.str());
    } else if (fit_tfidf_on_train) {
        // Fit on the pre-split-date side only.
        std::vector<const Article*> train_articles;
        std::set<std::string> train_ids;
        for (const auto& inst : p.data.instances)
            if (inst.date < cfg.split_date)
                train_ids.insert(inst.article_ids.begin(), inst.article_ids.end());
        for (const auto& id : train_ids) train_articles.push_back(&p.data.corpus.get(id));
        if (train_articles.empty())
            throw TrainError("no training-side articles to fit TF-IDF on");
        p.tfidf = tfidf_fit(train_articles, cfg.model.tfidf_dim);
    } else {
        throw ConfigError("missing required path: --tfidf");
    }
    cfg.model.tfidf_dim = p.tfidf.dim();
    p.cfg = cfg;
    return p;
}

int run_train(const ConfigLayering& layers) {
    RunConfig cfg = layers.resolve();
    if (cfg.output_dir.empty()) throw ConfigError("missing required path: --out-dir");
    fs::create_directories(cfg.output_dir);
    PreparedPipeline p = prepare_pipeline(cfg, true, true);

    auto split = split_dataset(p.data.instances, p.cfg.split_date, p.cfg.val_frac,
                               p.cfg.seed);
    auto train_prep = prepare_examples(p.pipeline_data(), split.train, p.cfg.model);
    auto val_prep = prepare_examples(p.pipeline_data(), split.val, p.cfg.model);
    for (const auto& d : train_prep.dropped) std::cerr << "log: dropped " << d << "\n";
    for (const auto& d : val_prep.dropped) std::cerr << "log: dropped " << d << "\n";

    ModelParams params = ModelParams::init(p.cfg.model, p.cfg.seed);
    TrainResult result =
        train_model(train_prep.examples, val_prep.examples, params, p.cfg.train_options());

    // Persist everything needed to evaluate or predict later.
    std::vector<const Param*> const_params;
    for (const Param* q : std::as_const(params).all()) const_params.push_back(q);
    save_checkpoint(cfg.output_dir + "/checkpoint.bin", const_params, &result.adam);
    write_file(cfg.output_dir + "/tfidf.json", p.tfidf.to_json());
    write_file(cfg.output_dir + "/config_used.cfg", dump_run_config(p.cfg));
    std::ostringstream history;
    history << "epoch,train_loss,val_f1\n";
    history.precision(17);
    for (const auto& row : result.history)
        history << row.epoch << "," << row.train_loss << "," << row.val_f1 << "\n";
    write_file(cfg.output_dir + "/history.csv", history.str());

    ordered_json j;
    j["best_epoch"] = result.best_epoch;
    j["best_val_f1"] = result.best_val_f1;
    j["epochs_run"] = result.history.size();
    j["train_examples"] = train_prep.examples.size();
    j["val_examples"] = val_prep.examples.size();
    j["checkpoint"] = cfg.output_dir + "/checkpoint.bin";
    std::cout << j.dump() << "\n";
    return 0;
}

ModelParams load_model(const PreparedPipeline& p) {
    require_path(p.cfg.checkpoint_path, "--checkpoint");
    ModelParams params = ModelParams::init(p.cfg.model, p.cfg.seed);
    params.load(load_checkpoint(p.cfg.checkpoint_path));
    return params;
}

int run_evaluate(const ConfigLayering& layers, const std::string& split_side,
                 const std::string& out_path) {
    RunConfig cfg = layers.resolve();
    PreparedPipeline p = prepare_pipeline(cfg, true, false);

    std::vector<TripInstance> chosen;
    if (split_side == "all") {
        chosen = p.data.instances;
    } else {
        for (const auto& inst : p.data.instances)
            if (inst.date >= p.cfg.split_date) chosen.push_back(inst);
    }
    if (chosen.empty()) throw TrainError("empty test set");

    auto prep = prepare_examples(p.pipeline_data(), chosen, p.cfg.model);
    ModelParams params = load_model(p);
    EvalResult result = evaluate_examples(prep.examples, params, p.cfg.threshold);

    ordered_json j = ordered_json::parse(result.report.to_json());
    j["instances"] = result.predictions.size();
    j["split"] = split_side;
    std::cout << j.dump() << "\n";
    if (!out_path.empty()) write_file(out_path, j.dump() + "\n");
    return 0;
}

int run_predict(const ConfigLayering& layers, const std::string& celebrity,
                const std::string& date_str) {
    RunConfig cfg = layers.resolve();
    auto date = Date::parse_iso(date_str);
    if (!date) throw ConfigError("--date expects YYYY-MM-DD, got '" + date_str + "'");
    PreparedPipeline p = prepare_pipeline(cfg, false, false);

    auto a_cd = select_articles(p.data.corpus, celebrity, *date);
    auto candidate_map = article_candidate_map(p.data.geo);
    std::vector<std::string> candidates;
    for (const auto& id : a_cd) {
        auto it = candidate_map.find(id);
        if (it == candidate_map.end()) continue;
        for (const auto& loc : it->second)
            if (std::find(candidates.begin(), candidates.end(), loc) == candidates.end())
                candidates.push_back(loc);
    }
    std::sort(candidates.begin(), candidates.end());
    if (candidates.empty())
        throw TrainError("no candidate locations for (" + celebrity + ", " + date_str + ")");

    std::vector<TripInstance> instances;
    for (const auto& loc : candidates) {
        TripInstance inst;
        inst.celebrity = celebrity;
        inst.location = loc;
        inst.date = *date;
        inst.article_ids = select_articles_for_location(a_cd, loc, candidate_map);
        instances.push_back(std::move(inst));
    }
    auto prep = prepare_examples(p.pipeline_data(), instances, p.cfg.model);
    if (prep.examples.empty()) throw TrainError("all candidates dropped during preparation");
    ModelParams params = load_model(p);
    EvalResult result = evaluate_examples(prep.examples, params, p.cfg.threshold);

    ordered_json j;
    j["celebrity"] = celebrity;
    j["date"] = date_str;
    j["candidates"] = ordered_json::array();
    std::vector<std::string> positives;
    for (const auto& pred : result.predictions) {
        ordered_json jc;
        jc["location"] = pred.location;
        jc["probability"] = pred.probability;
        jc["positive"] = pred.predicted_positive;
        j["candidates"].push_back(jc);
        if (pred.predicted_positive) positives.push_back(pred.location);
    }
    j["positives"] = positives;
    std::cout << j.dump() << "\n";
    return 0;
}

int run_baseline(const ConfigLayering& layers, const std::string& method,
                 const std::string& split_side) {
    RunConfig cfg = layers.resolve();
    LoadedData data = load_data(cfg, true);
    std::vector<TripInstance> chosen;
    if (split_side == "all") {
        chosen = data.instances;
    } else {
        for (const auto& inst : data.instances)
            if (inst.date >= cfg.split_date) chosen.push_back(inst);
    }
    if (chosen.empty()) throw TrainError("empty test set");
    auto groups = make_baseline_groups(data.corpus, data.geo, chosen);
    EvalResult result = evaluate_baseline(groups, method);
    ordered_json j = ordered_json::parse(result.report.to_json());
    j["method"] = method;
    j["split"] = split_side;
    std::cout << j.dump() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"celetrip: celebrity itinerary detection from news articles"};
    app.require_subcommand(1);

    ConfigLayering layers;
    int synth_days = 200;
    int synth_candidates = 5;
    std::string out_dir, out_path, split_side = "test", method = "locfre";
    std::string celebrity, date_str;

    auto* synth = app.add_subcommand("synth", "generate a planted-trip corpus");
    add_common_options(synth, layers);
    synth->add_option("--days", synth_days, "number of (celebrity, date) days");
    synth->add_option("--candidates", synth_candidates, "candidate locations per day");
    synth->add_option("--out-dir", out_dir, "output directory")->required();

    auto* xdates = app.add_subcommand("extract-dates", "rule-based date extraction");
    add_common_options(xdates, layers);
    xdates->add_option("--out", out_path, "output JSONL path");

    auto* xloc = app.add_subcommand("extract-locations", "gazetteer location extraction");
    add_common_options(xloc, layers);
    xloc->add_option("--out", out_path, "output JSONL path");

    auto* build = app.add_subcommand("build-dataset", "construct labeled trip instances");
    add_common_options(build, layers);
    build->add_option("--out", out_path, "output CSV path");

    auto* embed = app.add_subcommand("train-embeddings", "train CBOW word vectors");
    add_common_options(embed, layers);
    embed->add_option("--out", out_path, "output word-vector path")->required();
    embed->add_option_function<std::string>(
        "--dim", [&layers](const std::string& v) { layers.overrides.emplace_back("wv_dim", v); });
    embed->add_option_function<std::string>(
        "--epochs",
        [&layers](const std::string& v) { layers.overrides.emplace_back("cbow_epochs", v); });

    auto* train = app.add_subcommand("train", "train the trip classifier");
    add_common_options(train, layers);

    auto* evaluate = app.add_subcommand("evaluate", "evaluate a checkpoint");
    add_common_options(evaluate, layers);
    evaluate->add_option("--split", split_side, "test|all");
    evaluate->add_option("--out", out_path, "also write the report here");

    auto* predict = app.add_subcommand("predict", "classify candidates for one day");
    add_common_options(predict, layers);
    predict->add_option("--celebrity", celebrity, "full celebrity name")->required();
    predict->add_option("--date", date_str, "ISO date YYYY-MM-DD")->required();

    auto* baseline = app.add_subcommand("baseline", "frequency baselines");
    add_common_options(baseline, layers);
    baseline->add_option("--method", method, "locfre|locjaccard");
    baseline->add_option("--split", split_side, "test|all");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) return run_synth(layers, synth_days, synth_candidates, out_dir);
        if (xdates->parsed()) return run_extract_dates(layers, out_path);
        if (xloc->parsed()) return run_extract_locations(layers, out_path);
        if (build->parsed()) return run_build_dataset(layers, out_path);
        if (embed->parsed()) return run_train_embeddings(layers, out_path);
        if (train->parsed()) return run_train(layers);
        if (evaluate->parsed()) return run_evaluate(layers, split_side, out_path);
        if (predict->parsed()) return run_predict(layers, celebrity, date_str);
        if (baseline->parsed()) return run_baseline(layers, method, split_side);
    } catch (const std::exception& e) {
        ordered_json err;
        err["error"] = e.what();
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 0;
}
