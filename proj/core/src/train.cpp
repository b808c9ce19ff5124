#include "celetrip/train.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "celetrip/text.hpp"
#include "json.hpp"

namespace celetrip {

EvalReport report_from_counts(long tp, long fp, long tn, long fn) {
    EvalReport r;
    r.tp = tp;
    r.fp = fp;
    r.tn = tn;
    r.fn = fn;
    const double total = double(tp + fp + tn + fn);
    r.precision = (tp + fp) > 0 ? 100.0 * double(tp) / double(tp + fp) : 0.0;
    r.recall = (tp + fn) > 0 ? 100.0 * double(tp) / double(tp + fn) : 0.0;
    r.f1 = (r.precision + r.recall) > 0.0
               ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
               : 0.0;
    r.accuracy = total > 0.0 ? 100.0 * double(tp + tn) / total : 0.0;
    return r;
}

std::string EvalReport::to_json() const {
    nlohmann::ordered_json j;
    j["f1"] = f1;
    j["precision"] = precision;
    j["recall"] = recall;
    j["accuracy"] = accuracy;
    j["tp"] = tp;
    j["fp"] = fp;
    j["tn"] = tn;
    j["fn"] = fn;
    return j.dump();
}

namespace {

std::pair<std::string, std::string> group_key(const TripInstance& inst) {
    return {inst.date.to_iso(), inst.celebrity};
}

}  // namespace

DatasetSplit split_dataset(const std::vector<TripInstance>& instances,
                           const Date& split_date, double val_frac, uint64_t seed) {
    DatasetSplit out;
    std::vector<TripInstance> remainder;
    for (const auto& inst : instances) {
        if (inst.date >= split_date)
            out.test.push_back(inst);
        else
            remainder.push_back(inst);
    }
    auto order = [](const TripInstance& a, const TripInstance& b) {
        if (a.date != b.date) return a.date < b.date;
        if (a.celebrity != b.celebrity) return a.celebrity < b.celebrity;
        return a.location < b.location;
    };
    std::sort(out.test.begin(), out.test.end(), order);
    std::sort(remainder.begin(), remainder.end(), order);

    std::map<std::pair<std::string, std::string>, std::vector<TripInstance>> groups;
    for (const auto& inst : remainder) groups[group_key(inst)].push_back(inst);
    std::vector<std::pair<std::string, std::string>> keys;
    for (const auto& [k, _] : groups) keys.push_back(k);
    std::mt19937_64 rng(seed);
    std::shuffle(keys.begin(), keys.end(), rng);

    const size_t target = size_t(std::llround(val_frac * double(remainder.size())));
    size_t val_count = 0;
    std::set<std::pair<std::string, std::string>> val_keys;
    for (const auto& k : keys) {
        if (val_count >= target) break;
        val_keys.insert(k);
        val_count += groups[k].size();
    }
    for (const auto& inst : remainder) {
        if (val_keys.count(group_key(inst)))
            out.val.push_back(inst);
        else
            out.train.push_back(inst);
    }
    if (out.train.empty() || out.val.empty() || out.test.empty())
        throw TrainError("split_dataset: empty split side (train " +
                         std::to_string(out.train.size()) + ", val " +
                         std::to_string(out.val.size()) + ", test " +
                         std::to_string(out.test.size()) + ")");
    return out;
}

namespace {

std::vector<std::string> phrase_tokens(const std::string& phrase) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : normalize_phrase(phrase)) {
        if (c == ' ') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

bool tokens_contain_phrase(const std::vector<std::string>& raw_tokens,
                           const std::vector<std::string>& phrase) {
    if (phrase.empty() || raw_tokens.size() < phrase.size()) return false;
    for (size_t i = 0; i + phrase.size() <= raw_tokens.size(); i++) {
        bool all = true;
        for (size_t j = 0; j < phrase.size(); j++) {
            if (strip_possessive(lowercase(raw_tokens[i + j])) != phrase[j]) {
                all = false;
                break;
            }
        }
        if (all) return true;
    }
    return false;
}

bool article_contains_phrase(const Article& art, const std::vector<std::string>& phrase) {
    for (const auto& sent : art.raw_sentences)
        if (tokens_contain_phrase(sent, phrase)) return true;
    return false;
}

std::vector<std::string> surface_stems(const std::string& surface) {
    std::vector<std::string> stems;
    for (const auto& sent : preprocess(surface))
        stems.insert(stems.end(), sent.begin(), sent.end());
    return stems;
}

DenseMatrix row_matrix(const std::vector<double>& v) {
    DenseMatrix m(1, int(v.size()));
    m.data = v;
    return m;
}

EntityInput make_entity_input(const std::string& surface, const PipelineData& data) {
    EntityInput input;
    input.init = row_matrix(sentence_vector(surface_stems(surface), *data.word_vectors));
    input.linked = false;
    if (data.kb) {
        auto label = data.kb->link(surface);
        if (label) {
            input.linked = true;
            input.subgraph = build_entity_subgraph(*label, *data.kb);
        }
    }
    return input;
}

EventInput make_event_input(const std::string& surface, const Date& date,
                            const PipelineData& data, const ModelConfig& config) {
    EventInput input;
    input.init = row_matrix(sentence_vector(surface_stems(surface), *data.word_vectors));
    const auto phrase = phrase_tokens(surface);

    std::vector<std::vector<double>> rows;
    for (const auto& art : data.corpus->articles()) {
        if (!art.publish_date || !(*art.publish_date == date)) continue;
        for (size_t s = 0; s < art.raw_sentences.size(); s++) {
            if (tokens_contain_phrase(art.raw_sentences[s], phrase))
                rows.push_back(sentence_vector(art.sentences[s], *data.word_vectors));
        }
    }
    input.sentence_vectors = DenseMatrix(int(rows.size()), data.word_vectors->dim());
    for (size_t i = 0; i < rows.size(); i++)
        std::copy(rows[i].begin(), rows[i].end(),
                  input.sentence_vectors.data.begin() + i * size_t(data.word_vectors->dim()));

    const int q = config.date_offset;
    input.daily_counts = DenseMatrix(1, 2 * q + 1);
    for (const auto& art : data.corpus->articles()) {
        if (!art.publish_date) continue;
        const int off = days_between(date, *art.publish_date);  // publish - date
        if (off < -q || off > q) continue;
        if (article_contains_phrase(art, phrase))
            input.daily_counts.at(0, off + q) += 1.0;
    }
    return input;
}

}  // namespace

PrepareResult prepare_examples(const PipelineData& data,
                               const std::vector<TripInstance>& instances,
                               const ModelConfig& config) {
    PrepareResult result;
    std::map<std::pair<Date, std::string>, std::vector<const TripInstance*>> groups;
    for (const auto& inst : instances)
        groups[{inst.date, inst.celebrity}].push_back(&inst);

    for (const auto& [key, members] : groups) {
        const auto& [date, celebrity] = key;
        std::vector<const TripInstance*> sorted_members = members;
        std::sort(sorted_members.begin(), sorted_members.end(),
                  [](const TripInstance* a, const TripInstance* b) {
                      return a->location < b->location;
                  });

        TripExample ex;
        ex.celebrity = celebrity;
        ex.date = date;
        std::vector<std::string> candidates;
        std::vector<std::vector<std::string>> per_loc_articles;
        for (const TripInstance* inst : sorted_members) {
            std::vector<const Article*> arts;
            for (const auto& id : inst->article_ids) {
                const Article* a = data.corpus->find(id);
                if (!a) throw TrainError("prepare: unknown article id " + id);
                arts.push_back(a);
            }
            try {
                ex.location_graphs.push_back(build_word_article_graph(
                    arts, inst->location, celebrity, *data.word_vectors, *data.tfidf,
                    config.window));
            } catch (const GraphError& e) {
                result.dropped.push_back(celebrity + " " + date.to_iso() + " " +
                                         inst->location + ": " + e.what());
                continue;
            }
            candidates.push_back(inst->location);
            per_loc_articles.push_back(inst->article_ids);
            ex.labels.push_back(inst->positive ? (*inst->positive ? 1 : 0) : -1);
        }
        if (candidates.empty()) {
            result.dropped.push_back(celebrity + " " + date.to_iso() +
                                     ": all candidates dropped");
            continue;
        }
        ex.graph = build_trip_graph(*data.corpus, candidates, per_loc_articles);
        ex.graph.labels = ex.labels;
        for (const auto& surface : ex.graph.entities)
            ex.entities.push_back(make_entity_input(surface, data));
        for (const auto& surface : ex.graph.events)
            ex.events.push_back(make_event_input(surface, date, data, config));
        result.examples.push_back(std::move(ex));
    }
    return result;
}

Tensor forward_example(Tape& tape, const TripExample& example, ModelParams& params) {
    std::vector<Tensor> loc_rows;
    for (const auto& graph : example.location_graphs)
        loc_rows.push_back(location_module(tape, graph, params));
    Tensor h_loc = tape.concat_rows(loc_rows);

    Tensor h_ent;
    if (!example.entities.empty()) {
        std::vector<Tensor> rows;
        for (const auto& e : example.entities)
            rows.push_back(entity_module(tape, e, params));
        h_ent = tape.concat_rows(rows);
    }
    Tensor h_eve;
    if (!example.events.empty()) {
        std::vector<Tensor> rows;
        for (const auto& e : example.events) rows.push_back(event_module(tape, e, params));
        h_eve = tape.concat_rows(rows);
    }
    return trip_forward(tape, example.graph, h_loc, h_ent, h_eve, params);
}

namespace {

EvalReport score_examples(const std::vector<TripExample>& examples, ModelParams& params,
                          double threshold, std::vector<Prediction>* predictions) {
    long tp = 0, fp = 0, tn = 0, fn = 0;
    for (const auto& ex : examples) {
        Tape tape;
        Tensor probs = forward_example(tape, ex, params);
        for (int i = 0; i < probs.rows(); i++) {
            const double p = probs.at(i, 0);
            const bool pos = p >= threshold;
            if (predictions) {
                predictions->push_back(Prediction{ex.celebrity, ex.date,
                                                  ex.graph.locations[size_t(i)], p,
                                                  ex.labels[size_t(i)], pos});
            }
            if (ex.labels[size_t(i)] < 0) continue;
            const bool truth = ex.labels[size_t(i)] > 0;
            if (pos && truth) tp++;
            else if (pos && !truth) fp++;
            else if (!pos && truth) fn++;
            else tn++;
        }
    }
    return report_from_counts(tp, fp, tn, fn);
}

}  // namespace

EvalResult evaluate_examples(const std::vector<TripExample>& examples,
                             ModelParams& params, double threshold) {
    EvalResult out;
    out.report = score_examples(examples, params, threshold, &out.predictions);
    return out;
}

TrainResult train_model(const std::vector<TripExample>& train_set,
                        const std::vector<TripExample>& val_set, ModelParams& params,
                        const TrainOptions& options) {
    if (train_set.empty()) throw TrainError("train_model: empty training set");
    if (val_set.empty()) throw TrainError("train_model: empty validation set");

    TrainResult result;
    result.adam.options.learning_rate = options.learning_rate;
    auto param_ptrs = params.all();

    result.best_val_f1 = -1.0;
    for (int epoch = 1; epoch <= options.max_epochs; epoch++) {
        double loss_sum = 0.0;
        for (const auto& ex : train_set) {
            Tape tape;
            try {
                Tensor probs = forward_example(tape, ex, params);
                Tensor loss = trip_loss(tape, probs, ex.labels, options.pos_weight);
                loss_sum += loss.scalar();
                tape.backward(loss);
            } catch (const TensorError& e) {
                throw TrainError("non-finite loss at instance (" + ex.celebrity + ", " +
                                 ex.date.to_iso() + "): " + e.what());
            }
            adam_step(param_ptrs, result.adam);
        }
        EvalReport val = score_examples(val_set, params, options.threshold, nullptr);
        result.history.push_back(
            EpochLog{epoch, loss_sum / double(train_set.size()), val.f1});
        if (val.f1 > result.best_val_f1) {
            result.best_val_f1 = val.f1;
            result.best_epoch = epoch;
            result.best_values = params.snapshot();
        }
        if (epoch - result.best_epoch >= options.patience) break;
    }
    params.restore(result.best_values);
    return result;
}

std::vector<bool> baseline_locfre(const BaselineGroup& group) {
    std::vector<bool> out(group.candidates.size(), false);
    if (group.candidates.empty()) return out;
    size_t best = 0;
    for (size_t i = 1; i < group.candidates.size(); i++) {
        if (group.frequency[i] > group.frequency[best] ||
            (group.frequency[i] == group.frequency[best] &&
             group.candidates[i] < group.candidates[best]))
            best = i;
    }
    out[best] = true;
    return out;
}

std::vector<bool> baseline_locjaccard(const BaselineGroup& group) {
    std::vector<bool> out(group.candidates.size(), false);
    if (group.candidates.empty()) return out;
    std::set<std::string> celeb(group.celeb_articles.begin(), group.celeb_articles.end());
    std::vector<double> score(group.candidates.size(), 0.0);
    for (size_t i = 0; i < group.candidates.size(); i++) {
        std::set<std::string> loc(group.loc_articles[i].begin(), group.loc_articles[i].end());
        size_t inter = 0;
        for (const auto& id : loc)
            if (celeb.count(id)) inter++;
        const size_t uni = loc.size() + celeb.size() - inter;
        score[i] = uni > 0 ? double(inter) / double(uni) : 0.0;
    }
    size_t best = 0;
    for (size_t i = 1; i < group.candidates.size(); i++) {
        if (score[i] > score[best] ||
            (score[i] == score[best] && group.candidates[i] < group.candidates[best]))
            best = i;
    }
    out[best] = true;
    return out;
}

std::vector<BaselineGroup> make_baseline_groups(
    const Corpus& corpus, const std::unordered_map<std::string, ArticleGeo>& geo,
    const std::vector<TripInstance>& instances) {
    std::map<std::pair<Date, std::string>, std::vector<const TripInstance*>> grouped;
    for (const auto& inst : instances)
        grouped[{inst.date, inst.celebrity}].push_back(&inst);

    std::vector<BaselineGroup> out;
    for (const auto& [key, members] : grouped) {
        BaselineGroup g;
        g.date = key.first;
        g.celebrity = key.second;
        auto pool = select_articles(corpus, g.celebrity, g.date);
        g.celeb_articles = pool;  // every pool article names the celebrity

        std::vector<const TripInstance*> sorted_members = members;
        std::sort(sorted_members.begin(), sorted_members.end(),
                  [](const TripInstance* a, const TripInstance* b) {
                      return a->location < b->location;
                  });
        for (const TripInstance* inst : sorted_members) {
            g.candidates.push_back(inst->location);
            g.labels.push_back(inst->positive ? (*inst->positive ? 1 : 0) : -1);
            double count = 0.0;
            std::vector<std::string> loc_arts;
            for (const auto& id : pool) {
                auto it = geo.find(id);
                if (it == geo.end()) continue;
                long mentions = 0;
                for (const auto& m : it->second.mentions)
                    if (m.canonical == inst->location) mentions++;
                count += double(mentions);
                const auto& cands = it->second.candidates;
                if (std::find(cands.begin(), cands.end(), inst->location) != cands.end())
                    loc_arts.push_back(id);
            }
            g.frequency.push_back(count);
            g.loc_articles.push_back(std::move(loc_arts));
        }
        out.push_back(std::move(g));
    }
    return out;
}

EvalResult evaluate_baseline(const std::vector<BaselineGroup>& groups,
                             const std::string& method) {
    EvalResult out;
    long tp = 0, fp = 0, tn = 0, fn = 0;
    for (const auto& g : groups) {
        std::vector<bool> pred;
        if (method == "locfre")
            pred = baseline_locfre(g);
        else if (method == "locjaccard")
            pred = baseline_locjaccard(g);
        else
            throw TrainError("unknown baseline method: " + method);
        for (size_t i = 0; i < g.candidates.size(); i++) {
            out.predictions.push_back(Prediction{g.celebrity, g.date, g.candidates[i],
                                                 pred[i] ? 1.0 : 0.0, g.labels[i],
                                                 pred[i]});
            if (g.labels[i] < 0) continue;
            const bool truth = g.labels[i] > 0;
            if (pred[i] && truth) tp++;
            else if (pred[i] && !truth) fp++;
            else if (!pred[i] && truth) fn++;
            else tn++;
        }
    }
    out.report = report_from_counts(tp, fp, tn, fn);
    return out;
}

}  // namespace celetrip
