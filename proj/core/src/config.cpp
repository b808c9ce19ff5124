#include "celetrip/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "celetrip/text.hpp"

namespace celetrip {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

int to_int(const std::string& key, const std::string& v) {
    try {
        size_t used = 0;
        int out = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw ConfigError("config: " + key + " expects an integer, got '" + v + "'");
    }
}

double to_double(const std::string& key, const std::string& v) {
    try {
        size_t used = 0;
        double out = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw ConfigError("config: " + key + " expects a number, got '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    std::string t = lowercase(trim(v));
    if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
    if (t == "0" || t == "false" || t == "no" || t == "off") return false;
    throw ConfigError("config: " + key + " expects a boolean, got '" + v + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        auto add = [&t](const std::string& key, Setter s) { t[key] = std::move(s); };
        add("wv_dim", [](RunConfig& c, const std::string& k, const std::string& v) {
            c.model.wv_dim = to_int(k, v);
        });
        add("tfidf_dim", [](RunConfig& c, const std::string& k, const std::string& v) {
            c.model.tfidf_dim = to_int(k, v);
        });
        add("hidden_dim", [](RunConfig& c, const std::string& k, const std::string& v) {
            c.model.hidden_dim = to_int(k, v);
        });
        Setter feature = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.model.feature_dim = to_int(k, v);
        };
        add("feature_dim", feature);
        add("f", feature);
        add("kb_dim", [](RunConfig& c, const std::string& k, const std::string& v) {
            c.model.kb_dim = to_int(k, v);
        });
        add("blocks", [](RunConfig& c, const std::string& k, const std::string& v) {
            c.model.blocks = to_int(k, v);
        });
        add("trip_gat_layers", [](RunConfig& c, const std::string& k, const std::string& v) {
            c.model.trip_gat_layers = to_int(k, v);
        });
        add("window", [](RunConfig& c, const std::string& k, const std::string& v) {
            c.model.window = to_int(k, v);
        });
        Setter offset = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.model.date_offset = to_int(k, v);
        };
        add("date_offset", offset);
        add("q", offset);
        add("epsilon", [](RunConfig& c, const std::string& k, const std::string& v) {
            c.model.epsilon = to_double(k, v);
        });
        add("leaky_slope", [](RunConfig& c, const std::string& k, const std::string& v) {
            c.model.leaky_slope = to_double(k, v);
        });
        add("use_oriented_pooling",
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.model.use_oriented_pooling = to_bool(k, v);
            });
        add("use_entity_module",
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.model.use_entity_module = to_bool(k, v);
            });
        add("use_event_module",
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.model.use_event_module = to_bool(k, v);
            });
        add("max_epochs", [](RunConfig& c, const std::string& k, const std::string& v) {
            c.max_epochs = to_int(k, v);
        });
        add("patience", [](RunConfig& c, const std::string& k, const std::string& v) {
            c.patience = to_int(k, v);
        });
        Setter lr = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.learning_rate = to_double(k, v);
        };
        add("learning_rate", lr);
        add("lr", lr);
        add("threshold", [](RunConfig& c, const std::string& k, const std::string& v) {
            c.threshold = to_double(k, v);
        });
        add("pos_weight", [](RunConfig& c, const std::string& k, const std::string& v) {
            c.pos_weight = to_double(k, v);
        });
        add("val_frac", [](RunConfig& c, const std::string& k, const std::string& v) {
            c.val_frac = to_double(k, v);
        });
        add("split_date", [](RunConfig& c, const std::string& k, const std::string& v) {
            auto d = Date::parse_iso(trim(v));
            if (!d) throw ConfigError("config: " + k + " expects YYYY-MM-DD, got '" + v + "'");
            c.split_date = *d;
        });
        add("seed", [](RunConfig& c, const std::string& k, const std::string& v) {
            try {
                c.seed = std::stoull(v);
            } catch (const std::exception&) {
                throw ConfigError("config: " + k + " expects an unsigned integer");
            }
        });
        add("cbow_window", [](RunConfig& c, const std::string& k, const std::string& v) {
            c.cbow_window = to_int(k, v);
        });
        add("cbow_negatives", [](RunConfig& c, const std::string& k, const std::string& v) {
            c.cbow_negatives = to_int(k, v);
        });
        add("cbow_epochs", [](RunConfig& c, const std::string& k, const std::string& v) {
            c.cbow_epochs = to_int(k, v);
        });
        add("cbow_learning_rate",
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.cbow_learning_rate = to_double(k, v);
            });
        auto path = [&add](const std::string& key, std::string RunConfig::*member) {
            add(key, [member](RunConfig& c, const std::string&, const std::string& v) {
                c.*member = trim(v);
            });
        };
        path("corpus", &RunConfig::corpus_path);
        path("gazetteer", &RunConfig::gazetteer_path);
        path("kb_triples", &RunConfig::kb_triples_path);
        path("kb_entity_vectors", &RunConfig::kb_entity_vectors_path);
        path("kb_relation_vectors", &RunConfig::kb_relation_vectors_path);
        path("word_vectors", &RunConfig::word_vectors_path);
        path("ground_truth", &RunConfig::ground_truth_path);
        path("checkpoint", &RunConfig::checkpoint_path);
        path("tfidf", &RunConfig::tfidf_path);
        path("output_dir", &RunConfig::output_dir);
        return t;
    }();
    return table;
}

}  // namespace

void apply_config_entry(RunConfig& config, const std::string& key,
                        const std::string& value) {
    auto it = setters().find(lowercase(trim(key)));
    if (it == setters().end())
        throw ConfigError("config: unknown key '" + key + "'");
    it->second(config, lowercase(trim(key)), trim(value));
}

RunConfig parse_run_config(const std::string& text, const std::string& origin) {
    RunConfig config;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": expected `key = value`");
        apply_config_entry(config, t.substr(0, eq), t.substr(eq + 1));
    }
    return config;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str(), path);
}

void apply_env_overrides(RunConfig& config) {
    for (const auto& [key, setter] : setters()) {
        std::string env_key = "CELETRIP_";
        for (char c : key) env_key.push_back(char(std::toupper(static_cast<unsigned char>(c))));
        const char* value = std::getenv(env_key.c_str());
        if (value) setter(config, key, value);
    }
}

void validate_config(const RunConfig& config) {
    const auto& m = config.model;
    auto positive = [](const std::string& name, int v) {
        if (v <= 0) throw ConfigError("config: " + name + " must be positive");
    };
    positive("wv_dim", m.wv_dim);
    positive("tfidf_dim", m.tfidf_dim);
    positive("hidden_dim", m.hidden_dim);
    positive("feature_dim", m.feature_dim);
    positive("kb_dim", m.kb_dim);
    positive("blocks", m.blocks);
    positive("trip_gat_layers", m.trip_gat_layers);
    positive("window", m.window);
    if (m.date_offset < 0) throw ConfigError("config: date_offset must be >= 0");
    if (m.epsilon <= 0.0 || m.epsilon >= 1.0)
        throw ConfigError("config: epsilon must lie in (0, 1)");
    if (config.max_epochs < 1) throw ConfigError("config: max_epochs must be >= 1");
    if (config.patience < 0) throw ConfigError("config: patience must be >= 0");
    if (config.learning_rate <= 0.0)
        throw ConfigError("config: learning_rate must be positive");
    if (config.threshold < 0.0 || config.threshold > 1.0)
        throw ConfigError("config: threshold must lie in [0, 1]");
    if (config.val_frac <= 0.0 || config.val_frac >= 1.0)
        throw ConfigError("config: val_frac must lie in (0, 1)");
    if (config.pos_weight <= 0.0)
        throw ConfigError("config: pos_weight must be positive");
}

std::string dump_run_config(const RunConfig& c) {
    std::ostringstream out;
    out.precision(17);
    out << "hidden_dim = " << c.model.hidden_dim << "\n";
    out << "feature_dim = " << c.model.feature_dim << "\n";
    out << "wv_dim = " << c.model.wv_dim << "\n";
    out << "tfidf_dim = " << c.model.tfidf_dim << "\n";
    out << "kb_dim = " << c.model.kb_dim << "\n";
    out << "blocks = " << c.model.blocks << "\n";
    out << "trip_gat_layers = " << c.model.trip_gat_layers << "\n";
    out << "window = " << c.model.window << "\n";
    out << "date_offset = " << c.model.date_offset << "\n";
    out << "epsilon = " << c.model.epsilon << "\n";
    out << "leaky_slope = " << c.model.leaky_slope << "\n";
    out << "use_oriented_pooling = " << (c.model.use_oriented_pooling ? "true" : "false")
        << "\n";
    out << "use_entity_module = " << (c.model.use_entity_module ? "true" : "false") << "\n";
    out << "use_event_module = " << (c.model.use_event_module ? "true" : "false") << "\n";
    out << "max_epochs = " << c.max_epochs << "\n";
    out << "patience = " << c.patience << "\n";
    out << "learning_rate = " << c.learning_rate << "\n";
    out << "threshold = " << c.threshold << "\n";
    out << "pos_weight = " << c.pos_weight << "\n";
    out << "val_frac = " << c.val_frac << "\n";
    out << "split_date = " << c.split_date.to_iso() << "\n";
    out << "seed = " << c.seed << "\n";
    out << "cbow_window = " << c.cbow_window << "\n";
    out << "cbow_negatives = " << c.cbow_negatives << "\n";
    out << "cbow_epochs = " << c.cbow_epochs << "\n";
    out << "cbow_learning_rate = " << c.cbow_learning_rate << "\n";
    auto path = [&out](const char* key, const std::string& v) {
        if (!v.empty()) out << key << " = " << v << "\n";
    };
    path("corpus", c.corpus_path);
    path("gazetteer", c.gazetteer_path);
    path("kb_triples", c.kb_triples_path);
    path("kb_entity_vectors", c.kb_entity_vectors_path);
    path("kb_relation_vectors", c.kb_relation_vectors_path);
    path("word_vectors", c.word_vectors_path);
    path("ground_truth", c.ground_truth_path);
    path("checkpoint", c.checkpoint_path);
    path("tfidf", c.tfidf_path);
    path("output_dir", c.output_dir);
    return out.str();
}

}  // namespace celetrip
