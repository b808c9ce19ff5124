#include "celetrip/synth.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "celetrip/text.hpp"
#include "json.hpp"

namespace celetrip {

namespace {

using nlohmann::ordered_json;

const std::vector<std::string> kCelebrities = {
    "Alice Varga", "Bruno Keller", "Carmen Ortiz", "Derek Shaw",
    "Elena Moreau", "Felix Grant", "Hana Suzuki", "Igor Petrov"};

const std::vector<std::string> kOtherTravelers = {"Victor Lane", "Wendy Brooks",
                                                  "Oscar Flint", "Paula Singh"};

struct City {
    std::string name;
    std::string alias;  // may be empty
    std::string country;
};

const std::vector<City> kCities = {
    {"Arlingford", "", "Veltria"},   {"Bellmere", "", "Veltria"},
    {"Cresthaven", "", "Veltria"},   {"Dunshire", "", "Veltria"},
    {"Eastvale", "", "Veltria"},     {"Fairmont", "", "Veltria"},
    {"Glenrock", "", "Veltria"},     {"Harborview", "", "Veltria"},
    {"Ironbridge", "", "Veltria"},   {"Juneport", "", "Veltria"},
    {"Kingsdale", "", "Veltria"},    {"Lakemoor", "", "Veltria"},
    {"Marwick", "", "Norland"},      {"Northgate", "", "Norland"},
    {"Oakridge", "", "Norland"},     {"Pinehurst", "", "Norland"},
    {"Quarrytown", "", "Norland"},   {"Riverton", "", "Norland"},
    {"Stonebridge", "", "Norland"},  {"Thornfield", "", "Norland"},
    {"Umberton", "", "Norland"},     {"Vexley", "", "Norland"},
    {"Westmoor", "", "Norland"},     {"Saint Clemens", "St Clemens", "Norland"},
};

const std::vector<std::string> kEventPrefixes = {
    "Amber", "Crystal", "Golden",  "Silver", "Emerald", "Scarlet", "Ivory", "Cobalt",
    "Maple", "Cedar",   "Willow",  "Aspen",  "Lunar",   "Solar",   "Coral", "Onyx"};
const std::vector<std::string> kEventSuffixes = {"Festival", "Fair", "Expo", "Gala",
                                                 "Summit"};

const std::vector<std::string> kDefaultFiller = {
    "committee", "sector",    "museum",    "library",   "garden",    "market",
    "bridge",    "tower",     "season",    "budget",    "harvest",   "report",
    "officials", "residents", "interview", "program",   "project",   "industry",
    "transport", "culture",   "history",   "science",   "education", "health",
    "finance",   "review",    "analysis",  "survey",    "update",    "briefing",
    "statement", "remarks",   "outlook",   "trends",    "schedule",  "plan",
    "agenda",    "session",   "panel",     "forum",     "debate",    "exchange",
    "trade",     "policy",    "reform",    "growth",    "data",      "study"};

const std::vector<std::vector<std::string>> kTripVerbs = {
    {"visited"}, {"arrived", "in"}, {"landed", "in"}};

std::vector<std::string> name_tokens(const std::string& name) {
    return tokenize(name);
}

struct MentionSpec {
    std::string surface;
    std::string type;
    int sentence = 0;
    int start = 0;
    int end = 0;
};

// Builds one article from token sentences, tracking mention spans.
struct ArticleBuilder {
    std::string id;
    std::string publish;  // ISO or empty
    std::vector<std::vector<std::string>> sentences;
    std::vector<MentionSpec> mentions;

    int begin_sentence() {
        sentences.emplace_back();
        return int(sentences.size()) - 1;
    }
    void push(const std::string& token) { sentences.back().push_back(token); }
    void push_all(const std::vector<std::string>& tokens) {
        for (const auto& t : tokens) push(t);
    }
    // Appends a named span and records it as a mention.
    void push_mention(const std::string& surface, const std::string& type) {
        auto toks = name_tokens(surface);
        int s = int(sentences.size()) - 1;
        int start = int(sentences.back().size());
        push_all(toks);
        mentions.push_back(MentionSpec{surface, type, s, start, start + int(toks.size())});
    }

    std::string to_jsonl() const {
        ordered_json j;
        j["id"] = id;
        std::string text;
        for (const auto& sent : sentences) {
            for (size_t i = 0; i < sent.size(); i++) {
                if (i > 0) text += " ";
                text += sent[i];
            }
            text += ". ";
        }
        j["text"] = text;
        if (publish.empty())
            j["publish_date"] = nullptr;
        else
            j["publish_date"] = publish;
        j["mentions"] = ordered_json::array();
        for (const auto& m : mentions) {
            ordered_json jm;
            jm["surface"] = m.surface;
            jm["type"] = m.type;
            jm["sentence"] = m.sentence;
            jm["start"] = m.start;
            jm["end"] = m.end;
            j["mentions"].push_back(jm);
        }
        return j.dump();
    }
};

std::string month_name(int m) {
    static const char* names[12] = {"January", "February", "March",     "April",
                                    "May",     "June",     "July",      "August",
                                    "September", "October", "November", "December"};
    return names[m - 1];
}

}  // namespace

SynthData synth_generate(const SynthOptions& options) {
    if (options.n_days < 1) throw CorpusError("synth_generate: n_days must be >= 1");
    if (options.candidates_per_day < 2 ||
        options.candidates_per_day > int(kCities.size()) - 1)
        throw CorpusError("synth_generate: candidates_per_day out of range");

    std::mt19937_64 rng(options.seed);
    auto pick = [&rng](size_t n) { return size_t(rng() % n); };
    const std::vector<std::string>& filler =
        options.filler_vocab.empty() ? kDefaultFiller : options.filler_vocab;
    auto any_filler = [&]() { return filler[pick(filler.size())]; };

    // Event pool: first half are genuine events, second half decoy events.
    struct Event {
        std::string name;
        std::string venue;
        size_t home_city;
    };
    std::vector<Event> events;
    for (const auto& prefix : kEventPrefixes)
        for (const auto& suffix : kEventSuffixes)
            events.push_back(Event{prefix + " " + suffix, prefix + " Hall",
                                   pick(kCities.size())});
    const size_t true_events = events.size() / 2;

    SynthData data;
    std::ostringstream corpus;
    std::ostringstream truth;
    truth << "celebrity,date,location\n";

    int article_counter = 0;
    auto new_article = [&](const Date& publish) {
        ArticleBuilder a;
        a.id = "a" + std::to_string(article_counter++);
        a.publish = publish.to_iso();
        return a;
    };
    auto emit = [&](const ArticleBuilder& a) { corpus << a.to_jsonl() << "\n"; };

    size_t implicit_counter = 0;
    for (int day = 0; day < options.n_days; day++) {
        const Date d = options.start_date.plus_days(day);
        const std::string& celeb = kCelebrities[size_t(day) % kCelebrities.size()];
        const bool implicit = day % 5 == 2;
        const bool decoy_frequent = day % 2 == 0;
        const bool date_in_text = day % 7 == 3 && !implicit;
        const std::string key = celeb + "|" + d.to_iso();
        if (implicit) data.implicit_keys.insert(key);
        if (decoy_frequent) data.decoy_frequent_keys.insert(key);

        // Choose the day's locations.
        size_t true_city;
        const Event* event = nullptr;
        if (implicit) {
            event = &events[implicit_counter % true_events];
            implicit_counter++;
            true_city = event->home_city;
        } else {
            true_city = pick(kCities.size());
        }
        std::vector<size_t> decoys;
        while (int(decoys.size()) < options.candidates_per_day - 1) {
            size_t c = pick(kCities.size());
            if (c == true_city) continue;
            if (std::find(decoys.begin(), decoys.end(), c) != decoys.end()) continue;
            decoys.push_back(c);
        }
        const std::string& true_name = kCities[true_city].name;

        if (implicit) {
            // The visit is only implied: the event opens at its venue in the
            // true city, and the celebrity attends the event elsewhere in
            // the coverage.
            ArticleBuilder p1 = new_article(d);
            p1.begin_sentence();
            p1.push("The");
            p1.push_mention(event->name, "EVENT");
            p1.push("opened");
            p1.push("at");
            p1.push_mention(event->venue, "FACILITY");
            p1.push("in");
            p1.push_all(name_tokens(true_name));
            p1.begin_sentence();
            p1.push_all({"Thousands", "gathered", "for", "the", "opening", "ceremony"});
            p1.begin_sentence();
            p1.push_mention(celeb, "PERSON");
            p1.push_all({"discussed", "regional", any_filler()});
            emit(p1);

            ArticleBuilder p2 = new_article(d);
            p2.begin_sentence();
            p2.push_mention(celeb, "PERSON");
            p2.push_all({"attended", "the"});
            p2.push_mention(event->name, "EVENT");
            p2.push_all({"ceremony", "with", "other", "guests"});
            emit(p2);

            // Buzz articles around the date feed the daily-count vector.
            for (int off : {-3, -2, -1, 1, 2, 3}) {
                ArticleBuilder buzz = new_article(d.plus_days(off));
                buzz.begin_sentence();
                if (off < 0) {
                    buzz.push_all({"Preparations", "for", "the"});
                    buzz.push_mention(event->name, "EVENT");
                    buzz.push_all({"continue", "at", "the", any_filler()});
                } else {
                    buzz.push_all({"Organizers", "of", "the"});
                    buzz.push_mention(event->name, "EVENT");
                    buzz.push_all({"reviewed", "the", "final", any_filler()});
                }
                emit(buzz);
            }
        } else {
            // Explicit trip phrasing near the celebrity name.
            ArticleBuilder s1 = new_article(date_in_text ? d.plus_days(1) : d);
            s1.begin_sentence();
            s1.push_mention(celeb, "PERSON");
            s1.push_all(kTripVerbs[pick(kTripVerbs.size())]);
            s1.push_all(name_tokens(true_name));
            if (date_in_text) {
                s1.push_all({"on", month_name(d.month), std::to_string(d.day),
                             std::to_string(d.year)});
            }
            s1.begin_sentence();
            s1.push_all({"The", any_filler(), any_filler(), "drew", "wide", "attention"});
            emit(s1);

            if (rng() % 2 == 0) {
                ArticleBuilder s2 = new_article(d);
                s2.begin_sentence();
                s2.push_mention(celeb, "PERSON");
                s2.push_all(kTripVerbs[pick(kTripVerbs.size())]);
                s2.push_all(name_tokens(true_name));
                s2.push_all({"and", "met", "local", "officials"});
                emit(s2);
            }
        }

        // Decoy coverage. Every decoy article also names the target
        // celebrity in a neutral sentence so it lands in A_{c,d}.
        for (size_t k = 0; k < decoys.size(); k++) {
            const City& city = kCities[decoys[k]];
            if (implicit && k == 0) {
                // A decoy event from the same naming grammar opens here, but
                // with no celebrity attendance and no surrounding coverage.
                const Event& de = events[true_events + pick(events.size() - true_events)];
                ArticleBuilder a = new_article(d);
                a.begin_sentence();
                a.push("The");
                a.push_mention(de.name, "EVENT");
                a.push("opened");
                a.push("at");
                a.push_mention(de.venue, "FACILITY");
                a.push("in");
                a.push_all(name_tokens(city.name));
                a.begin_sentence();
                a.push_mention(celeb, "PERSON");
                a.push_all({"discussed", "the", any_filler(), "agenda"});
                emit(a);
                continue;
            }
            if (rng() % 2 == 0) {
                // Another traveler actually visits the decoy.
                const std::string& other = kOtherTravelers[pick(kOtherTravelers.size())];
                ArticleBuilder a = new_article(d);
                a.begin_sentence();
                a.push_mention(other, "PERSON");
                a.push_all(kTripVerbs[pick(kTripVerbs.size())]);
                a.push_all(name_tokens(city.name));
                a.begin_sentence();
                a.push_mention(celeb, "PERSON");
                a.push_all({"commented", "on", "the", any_filler(), "figures"});
                emit(a);
            } else {
                // Neutral municipal coverage, sometimes naming the country to
                // exercise containment resolution.
                ArticleBuilder a = new_article(d);
                a.begin_sentence();
                a.push("The");
                a.push_mention(any_filler() + " council", "ORGANIZATION");
                a.push("in");
                a.push_all(name_tokens(city.name));
                if (day % 11 == 5) a.push_all(name_tokens(city.country));
                a.push_all({"published", "an", "annual", any_filler()});
                a.begin_sentence();
                a.push_mention(celeb, "PERSON");
                a.push_all({"discussed", "the", any_filler(), "with", "reporters"});
                emit(a);
            }
            if (!city.alias.empty()) {
                // One extra story using the alias form.
                ArticleBuilder a = new_article(d);
                a.begin_sentence();
                a.push_all({"A", "new", any_filler(), "opened", "in"});
                a.push_all(name_tokens(city.alias));
                a.begin_sentence();
                a.push_mention(celeb, "PERSON");
                a.push_all({"noted", "the", any_filler(), "numbers"});
                emit(a);
            }
        }
        if (decoy_frequent) {
            // Two extra stories make the first decoy strictly more frequent
            // than the true location.
            const City& city = kCities[decoys[0]];
            for (int extra = 0; extra < 2; extra++) {
                ArticleBuilder a = new_article(d);
                a.begin_sentence();
                a.push_all({"The", any_filler(), "board", "in"});
                a.push_all(name_tokens(city.name));
                a.push_all({"met", "this", "week"});
                a.begin_sentence();
                a.push_all({"Residents", "of"});
                a.push_all(name_tokens(city.name));
                a.push_all({"joined", "the", any_filler(), "session"});
                a.begin_sentence();
                a.push_mention(celeb, "PERSON");
                a.push_all({"mentioned", "the", any_filler(), "initiative"});
                emit(a);
            }
        }

        truth << celeb << "," << d.to_iso() << "," << true_name << "\n";
        data.truths.push_back(GroundTruthRow{celeb, d, true_name});
    }

    // Gazetteer: cities (with optional aliases) under two countries.
    std::ostringstream gaz;
    std::set<std::string> countries;
    int gid = 1;
    for (const auto& c : kCities) {
        gaz << "g" << gid++ << "\t" << c.name << "\t" << c.alias << "\t" << c.country
            << "\tcity\n";
        countries.insert(c.country);
    }
    for (const auto& c : countries) gaz << "g" << gid++ << "\t" << c << "\t\t\tcountry\n";

    // Knowledge base: venues sit in their home cities and host their
    // events; celebrities carry light background triples.
    std::ostringstream triples;
    std::vector<std::string> kb_entities;
    for (const auto& e : events) {
        triples << e.venue << "\tlocated_in\t" << kCities[e.home_city].name << "\n";
        triples << e.name << "\theld_at\t" << e.venue << "\n";
        kb_entities.push_back(e.venue);
        kb_entities.push_back(e.name);
    }
    for (size_t i = 0; i < kCelebrities.size(); i++) {
        triples << kCelebrities[i] << "\tmember_of\t"
                << (i % 2 == 0 ? "Red Party" : "Blue Alliance") << "\n";
        kb_entities.push_back(kCelebrities[i]);
    }
    kb_entities.push_back("Red Party");
    kb_entities.push_back("Blue Alliance");
    for (const auto& c : kCities) kb_entities.push_back(c.name);
    for (const auto& c : countries) kb_entities.push_back(c);

    const int kb_dim = 50;
    std::normal_distribution<double> gauss(0.0, 0.3);
    std::ostringstream evec;
    evec << kb_entities.size() << " " << kb_dim << "\n";
    evec.precision(9);
    for (const auto& name : kb_entities) {
        evec << normalize_phrase(name);
        for (int k = 0; k < kb_dim; k++) evec << " " << gauss(rng);
        evec << "\n";
    }
    std::ostringstream rvec;
    const std::vector<std::string> relations = {"located_in", "held_at", "member_of"};
    rvec << relations.size() << " " << kb_dim << "\n";
    rvec.precision(9);
    for (const auto& r : relations) {
        rvec << r;
        for (int k = 0; k < kb_dim; k++) rvec << " " << gauss(rng);
        rvec << "\n";
    }

    data.corpus_jsonl = corpus.str();
    data.truth_csv = truth.str();
    data.gazetteer_tsv = gaz.str();
    data.kb_triples_tsv = triples.str();
    data.kb_entity_vectors = evec.str();
    data.kb_relation_vectors = rvec.str();
    return data;
}

}  // namespace celetrip
