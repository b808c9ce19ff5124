#include <algorithm>
#include <set>

#include "celetrip/corpus.hpp"
#include "celetrip/dates.hpp"
#include "celetrip/geo.hpp"
#include "doctest.h"
#include "fixture_path.hpp"

using namespace celetrip;

TEST_CASE("load_corpus parses JSONL and counts articles") {
    Corpus two = load_corpus_from_string(
        R"({"id":"a1","text":"Alpha beta.","publish_date":"2020-01-01"})"
        "\n"
        R"({"id":"a2","text":"Gamma delta.","publish_date":null})");
    CHECK(two.size() == 2);
    CHECK(two.get("a1").publish_date == Date{2020, 1, 1});
    CHECK_FALSE(two.get("a2").publish_date.has_value());

    Corpus empty = load_corpus_from_string("");
    CHECK(empty.empty());
}

TEST_CASE("duplicate article ids are rejected with both line numbers") {
    const std::string jsonl =
        R"({"id":"dup","text":"one.","publish_date":null})"
        "\n"
        R"({"id":"dup","text":"two.","publish_date":null})";
    try {
        load_corpus_from_string(jsonl, "fixture.jsonl");
        FAIL("expected CorpusError");
    } catch (const CorpusError& e) {
        std::string msg = e.what();
        CHECK(msg.find("dup") != std::string::npos);
        CHECK(msg.find("1") != std::string::npos);
        CHECK(msg.find("2") != std::string::npos);
    }
}

TEST_CASE("unparseable publish date downgrades to a warning") {
    Corpus c = load_corpus_from_string(
        R"({"id":"a1","text":"Alpha.","publish_date":"not-a-date"})");
    CHECK(c.size() == 1);
    CHECK_FALSE(c.get("a1").publish_date.has_value());
    REQUIRE(c.warnings().size() == 1);
    CHECK(c.warnings()[0].find("not-a-date") != std::string::npos);
}

TEST_CASE("malformed JSON lines name the line number") {
    CHECK_THROWS_AS(load_corpus_from_string("{not json}"), CorpusError);
}

TEST_CASE("mention spans are validated against sentence bounds") {
    Corpus c = load_corpus_from_string(
        R"({"id":"a1","text":"Angela Merkel spoke.","publish_date":null,)"
        R"("mentions":[{"surface":"Angela Merkel","type":"PERSON","sentence":0,"start":0,"end":2},)"
        R"({"surface":"Ghost","type":"PERSON","sentence":0,"start":5,"end":7},)"
        R"({"surface":"Odd","type":"WIZARD","sentence":0,"start":0,"end":1}]})");
    REQUIRE(c.get("a1").mentions.size() == 1);
    CHECK(c.get("a1").mentions[0].surface == "Angela Merkel");
    CHECK(c.warnings().size() == 2);
}

namespace {

Corpus figure_corpus() {
    // One day of coverage: a visit article, a date-in-text article, and a
    // tower distractor without the person.
    Corpus c = load_corpus_from_string(
        R"({"id":"n1","text":"Donald Trump visited Philadelphia. He spoke at length.","publish_date":"2017-01-26"})"
        "\n"
        R"({"id":"n2","text":"The speech referenced events on January 26, 2017 in Washington.","publish_date":"2017-01-25"})"
        "\n"
        R"({"id":"n3","text":"Trump Tower opened a new lobby.","publish_date":"2017-01-26"})"
        "\n"
        R"({"id":"n4","text":"Donald Trump's staff remained in Washington D.C.","publish_date":"2017-01-26"})");
    annotate_corpus_dates(c);
    return c;
}

}  // namespace

TEST_CASE("select_articles uses publish date or in-text date plus full-name match") {
    Corpus c = figure_corpus();
    auto ids = select_articles(c, "Donald Trump", Date{2017, 1, 26});
    CHECK(ids == std::vector<std::string>{"n1", "n4"});

    // n2 names the date in text but never the person; adding the person
    // makes the disjunction visible.
    Corpus c2 = load_corpus_from_string(
        R"({"id":"m1","text":"Donald Trump met aides on January 26, 2017 for talks.","publish_date":"2017-01-25"})");
    annotate_corpus_dates(c2);
    CHECK(select_articles(c2, "Donald Trump", Date{2017, 1, 26}) ==
          std::vector<std::string>{"m1"});

    // "Trump Tower" must not match the full name.
    CHECK(select_articles(c, "Donald Trump", Date{2017, 1, 26}) !=
          std::vector<std::string>{"n1", "n3", "n4"});
}

TEST_CASE("name matching requires adjacent tokens in order") {
    Corpus c = load_corpus_from_string(
        R"({"id":"a","text":"Trump said Donald would not comment.","publish_date":"2020-01-01"})");
    CHECK(select_articles(c, "Donald Trump", Date{2020, 1, 1}).empty());
    Corpus c2 = load_corpus_from_string(
        R"({"id":"b","text":"Donald Trump's plane landed.","publish_date":"2020-01-01"})");
    CHECK(select_articles(c2, "Donald Trump", Date{2020, 1, 1}) ==
          std::vector<std::string>{"b"});
}

TEST_CASE("select_articles is monotone in the corpus") {
    Corpus small = load_corpus_from_string(
        R"({"id":"a1","text":"Donald Trump visited Philadelphia.","publish_date":"2017-01-26"})");
    annotate_corpus_dates(small);
    auto before = select_articles(small, "Donald Trump", Date{2017, 1, 26});

    Corpus larger = load_corpus_from_string(
        R"({"id":"a1","text":"Donald Trump visited Philadelphia.","publish_date":"2017-01-26"})"
        "\n"
        R"({"id":"a2","text":"Unrelated weather report.","publish_date":"2017-01-26"})");
    annotate_corpus_dates(larger);
    auto after = select_articles(larger, "Donald Trump", Date{2017, 1, 26});
    for (const auto& id : before)
        CHECK(std::find(after.begin(), after.end(), id) != after.end());
}

TEST_CASE("select_articles_for_location honors alias-expanded extraction") {
    auto index = build_gazetteer_index(fixture_path("gazetteer.tsv"));
    Corpus c = load_corpus_from_string(
        R"({"id":"a1","text":"Donald Trump toured NYC yesterday.","publish_date":"2020-05-01"})"
        "\n"
        R"({"id":"a2","text":"Donald Trump praised Paris.","publish_date":"2020-05-01"})"
        "\n"
        R"({"id":"a3","text":"Donald Trump stayed home.","publish_date":"2020-05-01"})");
    auto geo = extract_geo_corpus(c, index);
    auto locations = article_candidate_map(geo);
    auto a_cd = select_articles(c, "Donald Trump", Date{2020, 5, 1});
    REQUIRE(a_cd.size() == 3);
    CHECK(select_articles_for_location(a_cd, "New York City", locations) ==
          std::vector<std::string>{"a1"});
    CHECK(select_articles_for_location(a_cd, "Paris", locations) ==
          std::vector<std::string>{"a2"});
    CHECK(select_articles_for_location(a_cd, "Berlin", locations).empty());
}

TEST_CASE("build_trip_instances labels candidates and logs missed trips") {
    auto index = build_gazetteer_index(fixture_path("gazetteer.tsv"));
    Corpus c = figure_corpus();
    auto geo = extract_geo_corpus(c, index);
    auto locations = article_candidate_map(geo);

    std::vector<GroundTruthRow> truth = {
        {"Donald Trump", Date{2017, 1, 26}, "Philadelphia"}};
    auto built = build_trip_instances(c, truth, locations);
    REQUIRE(built.instances.size() == 2);  // Philadelphia + Washington D.C.
    CHECK(built.missed_trips.empty());

    int positives = 0;
    for (const auto& inst : built.instances) {
        REQUIRE(inst.positive.has_value());
        if (*inst.positive) {
            positives++;
            CHECK(inst.location == "Philadelphia");
            CHECK(inst.article_ids == std::vector<std::string>{"n1"});
        }
        CHECK_FALSE(inst.article_ids.empty());
        for (const auto& id : inst.article_ids) CHECK(c.find(id) != nullptr);
    }
    CHECK(positives == 1);

    // A visited place that never surfaces as a candidate is a missed trip.
    std::vector<GroundTruthRow> truth2 = {
        {"Donald Trump", Date{2017, 1, 26}, "Langley"}};
    auto built2 = build_trip_instances(c, truth2, locations);
    for (const auto& inst : built2.instances) CHECK_FALSE(*inst.positive);
    REQUIRE(built2.missed_trips.size() == 1);
    CHECK(built2.missed_trips[0].find("langley") != std::string::npos);
}

TEST_CASE("labels partition candidates exactly once") {
    auto index = build_gazetteer_index(fixture_path("gazetteer.tsv"));
    Corpus c = figure_corpus();
    auto locations = article_candidate_map(extract_geo_corpus(c, index));
    std::vector<GroundTruthRow> truth = {
        {"Donald Trump", Date{2017, 1, 26}, "Philadelphia"}};
    auto built = build_trip_instances(c, truth, locations);
    std::set<std::string> seen;
    for (const auto& inst : built.instances) {
        CHECK(seen.insert(inst.location).second);
        CHECK(inst.positive.has_value());
    }
}

TEST_CASE("ground truth CSV parses with header and ISO dates") {
    auto rows = parse_ground_truth(
        "celebrity,date,location\nDonald Trump,2017-01-21,Langley\n");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].celebrity == "Donald Trump");
    CHECK(rows[0].date == Date{2017, 1, 21});
    CHECK(rows[0].location == "Langley");
    CHECK_THROWS_AS(parse_ground_truth("a,b\n"), CorpusError);
    CHECK_THROWS_AS(parse_ground_truth("x,2020-13-01,y\n"), CorpusError);
}
