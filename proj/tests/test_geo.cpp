#include <algorithm>

#include "celetrip/geo.hpp"
#include "doctest.h"
#include "fixture_path.hpp"

using namespace celetrip;

namespace {

Article article_from(const std::string& text) {
    Corpus c = load_corpus_from_string(R"({"id":"x","text":")" + text +
                                       R"(","publish_date":null})");
    return c.articles()[0];
}

}  // namespace

TEST_CASE("gazetteer index answers canonicals and aliases") {
    auto index = build_gazetteer_index(fixture_path("gazetteer.tsv"));
    CHECK(index.entries().size() == 12);
    REQUIRE(index.lookup("New York City"));
    CHECK(index.lookup("New York City")->id == "g3");
    REQUIRE(index.lookup("nyc"));
    CHECK(index.lookup("nyc")->canonical == "New York City");
    REQUIRE(index.lookup("USA"));
    CHECK(index.lookup("USA")->canonical == "United States");
    CHECK(index.lookup("Atlantis") == nullptr);
}

TEST_CASE("cyclic admin chains are a load error naming ids") {
    const std::string tsv =
        "c1\tAlpha\t\tBeta\tcity\n"
        "c2\tBeta\t\tAlpha\tregion\n";
    CHECK_THROWS_WITH_AS(parse_gazetteer(tsv), doctest::Contains("cycle"),
                         GazetteerError);
    try {
        parse_gazetteer(tsv);
    } catch (const GazetteerError& e) {
        std::string msg = e.what();
        CHECK(msg.find("c1") != std::string::npos);
    }
}

TEST_CASE("surface ties prefer the more specific feature class then smaller id") {
    const std::string tsv =
        "a9\tSpringfield\t\tUnited States\tregion\n"
        "a2\tSpringfield\t\tUnited States\tcity\n"
        "a1\tSpringfield\t\tUnited States\tcity\n";
    auto index = parse_gazetteer(tsv);
    REQUIRE(index.lookup("Springfield"));
    CHECK(index.lookup("Springfield")->id == "a1");
}

TEST_CASE("match_locations strips possessives and prefers longest match") {
    auto index = build_gazetteer_index(fixture_path("gazetteer.tsv"));

    auto m1 = match_locations(article_from("North Korea's envoy arrived."), index);
    REQUIRE(m1.size() == 1);
    CHECK(m1[0].canonical == "North Korea");
    CHECK(m1[0].surface == "North Korea's");

    auto m2 = match_locations(article_from("The New York City mayor spoke."), index);
    REQUIRE(m2.size() == 1);
    CHECK(m2[0].canonical == "New York City");
    CHECK(m2[0].token_begin == 1);
    CHECK(m2[0].token_end == 4);

    auto m3 = match_locations(article_from("Nothing about places here."), index);
    CHECK(m3.empty());
}

TEST_CASE("match spans never overlap") {
    auto index = build_gazetteer_index(fixture_path("gazetteer.tsv"));
    auto ms = match_locations(
        article_from("New York City and New York and Paris met in Paris."), index);
    for (size_t i = 1; i < ms.size(); i++) {
        if (ms[i].sentence_index == ms[i - 1].sentence_index)
            CHECK(ms[i].token_begin >= ms[i - 1].token_end);
    }
}

TEST_CASE("adding an alias never removes matches") {
    const std::string base =
        "b1\tNew York City\t\tUnited States\tcity\n"
        "b2\tParis\t\tFrance\tcity\n";
    const std::string extended =
        "b1\tNew York City\tNYC|Big Apple\tUnited States\tcity\n"
        "b2\tParis\t\tFrance\tcity\n";
    auto before = parse_gazetteer(base);
    auto after = parse_gazetteer(extended);
    Article art = article_from("They left New York City for Paris and NYC.");
    auto m_before = match_locations(art, before);
    auto m_after = match_locations(art, after);
    CHECK(m_after.size() >= m_before.size());
    for (const auto& m : m_before) {
        bool found = std::any_of(m_after.begin(), m_after.end(), [&](const auto& o) {
            return o.canonical == m.canonical && o.sentence_index == m.sentence_index &&
                   o.token_begin == m.token_begin;
        });
        CHECK(found);
    }
}

TEST_CASE("containment drops admin ancestors of co-occurring places") {
    auto index = build_gazetteer_index(fixture_path("gazetteer.tsv"));

    auto c1 = resolve_containment(
        match_locations(article_from("New York and the United States differ."), index),
        index);
    CHECK(c1 == std::vector<std::string>{"New York"});

    auto c2 = resolve_containment(
        match_locations(article_from("Paris and Berlin hosted talks."), index), index);
    CHECK(c2 == (std::vector<std::string>{"Berlin", "Paris"}));

    auto c3 = resolve_containment(
        match_locations(article_from("The United States announced plans."), index),
        index);
    CHECK(c3 == std::vector<std::string>{"United States"});
}

TEST_CASE("containment output is an antichain in admin ancestry") {
    auto index = build_gazetteer_index(fixture_path("gazetteer.tsv"));
    const char* texts[] = {
        "New York City sits in New York in the United States.",
        "Philadelphia and Pennsylvania and the United States.",
        "Paris and France and Berlin and Germany.",
    };
    for (const char* text : texts) {
        auto survivors = resolve_containment(match_locations(article_from(text), index),
                                             index);
        for (const auto& a : survivors) {
            for (const auto& b : survivors) {
                if (a == b) continue;
                const GazetteerEntry* eb = index.lookup(b);
                REQUIRE(eb);
                CHECK_FALSE(index.is_admin_ancestor(a, *eb));
            }
        }
    }
}
