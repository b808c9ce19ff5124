#include <cstdlib>

#include "celetrip/config.hpp"
#include "doctest.h"

using namespace celetrip;

TEST_CASE("config file parsing with aliases and comments") {
    RunConfig c = parse_run_config(
        "# model\n"
        "hidden_dim = 64\n"
        "F = 32\n"
        "q = 3\n"
        "lr = 0.01\n"
        "epsilon = 0.4\n"
        "use_event_module = false\n"
        "split_date = 2020-06-01\n"
        "corpus = data/corpus.jsonl\n");
    CHECK(c.model.hidden_dim == 64);
    CHECK(c.model.feature_dim == 32);
    CHECK(c.model.date_offset == 3);
    CHECK(c.learning_rate == 0.01);
    CHECK(c.model.epsilon == 0.4);
    CHECK_FALSE(c.model.use_event_module);
    CHECK(c.split_date == Date{2020, 6, 1});
    CHECK(c.corpus_path == "data/corpus.jsonl");
}

TEST_CASE("unknown keys and malformed values are named errors") {
    CHECK_THROWS_WITH_AS(parse_run_config("wizard = 1\n"),
                         doctest::Contains("wizard"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_run_config("hidden_dim = soup\n"),
                         doctest::Contains("hidden_dim"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("no equals sign\n"), ConfigError);
}

TEST_CASE("validation flags out-of-range fields") {
    RunConfig ok;
    validate_config(ok);

    RunConfig bad_eps;
    bad_eps.model.epsilon = 1.0;
    CHECK_THROWS_WITH_AS(validate_config(bad_eps), doctest::Contains("epsilon"),
                         ConfigError);

    RunConfig bad_q;
    bad_q.model.date_offset = -1;
    CHECK_THROWS_WITH_AS(validate_config(bad_q), doctest::Contains("date_offset"),
                         ConfigError);

    RunConfig bad_dim;
    bad_dim.model.hidden_dim = 0;
    CHECK_THROWS_AS(validate_config(bad_dim), ConfigError);
}

TEST_CASE("dump and reparse round-trips every setting") {
    RunConfig c;
    c.model.hidden_dim = 48;
    c.model.epsilon = 0.35;
    c.model.use_oriented_pooling = false;
    c.learning_rate = 0.005;
    c.seed = 99;
    c.corpus_path = "x.jsonl";
    c.output_dir = "out";
    RunConfig back = parse_run_config(dump_run_config(c));
    CHECK(back.model.hidden_dim == 48);
    CHECK(back.model.epsilon == doctest::Approx(0.35));
    CHECK_FALSE(back.model.use_oriented_pooling);
    CHECK(back.learning_rate == doctest::Approx(0.005));
    CHECK(back.seed == 99);
    CHECK(back.corpus_path == "x.jsonl");
    CHECK(back.output_dir == "out");
}

TEST_CASE("environment variables override file values") {
    RunConfig c = parse_run_config("hidden_dim = 8\n");
    setenv("CELETRIP_HIDDEN_DIM", "24", 1);
    apply_env_overrides(c);
    unsetenv("CELETRIP_HIDDEN_DIM");
    CHECK(c.model.hidden_dim == 24);
}
