#include <doctest.h>

#include "sbr/synthetic.hpp"
#include "test_util.hpp"

using namespace sbr;

TEST_CASE("full-strength rules always fire") {
  SyntheticSpec spec;
  spec.n_items = 40;
  spec.n_sessions = 200;
  spec.rule_strength = 1.0;
  spec.seed = 5;
  const SessionSet corpus = generate_synthetic_corpus(spec);
  for (const Session& s : corpus.sessions()) {
    for (std::size_t i = 0; i + 1 < s.events.size(); ++i) {
      if (is_rule_source(s.events[i].item, spec.n_items)) {
        CHECK(s.events[i + 1].item == rule_target(s.events[i].item));
      }
    }
  }
}

TEST_CASE("the generator is deterministic per seed") {
  SyntheticSpec spec;
  spec.n_items = 30;
  spec.n_sessions = 100;
  spec.rule_strength = 0.5;
  spec.seed = 9;
  CHECK(generate_synthetic_corpus(spec) == generate_synthetic_corpus(spec));
  spec.seed = 10;
  CHECK(generate_synthetic_corpus(spec) != generate_synthetic_corpus(SyntheticSpec{
            30, 100, 30, 0.5, 9, 2, 10}));
}

TEST_CASE("session lengths and spans respect the generator settings") {
  SyntheticSpec spec;
  spec.n_items = 20;
  spec.n_sessions = 150;
  spec.span_days = 12;
  spec.min_session_length = 3;
  spec.max_session_length = 6;
  const SessionSet corpus = generate_synthetic_corpus(spec);
  CHECK(corpus.size() == 150);
  for (const Session& s : corpus.sessions()) {
    CHECK(s.events.size() >= 3);
    CHECK(s.events.size() <= 6);
    CHECK(s.start_time() < 12 * kMillisPerDay);
  }
}

TEST_CASE("invalid generator specs are rejected") {
  SyntheticSpec spec;
  spec.n_items = 0;
  CHECK_THROWS_AS(generate_synthetic_corpus(spec), Error);
  spec.n_items = 10;
  spec.rule_strength = 1.5;
  CHECK_THROWS_AS(generate_synthetic_corpus(spec), Error);
  spec.rule_strength = 0.5;
  spec.max_session_length = 1;
  CHECK_THROWS_AS(generate_synthetic_corpus(spec), Error);
}
