#pragma once

#include <cstdint>

#include "sbr/types.hpp"

namespace sbr {

// Seeded corpus generator with planted sequential rules: items are paired
// (0->1, 2->3, ...) and with probability rule_strength an even item is
// immediately followed by its partner. Session starts are uniform over the
// span; events within a session are one second apart.
struct SyntheticSpec {
  std::int32_t n_items = 100;
  std::int32_t n_sessions = 1000;
  int span_days = 30;
  double rule_strength = 0.0;
  std::uint64_t seed = 1;
  int min_session_length = 2;
  int max_session_length = 10;
};

SessionSet generate_synthetic_corpus(const SyntheticSpec& spec);

// Planted-rule helpers: an even item below n_items-1 is a rule source whose
// target is the next item id.
bool is_rule_source(ItemId item, std::int32_t n_items);
ItemId rule_target(ItemId source);

}  // namespace sbr
