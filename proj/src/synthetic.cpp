#include "sbr/synthetic.hpp"

#include "sbr/rng.hpp"

namespace sbr {

bool is_rule_source(ItemId item, std::int32_t n_items) {
  return item % 2 == 0 && item + 1 < n_items;
}

ItemId rule_target(ItemId source) { return source + 1; }

SessionSet generate_synthetic_corpus(const SyntheticSpec& spec) {
  if (spec.n_items < 1 || spec.n_sessions < 1 || spec.span_days < 1) {
    throw Error("synthetic corpus needs at least one item, session and day");
  }
  if (spec.min_session_length < 1 || spec.max_session_length < spec.min_session_length) {
    throw Error("invalid session length range");
  }
  if (spec.rule_strength < 0.0 || spec.rule_strength > 1.0) {
    throw Error("rule_strength must be in [0, 1]");
  }

  Rng rng(spec.seed);
  std::vector<Session> sessions;
  sessions.reserve(static_cast<std::size_t>(spec.n_sessions));
  for (std::int32_t sid = 0; sid < spec.n_sessions; ++sid) {
    const auto length = static_cast<std::size_t>(
        rng.uniform_int(spec.min_session_length, spec.max_session_length));
    const auto start = static_cast<Timestamp>(rng.uniform_below(
        static_cast<std::uint64_t>(spec.span_days) * kMillisPerDay));
    Session s{sid, {}};
    ItemId prev = -1;
    for (std::size_t i = 0; i < length; ++i) {
      ItemId item;
      if (i > 0 && is_rule_source(prev, spec.n_items) &&
          rng.bernoulli(spec.rule_strength)) {
        item = rule_target(prev);
      } else {
        item = static_cast<ItemId>(
            rng.uniform_below(static_cast<std::uint64_t>(spec.n_items)));
      }
      s.events.push_back(
          {sid, item, start + static_cast<Timestamp>(i) * kMillisPerSecond});
      prev = item;
    }
    sessions.push_back(std::move(s));
  }
  return SessionSet::build(std::move(sessions));
}

}  // namespace sbr
