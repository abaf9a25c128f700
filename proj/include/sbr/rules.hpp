#pragma once

#include <unordered_map>
#include <vector>

#include "sbr/ranking.hpp"
#include "sbr/types.hpp"

namespace sbr {

// Positional decay for sequential rules. Harmonic scores a pair at distance
// d with 1/d; Step only counts directly adjacent pairs.
enum class RuleDecay { kHarmonic, kStep };

// Immutable item-to-item association weights with pre-ranked rows.
class RuleTable {
 public:
  using Row = std::vector<ScoredItem>;  // (score desc, item asc)

  static RuleTable from_weights(
      std::unordered_map<ItemId, std::unordered_map<ItemId, double>> weights);

  // nullptr when the item never occurred as a rule source.
  const Row* row(ItemId from) const;

  // 0 when no rule exists.
  double weight(ItemId from, ItemId to) const;

  std::size_t source_count() const { return rows_.size(); }

 private:
  std::unordered_map<ItemId, Row> rows_;
};

// Counts pairwise co-occurrences: each position pair of distinct items in a
// session adds 1 to both directions.
RuleTable fit_ar(const SessionSet& train);

// Order-aware variant: a position pair p<q with items i!=j adds
// decay(q-p) to weight(i->j) only.
RuleTable fit_sr(const SessionSet& train, RuleDecay decay = RuleDecay::kHarmonic);

// Ranks the rule row of the last prefix item. Unknown last item gives an
// empty recommendation.
Recommendation predict_rules(const RuleTable& table, const Session& prefix, int k);

inline Recommendation predict_ar(const RuleTable& table, const Session& prefix, int k) {
  return predict_rules(table, prefix, k);
}
inline Recommendation predict_sr(const RuleTable& table, const Session& prefix, int k) {
  return predict_rules(table, prefix, k);
}

}  // namespace sbr
