#include "sbr/rules.hpp"

#include <algorithm>

namespace sbr {

Recommendation rank_topk(std::vector<ScoredItem> scores, int k) {
  if (k < 1) throw Error("rank_topk: k must be >= 1");
  std::erase_if(scores, [](const ScoredItem& s) { return !(s.score > 0.0); });
  std::sort(scores.begin(), scores.end(), [](const ScoredItem& a, const ScoredItem& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.item < b.item;
  });
  if (scores.size() > static_cast<std::size_t>(k)) {
    scores.resize(static_cast<std::size_t>(k));
  }
  return scores;
}

RuleTable RuleTable::from_weights(
    std::unordered_map<ItemId, std::unordered_map<ItemId, double>> weights) {
  RuleTable table;
  table.rows_.reserve(weights.size());
  for (auto& [from, row_weights] : weights) {
    Row row;
    row.reserve(row_weights.size());
    for (const auto& [to, w] : row_weights) row.push_back({to, w});
    std::sort(row.begin(), row.end(), [](const ScoredItem& a, const ScoredItem& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.item < b.item;
    });
    table.rows_.emplace(from, std::move(row));
  }
  return table;
}

const RuleTable::Row* RuleTable::row(ItemId from) const {
  auto it = rows_.find(from);
  return it == rows_.end() ? nullptr : &it->second;
}

double RuleTable::weight(ItemId from, ItemId to) const {
  const Row* r = row(from);
  if (!r) return 0.0;
  for (const ScoredItem& s : *r) {
    if (s.item == to) return s.score;
  }
  return 0.0;
}

RuleTable fit_ar(const SessionSet& train) {
  if (train.empty()) throw Error("cannot fit on an empty training set");
  std::unordered_map<ItemId, std::unordered_map<ItemId, double>> weights;
  for (const Session& s : train.sessions()) {
    const auto& ev = s.events;
    for (std::size_t p = 0; p < ev.size(); ++p) {
      for (std::size_t q = p + 1; q < ev.size(); ++q) {
        const ItemId i = ev[p].item, j = ev[q].item;
        if (i == j) continue;
        weights[i][j] += 1.0;
        weights[j][i] += 1.0;
      }
    }
  }
  return RuleTable::from_weights(std::move(weights));
}

RuleTable fit_sr(const SessionSet& train, RuleDecay decay) {
  if (train.empty()) throw Error("cannot fit on an empty training set");
  std::unordered_map<ItemId, std::unordered_map<ItemId, double>> weights;
  for (const Session& s : train.sessions()) {
    const auto& ev = s.events;
    for (std::size_t p = 0; p < ev.size(); ++p) {
      for (std::size_t q = p + 1; q < ev.size(); ++q) {
        const ItemId i = ev[p].item, j = ev[q].item;
        if (i == j) continue;
        const std::size_t dist = q - p;
        if (decay == RuleDecay::kHarmonic) {
          weights[i][j] += 1.0 / static_cast<double>(dist);
        } else if (dist == 1) {
          weights[i][j] += 1.0;
        }
      }
    }
  }
  return RuleTable::from_weights(std::move(weights));
}

Recommendation predict_rules(const RuleTable& table, const Session& prefix, int k) {
  if (prefix.events.empty()) throw Error("prediction needs a non-empty prefix");
  if (k < 1) throw Error("k must be >= 1");
  const RuleTable::Row* row = table.row(prefix.last_item());
  if (!row) return {};
  Recommendation rec(row->begin(),
                     row->begin() + std::min(row->size(), static_cast<std::size_t>(k)));
  return rec;
}

}  // namespace sbr
