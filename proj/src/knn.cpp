#include "sbr/knn.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <unordered_map>

namespace sbr {

ItemStats ItemStats::compute(const SessionSet& train) {
  ItemStats stats;
  stats.n_sessions_ = train.size();
  const std::size_t width =
      train.vocabulary().empty() ? 0 : static_cast<std::size_t>(train.vocabulary().back()) + 1;
  stats.counts_.assign(width, 0);
  stats.session_counts_.assign(width, 0);
  for (const Session& s : train.sessions()) {
    std::vector<ItemId> distinct;
    for (const Event& ev : s.events) {
      ++stats.counts_[static_cast<std::size_t>(ev.item)];
      distinct.push_back(ev.item);
    }
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (ItemId item : distinct) {
      ++stats.session_counts_[static_cast<std::size_t>(item)];
    }
  }
  stats.min_count_ = 0;
  stats.max_count_ = 0;
  bool first = true;
  for (std::int64_t c : stats.counts_) {
    if (c == 0) continue;
    if (first) {
      stats.min_count_ = stats.max_count_ = c;
      first = false;
    } else {
      stats.min_count_ = std::min(stats.min_count_, c);
      stats.max_count_ = std::max(stats.max_count_, c);
    }
  }
  return stats;
}

std::int64_t ItemStats::count(ItemId item) const {
  const auto idx = static_cast<std::size_t>(item);
  return idx < counts_.size() ? counts_[idx] : 0;
}

double ItemStats::normalized_popularity(ItemId item) const {
  if (max_count_ == min_count_) return 0.0;
  const std::int64_t c = count(item);
  if (c == 0) return 0.0;
  return static_cast<double>(c - min_count_) /
         static_cast<double>(max_count_ - min_count_);
}

double ItemStats::idf(ItemId item) const {
  const auto idx = static_cast<std::size_t>(item);
  const std::int64_t in_sessions =
      idx < session_counts_.size() ? session_counts_[idx] : 0;
  if (in_sessions == 0 || n_sessions_ == 0) return 0.0;
  return std::log(static_cast<double>(n_sessions_) /
                  static_cast<double>(in_sessions));
}

void KnnConfig::validate() const {
  if (k_neighbors < 1) throw Error("k_neighbors must be >= 1");
  if (sample_size < 1) throw Error("sample_size must be >= 1");
  if (k_neighbors > sample_size) throw Error("k_neighbors must not exceed sample_size");
  for (double lambda : {lambda_position, lambda_recency_days, lambda_neighbor_pos}) {
    if (!(lambda > 0.0)) throw Error("decay constants must be positive (or infinite)");
  }
}

std::int32_t NeighborIndex::Entry::position_of(ItemId item) const {
  auto it = std::lower_bound(items.begin(), items.end(), item);
  if (it == items.end() || *it != item) return 0;
  return last_pos[static_cast<std::size_t>(it - items.begin())];
}

NeighborIndex NeighborIndex::build(const SessionSet& train, std::size_t sample_size) {
  if (train.empty()) throw Error("cannot fit on an empty training set");
  NeighborIndex index;
  index.sample_size_ = sample_size;
  index.catalog_size_ = train.vocabulary().size();
  index.stats_ = ItemStats::compute(train);

  const std::size_t width =
      train.vocabulary().empty() ? 0 : static_cast<std::size_t>(train.vocabulary().back()) + 1;
  index.postings_.assign(width, {});
  index.entries_.reserve(train.size());

  for (const Session& s : train.sessions()) {
    Entry entry;
    entry.id = s.id;
    entry.end_time = s.end_time();
    // last-occurrence position per distinct item
    std::vector<std::pair<ItemId, std::int32_t>> positions;
    for (std::size_t i = 0; i < s.events.size(); ++i) {
      positions.emplace_back(s.events[i].item, static_cast<std::int32_t>(i + 1));
    }
    std::stable_sort(positions.begin(), positions.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [item, pos] : positions) {
      if (!entry.items.empty() && entry.items.back() == item) {
        entry.last_pos.back() = pos;  // later occurrence wins
      } else {
        entry.items.push_back(item);
        entry.last_pos.push_back(pos);
      }
    }
    const auto entry_idx = static_cast<std::uint32_t>(index.entries_.size());
    for (ItemId item : entry.items) {
      index.postings_[static_cast<std::size_t>(item)].push_back(entry_idx);
    }
    index.entries_.push_back(std::move(entry));
  }
  return index;
}

std::span<const std::uint32_t> NeighborIndex::postings(ItemId item) const {
  const auto idx = static_cast<std::size_t>(item);
  if (idx >= postings_.size()) return {};
  return postings_[idx];
}

namespace {

// Distinct prefix items with their 1-based last-occurrence positions,
// ascending by item.
std::vector<std::pair<ItemId, std::int32_t>> prefix_profile(const Session& prefix) {
  std::vector<std::pair<ItemId, std::int32_t>> profile;
  for (std::size_t i = 0; i < prefix.events.size(); ++i) {
    profile.emplace_back(prefix.events[i].item, static_cast<std::int32_t>(i + 1));
  }
  std::stable_sort(profile.begin(), profile.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<ItemId, std::int32_t>> distinct;
  for (const auto& p : profile) {
    if (!distinct.empty() && distinct.back().first == p.first) {
      distinct.back().second = p.second;
    } else {
      distinct.push_back(p);
    }
  }
  return distinct;
}

double position_weight(PositionWeighting scheme, std::int32_t pos, std::size_t length,
                       double lambda_position) {
  switch (scheme) {
    case PositionWeighting::kConstant:
      return 1.0;
    case PositionWeighting::kLinear:
      return static_cast<double>(pos) / static_cast<double>(length);
    case PositionWeighting::kExponential:
      return std::exp((static_cast<double>(pos) - static_cast<double>(length)) /
                      lambda_position);
  }
  return 1.0;
}

// Up to m most recent candidate sessions (by entry index, which follows end
// time) from the union of the prefix items' postings.
std::vector<std::uint32_t> gather_candidates(
    const NeighborIndex& index,
    const std::vector<std::pair<ItemId, std::int32_t>>& profile, std::size_t m) {
  struct Cursor {
    const std::uint32_t* begin;
    const std::uint32_t* next;  // points one past the element to read
  };
  std::vector<Cursor> cursors;
  for (const auto& [item, pos] : profile) {
    auto posting = index.postings(item);
    if (!posting.empty()) {
      cursors.push_back({posting.data(), posting.data() + posting.size()});
    }
  }
  auto cmp = [](const Cursor& a, const Cursor& b) { return *(a.next - 1) < *(b.next - 1); };
  std::priority_queue<Cursor, std::vector<Cursor>, decltype(cmp)> heap(cmp);
  for (const Cursor& c : cursors) heap.push(c);

  std::vector<std::uint32_t> out;
  while (!heap.empty() && out.size() < m) {
    Cursor top = heap.top();
    heap.pop();
    const std::uint32_t value = *(top.next - 1);
    if (out.empty() || out.back() != value) out.push_back(value);
    if (--top.next != top.begin) heap.push(top);
  }
  return out;  // descending entry index == most recent first
}

}  // namespace

std::vector<Neighbor> find_neighbors(const NeighborIndex& index, const Session& prefix,
                                     const KnnConfig& cfg, Timestamp now) {
  if (prefix.events.empty()) throw Error("prediction needs a non-empty prefix");
  cfg.validate();

  const auto profile = prefix_profile(prefix);
  const std::size_t prefix_distinct = profile.size();
  const std::size_t prefix_length = prefix.events.size();

  std::vector<Neighbor> candidates;
  for (std::uint32_t entry_idx : gather_candidates(index, profile, cfg.sample_size)) {
    const NeighborIndex::Entry& entry = index.entries()[entry_idx];
    double overlap = 0.0;
    for (const auto& [item, pos] : profile) {
      if (std::binary_search(entry.items.begin(), entry.items.end(), item)) {
        overlap += position_weight(cfg.weighting, pos, prefix_length, cfg.lambda_position);
      }
    }
    double sim = overlap;
    if (cfg.similarity == Similarity::kCosine) {
      sim /= std::sqrt(static_cast<double>(prefix_distinct) *
                       static_cast<double>(entry.items.size()));
    }
    if (std::isfinite(cfg.lambda_recency_days)) {
      const auto age_ms = static_cast<double>(std::max<Timestamp>(0, now - entry.end_time));
      sim *= std::exp(-(age_ms / static_cast<double>(kMillisPerDay)) /
                      cfg.lambda_recency_days);
    }
    if (sim > 0.0) candidates.push_back({entry_idx, sim});
  }

  std::sort(candidates.begin(), candidates.end(),
            [&](const Neighbor& a, const Neighbor& b) {
              if (a.similarity != b.similarity) return a.similarity > b.similarity;
              const auto& ea = index.entries()[a.entry];
              const auto& eb = index.entries()[b.entry];
              if (ea.end_time != eb.end_time) return ea.end_time > eb.end_time;
              return ea.id < eb.id;
            });
  if (candidates.size() > cfg.k_neighbors) candidates.resize(cfg.k_neighbors);
  return candidates;
}

namespace {

Recommendation predict_knn_core(const NeighborIndex& index, const Session& prefix,
                                const KnnConfig& cfg, int k, Timestamp now) {
  if (k < 1) throw Error("k must be >= 1");
  const auto neighbors = find_neighbors(index, prefix, cfg, now);
  const ItemId anchor = prefix.last_item();
  const bool use_gap = std::isfinite(cfg.lambda_neighbor_pos);

  std::vector<ScoredItem> scores;
  std::unordered_map<ItemId, std::size_t> slot;
  for (const Neighbor& nb : neighbors) {
    const NeighborIndex::Entry& entry = index.entries()[nb.entry];
    const std::int32_t anchor_pos = use_gap ? entry.position_of(anchor) : 0;
    for (std::size_t i = 0; i < entry.items.size(); ++i) {
      double contribution = nb.similarity;
      if (anchor_pos > 0) {
        const double gap = std::abs(
            static_cast<double>(entry.last_pos[i]) - static_cast<double>(anchor_pos));
        contribution *= std::exp(-gap / cfg.lambda_neighbor_pos);
      }
      auto [it, inserted] = slot.try_emplace(entry.items[i], scores.size());
      if (inserted) {
        scores.push_back({entry.items[i], contribution});
      } else {
        scores[it->second].score += contribution;
      }
    }
  }
  if (cfg.idf_enabled) {
    for (ScoredItem& s : scores) s.score *= index.stats().idf(s.item);
  }
  return rank_topk(std::move(scores), k);
}

}  // namespace

Recommendation predict_sknn(const NeighborIndex& index, const Session& prefix,
                            const KnnConfig& cfg, int k) {
  KnnConfig c = cfg;
  c.weighting = PositionWeighting::kConstant;
  c.lambda_recency_days = kNoDecay;
  c.lambda_neighbor_pos = kNoDecay;
  c.idf_enabled = false;
  return predict_knn_core(index, prefix, c, k, prefix.events.back().time);
}

Recommendation predict_vsknn(const NeighborIndex& index, const Session& prefix,
                             const KnnConfig& cfg, int k) {
  KnnConfig c = cfg;
  c.lambda_recency_days = kNoDecay;
  c.lambda_neighbor_pos = kNoDecay;
  return predict_knn_core(index, prefix, c, k, prefix.events.back().time);
}

Recommendation predict_stan(const NeighborIndex& index, const Session& prefix,
                            const KnnConfig& cfg, int k, Timestamp now) {
  KnnConfig c = cfg;
  c.weighting = PositionWeighting::kExponential;
  c.idf_enabled = false;
  return predict_knn_core(index, prefix, c, k, now);
}

Recommendation predict_vstan(const NeighborIndex& index, const Session& prefix,
                             const KnnConfig& cfg, int k, Timestamp now) {
  return predict_knn_core(index, prefix, cfg, k, now);
}

}  // namespace sbr
