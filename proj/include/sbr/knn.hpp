#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "sbr/ranking.hpp"
#include "sbr/types.hpp"

namespace sbr {

// Per-item training statistics used by the predictors and the popularity
// metric.
class ItemStats {
 public:
  static ItemStats compute(const SessionSet& train);

  std::int64_t count(ItemId item) const;
  // (count - min) / (max - min) over items present in training; 0 for all
  // items when every count is equal.
  double normalized_popularity(ItemId item) const;
  // ln(total training sessions / training sessions containing the item).
  double idf(ItemId item) const;
  std::size_t session_count() const { return n_sessions_; }

 private:
  std::vector<std::int64_t> counts_;
  std::vector<std::int64_t> session_counts_;
  std::int64_t min_count_ = 0;
  std::int64_t max_count_ = 0;
  std::size_t n_sessions_ = 0;
};

inline constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();
inline constexpr double kNoDecay = std::numeric_limits<double>::infinity();

enum class Similarity { kCosine, kDot };

// How the items of the current session are weighted when comparing against a
// past session. p is the 1-based last-occurrence position, L the prefix
// length: constant 1, linear p/L, exponential exp((p-L)/lambda_position).
// The last prefix item always gets weight 1.
enum class PositionWeighting { kConstant, kLinear, kExponential };

struct KnnConfig {
  std::size_t k_neighbors = 100;
  std::size_t sample_size = 1000;  // m; kUnlimited disables recency sampling
  Similarity similarity = Similarity::kCosine;
  PositionWeighting weighting = PositionWeighting::kConstant;
  double lambda_position = kNoDecay;       // exponential prefix weighting
  double lambda_recency_days = kNoDecay;   // past-session age decay, in days
  double lambda_neighbor_pos = kNoDecay;   // proximity to the anchor item
  bool idf_enabled = false;

  void validate() const;
};

// Inverted item -> training-session index with everything a predict call
// needs: distinct item sets, last-occurrence positions, end times, stats.
class NeighborIndex {
 public:
  struct Entry {
    SessionId id = 0;
    Timestamp end_time = 0;
    std::vector<ItemId> items;            // distinct, ascending
    std::vector<std::int32_t> last_pos;   // parallel to items, 1-based

    // 0 when the item does not occur.
    std::int32_t position_of(ItemId item) const;
  };

  static NeighborIndex build(const SessionSet& train, std::size_t sample_size);

  const std::vector<Entry>& entries() const { return entries_; }  // end_time asc
  std::span<const std::uint32_t> postings(ItemId item) const;
  const ItemStats& stats() const { return stats_; }
  std::size_t sample_size() const { return sample_size_; }
  std::size_t catalog_size() const { return catalog_size_; }

 private:
  std::vector<Entry> entries_;
  std::vector<std::vector<std::uint32_t>> postings_;  // by item id, ascending
  ItemStats stats_;
  std::size_t sample_size_ = kUnlimited;
  std::size_t catalog_size_ = 0;
};

inline NeighborIndex build_neighbor_index(const SessionSet& train,
                                          std::size_t sample_size) {
  return NeighborIndex::build(train, sample_size);
}

struct Neighbor {
  std::uint32_t entry = 0;  // index into NeighborIndex::entries()
  double similarity = 0.0;
};

// Scores the up-to-m most recent training sessions sharing an item with the
// prefix and returns the k_neighbors best, ordered by (similarity desc,
// end_time desc, session id asc). Zero-similarity candidates are dropped.
std::vector<Neighbor> find_neighbors(const NeighborIndex& index, const Session& prefix,
                                     const KnnConfig& cfg, Timestamp now);

// The four neighborhood predictors. Each normalizes the parts of the config
// it does not use, so e.g. vstan with exponential weighting and IDF disabled
// scores identically to stan.
Recommendation predict_sknn(const NeighborIndex& index, const Session& prefix,
                            const KnnConfig& cfg, int k);
Recommendation predict_vsknn(const NeighborIndex& index, const Session& prefix,
                             const KnnConfig& cfg, int k);
Recommendation predict_stan(const NeighborIndex& index, const Session& prefix,
                            const KnnConfig& cfg, int k, Timestamp now);
Recommendation predict_vstan(const NeighborIndex& index, const Session& prefix,
                             const KnnConfig& cfg, int k, Timestamp now);

}  // namespace sbr
