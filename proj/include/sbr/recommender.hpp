#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "sbr/knn.hpp"
#include "sbr/ranking.hpp"
#include "sbr/rules.hpp"
#include "sbr/types.hpp"

namespace sbr {

enum class Algorithm { kAr, kSr, kSknn, kVsknn, kStan, kVstan };

Algorithm algorithm_from_name(const std::string& name);
const char* algorithm_name(Algorithm algorithm);
std::vector<Algorithm> all_algorithms();

// Parameters for every algorithm; each one reads the fields it owns.
struct AlgoParams {
  KnnConfig knn;
  RuleDecay sr_decay = RuleDecay::kHarmonic;
};

// Name/value pairs, in a fixed order, as they appear in configuration files
// and tuning logs.
using ParamAssignment = std::vector<std::pair<std::string, std::string>>;

AlgoParams default_params(Algorithm algorithm);

// Parses one "key=value" style option into params. Throws on unknown keys or
// bad values. "inf" is accepted for the decay constants and sample_size.
void apply_param(AlgoParams& params, Algorithm algorithm, const std::string& key,
                 const std::string& value);
AlgoParams resolve_params(Algorithm algorithm, const ParamAssignment& assignment);

// Canonical snapshot of the parameters an algorithm actually uses, for
// result files.
ParamAssignment param_snapshot(Algorithm algorithm, const AlgoParams& params);

// An immutable fitted model. Safe for concurrent predict calls.
class Recommender {
 public:
  virtual ~Recommender() = default;
  virtual Algorithm algorithm() const = 0;
  // Ranked top-k next-item scores for the revealed prefix. The prefix's last
  // event time serves as "now" for recency-aware scoring.
  virtual Recommendation predict(const Session& prefix, int k) const = 0;
};

std::unique_ptr<Recommender> fit_recommender(Algorithm algorithm,
                                             const AlgoParams& params,
                                             const SessionSet& train);

}  // namespace sbr
