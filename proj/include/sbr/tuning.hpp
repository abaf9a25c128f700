#pragma once

#include <string>
#include <vector>

#include "sbr/preprocess.hpp"
#include "sbr/recommender.hpp"
#include "sbr/types.hpp"

namespace sbr {

enum class ParamKind { kCategorical, kIntRange, kLogUniform };

// How one hyperparameter is sampled. Log-uniform parameters may additionally
// yield the "inf" sentinel (decay disabled) with inf_probability.
struct ParamSpec {
  std::string name;
  ParamKind kind = ParamKind::kCategorical;
  std::vector<std::string> choices;
  std::int64_t int_lo = 0, int_hi = 0;
  double real_lo = 0, real_hi = 0;
  double inf_probability = 0.0;
};

using ParamSpace = std::vector<ParamSpec>;

// The ranges searched when an algorithm is marked tunable.
ParamSpace default_param_space(Algorithm algorithm);

struct Trial {
  int index = 0;
  ParamAssignment params;
  double mrr20 = 0.0;
  double seconds = 0.0;
  bool failed = false;
  std::string error;
};

struct SearchResult {
  int best_index = -1;
  ParamAssignment best_params;
  double best_mrr20 = 0.0;
  std::vector<Trial> trials;
};

// Carves the last test_days calendar days out of the training data as a
// validation set (restricted to items known in the remaining sub-train).
TrainTestSplit make_validation_split(const SessionSet& train, int test_days,
                                     int min_session_length = 2);

// Samples n_iter configurations with the seeded generator, fits each on
// subtrain, scores MRR@20 on validation and returns the best (ties go to the
// earlier trial). Failed trials score 0; if every trial fails the search
// throws with the collected causes.
SearchResult random_search(Algorithm algorithm, const ParamSpace& space, int n_iter,
                           std::uint64_t seed, const SessionSet& subtrain,
                           const SessionSet& validation);

}  // namespace sbr
