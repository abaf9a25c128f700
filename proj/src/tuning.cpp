#include "sbr/tuning.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "sbr/metrics.hpp"
#include "sbr/rng.hpp"

namespace sbr {

namespace {

ParamSpec categorical(std::string name, std::vector<std::string> choices) {
  ParamSpec spec;
  spec.name = std::move(name);
  spec.kind = ParamKind::kCategorical;
  spec.choices = std::move(choices);
  return spec;
}

ParamSpec int_range(std::string name, std::int64_t lo, std::int64_t hi) {
  ParamSpec spec;
  spec.name = std::move(name);
  spec.kind = ParamKind::kIntRange;
  spec.int_lo = lo;
  spec.int_hi = hi;
  return spec;
}

ParamSpec log_uniform(std::string name, double lo, double hi, double inf_probability) {
  ParamSpec spec;
  spec.name = std::move(name);
  spec.kind = ParamKind::kLogUniform;
  spec.real_lo = lo;
  spec.real_hi = hi;
  spec.inf_probability = inf_probability;
  return spec;
}

constexpr double kInfChance = 0.2;

}  // namespace

ParamSpace default_param_space(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kAr:
      return {};
    case Algorithm::kSr:
      return {categorical("decay", {"harmonic", "step"})};
    case Algorithm::kSknn:
      return {int_range("k_neighbors", 50, 1500), int_range("sample_size", 500, 5000),
              categorical("similarity", {"cosine", "dot"})};
    case Algorithm::kVsknn:
      return {int_range("k_neighbors", 50, 1500), int_range("sample_size", 500, 5000),
              categorical("similarity", {"cosine", "dot"}),
              categorical("weighting", {"constant", "linear", "exponential"}),
              log_uniform("lambda_position", 0.1, 100.0, kInfChance),
              categorical("idf", {"true", "false"})};
    case Algorithm::kStan:
      return {int_range("k_neighbors", 50, 1500), int_range("sample_size", 500, 5000),
              categorical("similarity", {"cosine", "dot"}),
              log_uniform("lambda_position", 0.1, 100.0, kInfChance),
              log_uniform("lambda_recency_days", 0.1, 100.0, kInfChance),
              log_uniform("lambda_neighbor_pos", 0.1, 100.0, kInfChance)};
    case Algorithm::kVstan:
      return {int_range("k_neighbors", 50, 1500), int_range("sample_size", 500, 5000),
              categorical("similarity", {"cosine", "dot"}),
              categorical("weighting", {"constant", "linear", "exponential"}),
              log_uniform("lambda_position", 0.1, 100.0, kInfChance),
              log_uniform("lambda_recency_days", 0.1, 100.0, kInfChance),
              log_uniform("lambda_neighbor_pos", 0.1, 100.0, kInfChance),
              categorical("idf", {"true", "false"})};
  }
  return {};
}

TrainTestSplit make_validation_split(const SessionSet& train, int test_days,
                                     int min_session_length) {
  SplitSpec spec;
  spec.n_slices = 1;
  spec.test_days = test_days;
  spec.min_session_length = min_session_length;
  TrainTestSplit split = split_slice(train, spec);
  return restrict_test_to_known_items(std::move(split), min_session_length);
}

namespace {

std::string sample_value(const ParamSpec& spec, Rng& rng) {
  switch (spec.kind) {
    case ParamKind::kCategorical:
      if (spec.choices.empty()) throw Error("categorical parameter without choices");
      return spec.choices[rng.uniform_below(spec.choices.size())];
    case ParamKind::kIntRange:
      return std::to_string(rng.uniform_int(spec.int_lo, spec.int_hi));
    case ParamKind::kLogUniform: {
      const bool inf = spec.inf_probability > 0.0 && rng.bernoulli(spec.inf_probability);
      if (inf) return "inf";
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.6g", rng.log_uniform(spec.real_lo, spec.real_hi));
      return buf;
    }
  }
  throw Error("unknown parameter kind");
}

ParamAssignment clamp_neighbors(ParamAssignment params) {
  // keep k_neighbors <= sample_size after independent draws
  std::int64_t k = -1, m = -1;
  for (const auto& [key, value] : params) {
    if (key == "k_neighbors" && value != "inf") k = std::stoll(value);
    if (key == "sample_size" && value != "inf") m = std::stoll(value);
  }
  if (k >= 0 && m >= 0 && k > m) {
    for (auto& [key, value] : params) {
      if (key == "k_neighbors") value = std::to_string(m);
    }
  }
  return params;
}

}  // namespace

SearchResult random_search(Algorithm algorithm, const ParamSpace& space, int n_iter,
                           std::uint64_t seed, const SessionSet& subtrain,
                           const SessionSet& validation) {
  if (n_iter < 1) throw Error("random search needs at least one iteration");
  using clock = std::chrono::steady_clock;

  Rng rng(seed);
  const ItemStats stats = ItemStats::compute(subtrain);
  const std::size_t catalog = subtrain.vocabulary().size();
  const int cutoffs[] = {20};

  SearchResult result;
  result.trials.reserve(static_cast<std::size_t>(n_iter));
  for (int i = 0; i < n_iter; ++i) {
    Trial trial;
    trial.index = i;
    for (const ParamSpec& spec : space) {
      trial.params.emplace_back(spec.name, sample_value(spec, rng));
    }
    trial.params = clamp_neighbors(std::move(trial.params));

    const auto started = clock::now();
    try {
      const AlgoParams params = resolve_params(algorithm, trial.params);
      const auto model = fit_recommender(algorithm, params, subtrain);
      const MetricsReport report = evaluate(*model, validation, cutoffs, catalog, stats);
      trial.mrr20 = report.at.at(20).mrr;
    } catch (const std::exception& e) {
      trial.failed = true;
      trial.error = e.what();
      trial.mrr20 = 0.0;
    }
    trial.seconds = std::chrono::duration<double>(clock::now() - started).count();

    if (!trial.failed &&
        (result.best_index < 0 || trial.mrr20 > result.best_mrr20)) {
      result.best_index = trial.index;
      result.best_mrr20 = trial.mrr20;
      result.best_params = trial.params;
    }
    result.trials.push_back(std::move(trial));
  }

  if (result.best_index < 0) {
    std::string causes;
    for (const Trial& t : result.trials) {
      causes += "\n  trial " + std::to_string(t.index) + ": " + t.error;
    }
    throw Error("every tuning trial failed:" + causes);
  }
  return result;
}

}  // namespace sbr
