#include "sbr/recommender.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace sbr {

namespace {

constexpr std::array<std::pair<Algorithm, const char*>, 6> kNames{{
    {Algorithm::kAr, "ar"},
    {Algorithm::kSr, "sr"},
    {Algorithm::kSknn, "sknn"},
    {Algorithm::kVsknn, "vsknn"},
    {Algorithm::kStan, "stan"},
    {Algorithm::kVstan, "vstan"},
}};

}  // namespace

Algorithm algorithm_from_name(const std::string& name) {
  for (const auto& [algo, algo_name] : kNames) {
    if (name == algo_name) return algo;
  }
  throw Error("unknown algorithm '" + name + "'");
}

const char* algorithm_name(Algorithm algorithm) {
  for (const auto& [algo, algo_name] : kNames) {
    if (algo == algorithm) return algo_name;
  }
  return "?";
}

std::vector<Algorithm> all_algorithms() {
  std::vector<Algorithm> out;
  for (const auto& [algo, name] : kNames) out.push_back(algo);
  return out;
}

AlgoParams default_params(Algorithm algorithm) {
  AlgoParams params;
  switch (algorithm) {
    case Algorithm::kAr:
    case Algorithm::kSr:
      break;
    case Algorithm::kSknn:
      params.knn.k_neighbors = 100;
      params.knn.sample_size = 1000;
      break;
    case Algorithm::kVsknn:
      params.knn.k_neighbors = 100;
      params.knn.sample_size = 1000;
      params.knn.weighting = PositionWeighting::kLinear;
      params.knn.idf_enabled = true;
      break;
    case Algorithm::kStan:
      params.knn.k_neighbors = 500;
      params.knn.sample_size = 2500;
      params.knn.weighting = PositionWeighting::kExponential;
      params.knn.lambda_position = 5.0;
      params.knn.lambda_recency_days = 10.0;
      params.knn.lambda_neighbor_pos = 5.0;
      break;
    case Algorithm::kVstan:
      params.knn.k_neighbors = 500;
      params.knn.sample_size = 2500;
      params.knn.weighting = PositionWeighting::kExponential;
      params.knn.lambda_position = 5.0;
      params.knn.lambda_recency_days = 10.0;
      params.knn.lambda_neighbor_pos = 5.0;
      params.knn.idf_enabled = true;
      break;
  }
  return params;
}

namespace {

double parse_decay(const std::string& value) {
  if (value == "inf") return kNoDecay;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size() || !(v > 0.0)) {
    throw Error("expected a positive number or 'inf', got '" + value + "'");
  }
  return v;
}

std::size_t parse_size(const std::string& value) {
  if (value == "inf") return kUnlimited;
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size() || v == 0) {
    throw Error("expected a positive integer or 'inf', got '" + value + "'");
  }
  return v;
}

bool parse_bool(const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw Error("expected true/false, got '" + value + "'");
}

std::string format_size(std::size_t v) {
  return v == kUnlimited ? "inf" : std::to_string(v);
}

std::string format_decay(double v) {
  if (!std::isfinite(v)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

const char* weighting_name(PositionWeighting w) {
  switch (w) {
    case PositionWeighting::kConstant: return "constant";
    case PositionWeighting::kLinear: return "linear";
    case PositionWeighting::kExponential: return "exponential";
  }
  return "?";
}

PositionWeighting weighting_from_name(const std::string& name) {
  if (name == "constant") return PositionWeighting::kConstant;
  if (name == "linear") return PositionWeighting::kLinear;
  if (name == "exponential") return PositionWeighting::kExponential;
  throw Error("unknown weighting scheme '" + name + "'");
}

}  // namespace

void apply_param(AlgoParams& params, Algorithm algorithm, const std::string& key,
                 const std::string& value) {
  const bool knn_algo = algorithm == Algorithm::kSknn || algorithm == Algorithm::kVsknn ||
                        algorithm == Algorithm::kStan || algorithm == Algorithm::kVstan;
  if (knn_algo) {
    if (key == "k_neighbors") {
      params.knn.k_neighbors = parse_size(value);
      return;
    }
    if (key == "sample_size") {
      params.knn.sample_size = parse_size(value);
      return;
    }
    if (key == "similarity") {
      if (value == "cosine") params.knn.similarity = Similarity::kCosine;
      else if (value == "dot") params.knn.similarity = Similarity::kDot;
      else throw Error("unknown similarity '" + value + "'");
      return;
    }
    if (key == "weighting" &&
        (algorithm == Algorithm::kVsknn || algorithm == Algorithm::kVstan)) {
      params.knn.weighting = weighting_from_name(value);
      return;
    }
    if (key == "lambda_position") {
      params.knn.lambda_position = parse_decay(value);
      return;
    }
    if ((key == "lambda_recency_days" || key == "lambda_neighbor_pos") &&
        (algorithm == Algorithm::kStan || algorithm == Algorithm::kVstan)) {
      (key == "lambda_recency_days" ? params.knn.lambda_recency_days
                                    : params.knn.lambda_neighbor_pos) = parse_decay(value);
      return;
    }
    if (key == "idf" &&
        (algorithm == Algorithm::kVsknn || algorithm == Algorithm::kVstan)) {
      params.knn.idf_enabled = parse_bool(value);
      return;
    }
  }
  if (algorithm == Algorithm::kSr && key == "decay") {
    if (value == "harmonic") params.sr_decay = RuleDecay::kHarmonic;
    else if (value == "step") params.sr_decay = RuleDecay::kStep;
    else throw Error("unknown decay '" + value + "'");
    return;
  }
  throw Error(std::string("algorithm '") + algorithm_name(algorithm) +
              "' has no parameter '" + key + "'");
}

AlgoParams resolve_params(Algorithm algorithm, const ParamAssignment& assignment) {
  AlgoParams params = default_params(algorithm);
  for (const auto& [key, value] : assignment) {
    apply_param(params, algorithm, key, value);
  }
  return params;
}

ParamAssignment param_snapshot(Algorithm algorithm, const AlgoParams& params) {
  ParamAssignment out;
  switch (algorithm) {
    case Algorithm::kAr:
      break;
    case Algorithm::kSr:
      out.emplace_back("decay",
                       params.sr_decay == RuleDecay::kHarmonic ? "harmonic" : "step");
      break;
    case Algorithm::kSknn:
      out.emplace_back("k_neighbors", format_size(params.knn.k_neighbors));
      out.emplace_back("sample_size", format_size(params.knn.sample_size));
      out.emplace_back("similarity",
                       params.knn.similarity == Similarity::kCosine ? "cosine" : "dot");
      break;
    case Algorithm::kVsknn:
      out.emplace_back("k_neighbors", format_size(params.knn.k_neighbors));
      out.emplace_back("sample_size", format_size(params.knn.sample_size));
      out.emplace_back("similarity",
                       params.knn.similarity == Similarity::kCosine ? "cosine" : "dot");
      out.emplace_back("weighting", weighting_name(params.knn.weighting));
      out.emplace_back("lambda_position", format_decay(params.knn.lambda_position));
      out.emplace_back("idf", params.knn.idf_enabled ? "true" : "false");
      break;
    case Algorithm::kStan:
      out.emplace_back("k_neighbors", format_size(params.knn.k_neighbors));
      out.emplace_back("sample_size", format_size(params.knn.sample_size));
      out.emplace_back("similarity",
                       params.knn.similarity == Similarity::kCosine ? "cosine" : "dot");
      out.emplace_back("lambda_position", format_decay(params.knn.lambda_position));
      out.emplace_back("lambda_recency_days", format_decay(params.knn.lambda_recency_days));
      out.emplace_back("lambda_neighbor_pos", format_decay(params.knn.lambda_neighbor_pos));
      break;
    case Algorithm::kVstan:
      out.emplace_back("k_neighbors", format_size(params.knn.k_neighbors));
      out.emplace_back("sample_size", format_size(params.knn.sample_size));
      out.emplace_back("similarity",
                       params.knn.similarity == Similarity::kCosine ? "cosine" : "dot");
      out.emplace_back("weighting", weighting_name(params.knn.weighting));
      out.emplace_back("lambda_position", format_decay(params.knn.lambda_position));
      out.emplace_back("lambda_recency_days", format_decay(params.knn.lambda_recency_days));
      out.emplace_back("lambda_neighbor_pos", format_decay(params.knn.lambda_neighbor_pos));
      out.emplace_back("idf", params.knn.idf_enabled ? "true" : "false");
      break;
  }
  return out;
}

namespace {

class RuleRecommender final : public Recommender {
 public:
  RuleRecommender(Algorithm algorithm, RuleTable table)
      : algorithm_(algorithm), table_(std::move(table)) {}

  Algorithm algorithm() const override { return algorithm_; }

  Recommendation predict(const Session& prefix, int k) const override {
    return predict_rules(table_, prefix, k);
  }

 private:
  Algorithm algorithm_;
  RuleTable table_;
};

class NeighborRecommender final : public Recommender {
 public:
  NeighborRecommender(Algorithm algorithm, NeighborIndex index, KnnConfig cfg)
      : algorithm_(algorithm), index_(std::move(index)), cfg_(cfg) {}

  Algorithm algorithm() const override { return algorithm_; }

  Recommendation predict(const Session& prefix, int k) const override {
    const Timestamp now = prefix.events.back().time;
    switch (algorithm_) {
      case Algorithm::kSknn:
        return predict_sknn(index_, prefix, cfg_, k);
      case Algorithm::kVsknn:
        return predict_vsknn(index_, prefix, cfg_, k);
      case Algorithm::kStan:
        return predict_stan(index_, prefix, cfg_, k, now);
      default:
        return predict_vstan(index_, prefix, cfg_, k, now);
    }
  }

 private:
  Algorithm algorithm_;
  NeighborIndex index_;
  KnnConfig cfg_;
};

}  // namespace

std::unique_ptr<Recommender> fit_recommender(Algorithm algorithm,
                                             const AlgoParams& params,
                                             const SessionSet& train) {
  switch (algorithm) {
    case Algorithm::kAr:
      return std::make_unique<RuleRecommender>(algorithm, fit_ar(train));
    case Algorithm::kSr:
      return std::make_unique<RuleRecommender>(algorithm, fit_sr(train, params.sr_decay));
    case Algorithm::kSknn:
    case Algorithm::kVsknn:
    case Algorithm::kStan:
    case Algorithm::kVstan: {
      params.knn.validate();
      NeighborIndex index = NeighborIndex::build(train, params.knn.sample_size);
      return std::make_unique<NeighborRecommender>(algorithm, std::move(index), params.knn);
    }
  }
  throw Error("unknown algorithm");
}

}  // namespace sbr
