#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "sbr/config.hpp"
#include "sbr/experiment.hpp"
#include "sbr/synthetic.hpp"

using namespace sbr;
namespace fs = std::filesystem;

namespace {

fs::path temp_root() {
  const auto root = fs::temp_directory_path() / "sbr_harness_tests";
  fs::create_directories(root);
  return root;
}

std::string write_synthetic_log(const std::string& name, std::uint64_t seed,
                                std::int32_t sessions = 600, double strength = 0.7) {
  SyntheticSpec spec;
  spec.n_items = 40;
  spec.n_sessions = sessions;
  spec.span_days = 12;
  spec.rule_strength = strength;
  spec.seed = seed;
  const SessionSet corpus = generate_synthetic_corpus(spec);

  const fs::path path = temp_root() / name;
  std::ofstream out(path);
  out << "SessionId,ItemId,Time\n";
  for (const Session& s : corpus.sessions()) {
    for (const Event& ev : s.events) {
      out << ev.session << ',' << ev.item << ',' << ev.time / kMillisPerSecond << '.'
          << char('0' + (ev.time % 1000) / 100) << char('0' + (ev.time % 100) / 10)
          << char('0' + ev.time % 10) << '\n';
    }
  }
  return path.string();
}

std::string config_text(const std::string& data_path, const std::string& out_dir,
                        const std::string& extra_stages = "") {
  std::ostringstream os;
  os << R"({
  "dataset": {"name": "synthetic", "path": ")" << data_path << R"(",
              "session_column": "SessionId", "item_column": "ItemId",
              "time_column": "Time"},
  "split": {"n_slices": 2, "test_days": 2, "min_item_support": 2,
            "min_session_length": 2},
  "algorithms": [
    {"name": "ar"},
    {"name": "sknn", "params": {"k_neighbors": 50, "sample_size": 500}}
  ],
  "cutoffs": [5, 10, 20],
  "seed": 77,
  "stages": {"evaluate": true)" << extra_stages << R"(},
  "output_dir": ")" << out_dir << R"("
})";
  return os.str();
}

std::map<std::string, std::string> read_dir(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    files[fs::relative(entry.path(), dir).string()] = ss.str();
  }
  return files;
}

std::size_t count_rows(const std::string& csv) {
  std::size_t rows = 0;
  for (char c : csv) {
    if (c == '\n') ++rows;
  }
  return rows - 1;  // header
}

}  // namespace

TEST_CASE("config parsing applies defaults and rejects unknown keys") {
  const std::string good = config_text("/tmp/x.csv", "/tmp/out");
  const ExperimentConfig config = parse_experiment_config(good);
  CHECK(config.split.n_slices == 2);
  CHECK(config.seed == 77);
  CHECK(config.algorithms.size() == 2);
  CHECK(config.algorithms[1].algorithm == Algorithm::kSknn);
  CHECK(config.stages.evaluate);
  CHECK(!config.stages.tune);

  CHECK_THROWS_WITH_AS(parse_experiment_config(R"({"dataset": {"path": "x"},
    "algorithms": [{"name": "ar"}], "typo_key": 1})"),
                       doctest::Contains("typo_key"), Error);
  CHECK_THROWS_AS(parse_experiment_config(R"({"dataset": {"path": "x"},
    "algorithms": [{"name": "nope"}]})"),
                  Error);
}

TEST_CASE("run_experiment writes one detail row per slice, algorithm and cutoff") {
  const std::string data = write_synthetic_log("run_counts.csv", 1);
  const fs::path out = temp_root() / "out_counts";
  fs::remove_all(out);
  const ExperimentConfig config = parse_experiment_config(config_text(data, out.string()));
  const ExperimentResult result = run_experiment(config);
  CHECK(result.slices == 2);

  const auto files = read_dir(out);
  REQUIRE(files.contains("details_slice_0.csv"));
  REQUIRE(files.contains("details_slice_1.csv"));
  REQUIRE(files.contains("summary.csv"));
  REQUIRE(files.contains("metadata.json"));
  REQUIRE(files.contains("item_map.csv"));
  // per slice: 2 algorithms x 3 cutoffs
  CHECK(count_rows(files.at("details_slice_0.csv")) == 6);
  CHECK(count_rows(files.at("details_slice_1.csv")) == 6);
  // 2 algorithms x 3 cutoffs
  CHECK(count_rows(files.at("summary.csv")) == 6);
}

TEST_CASE("rerunning the same config and seed is byte-identical") {
  const std::string data = write_synthetic_log("run_deterministic.csv", 2);
  const fs::path out_a = temp_root() / "out_det_a";
  const fs::path out_b = temp_root() / "out_det_b";
  fs::remove_all(out_a);
  fs::remove_all(out_b);

  run_experiment(parse_experiment_config(config_text(data, out_a.string())));
  run_experiment(parse_experiment_config(config_text(data, out_b.string())));

  const auto files_a = read_dir(out_a);
  const auto files_b = read_dir(out_b);
  REQUIRE(files_a.size() == files_b.size());
  for (const auto& [name, content] : files_a) {
    REQUIRE(files_b.contains(name));
    CHECK(files_b.at(name) == content);
  }
}

TEST_CASE("summary rows are the arithmetic mean of the detail rows") {
  const std::string data = write_synthetic_log("run_means.csv", 3);
  const fs::path out = temp_root() / "out_means";
  fs::remove_all(out);
  run_experiment(parse_experiment_config(config_text(data, out.string())));

  const auto files = read_dir(out);
  // parse hr column (index 6 in details, 6 in summary) keyed by algorithm+cutoff
  const auto parse_csv = [](const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
      std::vector<std::string> fields;
      std::istringstream ls(line);
      std::string field;
      while (std::getline(ls, field, ',')) fields.push_back(field);
      rows.push_back(fields);
    }
    return rows;
  };
  const auto summary = parse_csv(files.at("summary.csv"));

  std::map<std::string, std::pair<double, int>> means;  // algorithm|cutoff -> (sum, n)
  for (const auto& [name, content] : files) {
    if (name.rfind("details_slice_", 0) != 0) continue;
    const auto details = parse_csv(content);
    for (std::size_t i = 1; i < details.size(); ++i) {
      const auto key = details[i][2] + "|" + details[i][4];
      means[key].first += std::stod(details[i][6]);
      means[key].second += 1;
    }
  }
  for (std::size_t i = 1; i < summary.size(); ++i) {
    const auto key = summary[i][1] + "|" + summary[i][3];
    REQUIRE(means.contains(key));
    const double expected = means[key].first / means[key].second;
    CHECK(std::stod(summary[i][6]) == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("stage errors carry the stage tag and abort the run") {
  ExperimentConfig config =
      parse_experiment_config(config_text("/nonexistent/data.csv", "/tmp/sbr_err_out"));
  CHECK_THROWS_WITH_AS(run_experiment(config), doctest::Contains("[stage:load]"),
                       StageError);
}

TEST_CASE("tune stage writes a trial log and uses the winner") {
  const std::string data = write_synthetic_log("run_tuned.csv", 4);
  const fs::path out = temp_root() / "out_tuned";
  fs::remove_all(out);
  std::string text = config_text(data, out.string(), ", \"tune\": true");
  // mark sknn tunable
  const std::string marker = "\"name\": \"sknn\", \"params\": {\"k_neighbors\": 50, \"sample_size\": 500}";
  const auto pos = text.find(marker);
  REQUIRE(pos != std::string::npos);
  text.replace(pos, marker.size(),
               "\"name\": \"sknn\", \"tune\": true");
  ExperimentConfig config = parse_experiment_config(text);
  config.tuning.n_iter = 3;
  run_experiment(config);

  const auto files = read_dir(out);
  REQUIRE(files.contains("tuning_sknn.csv"));
  CHECK(count_rows(files.at("tuning_sknn.csv")) == 3);

  // the evaluated parameters must be the search winner's
  std::istringstream log(files.at("tuning_sknn.csv"));
  std::string line, best_params;
  double best_mrr = -1.0;
  std::getline(log, line);  // header
  while (std::getline(log, line)) {
    const auto first_comma = line.find(',');
    const auto second_comma = line.find(',', first_comma + 1);
    const auto third_comma = line.find(',', second_comma + 1);
    const double mrr =
        std::stod(line.substr(second_comma + 1, third_comma - second_comma - 1));
    if (mrr > best_mrr) {
      best_mrr = mrr;
      best_params = line.substr(first_comma + 1, second_comma - first_comma - 1);
    }
  }
  REQUIRE(!best_params.empty());
  CHECK(files.at("details_slice_0.csv").find(best_params) != std::string::npos);
}

TEST_CASE("stability stage writes day series and drops") {
  const std::string data = write_synthetic_log("run_stab.csv", 5, 900);
  const fs::path out = temp_root() / "out_stab";
  fs::remove_all(out);
  const std::string text =
      config_text(data, out.string(), ", \"stability\": true");
  run_experiment(parse_experiment_config(text));
  const auto files = read_dir(out);
  REQUIRE(files.contains("stability.csv"));
  REQUIRE(files.contains("stability_drops.csv"));
  CHECK(count_rows(files.at("stability_drops.csv")) == 4);  // 2 algos x 2 metrics
}

TEST_CASE("bench stage fills the timing columns") {
  const std::string data = write_synthetic_log("run_bench.csv", 6);
  const fs::path out = temp_root() / "out_bench";
  fs::remove_all(out);
  std::string text = config_text(data, out.string(), ", \"bench\": true");
  ExperimentConfig config = parse_experiment_config(text);
  config.bench.sample_limit = 20;
  run_experiment(config);
  const auto files = read_dir(out);
  REQUIRE(files.contains("timing.csv"));
  CHECK(count_rows(files.at("timing.csv")) == 4);  // 2 slices x 2 algorithms
}

TEST_CASE("metric outputs are identical with and without the bench stage") {
  const std::string data = write_synthetic_log("run_bench_eq.csv", 7);
  const fs::path out_plain = temp_root() / "out_plain";
  const fs::path out_timed = temp_root() / "out_timed";
  fs::remove_all(out_plain);
  fs::remove_all(out_timed);

  run_experiment(parse_experiment_config(config_text(data, out_plain.string())));
  ExperimentConfig timed = parse_experiment_config(
      config_text(data, out_timed.string(), ", \"bench\": true"));
  timed.bench.sample_limit = 10;
  run_experiment(timed);

  const auto plain = read_dir(out_plain);
  const auto with_bench = read_dir(out_timed);
  // summary.csv carries no timing columns, so it must match byte for byte
  CHECK(plain.at("summary.csv") == with_bench.at("summary.csv"));
}
