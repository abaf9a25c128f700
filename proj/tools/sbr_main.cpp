#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sbr/config.hpp"
#include "sbr/experiment.hpp"
#include "sbr/synthetic.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string output_dir;
  std::int64_t seed = -1;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("-c,--config", opts.config_path, "experiment configuration (JSON)")
      ->required();
  cmd->add_option("-o,--out", opts.output_dir, "override the configured output directory");
  cmd->add_option("-s,--seed", opts.seed, "override the configured seed");
}

sbr::ExperimentConfig load_with_overrides(const CommonOptions& opts) {
  sbr::ExperimentConfig config = sbr::load_experiment_config(opts.config_path);
  if (!opts.output_dir.empty()) config.output_dir = opts.output_dir;
  if (opts.seed >= 0) config.seed = static_cast<std::uint64_t>(opts.seed);
  return config;
}

int run_stages(const CommonOptions& opts, std::optional<sbr::StagesConfig> forced) {
  sbr::ExperimentConfig config = load_with_overrides(opts);
  if (forced) config.stages = *forced;
  config.validate();
  const sbr::ExperimentResult result = sbr::run_experiment(config);
  std::cout << "wrote results for " << result.slices << " slice(s) to "
            << result.output_dir.string() << '\n';
  return 0;
}

// One interaction per row, loadable through the run command.
void write_corpus_csv(const sbr::SessionSet& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw sbr::Error("cannot write " + path);
  out << "SessionId,ItemId,Time\n";
  for (const sbr::Session& s : corpus.sessions()) {
    for (const sbr::Event& ev : s.events) {
      char time_buf[32];
      std::snprintf(time_buf, sizeof(time_buf), "%lld.%03d",
                    static_cast<long long>(ev.time / sbr::kMillisPerSecond),
                    static_cast<int>(ev.time % sbr::kMillisPerSecond));
      out << ev.session << ',' << ev.item << ',' << time_buf << '\n';
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"session-based recommendation benchmark"};
  app.require_subcommand(1);

  CommonOptions run_opts, tune_opts, stability_opts, bench_opts;
  bool run_all_stages = false;
  std::string run_stage_list;

  CLI::App* run = app.add_subcommand("run", "run the configured stages end to end");
  add_common(run, run_opts);
  run->add_flag("--all-stages", run_all_stages, "enable every stage regardless of config");
  run->add_option("--stages", run_stage_list,
                  "comma-separated stage list overriding the config "
                  "(evaluate,tune,stability,bench)");

  CLI::App* tune = app.add_subcommand("tune", "hyperparameter search only");
  add_common(tune, tune_opts);

  CLI::App* stability =
      app.add_subcommand("stability", "retraining vs no-retraining protocol only");
  add_common(stability, stability_opts);

  CLI::App* bench = app.add_subcommand("bench", "training and prediction timing only");
  add_common(bench, bench_opts);

  sbr::SyntheticSpec gen_spec;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("gen", "write a synthetic interaction log");
  gen->add_option("--items", gen_spec.n_items, "number of distinct items")->required();
  gen->add_option("--sessions", gen_spec.n_sessions, "number of sessions")->required();
  gen->add_option("--span-days", gen_spec.span_days, "calendar span of the corpus");
  gen->add_option("--rule-strength", gen_spec.rule_strength,
                  "probability that a rule-source item is followed by its partner");
  gen->add_option("--seed", gen_spec.seed, "generator seed");
  gen->add_option("--min-length", gen_spec.min_session_length, "shortest session");
  gen->add_option("--max-length", gen_spec.max_session_length, "longest session");
  gen->add_option("-o,--out", gen_out, "output csv path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      std::optional<sbr::StagesConfig> forced;
      if (run_all_stages) forced = sbr::StagesConfig{true, true, true, true};
      if (!run_stage_list.empty()) {
        sbr::StagesConfig stages{false, false, false, false};
        std::stringstream ss(run_stage_list);
        std::string stage;
        while (std::getline(ss, stage, ',')) {
          if (stage == "evaluate") stages.evaluate = true;
          else if (stage == "tune") stages.tune = true;
          else if (stage == "stability") stages.stability = true;
          else if (stage == "bench") stages.bench = true;
          else throw sbr::Error("unknown stage '" + stage + "'");
        }
        forced = stages;
      }
      return run_stages(run_opts, forced);
    }
    if (tune->parsed()) {
      return run_stages(tune_opts, sbr::StagesConfig{false, true, false, false});
    }
    if (stability->parsed()) {
      return run_stages(stability_opts, sbr::StagesConfig{false, false, true, false});
    }
    if (bench->parsed()) {
      return run_stages(bench_opts, sbr::StagesConfig{false, false, false, true});
    }
    if (gen->parsed()) {
      write_corpus_csv(sbr::generate_synthetic_corpus(gen_spec), gen_out);
      std::cout << "wrote " << gen_out << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
