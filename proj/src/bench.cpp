#include "sbr/bench.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <thread>

namespace sbr {

using clock = std::chrono::steady_clock;

TimedFit time_training(Algorithm algorithm, const AlgoParams& params,
                       const SessionSet& train) {
  TimedFit result;
  const auto started = clock::now();
  result.model = fit_recommender(algorithm, params, train);
  result.seconds = std::chrono::duration<double>(clock::now() - started).count();
  return result;
}

TimingReport time_prediction(const Recommender& model, const SessionSet& test,
                             std::size_t sample_limit, int k, std::size_t warmup) {
  if (test.empty()) throw Error("cannot time predictions on an empty test set");
  if (sample_limit < 1) throw Error("sample_limit must be >= 1");

  std::size_t available = 0;
  for (const Session& s : test.sessions()) {
    if (s.events.size() >= 2) available += s.events.size() - 1;
  }
  if (available == 0) throw Error("no prediction events to time");
  const std::size_t skip =
      available > sample_limit ? std::min(warmup, available - sample_limit) : 0;

  std::vector<double> latencies_ms;
  latencies_ms.reserve(std::min(sample_limit, available));
  std::size_t seen = 0;
  Session prefix;
  for (const Session& s : test.sessions()) {
    if (s.events.size() < 2) continue;
    prefix.id = s.id;
    for (std::size_t t = 1; t < s.events.size(); ++t) {
      if (latencies_ms.size() >= sample_limit) break;
      prefix.events.assign(s.events.begin(), s.events.begin() + t);
      if (seen++ < skip) {
        (void)model.predict(prefix, k);  // warm-up, unmeasured
        continue;
      }
      const auto started = clock::now();
      (void)model.predict(prefix, k);
      latencies_ms.push_back(
          std::chrono::duration<double, std::milli>(clock::now() - started).count());
    }
    if (latencies_ms.size() >= sample_limit) break;
  }

  std::sort(latencies_ms.begin(), latencies_ms.end());
  const std::size_t n = latencies_ms.size();
  double sum = 0.0;
  for (double v : latencies_ms) sum += v;

  TimingReport report;
  report.prediction_count = n;
  report.predict_ms_mean = sum / static_cast<double>(n);
  report.predict_ms_median =
      n % 2 == 1 ? latencies_ms[n / 2]
                 : 0.5 * (latencies_ms[n / 2 - 1] + latencies_ms[n / 2]);
  const std::size_t p95_rank =
      std::min(n - 1, static_cast<std::size_t>(
                          std::max<long>(0, static_cast<long>(
                                                (n * 95 + 99) / 100) - 1)));
  report.predict_ms_p95 = latencies_ms[p95_rank];
  report.hardware = hardware_descriptor();
  return report;
}

std::string hardware_descriptor() {
  std::string cpu = "unknown-cpu";
  std::ifstream info("/proc/cpuinfo");
  std::string line;
  while (std::getline(info, line)) {
    const auto pos = line.find("model name");
    if (pos != std::string::npos) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        cpu = line.substr(colon + 1);
        while (!cpu.empty() && cpu.front() == ' ') cpu.erase(cpu.begin());
      }
      break;
    }
  }
  return cpu + " / " + std::to_string(std::thread::hardware_concurrency()) + " threads";
}

}  // namespace sbr
