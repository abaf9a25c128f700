#include <doctest.h>

#include "sbr/rules.hpp"
#include "sbr/stability.hpp"
#include "test_util.hpp"

using namespace sbr;
using test::make_session;

namespace {

// Initial training data: each rule source a_i co-occurs with its own filler
// item c_i, never with the shared target b. Items: b=0, a_i = 1+2i, c_i = 2+2i.
constexpr ItemId kB = 0;
ItemId drift_a(int i) { return static_cast<ItemId>(1 + 2 * i); }
ItemId drift_c(int i) { return static_cast<ItemId>(2 + 2 * i); }

SessionSet drifting_t0(int n_rules) {
  std::vector<Session> sessions;
  SessionId sid = 1;
  for (int i = 0; i < n_rules; ++i) {
    sessions.push_back(make_session(
        sid++, {drift_a(i), drift_c(i)}, i * kMillisPerDay / 4 + kMillisPerSecond));
  }
  // b must be on the initial vocabulary to survive the restriction
  sessions.push_back(make_session(sid++, {kB, drift_c(0)}, 2 * kMillisPerDay));
  return SessionSet::build(std::move(sessions));
}

// Day i (1-based) carries the sessions [a_j, b] for every j <= i.
std::vector<SessionSet> drifting_days(int n_days, Timestamp first_day) {
  std::vector<SessionSet> days;
  SessionId sid = 100;
  for (int day = 1; day <= n_days; ++day) {
    std::vector<Session> sessions;
    for (int j = 0; j < day; ++j) {
      sessions.push_back(make_session(
          sid++, {drift_a(j), kB},
          first_day + (day - 1) * kMillisPerDay + j * kMillisPerSecond));
    }
    days.push_back(SessionSet::build(std::move(sessions)));
  }
  return days;
}

}  // namespace

TEST_CASE("partition_by_day buckets sessions by their end day") {
  std::vector<Session> sessions;
  sessions.push_back(make_session(1, {0, 1}, 1 * kMillisPerDay + 500));
  sessions.push_back(make_session(2, {0, 1}, 1 * kMillisPerDay + 900));
  sessions.push_back(make_session(3, {0, 1}, 3 * kMillisPerDay));
  const auto days = partition_by_day(SessionSet::build(std::move(sessions)));
  REQUIRE(days.size() == 2);
  CHECK(days[0].size() == 2);
  CHECK(days[1].size() == 1);
}

TEST_CASE("both modes agree on the first day") {
  const SessionSet t0 = drifting_t0(4);
  const auto days = drifting_days(3, 10 * kMillisPerDay);
  const AlgoParams params = default_params(Algorithm::kAr);

  const StabilityRun retrain =
      run_stability(Algorithm::kAr, params, t0, days, StabilityMode::kRetraining);
  const StabilityRun noretrain =
      run_stability(Algorithm::kAr, params, t0, days, StabilityMode::kNoRetraining);
  REQUIRE(retrain.days.size() == 3);
  REQUIRE(noretrain.days.size() == 3);
  CHECK(retrain.days[0].hr20 == noretrain.days[0].hr20);
  CHECK(retrain.days[0].mrr20 == noretrain.days[0].mrr20);
  CHECK(retrain.days[0].events == noretrain.days[0].events);
}

TEST_CASE("no-retraining on identical days repeats the same metrics") {
  // every "day" is a copy of the same sessions shifted by one day
  std::vector<SessionSet> days;
  for (int d = 0; d < 3; ++d) {
    std::vector<Session> sessions;
    sessions.push_back(make_session(50 + d, {0, 1, 2},
                                    (20 + d) * kMillisPerDay + kMillisPerSecond));
    sessions.push_back(make_session(60 + d, {1, 0},
                                    (20 + d) * kMillisPerDay + 5 * kMillisPerSecond));
    days.push_back(SessionSet::build(std::move(sessions)));
  }
  const SessionSet t0 = SessionSet::build(
      {make_session(1, {0, 1, 2}, kMillisPerSecond),
       make_session(2, {2, 1}, 2 * kMillisPerSecond)});
  const StabilityRun run = run_stability(Algorithm::kSr, default_params(Algorithm::kSr),
                                         t0, days, StabilityMode::kNoRetraining);
  for (const DayMetrics& day : run.days) {
    CHECK(day.hr20 == run.days[0].hr20);
    CHECK(day.mrr20 == run.days[0].mrr20);
  }
}

TEST_CASE("retraining on copies of the training data grows rule weights") {
  const SessionSet t0 = SessionSet::build(
      {make_session(1, {0, 1, 2}, kMillisPerSecond),
       make_session(2, {0, 2}, 2 * kMillisPerSecond)});

  // the retraining sequence T0, T0+D1, T0+D1+D2 with days that repeat T0's
  // sessions keeps every ar weight non-decreasing
  std::vector<Session> accumulated = t0.sessions();
  RuleTable previous = fit_ar(t0);
  for (int day = 0; day < 3; ++day) {
    std::vector<Session> copies;
    for (const Session& s : t0.sessions()) {
      Session copy = s;
      copy.id = 100 + day * 10 + copy.id;
      for (Event& ev : copy.events) ev.time += (day + 1) * kMillisPerDay;
      copies.push_back(copy);
    }
    accumulated.insert(accumulated.end(), copies.begin(), copies.end());
    const RuleTable current = fit_ar(SessionSet::build(std::vector<Session>(accumulated)));
    for (ItemId i : {0, 1, 2}) {
      for (ItemId j : {0, 1, 2}) {
        CHECK(current.weight(i, j) >= previous.weight(i, j));
      }
    }
    previous = current;
  }
}

TEST_CASE("drifting corpus: no-retraining falls behind from day two") {
  const SessionSet t0 = drifting_t0(6);
  const auto days = drifting_days(4, 10 * kMillisPerDay);
  const AlgoParams params = default_params(Algorithm::kAr);

  const StabilityRun retrain =
      run_stability(Algorithm::kAr, params, t0, days, StabilityMode::kRetraining);
  const StabilityRun noretrain =
      run_stability(Algorithm::kAr, params, t0, days, StabilityMode::kNoRetraining);
  for (std::size_t i = 1; i < retrain.days.size(); ++i) {
    CHECK(noretrain.days[i].hr20 < retrain.days[i].hr20);
  }
}

TEST_CASE("items outside the initial vocabulary are never scored") {
  const SessionSet t0 = drifting_t0(3);
  // a day full of items the initial training never saw, plus one known pair
  std::vector<Session> day1_sessions;
  day1_sessions.push_back(make_session(300, {90, 91, 92}, 10 * kMillisPerDay));
  day1_sessions.push_back(
      make_session(301, {drift_a(0), drift_c(0)}, 10 * kMillisPerDay + 900));
  std::vector<SessionSet> days;
  days.push_back(SessionSet::build(std::move(day1_sessions)));
  days.push_back(SessionSet::build(
      {make_session(302, {drift_a(1), drift_c(1)}, 11 * kMillisPerDay)}));

  const StabilityRun run = run_stability(Algorithm::kAr, default_params(Algorithm::kAr),
                                         t0, days, StabilityMode::kRetraining);
  // the unknown-item session contributes no events: only [a_0, c_0] counts
  CHECK(run.days[0].events == 1);
}

TEST_CASE("days without usable events are marked empty") {
  const SessionSet t0 = drifting_t0(3);
  std::vector<SessionSet> days;
  days.push_back(SessionSet::build({make_session(300, {95, 96}, 10 * kMillisPerDay)}));
  days.push_back(SessionSet::build(
      {make_session(301, {drift_a(0), drift_c(0)}, 11 * kMillisPerDay)}));
  const StabilityRun run = run_stability(Algorithm::kAr, default_params(Algorithm::kAr),
                                         t0, days, StabilityMode::kNoRetraining);
  CHECK(run.days[0].empty);
  CHECK(!run.days[1].empty);
}

TEST_CASE("relative_drop averages per-day percentage changes") {
  StabilityRun retrain, noretrain;
  retrain.mode = StabilityMode::kRetraining;
  noretrain.mode = StabilityMode::kNoRetraining;
  retrain.days = {{0, 10, 0.50, 0.50, false}, {1, 10, 0.50, 0.50, false}};
  noretrain.days = {{0, 10, 0.45, 0.50, false}, {1, 10, 0.50, 0.50, false}};

  const DropReport report = relative_drop(retrain, noretrain);
  CHECK(report.hr20.percent ==
        ((0.45 - 0.50) / 0.50 * 100.0 + 0.0) / 2.0);  // the -5% example
  CHECK(report.hr20.percent == doctest::Approx(-5.0).epsilon(1e-9));
  CHECK(report.mrr20.percent == 0.0);
  CHECK(report.hr20.days_used == 2);
}

TEST_CASE("relative_drop of identical series is zero") {
  StabilityRun run;
  run.days = {{0, 5, 0.4, 0.2, false}, {1, 5, 0.6, 0.3, false}};
  const DropReport report = relative_drop(run, run);
  CHECK(report.hr20.percent == 0.0);
  CHECK(report.mrr20.percent == 0.0);
}

TEST_CASE("relative_drop excludes zero-retrain days with a warning count") {
  StabilityRun retrain, noretrain;
  retrain.days = {{0, 5, 0.0, 0.5, false}, {1, 5, 0.5, 0.5, false}};
  noretrain.days = {{0, 5, 0.2, 0.5, false}, {1, 5, 0.4, 0.5, false}};
  const DropReport report = relative_drop(retrain, noretrain);
  CHECK(report.hr20.days_used == 1);
  CHECK(report.hr20.days_excluded == 1);
  CHECK(report.hr20.percent == doctest::Approx(-20.0).epsilon(1e-9));
}

TEST_CASE("stability needs at least two days") {
  const SessionSet t0 = drifting_t0(3);
  std::vector<SessionSet> days;
  days.push_back(SessionSet::build(
      {make_session(300, {drift_a(0), drift_c(0)}, 10 * kMillisPerDay)}));
  CHECK_THROWS_AS(run_stability(Algorithm::kAr, default_params(Algorithm::kAr), t0, days,
                                StabilityMode::kNoRetraining),
                  Error);
}
