// Copyright 2026 The bellab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "bellab/coincidence.hpp"
#include "bellab/correlation_table.hpp"
#include "bellab/error.hpp"
#include "bellab/pair_source.hpp"
#include "bellab/rng.hpp"

using namespace bellab;
using std::numbers::pi;

namespace {

DetectionEvent ev(Site s, Ticks t, Setting setting = 1, Channel c = Channel::kPlus) {
  DetectionEvent e;
  e.site = s;
  e.time = t;
  e.setting = setting;
  e.channel = c;
  return e;
}

std::vector<DetectionEvent> stream(Site s, std::initializer_list<Ticks> times) {
  std::vector<DetectionEvent> out;
  for (Ticks t : times) out.push_back(ev(s, t));
  return out;
}

std::vector<DetectionEvent> random_stream(Site s, std::uint64_t seed, int n) {
  CounterRng rng(seed, Stream::kSource, static_cast<std::uint64_t>(s));
  std::vector<DetectionEvent> out;
  Ticks t = 0;
  for (int i = 0; i < n; ++i) {
    t += static_cast<Ticks>(rng.below(40));
    out.push_back(ev(s, t));
  }
  return out;
}

std::set<std::pair<Ticks, Ticks>> pair_times(const MatchResult& m, bool swapped = false) {
  std::set<std::pair<Ticks, Ticks>> out;
  for (const auto& p : m.pairs) {
    out.emplace(swapped ? *p.time_b : *p.time_a, swapped ? *p.time_a : *p.time_b);
  }
  return out;
}

ExperimentConfig singlet(std::int64_t trials, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.source.angles_a = {0, pi / 4, 3 * pi / 4};
  cfg.source.angles_b = {0, pi / 2, 0};
  cfg.n_trials = trials;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST(Window, InsideHalfWidth) {
  const auto a = stream(Site::kA, {100});
  const auto b = stream(Site::kB, {103});
  EXPECT_EQ(match_window(a, b, 10).pairs.size(), 1u);
  const auto none = match_window(a, b, 4);
  EXPECT_TRUE(none.pairs.empty());
  EXPECT_EQ(none.unmatched_a.size(), 1u);
  EXPECT_EQ(none.unmatched_b.size(), 1u);
}

TEST(Window, BoundaryIsInclusive) {
  EXPECT_EQ(match_window(stream(Site::kA, {100}), stream(Site::kB, {105}), 10).pairs.size(), 1u);
  EXPECT_EQ(match_window(stream(Site::kA, {100}), stream(Site::kB, {106}), 10).pairs.size(), 0u);
}

TEST(Window, NearestNeighbourWins) {
  const auto m = match_window(stream(Site::kA, {0, 10}), stream(Site::kB, {6}), 14);
  ASSERT_EQ(m.pairs.size(), 1u);
  EXPECT_EQ(*m.pairs[0].time_a, 10);
  EXPECT_EQ(m.unmatched_a.at(0).time, 0);
}

TEST(Window, SymmetricInStreams) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto a = random_stream(Site::kA, seed, 500);
    auto b = random_stream(Site::kB, seed, 500);
    for (Ticks tau : {4, 10, 25}) {
      const auto ab = match_window(a, b, tau);
      const auto ba = match_window(b, a, tau);
      EXPECT_EQ(pair_times(ab), pair_times(ba, true)) << seed << " " << tau;
    }
  }
}

TEST(Window, PairCountMonotoneInWidth) {
  const auto a = random_stream(Site::kA, 7, 1000);
  const auto b = random_stream(Site::kB, 7, 1000);
  std::size_t last = 0;
  for (Ticks tau = 1; tau < 80; tau += 3) {
    const auto n = match_window(a, b, tau).pairs.size();
    EXPECT_GE(n, last) << tau;
    last = n;
  }
}

TEST(Window, InfiniteWindowReducesToTrialPairing) {
  const auto log = run_experiment(singlet(2000, 3));
  const auto a = site_events(log, Site::kA);
  const auto b = site_events(log, Site::kB);
  const auto m = match_window(a, b, kInfiniteWindow);
  ASSERT_EQ(m.pairs.size(), 2000u);
  for (const auto& p : m.pairs) ASSERT_TRUE(p.trial.has_value());
}

TEST(Window, RejectsNonPositiveWidth) {
  EXPECT_THROW(match_window({}, {}, 0), ConfigError);
}

TEST(Slots, PairsWithinSlot) {
  const auto m = match_slots(stream(Site::kA, {5}), stream(Site::kB, {7}), 10, 0);
  ASSERT_EQ(m.pairs.size(), 1u);
  EXPECT_EQ(*m.pairs[0].trial, 0);
  EXPECT_EQ(m.pairs[0].outcome_a, Outcome::kPlus);
  EXPECT_EQ(m.pairs[0].outcome_b, Outcome::kPlus);
}

TEST(Slots, EmptyHalfSlotIsNodetect) {
  const auto m = match_slots(stream(Site::kA, {5}), stream(Site::kB, {12}), 10, 0);
  ASSERT_EQ(m.pairs.size(), 2u);
  EXPECT_EQ(m.pairs[0].outcome_b, Outcome::kNoDetect);
  EXPECT_EQ(*m.pairs[1].trial, 1);
  EXPECT_EQ(m.pairs[1].outcome_a, Outcome::kNoDetect);
}

TEST(Slots, MultipleEventsKeepEarliest) {
  auto a = stream(Site::kA, {2, 4});
  a[1].channel = Channel::kMinus;
  const auto m = match_slots(a, stream(Site::kB, {3}), 10, 0);
  ASSERT_EQ(m.pairs.size(), 1u);
  EXPECT_EQ(*m.pairs[0].time_a, 2);
  EXPECT_TRUE(m.pairs[0].multiple_a);
}

TEST(Slots, HeraldedEquivalentWhenAligned) {
  auto cfg = singlet(20000, 12);
  cfg.channel.eta_a = DetectorEfficiency::uniform(0.7);
  cfg.channel.eta_b = DetectorEfficiency::uniform(0.8);
  cfg.channel.jitter_sigma = 5;
  const auto log = run_experiment(cfg);
  const auto sched = *schedule_from_header(log.header);
  const auto a = site_events(log, Site::kA);
  const auto b = site_events(log, Site::kB);
  const auto slots = build_table(match_slots(a, b, cfg.timing.trial_period, 0, &sched), 2, &sched);
  std::vector<Ticks> heralds;
  for (std::int64_t k = 0; k < cfg.n_trials; ++k) heralds.push_back(k * cfg.timing.trial_period);
  const auto her = build_table(match_heralded(a, b, heralds, 400, &sched), 2, &sched);
  for (Setting i = 0; i <= 2; ++i) {
    for (Setting j = 0; j <= 2; ++j) {
      EXPECT_EQ(slots.at(i, j).n, her.at(i, j).n) << i << j;
      EXPECT_EQ(slots.at(i, j).trials, her.at(i, j).trials) << i << j;
    }
  }
}

TEST(Asymmetric, EqualWidthsMatchWindow) {
  auto a = random_stream(Site::kA, 3, 400);
  auto b = random_stream(Site::kB, 3, 400);
  CounterRng rng(1, Stream::kSource, 0);
  for (auto& e : a) e.setting = static_cast<Setting>(1 + rng.below(2));
  for (auto& e : b) e.setting = static_cast<Setting>(1 + rng.below(2));
  AsymmetricWindows w;
  w.tau = {{{12, 12}, {12, 12}}};
  EXPECT_EQ(pair_times(match_asymmetric(a, b, w)), pair_times(match_window(a, b, 12)));
}

TEST(Asymmetric, NestingOnRandomDelayTables) {
  const Ticks tau = 10;
  const auto w = AsymmetricWindows::ch_default(tau);
  ASSERT_TRUE(w.satisfies_nesting());
  int checked = 0;
  for (std::uint64_t k = 0; k < 20000; ++k) {
    CounterRng rng(77, Stream::kSource, k);
    Ticks da[3], db[3];
    for (int s = 1; s <= 2; ++s) {
      da[s] = static_cast<Ticks>(rng.below(40));
      db[s] = static_cast<Ticks>(rng.below(40));
    }
    bool coinc[3][3] = {};
    for (Setting i = 1; i <= 2; ++i) {
      for (Setting j = 1; j <= 2; ++j) {
        const std::vector<DetectionEvent> a{ev(Site::kA, 1000 + da[i], i)};
        const std::vector<DetectionEvent> b{ev(Site::kB, 1000 + db[j], j)};
        coinc[i][j] = !match_asymmetric(a, b, w).pairs.empty();
      }
    }
    if (coinc[1][1] && coinc[1][2] && coinc[2][1]) {
      ++checked;
      ASSERT_TRUE(coinc[2][2]) << k;
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(Asymmetric, MissingSettingRejected) {
  std::vector<DetectionEvent> a{ev(Site::kA, 0, kRemoved)};
  EXPECT_THROW(match_asymmetric(a, {}, AsymmetricWindows::ch_default(5)), ConfigError);
}

TEST(Asymmetric, NonNestingCompatibleRejected) {
  AsymmetricWindows w;
  w.tau = {{{10, 10}, {10, 10}}};
  w.ch_compatible = true;
  EXPECT_THROW(match_asymmetric({}, {}, w), ConfigError);
}

TEST(CoincidenceStats, IdealIsFullyEfficient) {
  const auto log = run_experiment(singlet(4000, 5));
  const auto sched = *schedule_from_header(log.header);
  const auto m = match_window(site_events(log, Site::kA), site_events(log, Site::kB), kInfiniteWindow);
  const auto st = coincidence_stats(m, 2, &sched);
  EXPECT_EQ(st.eta, 1.0);
  EXPECT_FALSE(st.gamma_available);
}

TEST(CoincidenceStats, IndependentLossGamma) {
  auto cfg = singlet(400000, 6);
  cfg.channel.eta_a = cfg.channel.eta_b = DetectorEfficiency::uniform(0.9);
  cfg.threads = 4;
  const auto log = run_experiment(cfg);
  const auto sched = *schedule_from_header(log.header);
  const auto m = match_slots(site_events(log, Site::kA), site_events(log, Site::kB), 1000, 0, &sched);
  const auto st = coincidence_stats(m, 2, &sched);
  ASSERT_TRUE(st.gamma_available);
  for (Setting i = 1; i <= 2; ++i) {
    for (Setting j = 1; j <= 2; ++j) EXPECT_NEAR(st.at(i, j).gamma, 0.81, 0.004);
  }
  EXPECT_NEAR(st.eta, 0.9, 0.005);
}

TEST(CoincidenceStats, FransonApparentEfficiencyIsHalf) {
  auto cfg = singlet(200000, 8);
  cfg.source.kind = SourceKind::kFranson;
  cfg.source.franson_delay = 200;
  cfg.threads = 4;
  const auto log = run_experiment(cfg);
  const auto sched = *schedule_from_header(log.header);
  const auto m = match_window(site_events(log, Site::kA), site_events(log, Site::kB), 100);
  const auto st = coincidence_stats(m, 2, &sched);
  EXPECT_NEAR(st.eta, 0.5, 0.01);
}

TEST(CoincidenceStats, ZeroSinglesCellUndefined) {
  MatchResult m;
  const auto st = coincidence_stats(m, 2);
  EXPECT_FALSE(st.at(1, 1).defined);
  EXPECT_TRUE(std::isnan(st.eta));
  EXPECT_TRUE(std::isnan(st.gamma));
}
