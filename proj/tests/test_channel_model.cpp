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

#include <cmath>
#include <numbers>

#include "bellab/channel_model.hpp"
#include "bellab/correlation_table.hpp"
#include "bellab/error.hpp"
#include "bellab/inequalities.hpp"
#include "bellab/pair_source.hpp"
#include "bellab/rng.hpp"

using namespace bellab;
using std::numbers::pi;

namespace {

ExperimentConfig continuous_singlet(double rate, Ticks duration, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.source.angles_a = {0, pi / 4, 3 * pi / 4};
  cfg.source.angles_b = {0, pi / 2, 0};
  cfg.timing.mode = LogMode::kContinuous;
  cfg.timing.pair_rate_hz = rate;
  cfg.timing.duration = duration;
  cfg.timing.setting_bin = 10000;
  cfg.seed = seed;
  return cfg;
}

std::size_t count_site(const EventLog& log, Site s) {
  std::size_t n = 0;
  for (const auto& e : log.events) n += e.site == s;
  return n;
}

}  // namespace

TEST(Channel, IdealChannelIsIdentity) {
  ChannelConfig cfg;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    const LocalResponse r{t % 2 ? 1 : -1, true, static_cast<Ticks>(t % 7)};
    EXPECT_EQ(apply_channel(r, cfg, Site::kA, 1, 3, t), r);
  }
}

TEST(Channel, ZeroEfficiencyDropsEverything) {
  ChannelConfig cfg;
  cfg.eta_b = DetectorEfficiency::uniform(0.0);
  for (std::uint64_t t = 0; t < 1000; ++t) EXPECT_FALSE(apply_channel({1, true, 0}, cfg, Site::kB, 2, 3, t).detected);
}

TEST(Channel, LossNeverFlipsOutcome) {
  ChannelConfig cfg;
  cfg.eta_a = {0.7, 0.4};
  cfg.jitter_sigma = 2;
  int kept = 0;
  for (std::uint64_t t = 0; t < 20000; ++t) {
    const int o = t % 3 ? 1 : -1;
    const auto out = apply_channel({o, true, 50}, cfg, Site::kA, 1, 8, t);
    if (out.detected) {
      ++kept;
      ASSERT_EQ(out.outcome, o);
    }
  }
  EXPECT_GT(kept, 0);
}

TEST(Channel, RemovedAnalyzerCountsAsPlus) {
  ChannelConfig cfg;
  cfg.eta_a = DetectorEfficiency::uniform(0.5);
  int detected = 0;
  const int n = 40000;
  for (int t = 0; t < n; ++t) {
    const auto out = apply_channel({-1, true, 0}, cfg, Site::kA, kRemoved, 2, static_cast<std::uint64_t>(t));
    EXPECT_EQ(out.outcome, 1);
    detected += out.detected;
  }
  EXPECT_NEAR(detected / static_cast<double>(n), 0.5, 5 * 0.5 / std::sqrt(n));
}

TEST(Channel, JitterIsGaussianAroundDelay) {
  ChannelConfig cfg;
  cfg.jitter_sigma = 4;
  const int n = 50000;
  double s = 0, s2 = 0;
  for (int t = 0; t < n; ++t) {
    const double d = static_cast<double>(apply_channel({1, true, 100}, cfg, Site::kB, 1, 5, static_cast<std::uint64_t>(t)).delay);
    s += d;
    s2 += d * d;
  }
  const double mean = s / n;
  EXPECT_NEAR(mean, 100, 5 * 4 / std::sqrt(n));
  EXPECT_NEAR(std::sqrt(s2 / n - mean * mean), std::sqrt(16 + 1.0 / 12), 0.1);
}

TEST(Channel, ConditionalEfficiencyMatchesEta) {
  ExperimentConfig cfg;
  cfg.source.angles_a = {0, pi / 4, 3 * pi / 4};
  cfg.source.angles_b = {0, pi / 2, 0};
  cfg.channel.eta_a = cfg.channel.eta_b = DetectorEfficiency::uniform(0.8284);
  cfg.n_trials = 1000000;
  cfg.seed = 31;
  cfg.threads = 4;
  const auto t = run_table(cfg);
  EXPECT_NEAR(conditional_efficiency(t), 0.8284, 0.003);
}

TEST(Channel, AsymmetricLossConvergesToMinimum) {
  ExperimentConfig cfg;
  cfg.source.angles_a = {0, 0.1, 0.2};
  cfg.source.angles_b = {0, 0.3, 0.4};
  cfg.channel.eta_a = DetectorEfficiency::uniform(0.9);
  cfg.channel.eta_b = DetectorEfficiency::uniform(0.7);
  cfg.n_trials = 400000;
  cfg.seed = 2;
  const auto t = run_table(cfg);
  // Per cell, coincidences / singles_a = eta_b; roughly 9e4 A detections per cell.
  EXPECT_NEAR(conditional_efficiency(t), 0.7, 5 * std::sqrt(0.21 / 9e4) + 0.002);
}

TEST(DarkCounts, ZeroRateIsIdentity) {
  const auto log = run_experiment(continuous_singlet(1e6, 2000000, 3));
  ChannelConfig cfg;
  EXPECT_EQ(inject_dark_counts(log, cfg, 1), log);
}

TEST(DarkCounts, PoissonCountPerDetector) {
  const auto log = run_experiment(continuous_singlet(1e5, 50000000, 3));
  ChannelConfig cfg;
  cfg.dark_rate_hz = 2e5;
  const auto out = inject_dark_counts(log, cfg, 4);
  const double rt = 2e5 * 0.05;
  for (Site s : {Site::kA, Site::kB}) {
    const double added = static_cast<double>(count_site(out, s)) - static_cast<double>(count_site(log, s));
    EXPECT_NEAR(added, rt, 5 * std::sqrt(rt));
  }
  EXPECT_NO_THROW(validate(out));
}

TEST(DarkCounts, SlottedModeUnsupported) {
  EventLog log;
  ChannelConfig cfg;
  cfg.dark_rate_hz = 1;
  EXPECT_THROW(inject_dark_counts(log, cfg, 1), DomainError);
}

TEST(Accidentals, RateProductFormula) {
  EXPECT_DOUBLE_EQ(accidental_rate_hz(1e4, 1e4, 10), 1.0);
  EXPECT_DOUBLE_EQ(accidental_rate_hz(0, 1e4, 10), 0.0);
}

TEST(Accidentals, EstimateFromLogSingles) {
  auto cfg = continuous_singlet(1e5, 1000000000, 6);
  const auto log = run_experiment(cfg);
  const Ticks tau = 20;
  const auto acc = estimate_accidentals(log, tau);
  // Each side sees ~1e5/s in every setting pair, so rate ~ 1e5 * 1e5 * 20e-9 = 200/s.
  for (Setting a = 1; a <= 2; ++a) {
    for (Setting b = 1; b <= 2; ++b) {
      const auto& c = acc.at(a, b);
      EXPECT_NEAR(c.duty_s, 0.25, 0.005);
      EXPECT_NEAR(c.rate_hz(), 200, 20);
    }
  }
  EXPECT_EQ(acc.at(0, 1).total(), 0.0);
}

TEST(Accidentals, SubtractionFlagsAndClips) {
  CorrelationTable t(2);
  t.at(1, 1).n[0][0] = 10;
  AccidentalEstimate acc;
  acc.arity = 2;
  acc.cells.assign(9, AccidentalCell{});
  const auto same = subtract_accidentals(t, acc);
  EXPECT_TRUE(same.accidentals_subtracted);
  EXPECT_EQ(same.at(1, 1).n, t.at(1, 1).n);
  acc.cells[4].expected[0][0] = 15;
  acc.cells[4].expected[1][1] = 1;
  const auto clipped = subtract_accidentals(t, acc);
  EXPECT_EQ(clipped.at(1, 1).n[0][0], 0);
  EXPECT_EQ(clipped.at(1, 1).n[1][1], 0);
  bool warned = false;
  for (const auto& w : clipped.warnings) warned |= w.find("clipped") != std::string::npos;
  EXPECT_TRUE(warned);
}
