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

#include "bellab/error.hpp"
#include "bellab/pair_source.hpp"
#include "bellab/rng.hpp"
#include "bellab/statistics.hpp"

using namespace bellab;
using std::numbers::pi;

namespace {

ExperimentConfig lhv_config(LhvKind kind, std::int64_t trials, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.source.kind = SourceKind::kLhv;
  cfg.source.lhv.kind = kind;
  cfg.source.angles_a = {0, pi / 4, 3 * pi / 4};
  cfg.source.angles_b = {0, pi / 2, 0};
  cfg.n_trials = trials;
  cfg.seed = seed;
  return cfg;
}

// Mean product of N samples from a sampler returning (a, b).
template <typename F>
double mean_product(int n, F&& f) {
  double s = 0;
  for (int t = 0; t < n; ++t) {
    const auto [a, b] = f(static_cast<std::uint64_t>(t));
    s += a * b;
  }
  return s / n;
}

}  // namespace

TEST(Singlet, EqualAnglesAnticorrelate) {
  for (std::uint64_t t = 0; t < 10000; ++t) {
    const auto [a, b] = sample_singlet(0.3, 0.3, 1, t);
    ASSERT_EQ(a, -b);
  }
}

TEST(Singlet, CorrelationAtQuarterPi) {
  const double e = mean_product(1000000, [](std::uint64_t t) { return sample_singlet(pi / 4, 0, 77, t); });
  EXPECT_NEAR(e, -std::cos(pi / 4), 0.004);
}

TEST(Singlet, RandomAnglePairsMatchCosine) {
  const int n = 20000;
  for (std::uint64_t k = 0; k < 20; ++k) {
    CounterRng rng(3, Stream::kOptimizer, k);
    const double a = 2 * pi * rng.uniform(), b = 2 * pi * rng.uniform();
    const double e = mean_product(n, [&](std::uint64_t t) { return sample_singlet(a, b, 100 + k, t); });
    EXPECT_NEAR(e, -std::cos(a - b), 5 / std::sqrt(n)) << "pair " << k;
  }
}

TEST(Singlet, MarginalsAreFair) {
  int plus = 0;
  const int n = 100000;
  for (int t = 0; t < n; ++t) plus += sample_singlet(1.0, 2.0, 9, static_cast<std::uint64_t>(t)).second > 0;
  EXPECT_NEAR(plus / static_cast<double>(n), 0.5, 5 * 0.5 / std::sqrt(n));
}

TEST(TwoQubit, ProbabilitiesNormalized) {
  for (int k = 0; k < 200; ++k) {
    CounterRng rng(4, Stream::kOptimizer, static_cast<std::uint64_t>(k));
    const double r = pi / 4 * rng.uniform(), a = 2 * pi * rng.uniform(), b = 2 * pi * rng.uniform();
    const auto p = two_qubit_probabilities(r, a, b);
    double sum = 0;
    for (double v : p) {
      EXPECT_GE(v, 0);
      EXPECT_LE(v, 1);
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_NEAR(p[0] + p[1], two_qubit_marginal_plus(r, a), 1e-12);
  }
}

TEST(TwoQubit, MaximalStateIsRotatedSinglet) {
  // Polarizer angles x, y correspond to spin angles 2x, 2y + pi.
  for (double x : {0.1, 0.7, 1.3}) {
    for (double y : {0.0, 0.4, 2.0}) {
      const auto p = two_qubit_probabilities(pi / 4, x, y);
      const double e = p[0] - p[1] - p[2] + p[3];
      EXPECT_NEAR(e, -std::cos(2 * x - (2 * y + pi)), 1e-12);
    }
  }
  const double e = mean_product(200000, [](std::uint64_t t) { return sample_two_qubit(pi / 4, 0.4, 0.1, 5, t); });
  EXPECT_NEAR(e, std::cos(2 * 0.3), 5 / std::sqrt(200000.0));
}

TEST(TwoQubit, ProductStateIndependent) {
  const int n = 200000;
  double sa = 0, sb = 0, sab = 0;
  for (int t = 0; t < n; ++t) {
    const auto [a, b] = sample_two_qubit(0.0, 0.6, 1.1, 8, static_cast<std::uint64_t>(t));
    sa += a;
    sb += b;
    sab += a * b;
  }
  const double cov = sab / n - (sa / n) * (sb / n);
  EXPECT_LT(std::abs(cov), 5 / std::sqrt(n));
}

TEST(Franson, PathFractionsAndCorrelations) {
  const int n = 400000;
  const double a = 0.3, b = 0.5;
  int coinc = 0;
  double sc = 0, sn = 0;
  for (int t = 0; t < n; ++t) {
    const auto f = sample_franson(a, b, 21, static_cast<std::uint64_t>(t));
    if (f.long_a == f.long_b) {
      ++coinc;
      sc += f.a * f.b;
    } else {
      sn += f.a * f.b;
    }
  }
  EXPECT_NEAR(coinc / static_cast<double>(n), 0.5, 5 * 0.5 / std::sqrt(n));
  EXPECT_NEAR(sc / coinc, std::cos(a + b), 5 / std::sqrt(n / 2.0));
  EXPECT_NEAR(sn / (n - coinc), 0.0, 5 / std::sqrt(n / 2.0));
}

TEST(Franson, OppositePhasesGiveEqualOutcomes) {
  for (std::uint64_t t = 0; t < 20000; ++t) {
    const auto f = sample_franson(0.9, -0.9, 2, t);
    if (f.long_a == f.long_b) {
      ASSERT_EQ(f.a, f.b);
    }
  }
}

TEST(SignModel, EqualAnglesAnticorrelateForEveryLambda) {
  LhvStrategy s;
  for (std::uint64_t t = 0; t < 5000; ++t) {
    const auto h = draw_hidden(s, 3, t);
    for (double ang : {0.0, 1.0, 2.5}) {
      const auto ra = lhv_respond(s, h, Site::kA, 1, ang);
      const auto rb = lhv_respond(s, h, Site::kB, 1, ang);
      ASSERT_EQ(ra.outcome, -rb.outcome);
      ASSERT_TRUE(ra.detected && rb.detected);
      ASSERT_EQ(ra.delay, 0);
    }
  }
}

TEST(SignModel, CorrelationIsLinearInAngle) {
  LhvStrategy s;
  for (double phi : {pi / 2, pi / 4, 3 * pi / 4}) {
    const int n = 1000000;
    double sum = 0;
    for (int t = 0; t < n; ++t) {
      const auto h = draw_hidden(s, 11, static_cast<std::uint64_t>(t));
      sum += lhv_respond(s, h, Site::kA, 1, phi).outcome * lhv_respond(s, h, Site::kB, 1, 0.0).outcome;
    }
    EXPECT_NEAR(sum / n, -1 + 2 * phi / pi, 0.005) << phi;
  }
}

TEST(Lhv, LocalResponseIgnoresRemoteSetting) {
  // Periodic patterns fix A's settings and vary B's; A's trial-by-trial data must not move.
  for (LhvKind kind : {LhvKind::kSignModel, LhvKind::kFairCoin, LhvKind::kTable}) {
    auto base = lhv_config(kind, 4000, 17);
    if (kind == LhvKind::kTable) {
      base.source.lhv.table.strategies = enumerate_det();
      base.source.lhv.table.weights.assign(base.source.lhv.table.strategies.size(),
                                           1.0 / static_cast<double>(base.source.lhv.table.strategies.size()));
    }
    base.settings.kind = SettingKind::kPeriodic;
    base.settings.pattern_a = {1, 2};
    auto other = base;
    base.settings.pattern_b = {1};
    other.settings.pattern_b = {2, 1, 2};
    const auto x = run_trials(base);
    const auto y = run_trials(other);
    ASSERT_EQ(x.size(), y.size());
    for (std::size_t t = 0; t < x.size(); ++t) {
      ASSERT_EQ(x[t].setting_a, y[t].setting_a);
      ASSERT_EQ(x[t].outcome_a, y[t].outcome_a) << lhv_name(kind) << " trial " << t;
      ASSERT_EQ(x[t].time_a, y[t].time_a);
    }
  }
}

TEST(Lhv, PopulationBoundUnderRandomSettings) {
  const std::int64_t n = 400000;  // ~1e5 per cell
  for (LhvKind kind : {LhvKind::kSignModel, LhvKind::kFairCoin}) {
    const auto t = run_table(lhv_config(kind, n, 5));
    const auto b = beta_star(t);
    const double n_min = *std::min_element(b.n.begin(), b.n.end());
    EXPECT_LE(b.beta, 2 + 5 * 4 / std::sqrt(n_min)) << lhv_name(kind);
  }
}

TEST(Lhv, SignModelChshIsTwo) {
  const auto b = beta_star(run_table(lhv_config(LhvKind::kSignModel, 400000, 8)));
  EXPECT_NEAR(b.beta, 2.0, 0.02);
}

TEST(Lhv, MemoryAdversaryAgainstPeriodicSettings) {
  auto cfg = lhv_config(LhvKind::kMemoryPr, 10000, 1);
  cfg.settings.kind = SettingKind::kPeriodic;
  cfg.settings.pattern_a = {1, 2};
  cfg.settings.pattern_b = {1, 1, 2, 2};
  const auto t = run_table(cfg);
  EXPECT_EQ(beta_star(t).beta, 4.0);
  EXPECT_TRUE(t.meta.count("settings_predictable"));
  EXPECT_FALSE(t.meta.count("memory_fallback"));
}

TEST(Lhv, MemoryAdversaryFallsBackUnderRandomSettings) {
  auto cfg = lhv_config(LhvKind::kMemoryPr, 100000, 1);
  const auto t = run_table(cfg);
  EXPECT_TRUE(t.meta.count("memory_fallback"));
  const auto b = beta_star(t);
  EXPECT_LE(b.beta, 2 + 5 * 4 / std::sqrt(*std::min_element(b.n.begin(), b.n.end())));
}

TEST(Experiment, DeterministicAcrossThreadCounts) {
  auto cfg = lhv_config(LhvKind::kSignModel, 20000, 99);
  cfg.source.kind = SourceKind::kSinglet;
  cfg.channel.eta_a = DetectorEfficiency::uniform(0.8);
  cfg.channel.jitter_sigma = 3;
  cfg.threads = 1;
  const auto one = encode_log(run_experiment(cfg));
  for (int threads : {2, 3, 8}) {
    cfg.threads = threads;
    EXPECT_EQ(encode_log(run_experiment(cfg)), one) << threads;
  }
}

TEST(Experiment, ContinuousModeDeterministicAcrossThreads) {
  auto cfg = lhv_config(LhvKind::kSignModel, 0, 4);
  cfg.source.kind = SourceKind::kSinglet;
  cfg.timing.mode = LogMode::kContinuous;
  cfg.timing.pair_rate_hz = 2e6;
  cfg.timing.duration = 5000000;
  cfg.channel.dark_rate_hz = 1e4;
  cfg.threads = 1;
  const auto one = encode_log(run_experiment(cfg));
  cfg.threads = 4;
  EXPECT_EQ(encode_log(run_experiment(cfg)), one);
}

TEST(Experiment, IdealSingletConditionalEqualsUnconditional) {
  auto cfg = lhv_config(LhvKind::kSignModel, 50000, 3);
  cfg.source.kind = SourceKind::kSinglet;
  const auto t = run_table(cfg);
  for (Setting a = 1; a <= 2; ++a) {
    for (Setting b = 1; b <= 2; ++b) {
      const auto& c = t.at(a, b);
      EXPECT_EQ(c.coincidences(), c.trials);
      EXPECT_DOUBLE_EQ(c.correlation(), c.product_sum() / c.trials);
    }
  }
}

TEST(Experiment, RejectsInvalidCombinations) {
  auto cfg = lhv_config(LhvKind::kSignModel, 10, 1);
  cfg.source.kind = SourceKind::kFranson;
  cfg.source.franson_delay = 100;
  cfg.settings.include_removed = true;
  EXPECT_THROW(validate(cfg), ConfigError);
  auto mem = lhv_config(LhvKind::kMemoryPr, 10, 1);
  mem.timing.mode = LogMode::kContinuous;
  mem.timing.pair_rate_hz = 1e6;
  mem.timing.duration = 1000;
  EXPECT_THROW(validate(mem), ConfigError);
  auto eta = lhv_config(LhvKind::kSignModel, 10, 1);
  eta.channel.eta_a = DetectorEfficiency::uniform(1.2);
  try {
    validate(eta);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "channel.eta_a");
  }
}

TEST(Experiment, SlottedEventsCarryTrialTimes) {
  auto cfg = lhv_config(LhvKind::kSignModel, 100, 2);
  cfg.timing.trial_period = 500;
  const auto log = run_experiment(cfg);
  EXPECT_EQ(log.events.size(), 200u);
  for (const auto& e : log.events) EXPECT_EQ(e.time, *e.trial * 500);
  EXPECT_EQ(header_value(log.header, "trials"), "100");
}
