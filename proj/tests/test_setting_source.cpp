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
#include <filesystem>
#include <fstream>

#include "bellab/error.hpp"
#include "bellab/rng.hpp"
#include "bellab/setting_source.hpp"

using namespace bellab;

TEST(CounterRng, PureFunctionOfKey) {
  CounterRng a(42, Stream::kSource, 17);
  CounterRng b(42, Stream::kSource, 17);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  CounterRng c(42, Stream::kSource, 18);
  EXPECT_NE(CounterRng(42, Stream::kSource, 17).next_u64(), c.next_u64());
}

TEST(CounterRng, UniformMoments) {
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = CounterRng(5, Stream::kSource, static_cast<std::uint64_t>(i)).uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    s += u;
    s2 += u * u;
  }
  EXPECT_NEAR(s / n, 0.5, 5 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(s2 / n, 1.0 / 3, 0.003);
}

TEST(SettingSource, PeriodicPattern) {
  SettingStrategy s;
  s.kind = SettingKind::kPeriodic;
  s.pattern_a = {1, 2};
  s.pattern_b = {1, 1, 2};
  EXPECT_EQ(settings_for_trial(s, 5, 0).a, 2);
  EXPECT_EQ(settings_for_trial(s, 5, 0).b, 2);
  EXPECT_EQ(settings_for_trial(s, 4, 0).b, 1);
}

TEST(SettingSource, IidDeterministic) {
  SettingStrategy s;
  EXPECT_EQ(settings_for_trial(s, 7, 99), settings_for_trial(s, 7, 99));
}

TEST(SettingSource, IidJointUniform) {
  SettingStrategy s;
  const int n = 1000000;
  int counts[3][3] = {};
  for (int t = 0; t < n; ++t) {
    const auto p = settings_for_trial(s, t, 12345);
    ASSERT_GE(p.a, 1);
    ASSERT_LE(p.a, 2);
    ++counts[p.a][p.b];
  }
  double chi2 = 0;
  for (int a = 1; a <= 2; ++a) {
    for (int b = 1; b <= 2; ++b) {
      EXPECT_NEAR(counts[a][b] / static_cast<double>(n), 0.25, 0.002);
      const double e = n / 4.0;
      chi2 += (counts[a][b] - e) * (counts[a][b] - e) / e;
    }
  }
  EXPECT_LT(chi2, 16.27);  // 3 dof, p = 0.001
}

TEST(SettingSource, IidWithRemovedDrawsAllChoices) {
  SettingStrategy s;
  s.include_removed = true;
  int removed = 0;
  const int n = 30000;
  for (int t = 0; t < n; ++t) removed += settings_for_trial(s, t, 1).a == kRemoved;
  EXPECT_NEAR(removed / static_cast<double>(n), 1.0 / 3, 5 * std::sqrt(2.0 / 9 / n));
}

TEST(SettingSource, StreamsAreIndependent) {
  SettingStrategy s1, s2;
  s2.stream = 1;
  int same = 0;
  for (int t = 0; t < 1000; ++t) same += settings_for_trial(s1, t, 3) == settings_for_trial(s2, t, 3);
  EXPECT_LT(same, 330);
}

TEST(SettingSource, ReplayExhaustedNamesTrial) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto pa = (dir / "bellab_replay_a.csv").string();
  const auto pb = (dir / "bellab_replay_b.csv").string();
  std::ofstream(pa) << "trial,setting\n0,1\n1,2\n";
  std::ofstream(pb) << "trial,setting\n0,2\n1,inf\n";
  const auto s = load_replay(pa, pb, 2);
  EXPECT_EQ(settings_for_trial(s, 1, 0), (SettingPair{2, kRemoved}));
  try {
    settings_for_trial(s, 2, 0);
    FAIL();
  } catch (const MissingDataError& e) {
    EXPECT_NE(std::string(e.what()).find("trial 2"), std::string::npos);
  }
}

TEST(SettingSource, EmptyPatternRejected) {
  SettingStrategy s;
  s.kind = SettingKind::kPeriodic;
  s.pattern_b = {1};
  EXPECT_THROW(validate(s), ConfigError);
}

TEST(SettingSource, DescriptorRoundTrip) {
  SettingStrategy s;
  s.kind = SettingKind::kPeriodic;
  s.pattern_a = {1, 2};
  s.pattern_b = {2, kRemoved, 1};
  const auto back = parse_setting_descriptor(describe(s));
  for (int t = 0; t < 12; ++t) EXPECT_EQ(settings_for_trial(back, t, 0), settings_for_trial(s, t, 0));
  SettingStrategy iid;
  iid.include_removed = true;
  iid.stream = 4;
  const auto b2 = parse_setting_descriptor(describe(iid));
  for (int t = 0; t < 50; ++t) EXPECT_EQ(settings_for_trial(b2, t, 8), settings_for_trial(iid, t, 8));
}

TEST(SettingSource, ScheduleBins) {
  SettingSchedule sch;
  sch.origin = 10;
  sch.bin_length = 100;
  EXPECT_EQ(sch.bin_of(10), 0);
  EXPECT_EQ(sch.bin_of(109), 0);
  EXPECT_EQ(sch.bin_of(110), 1);
  EXPECT_EQ(sch.bin_of(9), -1);
}
