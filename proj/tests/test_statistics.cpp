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

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "bellab/error.hpp"
#include "bellab/pair_source.hpp"
#include "bellab/rng.hpp"
#include "bellab/statistics.hpp"

using namespace bellab;

namespace {

CorrelationTable counts_table(const std::array<std::array<double, 2>, 4>& agree_disagree) {
  CorrelationTable t(2);
  const Setting cells[4][2] = {{1, 1}, {1, 2}, {2, 1}, {2, 2}};
  for (int k = 0; k < 4; ++k) {
    auto& c = t.at(cells[k][0], cells[k][1]);
    c.n[kIdxPlus][kIdxPlus] = agree_disagree[static_cast<std::size_t>(k)][0];
    c.n[kIdxPlus][kIdxMinus] = agree_disagree[static_cast<std::size_t>(k)][1];
    c.trials = c.coincidences();
  }
  t.trials_defined = true;
  return t;
}

}  // namespace

TEST(Correlation, FromProducts) {
  const std::vector<int> p{1, 1, -1, 1};
  const auto e = estimate_correlation(p);
  EXPECT_DOUBLE_EQ(e.value, 0.5);
  EXPECT_DOUBLE_EQ(e.n, 4);
  EXPECT_THROW(estimate_correlation(std::vector<int>{}), DomainError);
  EXPECT_THROW(estimate_correlation(std::vector<int>{1, 0}), DomainError);
}

TEST(Correlation, SampleVarianceMatchesDirectComputation) {
  CounterRng rng(5, Stream::kSource, 0);
  std::vector<int> p(1000);
  for (auto& v : p) v = rng.bernoulli(0.7) ? 1 : -1;
  const auto e = estimate_correlation(p);
  double ss = 0;
  for (int v : p) ss += (v - e.value) * (v - e.value);
  EXPECT_NEAR(sample_variance(e.value, e.n), ss / (e.n - 1), 1e-12);
  EXPECT_THROW(sample_variance(0.0, 1), DomainError);
}

TEST(Correlation, VarianceIdentityExhaustive) {
  // For +-1 data the sample variance is n/(n-1) (1 - E^2); checked over every sequence up to length 12.
  for (int n = 2; n <= 12; ++n) {
    for (unsigned bits = 0; bits < (1u << n); ++bits) {
      std::vector<int> p(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = (bits >> i) & 1u ? 1 : -1;
      const auto e = estimate_correlation(p);
      double ss = 0;
      for (int v : p) ss += (v - e.value) * (v - e.value);
      ASSERT_NEAR(sample_variance(e.value, e.n), ss / (n - 1), 1e-12) << n << " " << bits;
    }
  }
}

TEST(BetaStar, FairCoinStatisticIsStandardNormal) {
  // Signed CHSH combination over 1000 independent fair-coin runs, N ~ 1e4 per cell; Kolmogorov-Smirnov at 1%.
  const boost::math::normal_distribution<> nd;
  std::vector<double> z;
  for (std::uint64_t rep = 0; rep < 1000; ++rep) {
    ExperimentConfig cfg;
    cfg.source.kind = SourceKind::kLhv;
    cfg.source.lhv.kind = LhvKind::kFairCoin;
    cfg.n_trials = 40000;
    cfg.seed = 1000 + rep;
    const auto b = beta_star(run_table(cfg));
    z.push_back((b.e[0] + b.e[1] + b.e[2] - b.e[3]) / b.s);
  }
  std::sort(z.begin(), z.end());
  double d = 0;
  const double n = static_cast<double>(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double f = boost::math::cdf(nd, z[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  EXPECT_LT(d, 1.628 / std::sqrt(n));
}

TEST(BetaStar, PropagatesCellVariances) {
  const auto t = counts_table({{{850, 150}, {800, 200}, {820, 180}, {100, 900}}});
  const auto b = beta_star(t);
  const double e[4] = {0.7, 0.6, 0.64, -0.8};
  EXPECT_NEAR(b.beta, std::abs(e[0] + e[1]) + std::abs(e[2] - e[3]), 1e-12);
  double var = 0;
  for (double x : e) var += 1000.0 / 999.0 * (1 - x * x) / 1000.0;
  EXPECT_NEAR(b.s, std::sqrt(var), 1e-12);
  EXPECT_TRUE(b.equal_n);
  EXPECT_NEAR(b.s_shortcut, b.s, 1e-12);
}

TEST(BetaStar, UnequalCountsNoShortcut) {
  const auto b = beta_star(counts_table({{{85, 15}, {80, 20}, {820, 180}, {100, 900}}}));
  EXPECT_FALSE(b.equal_n);
  EXPECT_THROW(beta_star(counts_table({{{1, 0}, {80, 20}, {820, 180}, {100, 900}}})), DomainError);
}

TEST(PValue, NormalTailAgainstBoost) {
  const boost::math::normal_distribution<> nd;
  for (double k : {0.1, 1.0, 2.5, 3.0, 5.0, 8.0}) {
    const double ref = boost::math::cdf(boost::math::complement(nd, k));
    EXPECT_NEAR(normal_upper_tail(k) / ref, 1.0, 1e-12) << k;
  }
}

TEST(PValue, NormalBoundClosedForm) {
  for (double k : {1.0, 3.0, 5.0}) {
    const auto p = p_value_normal(k);
    const double bound = std::exp(-k * k / 2) / (k * std::sqrt(2 * std::numbers::pi));
    EXPECT_NEAR(p.bound, std::min(1.0, bound), 1e-10);
    EXPECT_LE(p.tail, p.bound);
  }
  EXPECT_TRUE(p_value_normal(0.2).clipped);
  EXPECT_DOUBLE_EQ(p_value_normal(0.2).bound, 1.0);
  EXPECT_DOUBLE_EQ(p_value_normal(-1.0).tail, 1.0);
}

TEST(PValue, HoeffdingClosedForm) {
  EXPECT_NEAR(p_value_hoeffding(2.5, 1000.0), std::exp(-1000 * 0.25 / 32), 1e-15);
  EXPECT_DOUBLE_EQ(p_value_hoeffding(1.9, 1000.0), 1.0);
  const std::vector<double> n{400, 500, 300, 600};
  EXPECT_DOUBLE_EQ(p_value_hoeffding(2.4, n), p_value_hoeffding(2.4, 300.0));
}

TEST(PValue, HoeffdingNeverBelowNormalBound) {
  // Hoeffding is distribution free so it never beats the Gaussian tail bound on a singlet-like sample.
  for (double n : {100.0, 1e3, 1e4, 1e5, 1e6}) {
    for (double beta : {2.2, 2.5, 2.828}) {
      const double var = 4 * (1 - 0.5) / n;  // four cells with E^2 = 1/2
      const double k_sig = (beta - 2) / std::sqrt(var);
      EXPECT_GE(p_value_hoeffding(beta, n), p_value_normal(k_sig).bound) << n << " " << beta;
    }
  }
}

TEST(IncompleteBeta, AgainstBoost) {
  for (double a : {0.5, 1.0, 2.5, 10.0}) {
    for (double b : {0.5, 3.0, 7.0}) {
      for (double x : {0.01, 0.3, 0.5, 0.9, 0.999}) {
        EXPECT_NEAR(incomplete_beta(a, b, x), boost::math::ibeta(a, b, x), 1e-12) << a << " " << b << " " << x;
      }
    }
  }
  EXPECT_THROW(incomplete_beta(0, 1, 0.5), DomainError);
  EXPECT_THROW(incomplete_beta(1, 1, 1.5), DomainError);
}

TEST(StudentT, AgainstBoost) {
  for (double dof : {1.0, 4.0, 9.0, 30.0}) {
    const boost::math::students_t_distribution<> st(dof);
    for (double t : {-2.0, 0.0, 0.5, 2.0, 6.0}) {
      EXPECT_NEAR(student_t_upper(t, dof), boost::math::cdf(boost::math::complement(st, t)), 1e-12);
    }
  }
}

TEST(CoarseGrained, MeanAndStandardError) {
  const std::vector<double> v{2.7, 2.8, 2.9, 2.75, 2.85};
  const auto c = coarse_grained_t(v);
  EXPECT_NEAR(c.beta, 2.8, 1e-12);
  double ss = 0;
  for (double x : v) ss += (x - 2.8) * (x - 2.8);
  EXPECT_NEAR(c.s, std::sqrt(ss / 4) / std::sqrt(5.0), 1e-12);
  EXPECT_EQ(c.dof, 4);
  const boost::math::students_t_distribution<> st(4);
  EXPECT_NEAR(c.p, boost::math::cdf(boost::math::complement(st, c.t)), 1e-12);
}

TEST(CoarseGrained, Degenerate) {
  const std::vector<double> v{2.5, 2.5, 2.5};
  const auto c = coarse_grained_t(v);
  EXPECT_TRUE(c.degenerate);
  EXPECT_DOUBLE_EQ(c.p, 0.0);
  EXPECT_THROW(coarse_grained_t(std::vector<double>{2.5}), DomainError);
}

TEST(TestReport, FlagsSmallCells) {
  const auto r = make_test_report(counts_table({{{20, 5}, {20, 5}, {20, 5}, {5, 20}}}));
  bool small = false;
  for (const auto& f : r.flags) small |= f.find("N_ij < 35") != std::string::npos;
  EXPECT_TRUE(small);
  EXPECT_GT(r.k, 0);
  EXPECT_NEAR(r.k, (r.estimate.beta - 2) / r.estimate.s, 1e-12);
}

TEST(TestReport, HoeffdingUsesMinimumCell) {
  const auto r = make_test_report(counts_table({{{850, 150}, {80, 20}, {820, 180}, {100, 900}}}));
  EXPECT_DOUBLE_EQ(r.p_hoeffding, p_value_hoeffding(r.estimate.beta, 100.0));
  bool flagged = false;
  for (const auto& f : r.flags) flagged |= f.find("min N") != std::string::npos;
  EXPECT_TRUE(flagged);
}
