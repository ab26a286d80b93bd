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

#include "bellab/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "bellab/error.hpp"

namespace bellab {

CorrelationEstimate estimate_correlation(std::span<const int> products) {
  if (products.empty()) throw DomainError("correlation of an empty sample");
  double s = 0;
  for (int p : products) {
    if (p != 1 && p != -1) throw DomainError("products must be +1 or -1");
    s += p;
  }
  const double n = static_cast<double>(products.size());
  return {s / n, n};
}

double sample_variance(double e, double n) {
  if (n < 2) throw DomainError("sample variance needs at least two samples");
  return n / (n - 1.0) * (1.0 - e * e);
}

BetaStar beta_star(const CorrelationTable& t) {
  if (t.arity < 2) throw DomainError("CHSH estimate needs two settings per side");
  BetaStar b;
  const Setting cells[4][2] = {{1, 1}, {1, 2}, {2, 1}, {2, 2}};
  double var = 0;
  for (int k = 0; k < 4; ++k) {
    const auto& c = t.at(cells[k][0], cells[k][1]);
    const double n = c.coincidences();
    if (n < 2) {
      throw DomainError("cell (" + std::to_string(cells[k][0]) + "," + std::to_string(cells[k][1]) +
                        ") needs at least two coincidences");
    }
    b.n[k] = n;
    b.e[k] = c.correlation();
    b.s2[k] = sample_variance(b.e[k], n);
    var += b.s2[k] / n;
  }
  b.beta = std::abs(b.e[0] + b.e[1]) + std::abs(b.e[2] - b.e[3]);
  b.s = std::sqrt(var);
  b.equal_n = std::all_of(b.n.begin(), b.n.end(), [&](double v) { return v == b.n[0]; });
  if (b.equal_n) {
    const double pooled = std::sqrt(b.s2[0] + b.s2[1] + b.s2[2] + b.s2[3]);
    b.s_shortcut = pooled / std::sqrt(b.n[0]);
  }
  return b;
}

double k_sigma(double beta, double s, double bound) {
  if (!(s > 0)) throw DomainError("k-sigma needs a positive standard deviation");
  return (beta - bound) / s;
}

double normal_upper_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

NormalPValue p_value_normal(double k) {
  NormalPValue p;
  if (!(k > 0)) {
    p.clipped = true;
    return p;
  }
  p.tail = normal_upper_tail(k);
  const double b = std::exp(-0.5 * k * k) / (k * std::sqrt(2.0 * std::numbers::pi));
  p.clipped = b > 1.0;
  p.bound = std::min(1.0, b);
  return p;
}

double p_value_hoeffding(double beta, double n_min) {
  if (!(beta > 2.0)) return 1.0;
  if (!(n_min > 0)) throw DomainError("Hoeffding bound needs a positive sample count");
  const double d = beta - 2.0;
  return std::exp(-n_min * d * d / 32.0);
}

double p_value_hoeffding(double beta, std::span<const double> n_cells) {
  if (n_cells.empty()) throw DomainError("Hoeffding bound needs per-cell counts");
  return p_value_hoeffding(beta, *std::min_element(n_cells.begin(), n_cells.end()));
}

namespace {

// Continued fraction for the incomplete beta function, modified Lentz iteration.
double beta_cf(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw DomainError("incomplete beta continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0 && b > 0)) throw DomainError("incomplete beta needs positive parameters");
  if (x < 0 || x > 1) throw DomainError("incomplete beta argument outside [0,1]");
  if (x == 0 || x == 1) return x;
  const double ln_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_upper(double t, double dof) {
  if (!(dof > 0)) throw DomainError("Student t needs positive degrees of freedom");
  const double x = dof / (dof + t * t);
  const double half = 0.5 * incomplete_beta(0.5 * dof, 0.5, x);
  return t >= 0 ? half : 1.0 - half;
}

CoarseGrained coarse_grained_t(std::span<const double> values, double bound) {
  if (values.size() < 2) throw DomainError("coarse graining needs at least two subsamples");
  CoarseGrained c;
  const double n = static_cast<double>(values.size());
  c.beta = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0;
  for (double v : values) ss += (v - c.beta) * (v - c.beta);
  const double sd = std::sqrt(ss / (n - 1.0));
  c.s = sd / std::sqrt(n);
  c.dof = static_cast<int>(values.size()) - 1;
  if (!(c.s > 0)) {
    c.degenerate = true;
    c.t = c.beta > bound ? std::numeric_limits<double>::infinity() : 0.0;
    c.p = c.beta > bound ? 0.0 : 1.0;
    return c;
  }
  c.t = (c.beta - bound) / c.s;
  c.p = student_t_upper(c.t, c.dof);
  return c;
}

TestReport make_test_report(const CorrelationTable& t) {
  TestReport r;
  r.estimate = beta_star(t);
  const auto& b = r.estimate;
  if (b.s > 0) {
    r.k = k_sigma(b.beta, b.s);
    r.p_normal = p_value_normal(r.k);
  } else {
    r.k = b.beta > 2 ? std::numeric_limits<double>::infinity() : 0.0;
    r.p_normal.tail = r.p_normal.bound = b.beta > 2 ? 0.0 : 1.0;
    r.flags.push_back("zero sample variance");
  }
  r.p_hoeffding = p_value_hoeffding(b.beta, b.n);
  r.flags.push_back("p_normal assumes IID trials");
  r.flags.push_back("p_hoeffding martingale method, closes memory loophole");
  if (!b.equal_n) r.flags.push_back("unequal cell counts: Hoeffding uses min N");
  if (*std::min_element(b.n.begin(), b.n.end()) < 35) r.flags.push_back("WARNING some N_ij < 35, normal approximation doubtful");
  return r;
}

}  // namespace bellab
