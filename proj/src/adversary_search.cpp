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

#include "bellab/adversary_search.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "bellab/error.hpp"
#include "bellab/linear_program.hpp"
#include "bellab/pair_source.hpp"

namespace bellab {

namespace {

constexpr std::array<std::array<int, 2>, 4> kSigns{{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};
constexpr double kWeightFloor = 1e-12;

struct Column {
  std::array<double, 4> joint{};  // detected (or coincident) indicator per cell 11,12,21,22
  std::array<double, 4> prod{};   // joint * product of outcomes
  std::array<double, 2> single_a{};
  std::array<double, 2> single_b{};
};

double chsh_objective(const Column& c, const std::array<int, 2>& s) {
  return s[0] * (c.prod[0] + c.prod[1]) + s[1] * (c.prod[2] - c.prod[3]);
}

template <typename S>
Mixture<S> witness_from(const LpSolution& sol, const std::vector<S>& reps, double& total) {
  Mixture<S> m;
  total = 0;
  for (double v : sol.x) total += v;
  for (std::size_t k = 0; k < sol.x.size(); ++k) {
    const double w = sol.x[k] / total;
    if (w > kWeightFloor) {
      m.weights.push_back(w);
      m.strategies.push_back(reps[k]);
    }
  }
  double s = 0;
  for (double w : m.weights) s += w;
  for (double& w : m.weights) w /= s;
  return m;
}

int cell_index(Setting a, Setting b) { return (a - 1) * 2 + (b - 1); }

}  // namespace

ConditionalChshResult max_conditional_chsh(double eta_a, double eta_b) {
  if (!(eta_a > 0 && eta_a <= 1 && eta_b > 0 && eta_b <= 1)) {
    throw DomainError("efficiencies must lie in (0,1]");
  }
  std::vector<Column> cols;
  std::vector<DetStrategy> reps;
  for (const auto& s : enumerate_det()) {
    Column c;
    bool any = false;
    for (int i = 0; i < 2; ++i) {
      c.single_a[static_cast<std::size_t>(i)] = s.a.detect[static_cast<std::size_t>(i)];
      c.single_b[static_cast<std::size_t>(i)] = s.b.detect[static_cast<std::size_t>(i)];
      any = any || s.a.detect[static_cast<std::size_t>(i)] || s.b.detect[static_cast<std::size_t>(i)];
    }
    if (!any) continue;
    for (Setting a = 1; a <= 2; ++a) {
      for (Setting b = 1; b <= 2; ++b) {
        const auto ia = static_cast<std::size_t>(a - 1), ib = static_cast<std::size_t>(b - 1);
        const double det = s.a.detect[ia] && s.b.detect[ib] ? 1.0 : 0.0;
        const auto k = static_cast<std::size_t>(cell_index(a, b));
        c.joint[k] = det;
        c.prod[k] = det * s.a.outcome[ia] * s.b.outcome[ib];
      }
    }
    cols.push_back(c);
    reps.push_back(s);
  }
  const std::size_t n = cols.size();
  LinearProgram lp;
  for (Setting a = 1; a <= 2; ++a) {
    for (Setting b = 1; b <= 2; ++b) {
      const auto k = static_cast<std::size_t>(cell_index(a, b));
      std::vector<double> eq(n), ga(n), gb(n);
      for (std::size_t j = 0; j < n; ++j) {
        eq[j] = cols[j].joint[k];
        ga[j] = cols[j].joint[k] - eta_a * cols[j].single_b[static_cast<std::size_t>(b - 1)];
        gb[j] = cols[j].joint[k] - eta_b * cols[j].single_a[static_cast<std::size_t>(a - 1)];
      }
      lp.eq.push_back(eq);
      lp.b_eq.push_back(1.0);
      lp.ge.push_back(ga);
      lp.b_ge.push_back(0.0);
      lp.ge.push_back(gb);
      lp.b_ge.push_back(0.0);
    }
  }
  ConditionalChshResult best;
  bool have = false;
  for (const auto& s : kSigns) {
    lp.c.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) lp.c[j] = chsh_objective(cols[j], s);
    const auto sol = solve_lp(lp);
    if (sol.status != LpStatus::kOptimal) throw DomainError("conditional CHSH program infeasible");
    if (!have || sol.value > best.value + 1e-12) {
      double total = 0;
      best.value = sol.value;
      best.witness = witness_from(sol, reps, total);
      best.signs = s;
      have = true;
    }
  }
  return best;
}

WindowRule WindowRule::symmetric(int w) {
  WindowRule r;
  for (auto& row : r.max_diff) row = {w, w};
  return r;
}

WindowRule WindowRule::ch_compatible(int w) {
  WindowRule r = symmetric(w);
  const int t = 2 * w + 1;
  r.max_diff[1][1] = (3 * t) / 2;
  return r;
}

WindowRule WindowRule::slots() {
  WindowRule r;
  r.all_coincident = true;
  return r;
}

bool WindowRule::coincident(const DelayStrategy& s, Setting a, Setting b) const {
  if (all_coincident) return true;
  const auto ia = static_cast<std::size_t>(a - 1), ib = static_cast<std::size_t>(b - 1);
  return std::abs(s.a.slot[ia] - s.b.slot[ib]) <= max_diff[ia][ib];
}

namespace {

void check_delay_args(int d, int w) {
  if (d < 2 || d > 8) throw DomainError("delay slots must lie in 2..8");
  if (w < 0 || w >= d) throw DomainError("window must lie in 0..d-1 slots");
}

/// One representative per (coincidence mask, coincident products) class, first in enumeration order.
void delay_classes(int d, const WindowRule& rule, std::vector<Column>& cols, std::vector<DelayStrategy>& reps) {
  const auto local = enumerate_local_delay(d);
  std::map<unsigned, std::size_t> seen;
  for (const auto& la : local) {
    for (const auto& lb : local) {
      DelayStrategy s{la, lb};
      Column c;
      unsigned key = 0;
      for (Setting a = 1; a <= 2; ++a) {
        for (Setting b = 1; b <= 2; ++b) {
          const auto k = static_cast<std::size_t>(cell_index(a, b));
          if (!rule.coincident(s, a, b)) continue;
          const int p = la.outcome[static_cast<std::size_t>(a - 1)] * lb.outcome[static_cast<std::size_t>(b - 1)];
          c.joint[k] = 1;
          c.prod[k] = p;
          key |= 1u << k;
          if (p > 0) key |= 1u << (k + 4);
        }
      }
      if (key == 0 || seen.count(key)) continue;
      seen[key] = cols.size();
      cols.push_back(c);
      reps.push_back(s);
    }
  }
}

}  // namespace

WindowedResult max_windowed_chsh(double gamma_min, int d, int w) {
  if (!(gamma_min > 0 && gamma_min <= 1)) throw DomainError("gamma_min must lie in (0,1]");
  check_delay_args(d, w);
  std::vector<Column> cols;
  std::vector<DelayStrategy> reps;
  delay_classes(d, WindowRule::symmetric(w), cols, reps);
  const std::size_t n = cols.size();
  LinearProgram lp;
  for (std::size_t k = 0; k < 4; ++k) {
    std::vector<double> eq(n);
    for (std::size_t j = 0; j < n; ++j) eq[j] = cols[j].joint[k];
    lp.eq.push_back(eq);
    lp.b_eq.push_back(1.0);
  }
  lp.le.push_back(std::vector<double>(n, 1.0));
  lp.b_le.push_back(1.0 / gamma_min);
  WindowedResult best;
  bool have = false;
  for (const auto& s : kSigns) {
    lp.c.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) lp.c[j] = chsh_objective(cols[j], s);
    const auto sol = solve_lp(lp);
    if (sol.status != LpStatus::kOptimal) throw DomainError("windowed CHSH program infeasible");
    if (!have || sol.value > best.value + 1e-12) {
      double total = 0;
      best.value = sol.value;
      best.witness.mixture = witness_from(sol, reps, total);
      best.witness.slots = d;
      best.witness.window = w;
      best.gamma = 1.0 / total;
      best.signs = s;
      have = true;
    }
  }
  return best;
}

WindowedResult max_windowed_ch(int d, int w) {
  check_delay_args(d, w);
  const auto rule = WindowRule::symmetric(w);
  const auto local = enumerate_local_delay(d);
  WindowedResult best;
  bool have = false;
  for (const auto& la : local) {
    for (const auto& lb : local) {
      DelayStrategy s{la, lb};
      double v = 0;
      for (Setting a = 1; a <= 2; ++a) {
        for (Setting b = 1; b <= 2; ++b) {
          const bool pp = la.outcome[static_cast<std::size_t>(a - 1)] > 0 && lb.outcome[static_cast<std::size_t>(b - 1)] > 0;
          if (pp && rule.coincident(s, a, b)) v += (a == 2 && b == 2) ? -1.0 : 1.0;
        }
      }
      v -= la.outcome[0] > 0 ? 1.0 : 0.0;
      v -= lb.outcome[0] > 0 ? 1.0 : 0.0;
      if (!have || v > best.value) {
        best.value = v;
        best.witness.mixture.weights = {1.0};
        best.witness.mixture.strategies = {s};
        have = true;
      }
    }
  }
  best.witness.slots = d;
  best.witness.window = w;
  double gmin = 1;
  for (Setting a = 1; a <= 2; ++a) {
    for (Setting b = 1; b <= 2; ++b) {
      if (!rule.coincident(best.witness.mixture.strategies[0], a, b)) gmin = 0;
    }
  }
  best.gamma = gmin;
  return best;
}

CorrelationTable det_population_table(const Mixture<DetStrategy>& m) {
  validate(m);
  CorrelationTable t(2);
  t.policy = PolicyKind::kSlots;
  t.ch_compatible = true;
  t.trials_defined = true;
  for (Setting a = 0; a <= 2; ++a) {
    for (Setting b = 0; b <= 2; ++b) t.at(a, b).trials = (a > 0 && b > 0) ? 1.0 : 0.0;
  }
  for (std::size_t k = 0; k < m.size(); ++k) {
    const auto& s = m.strategies[k];
    for (Setting a = 1; a <= 2; ++a) {
      for (Setting b = 1; b <= 2; ++b) {
        const auto ia = static_cast<std::size_t>(a - 1), ib = static_cast<std::size_t>(b - 1);
        const int oa = s.a.detect[ia] ? (s.a.outcome[ia] > 0 ? kIdxPlus : kIdxMinus) : kIdxNone;
        const int ob = s.b.detect[ib] ? (s.b.outcome[ib] > 0 ? kIdxPlus : kIdxMinus) : kIdxNone;
        t.at(a, b).n[static_cast<std::size_t>(oa)][static_cast<std::size_t>(ob)] += m.weights[k];
      }
    }
  }
  return t;
}

CorrelationTable delay_population_table(const DelayWitness& w, const WindowRule& rule, PolicyKind policy,
                                        bool ch_compatible) {
  validate(w.mixture);
  CorrelationTable t(2);
  t.policy = policy;
  t.ch_compatible = ch_compatible;
  t.trials_defined = true;
  for (Setting a = 0; a <= 2; ++a) {
    for (Setting b = 0; b <= 2; ++b) t.at(a, b).trials = (a > 0 && b > 0) ? 1.0 : 0.0;
  }
  const auto& m = w.mixture;
  for (std::size_t k = 0; k < m.size(); ++k) {
    const auto& s = m.strategies[k];
    const double p = m.weights[k];
    for (Setting a = 1; a <= 2; ++a) {
      for (Setting b = 1; b <= 2; ++b) {
        const int oa = s.a.outcome[static_cast<std::size_t>(a - 1)] > 0 ? kIdxPlus : kIdxMinus;
        const int ob = s.b.outcome[static_cast<std::size_t>(b - 1)] > 0 ? kIdxPlus : kIdxMinus;
        auto& c = t.at(a, b);
        if (rule.coincident(s, a, b)) {
          c.n[static_cast<std::size_t>(oa)][static_cast<std::size_t>(ob)] += p;
        } else {
          c.n[static_cast<std::size_t>(oa)][kIdxNone] += p;
          c.n[kIdxNone][static_cast<std::size_t>(ob)] += p;
        }
      }
    }
  }
  return t;
}

double eberhard_ch(double eta_a, double eta_b, double r, const std::array<double, 2>& a,
                   const std::array<double, 2>& b) {
  const auto pp = [&](int i, int j) {
    return two_qubit_probabilities(r, a[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(j)])[0];
  };
  const double j = pp(0, 0) + pp(0, 1) + pp(1, 0) - pp(1, 1);
  return eta_a * eta_b * j - eta_a * two_qubit_marginal_plus(r, a[0]) - eta_b * two_qubit_marginal_plus(r, b[0]);
}

namespace {

constexpr double kQuarterPi = std::numbers::pi / 4;

double schmidt_of(double x) {
  const double s = std::sin(x);
  return kQuarterPi * s * s;
}

struct Decoded {
  double r;
  std::array<double, 2> a, b;
};

Decoded decode(const std::vector<double>& x, StateRestriction restriction) {
  if (restriction == StateRestriction::kMaximal) return {kQuarterPi, {x[0], x[1]}, {x[2], x[3]}};
  return {schmidt_of(x[0]), {x[1], x[2]}, {x[3], x[4]}};
}

double wrap_angle(double t) {
  t = std::fmod(t, std::numbers::pi);
  return t < 0 ? t + std::numbers::pi : t;
}

MultiStartOptions with_defaults(MultiStartOptions opt) {
  opt.starts = std::max(opt.starts, 64);
  opt.local.f_tolerance = std::min(opt.local.f_tolerance, 1e-9);
  return opt;
}

}  // namespace

EberhardResult optimize_eberhard(double eta_a, double eta_b, StateRestriction restriction,
                                 const MultiStartOptions& options) {
  if (!(eta_a > 0 && eta_a <= 1 && eta_b > 0 && eta_b <= 1)) throw DomainError("efficiencies must lie in (0,1]");
  const auto opt = with_defaults(options);
  const std::size_t dim = restriction == StateRestriction::kMaximal ? 4 : 5;
  const Objective f = [&](const std::vector<double>& x) {
    const auto d = decode(x, restriction);
    return -eberhard_ch(eta_a, eta_b, d.r, d.a, d.b);
  };
  const auto best = multi_start_minimize(f, std::vector<double>(dim, 0.0),
                                         std::vector<double>(dim, std::numbers::pi), opt);
  const auto d = decode(best.x, restriction);
  EberhardResult r;
  r.value = -best.f;
  r.r = d.r;
  r.a = {wrap_angle(d.a[0]), wrap_angle(d.a[1])};
  r.b = {wrap_angle(d.b[0]), wrap_angle(d.b[1])};
  return r;
}

CriticalEta critical_eta(StateRestriction restriction, EtaSweep sweep, const MultiStartOptions& options,
                         double threshold) {
  const auto opt = with_defaults(options);
  CriticalEta out;
  // Bisection on the optimized maximum.
  double lo = sweep == EtaSweep::kSymmetric ? 0.5 : 0.3;
  double hi = 1.0;
  const auto positive = [&](double eta) {
    const double ea = sweep == EtaSweep::kSymmetric ? eta : 1.0;
    return optimize_eberhard(ea, eta, restriction, opt).value > threshold;
  };
  if (positive(lo)) throw DomainError("bisection bracket does not contain the crossing");
  for (int it = 0; it < 30; ++it) {
    const double mid = 0.5 * (lo + hi);
    (positive(mid) ? hi : lo) = mid;
  }
  out.bisection = hi;

  // CH > 0 exactly when eta exceeds a ratio that does not depend on eta.
  const std::size_t dim = restriction == StateRestriction::kMaximal ? 4 : 5;
  const Objective ratio = [&](const std::vector<double>& x) {
    const auto d = decode(x, restriction);
    const auto pp = [&](int i, int j) {
      return two_qubit_probabilities(d.r, d.a[static_cast<std::size_t>(i)], d.b[static_cast<std::size_t>(j)])[0];
    };
    const double j = pp(0, 0) + pp(0, 1) + pp(1, 0) - pp(1, 1);
    const double pa = two_qubit_marginal_plus(d.r, d.a[0]);
    const double pb = two_qubit_marginal_plus(d.r, d.b[0]);
    const double den = sweep == EtaSweep::kSymmetric ? j : j - pb;
    const double num = sweep == EtaSweep::kSymmetric ? pa + pb : pa;
    return den > 1e-300 ? num / den : 10.0;
  };
  MultiStartOptions ropt = opt;
  ropt.local.f_tolerance = 1e-13;
  ropt.local.x_tolerance = 1e-13;
  ropt.local.max_evaluations = 40000;
  const auto best = multi_start_minimize(ratio, std::vector<double>(dim, 0.0),
                                         std::vector<double>(dim, std::numbers::pi), ropt);
  out.ratio = best.f;
  return out;
}

std::vector<CurvePoint> critical_eta_curve(StateRestriction restriction, EtaSweep sweep, std::span<const double> grid,
                                           const MultiStartOptions& opt) {
  std::vector<CurvePoint> out;
  for (double eta : grid) {
    if (!(eta > 0 && eta <= 1)) throw DomainError("grid values must lie in (0,1]");
    const double ea = sweep == EtaSweep::kSymmetric ? eta : 1.0;
    out.push_back({eta, optimize_eberhard(ea, eta, restriction, opt)});
  }
  return out;
}

}  // namespace bellab
