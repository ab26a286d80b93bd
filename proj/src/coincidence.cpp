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

#include "bellab/coincidence.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <tuple>

#include "bellab/error.hpp"

namespace bellab {

namespace {

struct Candidate {
  Ticks dist;
  Ticks sum;
  std::uint32_t ia;
  std::uint32_t ib;
};

Ticks sat_add(Ticks x, Ticks y) {
  if (y > 0 && x > std::numeric_limits<Ticks>::max() - y) return std::numeric_limits<Ticks>::max();
  if (y < 0 && x < std::numeric_limits<Ticks>::min() - y) return std::numeric_limits<Ticks>::min();
  return x + y;
}

bool within(Ticks diff, Ticks tau) {
  if (tau == kInfiniteWindow) return true;
  return diff <= tau / 2;  // 2|d| <= tau
}

PairedTrial make_pair(const DetectionEvent& ea, const DetectionEvent& eb) {
  PairedTrial p;
  if (ea.trial && eb.trial && *ea.trial == *eb.trial) p.trial = ea.trial;
  p.setting_a = ea.setting;
  p.setting_b = eb.setting;
  p.outcome_a = to_outcome(ea.channel);
  p.outcome_b = to_outcome(eb.channel);
  p.time_a = ea.time;
  p.time_b = eb.time;
  return p;
}

template <typename WidthFn>
MatchResult greedy_match(std::span<const DetectionEvent> a, std::span<const DetectionEvent> b, Ticks max_tau,
                         WidthFn width) {
  const Ticks reach = max_tau == kInfiniteWindow ? kInfiniteWindow : max_tau / 2;
  std::vector<Candidate> cand;
  std::size_t lo = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Ticks ta = a[i].time;
    const Ticks from = sat_add(ta, reach == kInfiniteWindow ? std::numeric_limits<Ticks>::min() : -reach);
    const Ticks to = sat_add(ta, reach);
    while (lo < b.size() && b[lo].time < from) ++lo;
    for (std::size_t j = lo; j < b.size() && b[j].time <= to; ++j) {
      const Ticks d = ta > b[j].time ? ta - b[j].time : b[j].time - ta;
      if (!within(d, width(a[i], b[j]))) continue;
      cand.push_back({d, ta + b[j].time, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
    }
  }
  std::sort(cand.begin(), cand.end(), [](const Candidate& x, const Candidate& y) {
    return std::tie(x.dist, x.sum, x.ia, x.ib) < std::tie(y.dist, y.sum, y.ia, y.ib);
  });
  std::vector<char> used_a(a.size(), 0), used_b(b.size(), 0);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> accepted;
  for (const auto& c : cand) {
    if (used_a[c.ia] || used_b[c.ib]) continue;
    used_a[c.ia] = used_b[c.ib] = 1;
    accepted.emplace_back(c.ia, c.ib);
  }
  std::sort(accepted.begin(), accepted.end(), [&](const auto& x, const auto& y) {
    const Ticks tx = std::min(a[x.first].time, b[x.second].time);
    const Ticks ty = std::min(a[y.first].time, b[y.second].time);
    return std::tie(tx, x.first) < std::tie(ty, y.first);
  });
  MatchResult r;
  r.pairs.reserve(accepted.size());
  for (const auto& [ia, ib] : accepted) r.pairs.push_back(make_pair(a[ia], b[ib]));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!used_a[i]) r.unmatched_a.push_back(a[i]);
  }
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (!used_b[j]) r.unmatched_b.push_back(b[j]);
  }
  return r;
}

std::int64_t floor_div(Ticks x, Ticks d) { return x >= 0 ? x / d : -((-x + d - 1) / d); }

/// Earliest event per trial key for one side; flags keys that saw more than one event.
struct Grouped {
  std::map<std::int64_t, DetectionEvent> first;
  std::map<std::int64_t, bool> multiple;
  std::vector<DetectionEvent> unassigned;
};

template <typename KeyFn>
Grouped group(std::span<const DetectionEvent> events, KeyFn key) {
  Grouped g;
  for (const auto& e : events) {
    const auto k = key(e);
    if (!k) {
      g.unassigned.push_back(e);
      continue;
    }
    auto [it, inserted] = g.first.emplace(*k, e);
    if (!inserted) {
      g.multiple[*k] = true;
      if (e.time < it->second.time) it->second = e;
    }
  }
  return g;
}

MatchResult assemble_trials(const Grouped& ga, const Grouped& gb, PolicyKind policy,
                            const std::function<std::optional<SettingPair>(std::int64_t)>& scheduled) {
  MatchResult r;
  r.policy = policy;
  std::map<std::int64_t, int> keys;
  for (const auto& [k, e] : ga.first) keys[k] |= 1;
  for (const auto& [k, e] : gb.first) keys[k] |= 2;
  for (const auto& [k, mask] : keys) {
    PairedTrial p;
    p.trial = k;
    const auto sched = scheduled ? scheduled(k) : std::nullopt;
    p.setting_a = sched ? sched->a : kUnknownSetting;
    p.setting_b = sched ? sched->b : kUnknownSetting;
    if (mask & 1) {
      const auto& e = ga.first.at(k);
      p.setting_a = e.setting;
      p.outcome_a = to_outcome(e.channel);
      p.time_a = e.time;
      p.multiple_a = ga.multiple.count(k) > 0;
    }
    if (mask & 2) {
      const auto& e = gb.first.at(k);
      p.setting_b = e.setting;
      p.outcome_b = to_outcome(e.channel);
      p.time_b = e.time;
      p.multiple_b = gb.multiple.count(k) > 0;
    }
    r.pairs.push_back(p);
  }
  r.unmatched_a = ga.unassigned;
  r.unmatched_b = gb.unassigned;
  return r;
}

TrialCounts empty_counts(int arity) {
  TrialCounts c;
  c.arity = arity;
  c.per_cell.assign(static_cast<std::size_t>((arity + 1) * (arity + 1)), 0.0);
  return c;
}

bool valid_setting(Setting s, int arity) { return s >= 0 && s <= arity; }

}  // namespace

const char* policy_name(PolicyKind p) {
  switch (p) {
    case PolicyKind::kWindow: return "window";
    case PolicyKind::kSlots: return "slots";
    case PolicyKind::kAsymmetric: return "asymmetric";
    case PolicyKind::kHeralded: return "heralded";
  }
  return "?";
}

Ticks AsymmetricWindows::width(Setting a, Setting b) const {
  if (a < 1 || a > 2 || b < 1 || b > 2) {
    throw ConfigError("coincidence.tau", "asymmetric windows need settings 1..2, got (" + std::to_string(a) +
                                             "," + std::to_string(b) + ")");
  }
  return tau[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)];
}

AsymmetricWindows AsymmetricWindows::ch_default(Ticks t) {
  AsymmetricWindows w;
  w.tau = {{{t, t}, {t, 3 * t}}};
  w.ch_compatible = true;
  return w;
}

bool AsymmetricWindows::satisfies_nesting() const {
  // Compare in units of half-widths: tau22 >= tau11 + tau12 + tau21.
  return tau[1][1] >= tau[0][0] + tau[0][1] + tau[1][0];
}

double TrialCounts::total() const {
  double t = 0;
  for (double v : per_cell) t += v;
  return t;
}

MatchResult match_window(std::span<const DetectionEvent> a, std::span<const DetectionEvent> b, Ticks tau) {
  if (tau <= 0) throw ConfigError("coincidence.tau", "window must be positive");
  auto r = greedy_match(a, b, tau, [tau](const DetectionEvent&, const DetectionEvent&) { return tau; });
  r.policy = PolicyKind::kWindow;
  return r;
}

MatchResult match_asymmetric(std::span<const DetectionEvent> a, std::span<const DetectionEvent> b,
                             const AsymmetricWindows& windows) {
  Ticks max_tau = 0;
  for (const auto& row : windows.tau) {
    for (Ticks t : row) {
      if (t <= 0) throw ConfigError("coincidence.tau", "asymmetric window widths must be positive");
      max_tau = std::max(max_tau, t);
    }
  }
  if (windows.ch_compatible && !windows.satisfies_nesting()) {
    throw ConfigError("coincidence.ch_compatible", "window widths do not nest");
  }
  for (const auto& e : a) windows.width(e.setting, 1);
  for (const auto& e : b) windows.width(1, e.setting);
  auto r = greedy_match(a, b, max_tau, [&windows](const DetectionEvent& ea, const DetectionEvent& eb) {
    return windows.width(ea.setting, eb.setting);
  });
  r.policy = PolicyKind::kAsymmetric;
  r.ch_compatible = windows.ch_compatible;
  return r;
}

MatchResult match_slots(std::span<const DetectionEvent> a, std::span<const DetectionEvent> b, Ticks slot_len,
                        Ticks origin, const SettingSchedule* schedule) {
  if (slot_len <= 0) throw ConfigError("coincidence.slot_len", "slot length must be positive");
  auto key = [&](const DetectionEvent& e) -> std::optional<std::int64_t> {
    return floor_div(e.time - origin, slot_len);
  };
  const auto ga = group(a, key);
  const auto gb = group(b, key);
  std::function<std::optional<SettingPair>(std::int64_t)> scheduled;
  if (schedule) {
    scheduled = [&](std::int64_t k) -> std::optional<SettingPair> {
      const auto bin = schedule->bin_of(origin + k * slot_len);
      if (bin < 0 || bin >= schedule->n_bins) return std::nullopt;
      return schedule->settings(bin);
    };
  }
  auto r = assemble_trials(ga, gb, PolicyKind::kSlots, scheduled);
  r.ch_compatible = true;
  if (schedule && schedule->n_bins > 0) {
    auto counts = empty_counts(schedule->strategy.arity);
    const Ticks span_end = schedule->origin + schedule->n_bins * schedule->bin_length;
    const auto first = floor_div(schedule->origin - origin, slot_len);
    const auto last = floor_div(span_end - 1 - origin, slot_len);
    for (auto k = first; k <= last; ++k) {
      const auto s = scheduled(k);
      if (s && valid_setting(s->a, counts.arity) && valid_setting(s->b, counts.arity)) {
        counts.per_cell[counts.cell(s->a, s->b)] += 1.0;
      }
    }
    r.trials = counts;
  }
  return r;
}

MatchResult match_heralded(std::span<const DetectionEvent> a, std::span<const DetectionEvent> b,
                           std::span<const Ticks> heralds, Ticks tolerance, const SettingSchedule* schedule) {
  if (tolerance < 0) throw ConfigError("coincidence.tolerance", "must be nonnegative");
  if (!std::is_sorted(heralds.begin(), heralds.end())) throw ConfigError("coincidence.heralds", "herald times unsorted");
  auto key = [&](const DetectionEvent& e) -> std::optional<std::int64_t> {
    auto it = std::lower_bound(heralds.begin(), heralds.end(), e.time);
    std::optional<std::int64_t> best;
    Ticks best_d = 0;
    if (it != heralds.end()) {
      best = it - heralds.begin();
      best_d = *it - e.time;
    }
    if (it != heralds.begin()) {
      const Ticks d = e.time - *(it - 1);
      if (!best || d <= best_d) {
        best = (it - 1) - heralds.begin();
        best_d = d;
      }
    }
    if (!best || best_d > tolerance) return std::nullopt;
    return best;
  };
  const auto ga = group(a, key);
  const auto gb = group(b, key);
  std::function<std::optional<SettingPair>(std::int64_t)> scheduled;
  if (schedule) {
    scheduled = [&](std::int64_t k) -> std::optional<SettingPair> {
      const auto bin = schedule->bin_of(heralds[static_cast<std::size_t>(k)]);
      if (bin < 0 || bin >= schedule->n_bins) return std::nullopt;
      return schedule->settings(bin);
    };
  }
  auto r = assemble_trials(ga, gb, PolicyKind::kHeralded, scheduled);
  r.ch_compatible = true;
  if (schedule) {
    auto counts = empty_counts(schedule->strategy.arity);
    for (std::size_t k = 0; k < heralds.size(); ++k) {
      const auto s = scheduled(static_cast<std::int64_t>(k));
      if (s && valid_setting(s->a, counts.arity) && valid_setting(s->b, counts.arity)) {
        counts.per_cell[counts.cell(s->a, s->b)] += 1.0;
      }
    }
    r.trials = counts;
  }
  return r;
}

TrialCounts count_trials(const SettingSchedule& schedule) {
  auto counts = empty_counts(schedule.strategy.arity);
  for (std::int64_t k = 0; k < schedule.n_bins; ++k) {
    const auto s = schedule.settings(k);
    if (valid_setting(s.a, counts.arity) && valid_setting(s.b, counts.arity)) {
      counts.per_cell[counts.cell(s.a, s.b)] += 1.0;
    }
  }
  return counts;
}

std::optional<SettingPair> setting_context(const DetectionEvent& e, const SettingSchedule* schedule) {
  if (!schedule) return std::nullopt;
  const std::int64_t bin = e.trial ? *e.trial : schedule->bin_of(e.time);
  if (bin < 0 || bin >= schedule->n_bins) return std::nullopt;
  return schedule->settings(bin);
}

CoincidenceStats coincidence_stats(const MatchResult& m, int arity, const SettingSchedule* schedule,
                                   const TrialCounts* trials) {
  CoincidenceStats st;
  st.arity = arity;
  st.cells.assign(static_cast<std::size_t>((arity + 1) * (arity + 1)), CellCoincidence{});
  auto cell = [&](Setting a, Setting b) -> CellCoincidence* {
    if (!valid_setting(a, arity) || !valid_setting(b, arity)) return nullptr;
    return &st.cells[static_cast<std::size_t>(a * (arity + 1) + b)];
  };
  for (const auto& p : m.pairs) {
    auto* c = cell(p.setting_a, p.setting_b);
    if (!c) continue;
    const bool da = p.outcome_a != Outcome::kNoDetect;
    const bool db = p.outcome_b != Outcome::kNoDetect;
    if (da) c->singles_a += 1;
    if (db) c->singles_b += 1;
    if (da && db) c->coincidences += 1;
  }
  for (const auto& e : m.unmatched_a) {
    const auto ctx = setting_context(e, schedule);
    if (!ctx) continue;
    if (auto* c = cell(e.setting, ctx->b)) c->singles_a += 1;
  }
  for (const auto& e : m.unmatched_b) {
    const auto ctx = setting_context(e, schedule);
    if (!ctx) continue;
    if (auto* c = cell(ctx->a, e.setting)) c->singles_b += 1;
  }
  const TrialCounts* tc = m.trials ? &*m.trials : trials;
  st.gamma_available = tc != nullptr;
  if (!tc) st.notes.push_back("gamma UNAVAILABLE: trials not defined by policy; conditional eta used");
  double gmin = std::numeric_limits<double>::infinity();
  double emin = std::numeric_limits<double>::infinity();
  for (Setting i = 1; i <= arity; ++i) {
    for (Setting j = 1; j <= arity; ++j) {
      auto* c = cell(i, j);
      if (tc && tc->arity == arity) {
        c->trials = tc->at(i, j);
        if (c->trials > 0) {
          c->gamma = c->coincidences / c->trials;
          gmin = std::min(gmin, c->gamma);
        }
      }
      if (c->singles_a > 0 && c->singles_b > 0) {
        c->eta_given_a = c->coincidences / c->singles_a;
        c->eta_given_b = c->coincidences / c->singles_b;
        c->defined = true;
        emin = std::min({emin, c->eta_given_a, c->eta_given_b});
      } else {
        st.notes.push_back("cell (" + std::to_string(i) + "," + std::to_string(j) + ") undefined: zero singles");
      }
    }
  }
  if (std::isfinite(gmin)) st.gamma = gmin;
  if (std::isfinite(emin)) st.eta = emin;
  return st;
}

}  // namespace bellab
