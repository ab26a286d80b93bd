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

#include "bellab/pair_source.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>
#include <tuple>

#include "bellab/error.hpp"
#include "bellab/rng.hpp"

namespace bellab {

namespace {

constexpr Ticks kEmissionBlock = 1'000'000;
constexpr int kBlockShift = 24;

int sign_of_value(double x) { return x >= 0 ? +1 : -1; }

std::string join_angles(const std::vector<double>& v) {
  std::string out;
  char buf[40];
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", v[i]);
    if (i) out += ',';
    out += buf;
  }
  return out;
}

struct TrialOutput {
  SettingPair s;
  LocalResponse ra;
  LocalResponse rb;
};

double angle_at(const std::vector<double>& v, Setting s) {
  return s > 0 && static_cast<std::size_t>(s) < v.size() ? v[static_cast<std::size_t>(s)] : 0.0;
}

/// Copy of the configured strategy with derived state filled in.
LhvStrategy prepared_lhv(const ExperimentConfig& cfg) {
  LhvStrategy lhv = cfg.source.lhv;
  if (lhv.kind == LhvKind::kMemoryPr && lhv.memory_pattern_b.empty() && cfg.settings.kind == SettingKind::kPeriodic) {
    lhv.memory_pattern_b = cfg.settings.pattern_b;
  }
  lhv.prepare();
  return lhv;
}

TrialOutput simulate_one(const ExperimentConfig& cfg, const LhvStrategy& lhv, const SettingPair& s,
                         std::uint64_t key, MemoryState* memory, std::int64_t trial) {
  TrialOutput out;
  out.s = s;
  const auto& src = cfg.source;
  const double aa = angle_at(src.angles_a, s.a);
  const double ab = angle_at(src.angles_b, s.b);
  switch (src.kind) {
    case SourceKind::kSinglet: {
      const auto [x, y] = sample_singlet(aa, ab, cfg.seed, key);
      out.ra = {x, true, 0};
      out.rb = {y, true, 0};
      break;
    }
    case SourceKind::kTwoQubit: {
      const auto [x, y] = sample_two_qubit(src.schmidt_r, aa, ab, cfg.seed, key);
      out.ra = {x, true, 0};
      out.rb = {y, true, 0};
      break;
    }
    case SourceKind::kFranson: {
      const auto f = sample_franson(aa, ab, cfg.seed, key);
      out.ra = {f.a, true, f.long_a ? src.franson_delay : 0};
      out.rb = {f.b, true, f.long_b ? src.franson_delay : 0};
      break;
    }
    case SourceKind::kLhv: {
      const auto lambda = draw_hidden(lhv, cfg.seed, key);
      out.ra = lhv_respond(lhv, lambda, Site::kA, s.a, aa, memory, trial);
      out.rb = lhv_respond(lhv, lambda, Site::kB, s.b, ab, memory, trial);
      break;
    }
  }
  out.ra = apply_channel(out.ra, cfg.channel, Site::kA, s.a, cfg.seed, key);
  out.rb = apply_channel(out.rb, cfg.channel, Site::kB, s.b, cfg.seed, key);
  return out;
}

Outcome outcome_of(const LocalResponse& r) {
  if (!r.detected) return Outcome::kNoDetect;
  return r.outcome > 0 ? Outcome::kPlus : Outcome::kMinus;
}

DetectionEvent event_of(Site site, const LocalResponse& r, Setting s, Ticks base, std::optional<std::int64_t> trial) {
  DetectionEvent e;
  e.site = site;
  e.trial = trial;
  e.time = base + r.delay;
  e.setting = s;
  e.channel = r.outcome > 0 ? Channel::kPlus : Channel::kMinus;
  return e;
}

/// Runs body(shard, begin, end) over [0, n) split into contiguous shards.
template <typename Body>
void parallel_shards(std::int64_t n, int threads, Body body) {
  const int k = static_cast<int>(std::max<std::int64_t>(1, std::min<std::int64_t>(std::max(1, threads), n)));
  if (k == 1) {
    body(0, std::int64_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(k));
  for (int t = 0; t < k; ++t) {
    const std::int64_t lo = n * t / k;
    const std::int64_t hi = n * (t + 1) / k;
    pool.emplace_back([&, t, lo, hi] {
      try {
        body(t, lo, hi);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void sort_events(std::vector<DetectionEvent>& events) {
  std::stable_sort(events.begin(), events.end(), [](const DetectionEvent& x, const DetectionEvent& y) {
    return std::tie(x.time, x.site) < std::tie(y.time, y.site);
  });
}

/// Calls fn(shard, trial, output, memory) for every slotted trial, in trial order within each shard.
/// Returns the final adversary memory for memory strategies.
template <typename Fn>
std::optional<MemoryState> for_each_trial(const ExperimentConfig& cfg, int shards, Fn fn) {
  validate(cfg);
  if (cfg.timing.mode != LogMode::kSlotted) throw ConfigError("timing.mode", "trial-level runs need slotted mode");
  const LhvStrategy lhv = prepared_lhv(cfg);
  if (lhv.has_memory()) {
    MemoryState memory;
    for (std::int64_t n = 0; n < cfg.n_trials; ++n) {
      const auto s = settings_for_trial(cfg.settings, n, cfg.seed);
      fn(0, n, simulate_one(cfg, lhv, s, static_cast<std::uint64_t>(n), &memory, n), &memory);
      memory.observe(lhv, n, s.b);
    }
    return memory;
  }
  parallel_shards(cfg.n_trials, shards, [&](int shard, std::int64_t lo, std::int64_t hi) {
    for (std::int64_t n = lo; n < hi; ++n) {
      const auto s = settings_for_trial(cfg.settings, n, cfg.seed);
      fn(shard, n, simulate_one(cfg, lhv, s, static_cast<std::uint64_t>(n), nullptr, n),
         static_cast<const MemoryState*>(nullptr));
    }
  });
  return std::nullopt;
}

int effective_shards(const ExperimentConfig& cfg) {
  return std::max<std::int64_t>(1, std::min<std::int64_t>(std::max(1, cfg.threads), std::max<std::int64_t>(1, cfg.n_trials)));
}

}  // namespace

const char* lhv_name(LhvKind k) {
  switch (k) {
    case LhvKind::kSignModel: return "sign_model";
    case LhvKind::kFairCoin: return "fair_coin";
    case LhvKind::kMemoryPr: return "memory_pr";
    case LhvKind::kTable: return "table";
    case LhvKind::kDelayTable: return "delay_table";
  }
  return "?";
}

const char* source_name(SourceKind k) {
  switch (k) {
    case SourceKind::kSinglet: return "singlet";
    case SourceKind::kTwoQubit: return "two_qubit";
    case SourceKind::kFranson: return "franson";
    case SourceKind::kLhv: return "lhv";
  }
  return "?";
}

void LhvStrategy::prepare() {
  cumulative.clear();
  const std::vector<double>* w = nullptr;
  if (kind == LhvKind::kTable) {
    validate(table);
    w = &table.weights;
  } else if (kind == LhvKind::kDelayTable) {
    validate(delay_table.mixture);
    w = &delay_table.mixture.weights;
  }
  if (!w) return;
  double acc = 0;
  for (double v : *w) {
    acc += v;
    cumulative.push_back(acc);
  }
  for (auto& c : cumulative) c /= acc;
  cumulative.back() = 1.0;
}

HiddenVariable draw_hidden(const LhvStrategy& s, std::uint64_t seed, std::uint64_t trial) {
  CounterRng rng(seed, Stream::kLambda, trial);
  HiddenVariable h;
  h.angle = 2.0 * std::numbers::pi * rng.uniform();
  h.bits = rng.next_u64();
  if (s.kind == LhvKind::kTable || s.kind == LhvKind::kDelayTable) {
    if (s.cumulative.empty()) throw DomainError("strategy table not prepared");
    const double u = rng.uniform();
    const auto it = std::upper_bound(s.cumulative.begin(), s.cumulative.end(), u);
    h.row = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - s.cumulative.begin(),
                                                              static_cast<std::ptrdiff_t>(s.cumulative.size()) - 1));
  }
  return h;
}

Setting MemoryState::predict_b(const LhvStrategy& s, std::int64_t trial) const {
  if (!s.memory_pattern_b.empty()) {
    return s.memory_pattern_b[static_cast<std::size_t>(trial % static_cast<std::int64_t>(s.memory_pattern_b.size()))];
  }
  const auto p = static_cast<std::size_t>(std::max(1, s.memory_period));
  const auto n = static_cast<std::size_t>(trial);
  if (n >= p && n - p < remote_b.size()) return remote_b[n - p];
  return 1;
}

void MemoryState::observe(const LhvStrategy& s, std::int64_t trial, Setting b) {
  if (!fallback) {
    const auto p = static_cast<std::size_t>(std::max(1, s.memory_period));
    const bool predicted = !s.memory_pattern_b.empty() || static_cast<std::size_t>(trial) >= p;
    if (predicted && predict_b(s, trial) != b) {
      fallback = true;
      fallback_trial = trial;
    }
  }
  remote_b.push_back(b);
}

LocalResponse lhv_respond(const LhvStrategy& s, const HiddenVariable& lambda, Site side, Setting local,
                          double local_angle, const MemoryState* memory, std::int64_t trial) {
  LocalResponse r;
  switch (s.kind) {
    case LhvKind::kMemoryPr:
      if (!memory) throw DomainError("memory strategy needs a trial history");
      if (!memory->fallback) {
        // Product +1 on every cell except (2,2): B always +1, A flips when both settings are 2.
        if (side == Site::kA && local == 2 && memory->predict_b(s, trial) == 2) r.outcome = -1;
        return r;
      }
      [[fallthrough]];
    case LhvKind::kSignModel: {
      const int v = sign_of_value(std::cos(local_angle - lambda.angle));
      r.outcome = side == Site::kA ? v : -v;
      return r;
    }
    case LhvKind::kFairCoin: {
      const unsigned bit = (side == Site::kA ? 0u : 16u) + static_cast<unsigned>(local & 15);
      r.outcome = (lambda.bits >> bit) & 1u ? +1 : -1;
      return r;
    }
    case LhvKind::kTable: {
      if (local == kRemoved) return r;
      const auto& st = s.table.strategies.at(lambda.row);
      const auto& loc = side == Site::kA ? st.a : st.b;
      const auto i = static_cast<std::size_t>(local - 1);
      r.outcome = loc.outcome.at(i);
      r.detected = loc.detect.at(i);
      return r;
    }
    case LhvKind::kDelayTable: {
      if (local == kRemoved) return r;
      const auto& st = s.delay_table.mixture.strategies.at(lambda.row);
      const auto& loc = side == Site::kA ? st.a : st.b;
      const auto i = static_cast<std::size_t>(local - 1);
      r.outcome = loc.outcome.at(i);
      r.delay = static_cast<Ticks>(loc.slot.at(i)) * s.delay_slot_ticks;
      return r;
    }
  }
  return r;
}

std::pair<int, int> sample_singlet(double a_angle, double b_angle, std::uint64_t seed, std::uint64_t trial) {
  CounterRng rng(seed, Stream::kSource, trial);
  const int a = rng.fair_sign();
  // P(A = B) = (1 - cos phi) / 2.
  const double p_equal = 0.5 * (1.0 - std::cos(a_angle - b_angle));
  const int b = rng.uniform() < p_equal ? a : -a;
  return {a, b};
}

std::array<double, 4> two_qubit_probabilities(double r, double a, double b) {
  const double cr = std::cos(r), sr = std::sin(r);
  const double ca = std::cos(a), sa = std::sin(a), cb = std::cos(b), sb = std::sin(b);
  const double pp = cr * ca * cb + sr * sa * sb;
  const double pm = -cr * ca * sb + sr * sa * cb;
  const double mp = -cr * sa * cb + sr * ca * sb;
  const double mm = cr * sa * sb + sr * ca * cb;
  return {pp * pp, pm * pm, mp * mp, mm * mm};
}

double two_qubit_marginal_plus(double r, double angle) {
  const double c = std::cos(r) * std::cos(angle), s = std::sin(r) * std::sin(angle);
  return c * c + s * s;
}

std::pair<int, int> sample_two_qubit(double r, double a_angle, double b_angle, std::uint64_t seed,
                                     std::uint64_t trial) {
  CounterRng rng(seed, Stream::kSource, trial);
  const auto p = two_qubit_probabilities(r, a_angle, b_angle);
  const double u = rng.uniform() * (p[0] + p[1] + p[2] + p[3]);
  if (u < p[0]) return {+1, +1};
  if (u < p[0] + p[1]) return {+1, -1};
  if (u < p[0] + p[1] + p[2]) return {-1, +1};
  return {-1, -1};
}

FransonSample sample_franson(double a_phase, double b_phase, std::uint64_t seed, std::uint64_t trial) {
  CounterRng rng(seed, Stream::kSource, trial);
  FransonSample f;
  // Emission time within the pump coherence decides the joint path: SS, LL or mixed.
  const std::uint64_t path = rng.below(4);
  f.a = rng.fair_sign();
  switch (path) {
    case 0:
    case 1: {
      f.long_a = f.long_b = path == 1;
      const double p_equal = 0.5 * (1.0 + std::cos(a_phase + b_phase));
      f.b = rng.uniform() < p_equal ? f.a : -f.a;
      break;
    }
    default:
      f.long_a = path == 2;
      f.long_b = path == 3;
      f.b = rng.fair_sign();
      break;
  }
  return f;
}

void validate(const ExperimentConfig& cfg) {
  validate(cfg.settings);
  validate(cfg.channel);
  const auto& src = cfg.source;
  const auto need = static_cast<std::size_t>(cfg.settings.arity + 1);
  if (src.angles_a.size() < need || src.angles_b.size() < need) {
    throw ConfigError("source.angles", "need one angle per setting 1.." + std::to_string(cfg.settings.arity));
  }
  const bool removed_possible = cfg.settings.include_removed;
  if (src.kind == SourceKind::kFranson) {
    if (removed_possible) throw ConfigError("settings.removed", "a Franson source has no analyzer to remove");
    if (src.franson_delay <= 0) throw ConfigError("source.franson_delay", "long-arm delay must be positive");
  }
  if (src.kind == SourceKind::kTwoQubit && !(src.schmidt_r >= 0 && src.schmidt_r <= std::numbers::pi / 4 + 1e-12)) {
    throw ConfigError("source.r", "Schmidt angle must lie in [0, pi/4]");
  }
  if (src.kind == SourceKind::kLhv) {
    const auto& l = src.lhv;
    if ((l.kind == LhvKind::kTable || l.kind == LhvKind::kDelayTable) && cfg.settings.arity != 2) {
      throw ConfigError("settings.arity", "strategy tables are defined for two settings per side");
    }
    if (l.kind == LhvKind::kTable) validate(l.table);
    if (l.kind == LhvKind::kDelayTable) {
      validate(l.delay_table.mixture);
      if (l.delay_slot_ticks <= 0) throw ConfigError("source.delay_slot", "must be positive");
    }
    if (l.has_memory() && cfg.timing.mode != LogMode::kSlotted) {
      throw ConfigError("timing.mode", "memory strategies run trial by trial and need slotted mode");
    }
  }
  const auto& t = cfg.timing;
  if (t.mode == LogMode::kSlotted) {
    if (cfg.n_trials < 0) throw ConfigError("run.trials", "must be nonnegative");
    if (t.trial_period <= 0) throw ConfigError("timing.trial_period", "must be positive");
    Ticks max_delay = 0;
    if (src.kind == SourceKind::kFranson) max_delay = src.franson_delay;
    if (src.kind == SourceKind::kLhv && src.lhv.kind == LhvKind::kDelayTable) {
      max_delay = static_cast<Ticks>(std::max(0, src.lhv.delay_table.slots - 1)) * src.lhv.delay_slot_ticks;
    }
    if (max_delay + static_cast<Ticks>(6 * cfg.channel.jitter_sigma) >= t.trial_period) {
      throw ConfigError("timing.trial_period", "delays and jitter must fit inside one trial period");
    }
  } else {
    if (!(t.pair_rate_hz > 0)) throw ConfigError("timing.pair_rate", "continuous mode needs a positive pair rate");
    if (t.duration <= 0) throw ConfigError("timing.duration", "continuous mode needs a positive duration");
    if (t.setting_bin <= 0) throw ConfigError("timing.setting_bin", "must be positive");
    if (cfg.settings.kind == SettingKind::kFileReplay) {
      throw ConfigError("settings.kind", "replayed settings are indexed by trial and need slotted mode");
    }
  }
  if (cfg.threads < 1) throw ConfigError("run.threads", "must be at least 1");
}

SettingSchedule experiment_schedule(const ExperimentConfig& cfg) {
  SettingSchedule s;
  s.strategy = cfg.settings;
  s.seed = cfg.seed;
  s.origin = 0;
  if (cfg.timing.mode == LogMode::kSlotted) {
    s.bin_length = cfg.timing.trial_period;
    s.n_bins = cfg.n_trials;
  } else {
    s.bin_length = cfg.timing.setting_bin;
    s.n_bins = (cfg.timing.duration + s.bin_length - 1) / s.bin_length;
  }
  return s;
}

std::vector<TrialRecord> run_trials(const ExperimentConfig& cfg) {
  std::vector<TrialRecord> out(static_cast<std::size_t>(std::max<std::int64_t>(0, cfg.n_trials)));
  for_each_trial(cfg, effective_shards(cfg), [&](int, std::int64_t n, const TrialOutput& o, const MemoryState*) {
    auto& r = out[static_cast<std::size_t>(n)];
    const Ticks base = n * cfg.timing.trial_period;
    r.trial = n;
    r.setting_a = o.s.a;
    r.setting_b = o.s.b;
    r.outcome_a = outcome_of(o.ra);
    r.outcome_b = outcome_of(o.rb);
    if (o.ra.detected) r.time_a = base + o.ra.delay;
    if (o.rb.detected) r.time_b = base + o.rb.delay;
  });
  return out;
}

CorrelationTable run_table(const ExperimentConfig& cfg) {
  const int shards = effective_shards(cfg);
  std::vector<CorrelationTable> parts(static_cast<std::size_t>(shards), CorrelationTable(cfg.settings.arity));
  for (auto& p : parts) {
    for (auto& c : p.cells) c.trials = 0;
  }
  const auto memory = for_each_trial(cfg, shards, [&](int shard, std::int64_t, const TrialOutput& o, const MemoryState*) {
    auto& c = parts[static_cast<std::size_t>(shard)].at(o.s.a, o.s.b);
    c.n[outcome_index(outcome_of(o.ra))][outcome_index(outcome_of(o.rb))] += 1;
    c.trials += 1;
  });
  CorrelationTable t = parts[0];
  for (std::size_t k = 1; k < parts.size(); ++k) {
    for (std::size_t c = 0; c < t.cells.size(); ++c) {
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) t.cells[c].n[i][j] += parts[k].cells[c].n[i][j];
      }
      t.cells[c].trials += parts[k].cells[c].trials;
    }
  }
  t.policy = PolicyKind::kSlots;
  t.ch_compatible = true;
  t.trials_defined = true;
  if (is_predictable(cfg.settings)) t.meta["settings_predictable"] = "1";
  if (memory && memory->fallback) t.meta["memory_fallback"] = std::to_string(memory->fallback_trial);
  return t;
}

EventLog run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  EventLog log;
  auto& h = log.header;
  h.mode = cfg.timing.mode;
  h.arity = cfg.settings.arity;
  h.tick_ns = 1;
  h.seed = cfg.seed;
  const auto& src = cfg.source;
  h.source = source_name(src.kind);
  if (src.kind == SourceKind::kLhv) h.source += std::string(":") + lhv_name(src.lhv.kind);
  const auto schedule = experiment_schedule(cfg);
  write_schedule(h, schedule);
  h.extra["angles_a"] = join_angles(src.angles_a);
  h.extra["angles_b"] = join_angles(src.angles_b);
  if (src.kind == SourceKind::kTwoQubit) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", src.schmidt_r);
    h.extra["schmidt_r"] = buf;
  }
  if (src.kind == SourceKind::kFranson) h.extra["franson_delay"] = std::to_string(src.franson_delay);
  if (src.kind == SourceKind::kLhv && src.lhv.kind == LhvKind::kDelayTable) {
    h.extra["delay_slot"] = std::to_string(src.lhv.delay_slot_ticks);
  }
  if (is_predictable(cfg.settings)) h.extra["settings_predictable"] = "1";
  if (cfg.channel.dark_rate_hz > 0 && cfg.timing.mode == LogMode::kSlotted) {
    throw ConfigError("channel.dark_rate", "dark counts are simulated for continuous-mode runs only");
  }

  if (cfg.timing.mode == LogMode::kSlotted) {
    h.extra["trials"] = std::to_string(cfg.n_trials);
    h.extra["trial_period"] = std::to_string(cfg.timing.trial_period);
    h.extra["duration_ns"] = std::to_string(cfg.n_trials * cfg.timing.trial_period);
    const int shards = effective_shards(cfg);
    std::vector<std::vector<DetectionEvent>> parts(static_cast<std::size_t>(shards));
    const auto memory = for_each_trial(cfg, shards, [&](int shard, std::int64_t n, const TrialOutput& o, const MemoryState*) {
      auto& part = parts[static_cast<std::size_t>(shard)];
      const Ticks base = n * cfg.timing.trial_period;
      if (o.ra.detected) part.push_back(event_of(Site::kA, o.ra, o.s.a, base, n));
      if (o.rb.detected) part.push_back(event_of(Site::kB, o.rb, o.s.b, base, n));
    });
    if (memory && memory->fallback) h.extra["memory_fallback"] = std::to_string(memory->fallback_trial);
    for (auto& p : parts) log.events.insert(log.events.end(), p.begin(), p.end());
  } else {
    const auto& t = cfg.timing;
    h.extra["duration_ns"] = std::to_string(t.duration);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", t.pair_rate_hz);
    h.extra["pair_rate_hz"] = buf;
    const LhvStrategy lhv = prepared_lhv(cfg);
    const std::int64_t n_blocks = (t.duration + kEmissionBlock - 1) / kEmissionBlock;
    std::vector<std::vector<DetectionEvent>> parts(static_cast<std::size_t>(n_blocks));
    const double mean_per_block = t.pair_rate_hz * static_cast<double>(kEmissionBlock) * 1e-9;
    parallel_shards(n_blocks, cfg.threads, [&](int, std::int64_t lo, std::int64_t hi) {
      for (std::int64_t blk = lo; blk < hi; ++blk) {
        CounterRng rng(cfg.seed, Stream::kEmission, static_cast<std::uint64_t>(blk));
        const Ticks start = blk * kEmissionBlock;
        const Ticks len = std::min(kEmissionBlock, t.duration - start);
        std::poisson_distribution<long> count(mean_per_block * static_cast<double>(len) /
                                              static_cast<double>(kEmissionBlock));
        const long n = count(rng);
        if (n >= (1L << kBlockShift)) throw ConfigError("timing.pair_rate", "too many emissions per block");
        std::vector<Ticks> times(static_cast<std::size_t>(n));
        for (auto& x : times) x = start + static_cast<Ticks>(rng.below(static_cast<std::uint64_t>(len)));
        std::sort(times.begin(), times.end());
        auto& part = parts[static_cast<std::size_t>(blk)];
        for (long k = 0; k < n; ++k) {
          const Ticks te = times[static_cast<std::size_t>(k)];
          const auto s = schedule.settings(schedule.bin_of(te));
          const auto key = (static_cast<std::uint64_t>(blk) << kBlockShift) | static_cast<std::uint64_t>(k);
          const auto o = simulate_one(cfg, lhv, s, key, nullptr, 0);
          if (o.ra.detected) part.push_back(event_of(Site::kA, o.ra, s.a, te, std::nullopt));
          if (o.rb.detected) part.push_back(event_of(Site::kB, o.rb, s.b, te, std::nullopt));
        }
      }
    });
    for (auto& p : parts) log.events.insert(log.events.end(), p.begin(), p.end());
    sort_events(log.events);
    if (cfg.channel.dark_rate_hz > 0) log = inject_dark_counts(log, cfg.channel, cfg.seed);
    return log;
  }
  sort_events(log.events);
  return log;
}

}  // namespace bellab
