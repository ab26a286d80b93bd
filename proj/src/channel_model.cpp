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

#include "bellab/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "bellab/error.hpp"
#include "bellab/rng.hpp"

namespace bellab {

namespace {

void check_eta(double v, const char* field) {
  if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(field, "detection probability must lie in [0,1], got " + std::to_string(v));
}

constexpr Ticks kDarkBlock = 1'000'000;

}  // namespace

void validate(const ChannelConfig& cfg) {
  check_eta(cfg.eta_a.plus, "channel.eta_a");
  check_eta(cfg.eta_a.minus, "channel.eta_a_minus");
  check_eta(cfg.eta_b.plus, "channel.eta_b");
  check_eta(cfg.eta_b.minus, "channel.eta_b_minus");
  if (!(cfg.dark_rate_hz >= 0.0)) throw ConfigError("channel.dark_rate", "must be nonnegative");
  if (!(cfg.jitter_sigma >= 0.0)) throw ConfigError("channel.jitter_sigma", "must be nonnegative");
}

LocalResponse apply_channel(const LocalResponse& response, const ChannelConfig& cfg, Site side, Setting setting,
                            std::uint64_t seed, std::uint64_t trial) {
  CounterRng rng(seed, side == Site::kA ? Stream::kChannelA : Stream::kChannelB, trial);
  const auto& eff = side == Site::kA ? cfg.eta_a : cfg.eta_b;
  LocalResponse out = response;
  if (setting == kRemoved) out.outcome = +1;
  const double eta = eff.for_outcome(out.outcome);
  // Always consume the same draws so loss and jitter streams stay aligned across configs.
  const double u = rng.uniform();
  const double z = rng.normal();
  if (!out.detected || u >= eta) {
    out.detected = false;
    out.delay = 0;
    return out;
  }
  if (cfg.jitter_sigma > 0) {
    out.delay = std::max<Ticks>(0, out.delay + static_cast<Ticks>(std::llround(z * cfg.jitter_sigma)));
  }
  return out;
}

EventLog inject_dark_counts(const EventLog& log, const ChannelConfig& cfg, std::uint64_t seed) {
  if (log.header.mode != LogMode::kContinuous) {
    throw DomainError("dark-count injection is only supported for continuous-mode logs");
  }
  if (cfg.dark_rate_hz <= 0) return log;
  const auto duration = header_int(log.header, "duration_ns");
  if (!duration || *duration <= 0) throw MissingDataError("log header lacks duration_ns");
  const auto schedule = schedule_from_header(log.header);
  if (!schedule) throw MissingDataError("log header lacks a setting schedule");

  EventLog out = log;
  const double per_block = cfg.dark_rate_hz * static_cast<double>(kDarkBlock) * 1e-9;
  const std::int64_t n_blocks = (*duration + kDarkBlock - 1) / kDarkBlock;
  for (Site site : {Site::kA, Site::kB}) {
    const Stream stream = site == Site::kA ? Stream::kDarkA : Stream::kDarkB;
    for (std::int64_t blk = 0; blk < n_blocks; ++blk) {
      CounterRng rng(seed, stream, static_cast<std::uint64_t>(blk));
      const Ticks start = blk * kDarkBlock;
      const Ticks len = std::min(kDarkBlock, *duration - start);
      std::poisson_distribution<long> count(per_block * static_cast<double>(len) / static_cast<double>(kDarkBlock));
      const long n = count(rng);
      for (long k = 0; k < n; ++k) {
        DetectionEvent e;
        e.site = site;
        e.time = start + static_cast<Ticks>(rng.below(static_cast<std::uint64_t>(len)));
        const auto s = schedule->settings(schedule->bin_of(e.time));
        e.setting = site == Site::kA ? s.a : s.b;
        e.channel = rng.fair_sign() > 0 ? Channel::kPlus : Channel::kMinus;
        out.events.push_back(e);
      }
    }
  }
  std::stable_sort(out.events.begin(), out.events.end(), [](const DetectionEvent& x, const DetectionEvent& y) {
    return std::tie(x.time, x.site) < std::tie(y.time, y.site);
  });
  const auto prev = header_value(out.header, "dark_rate_hz");
  const double total = cfg.dark_rate_hz + (prev ? std::stod(*prev) : 0.0);
  out.header.extra["dark_rate_hz"] = std::to_string(total);
  return out;
}

double AccidentalCell::rate_hz() const {
  double r = 0;
  for (const auto& row : expected) {
    for (double v : row) r += v;
  }
  return duty_s > 0 ? r / duty_s : 0.0;
}

double AccidentalCell::total() const {
  double r = 0;
  for (const auto& row : expected) {
    for (double v : row) r += v;
  }
  return r;
}

double accidental_rate_hz(double singles_a_hz, double singles_b_hz, Ticks tau_ns) {
  return singles_a_hz * singles_b_hz * static_cast<double>(tau_ns) * 1e-9;
}

AccidentalEstimate estimate_accidentals(const EventLog& log, Ticks tau) {
  if (log.header.mode != LogMode::kContinuous) {
    throw DomainError("accidental estimation needs a continuous-mode log");
  }
  const auto schedule = schedule_from_header(log.header);
  if (!schedule) throw MissingDataError("log header lacks a setting schedule");
  const int m = log.header.arity;
  AccidentalEstimate est;
  est.arity = m;
  est.tau = tau;
  est.cells.assign(static_cast<std::size_t>((m + 1) * (m + 1)), AccidentalCell{});
  auto idx = [m](Setting a, Setting b) { return static_cast<std::size_t>(a * (m + 1) + b); };

  const double bin_s = static_cast<double>(schedule->bin_length) * static_cast<double>(log.header.tick_ns) * 1e-9;
  for (std::int64_t k = 0; k < schedule->n_bins; ++k) {
    const auto s = schedule->settings(k);
    est.cells[idx(s.a, s.b)].duty_s += bin_s;
  }
  std::vector<std::array<double, 2>> na(est.cells.size()), nb(est.cells.size());
  for (const auto& e : log.events) {
    const auto bin = schedule->bin_of(e.time);
    if (bin < 0 || bin >= schedule->n_bins) continue;
    const auto s = schedule->settings(bin);
    const int ch = e.channel == Channel::kPlus ? 0 : 1;
    if (e.site == Site::kA) {
      na[idx(s.a, s.b)][static_cast<std::size_t>(ch)] += 1;
    } else {
      nb[idx(s.a, s.b)][static_cast<std::size_t>(ch)] += 1;
    }
  }
  const double tau_s = static_cast<double>(tau) * static_cast<double>(log.header.tick_ns) * 1e-9;
  for (std::size_t c = 0; c < est.cells.size(); ++c) {
    auto& cell = est.cells[c];
    const bool any = na[c][0] + na[c][1] + nb[c][0] + nb[c][1] > 0;
    if (cell.duty_s <= 0) {
      if (any) throw DomainError("events recorded for a setting pair with zero duty time");
      continue;
    }
    for (int i = 0; i < 2; ++i) {
      cell.rate_a[static_cast<std::size_t>(i)] = na[c][static_cast<std::size_t>(i)] / cell.duty_s;
      cell.rate_b[static_cast<std::size_t>(i)] = nb[c][static_cast<std::size_t>(i)] / cell.duty_s;
    }
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        cell.expected[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            cell.rate_a[static_cast<std::size_t>(i)] * cell.rate_b[static_cast<std::size_t>(j)] * tau_s * cell.duty_s;
      }
    }
  }
  return est;
}

CorrelationTable subtract_accidentals(const CorrelationTable& table, const AccidentalEstimate& acc) {
  if (acc.arity != table.arity) throw DomainError("accidental estimate arity does not match the table");
  CorrelationTable out = table;
  out.accidentals_subtracted = true;
  std::size_t clipped = 0;
  for (Setting a = 0; a <= table.arity; ++a) {
    for (Setting b = 0; b <= table.arity; ++b) {
      auto& c = out.at(a, b);
      const auto& e = acc.at(a, b);
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          auto& v = c.n[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
          v -= e.expected[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
          if (v < 0) {
            v = 0;
            ++clipped;
          }
        }
      }
    }
  }
  if (clipped > 0) out.warnings.push_back("accidental subtraction clipped " + std::to_string(clipped) + " counts at 0");
  out.warnings.push_back("accidentals subtracted: raw data may not support the reported violation");
  return out;
}

}  // namespace bellab
