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

#include "bellab/setting_source.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "bellab/error.hpp"
#include "bellab/rng.hpp"

namespace bellab {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

Setting parse_setting(const std::string& s, const std::string& field) {
  if (s == "inf") return kRemoved;
  Setting v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || v < 1) {
    throw ConfigError(field, "bad setting '" + s + "'");
  }
  return v;
}

std::string join(const std::vector<Setting>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += v[i] == kRemoved ? std::string("inf") : std::to_string(v[i]);
  }
  return out;
}

Setting iid_draw(const SettingStrategy& s, std::int64_t trial, std::uint64_t seed, Stream side) {
  CounterRng rng(seed ^ mix64(s.stream + 0x51ed27f0ULL), side, static_cast<std::uint64_t>(trial));
  const std::uint64_t choices = static_cast<std::uint64_t>(s.arity) + (s.include_removed ? 1 : 0);
  const auto k = static_cast<Setting>(rng.below(choices));
  return k == s.arity ? kRemoved : k + 1;
}

}  // namespace

void validate(const SettingStrategy& s) {
  if (s.arity < 1) throw ConfigError("settings.arity", "must be at least 1");
  auto check = [&](const std::vector<Setting>& p, const char* field) {
    if (p.empty()) throw ConfigError(field, "periodic pattern is empty");
    for (Setting v : p) {
      if (v != kRemoved && (v < 1 || v > s.arity)) {
        throw ConfigError(field, "setting " + std::to_string(v) + " outside arity");
      }
    }
  };
  if (s.kind == SettingKind::kPeriodic) {
    check(s.pattern_a, "settings.pattern_a");
    check(s.pattern_b, "settings.pattern_b");
  }
}

SettingPair settings_for_trial(const SettingStrategy& s, std::int64_t trial, std::uint64_t seed) {
  switch (s.kind) {
    case SettingKind::kIidUniform:
      return {iid_draw(s, trial, seed, Stream::kSettingsA), iid_draw(s, trial, seed, Stream::kSettingsB)};
    case SettingKind::kPeriodic: {
      const auto pa = static_cast<std::int64_t>(s.pattern_a.size());
      const auto pb = static_cast<std::int64_t>(s.pattern_b.size());
      return {s.pattern_a[static_cast<std::size_t>(trial % pa)],
              s.pattern_b[static_cast<std::size_t>(trial % pb)]};
    }
    case SettingKind::kFileReplay: {
      auto ia = s.replay_a.find(trial);
      auto ib = s.replay_b.find(trial);
      if (ia == s.replay_a.end() || ib == s.replay_b.end()) {
        throw MissingDataError("setting replay exhausted at trial " + std::to_string(trial));
      }
      return {ia->second, ib->second};
    }
  }
  return {};
}

std::string describe(const SettingStrategy& s) {
  std::string out;
  switch (s.kind) {
    case SettingKind::kIidUniform:
      out = "iid:arity=" + std::to_string(s.arity);
      if (s.include_removed) out += ";removed=1";
      if (s.stream) out += ";stream=" + std::to_string(s.stream);
      break;
    case SettingKind::kPeriodic:
      out = "periodic:arity=" + std::to_string(s.arity) + ";a=" + join(s.pattern_a) +
            ";b=" + join(s.pattern_b);
      break;
    case SettingKind::kFileReplay:
      out = "replay:arity=" + std::to_string(s.arity) + ";a=" + s.replay_path_a +
            ";b=" + s.replay_path_b;
      break;
  }
  return out;
}

SettingStrategy parse_setting_descriptor(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  SettingStrategy s;
  std::map<std::string, std::string> kv;
  if (colon != std::string::npos) {
    for (const auto& item : split(text.substr(colon + 1), ';')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError("settings", "bad descriptor item '" + item + "'");
      kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
  }
  if (kv.count("arity")) s.arity = std::stoi(kv["arity"]);
  if (kind == "iid") {
    s.kind = SettingKind::kIidUniform;
    s.include_removed = kv.count("removed") && kv["removed"] == "1";
    if (kv.count("stream")) s.stream = std::stoull(kv["stream"]);
  } else if (kind == "periodic") {
    s.kind = SettingKind::kPeriodic;
    for (const auto& v : split(kv["a"], ',')) s.pattern_a.push_back(parse_setting(v, "settings.pattern_a"));
    for (const auto& v : split(kv["b"], ',')) s.pattern_b.push_back(parse_setting(v, "settings.pattern_b"));
  } else if (kind == "replay") {
    s = load_replay(kv["a"], kv["b"], s.arity);
  } else {
    throw ConfigError("settings.kind", "unknown setting strategy '" + kind + "'");
  }
  validate(s);
  return s;
}

std::map<std::int64_t, Setting> read_replay_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open setting replay file " + path);
  std::map<std::int64_t, Setting> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && line == "trial,setting") continue;
    const auto f = split(line, ',');
    if (f.size() != 2) throw ParseError(lineno, "expected 'trial,setting'");
    std::int64_t trial = 0;
    auto [p, ec] = std::from_chars(f[0].data(), f[0].data() + f[0].size(), trial);
    if (ec != std::errc() || p != f[0].data() + f[0].size()) throw ParseError(lineno, "bad trial id");
    try {
      out[trial] = parse_setting(f[1], "settings.replay");
    } catch (const ConfigError& e) {
      throw ParseError(lineno, e.what());
    }
  }
  return out;
}

SettingStrategy load_replay(const std::string& path_a, const std::string& path_b, int arity) {
  SettingStrategy s;
  s.kind = SettingKind::kFileReplay;
  s.arity = arity;
  s.replay_path_a = path_a;
  s.replay_path_b = path_b;
  s.replay_a = read_replay_csv(path_a);
  s.replay_b = read_replay_csv(path_b);
  return s;
}

bool is_predictable(const SettingStrategy& s) { return s.kind == SettingKind::kPeriodic; }

std::int64_t SettingSchedule::bin_of(Ticks t) const {
  const Ticks d = t - origin;
  return d >= 0 ? d / bin_length : -((-d + bin_length - 1) / bin_length);
}

void write_schedule(LogHeader& header, const SettingSchedule& schedule) {
  header.extra["settings"] = describe(schedule.strategy);
  header.extra["schedule_origin"] = std::to_string(schedule.origin);
  header.extra["schedule_bin"] = std::to_string(schedule.bin_length);
  header.extra["schedule_bins"] = std::to_string(schedule.n_bins);
}

std::optional<SettingSchedule> schedule_from_header(const LogHeader& header) {
  auto desc = header_value(header, "settings");
  auto bin = header_int(header, "schedule_bin");
  auto bins = header_int(header, "schedule_bins");
  if (!desc || !bin || !bins) return std::nullopt;
  SettingSchedule s;
  s.strategy = parse_setting_descriptor(*desc);
  s.seed = header.seed;
  s.origin = header_int(header, "schedule_origin").value_or(0);
  s.bin_length = *bin;
  s.n_bins = *bins;
  return s;
}

}  // namespace bellab
