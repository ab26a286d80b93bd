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

#include "bellab/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "bellab/error.hpp"

namespace bellab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "run.seed",          "run.trials",          "run.threads",         "run.out",
      "run.report",        "source.kind",         "source.r",            "source.franson_delay",
      "source.lhv",        "source.table",        "source.delay_slot",   "source.memory_period",
      "angles.preset",     "angles.a",            "angles.b",            "settings.kind",
      "settings.arity",    "settings.removed",    "settings.pattern_a",  "settings.pattern_b",
      "settings.replay_a", "settings.replay_b",   "settings.stream",     "channel.eta_a",
      "channel.eta_b",     "channel.eta_a_minus", "channel.eta_b_minus", "channel.dark_rate",
      "channel.jitter_sigma", "timing.mode",      "timing.trial_period", "timing.pair_rate",
      "timing.duration",   "timing.setting_bin",  "coincidence.policy",  "coincidence.tau",
      "coincidence.slot_len", "coincidence.origin", "coincidence.tolerance", "coincidence.tau11",
      "coincidence.tau12", "coincidence.tau21",   "coincidence.tau22",   "coincidence.ch_compatible",
      "analysis.inequalities", "analysis.nodetect", "analysis.chained_terms",
      "analysis.subtract_accidentals", "analysis.accidental_tau", "analysis.subsamples",
  };
  return keys;
}

class Reader {
 public:
  explicit Reader(const ConfigText& t) : t_(t) {}

  bool has(const std::string& key) const { return t_.values.count(key) != 0; }

  std::string str(const std::string& key, const std::string& fallback = {}) const {
    const auto it = t_.values.find(key);
    return it == t_.values.end() ? fallback : it->second;
  }

  double num(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return parse_double(key, str(key));
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) const {
    if (!has(key)) return fallback;
    const auto s = str(key);
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
      // Accept scientific notation for large counts such as 1e6.
      const double d = parse_double(key, s);
      if (d != std::floor(d) || std::abs(d) > 9e18) throw ConfigError(key, "expected an integer, got '" + s + "'");
      return static_cast<std::int64_t>(d);
    }
    return v;
  }

  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto s = str(key);
    if (s == "1" || s == "true" || s == "yes") return true;
    if (s == "0" || s == "false" || s == "no") return false;
    throw ConfigError(key, "expected a boolean, got '" + s + "'");
  }

  std::vector<double> nums(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : split_list(str(key))) out.push_back(parse_double(key, item));
    return out;
  }

  static double parse_double(const std::string& key, const std::string& s) {
    // Angles may be written in units of pi, e.g. "0.75pi".
    std::string body = s;
    double scale = 1.0;
    if (body.size() >= 2 && body.compare(body.size() - 2, 2, "pi") == 0) {
      body = trim(body.substr(0, body.size() - 2));
      scale = std::numbers::pi;
      if (body.empty() || body == "+") return scale;
      if (body == "-") return -scale;
    }
    double v = 0;
    auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
    if (ec != std::errc() || p != body.data() + body.size()) {
      throw ConfigError(key, "expected a number, got '" + s + "'");
    }
    return v * scale;
  }

 private:
  const ConfigText& t_;
};

SourceKind parse_source_kind(const std::string& s) {
  if (s == "singlet") return SourceKind::kSinglet;
  if (s == "two_qubit") return SourceKind::kTwoQubit;
  if (s == "franson") return SourceKind::kFranson;
  if (s == "lhv") return SourceKind::kLhv;
  throw ConfigError("source.kind", "unknown source '" + s + "'");
}

LhvKind parse_lhv_kind(const std::string& s) {
  if (s == "sign_model") return LhvKind::kSignModel;
  if (s == "fair_coin") return LhvKind::kFairCoin;
  if (s == "memory_pr") return LhvKind::kMemoryPr;
  if (s == "table") return LhvKind::kTable;
  if (s == "delay_table") return LhvKind::kDelayTable;
  throw ConfigError("source.lhv", "unknown strategy '" + s + "'");
}

PolicyKind parse_policy(const std::string& s) {
  if (s == "window") return PolicyKind::kWindow;
  if (s == "slots") return PolicyKind::kSlots;
  if (s == "asymmetric") return PolicyKind::kAsymmetric;
  if (s == "heralded") return PolicyKind::kHeralded;
  throw ConfigError("coincidence.policy", "unknown policy '" + s + "'");
}

NodetectMode parse_nodetect(const std::string& s) {
  if (s == "0" || s == "zero") return NodetectMode::kZero;
  if (s == "-1" || s == "minus_one") return NodetectMode::kMinusOne;
  if (s == "exclude") return NodetectMode::kExclude;
  throw ConfigError("analysis.nodetect", "expected 0, -1 or exclude, got '" + s + "'");
}

std::vector<Setting> parse_pattern(const std::string& key, const std::string& text) {
  std::vector<Setting> out;
  for (const auto& item : split_list(text)) {
    if (item == "inf") {
      out.push_back(kRemoved);
      continue;
    }
    Setting v = 0;
    auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || p != item.data() + item.size()) throw ConfigError(key, "bad setting '" + item + "'");
    out.push_back(v);
  }
  return out;
}

void load_table(LhvStrategy& lhv, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open strategy table '" + path + "'");
  try {
    if (lhv.kind == LhvKind::kTable) {
      lhv.table = read_det_witness(in);
    } else {
      lhv.delay_table = read_delay_witness(in);
    }
  } catch (const ParseError& e) {
    throw ConfigError("source.table", path + ": " + e.what());
  }
}

const std::vector<std::string>& known_inequalities() {
  static const std::vector<std::string> names{"chsh",           "bell",    "ch",   "rate_chsh",
                                              "no_enhancement", "chained", "ch_coincidence"};
  return names;
}

}  // namespace

ConfigText parse_config_text(const std::string& text) {
  ConfigText out;
  std::istringstream in(text);
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(no, "expected 'section.key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.find('.') == std::string::npos) throw ParseError(no, "key '" + key + "' has no section");
    if (!known_keys().count(key)) throw ConfigError(key, "unknown key (line " + std::to_string(no) + ")");
    if (out.values.count(key)) throw ConfigError(key, "set twice (line " + std::to_string(no) + ")");
    out.values[key] = value;
    out.lines[key] = no;
  }
  return out;
}

ConfigText read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::pair<std::vector<double>, std::vector<double>> angle_preset(const std::string& name, SourceKind source) {
  using std::numbers::pi;
  std::vector<double> a;
  std::vector<double> b;
  if (name == "chsh") {
    a = {0, pi / 4, 3 * pi / 4};
    b = {0, pi / 2, 0};
  } else if (name == "bell") {
    a = {0, 0, 2 * pi / 3};
    b = {0, 0, pi / 3};
  } else if (name == "ch") {
    a = {0, 0, pi / 2};
    b = {0, -3 * pi / 4, 3 * pi / 4};
  } else if (name == "franson_chsh") {
    a = {0, pi / 4, 3 * pi / 4};
    b = {0, -pi / 2, 0};
  } else if (name == "franson_chained6") {
    a = {0, pi / 6, pi / 2, 5 * pi / 6};
    b = {0, 0, -pi / 3, -2 * pi / 3};
  } else {
    throw ConfigError("angles.preset", "unknown preset '" + name + "'");
  }
  if (source == SourceKind::kTwoQubit) {
    // Polarizer angles: E = cos 2(x - y) against the singlet's -cos(a - b).
    for (std::size_t i = 1; i < a.size(); ++i) a[i] = a[i] / 2;
    for (std::size_t i = 1; i < b.size(); ++i) b[i] = (b[i] + pi) / 2;
  }
  return {a, b};
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RunConfig build_run_config(const ConfigText& text) {
  const Reader r(text);
  RunConfig rc;
  auto& ex = rc.experiment;

  rc.seed_given = r.has("run.seed");
  if (rc.seed_given) ex.seed = static_cast<std::uint64_t>(r.integer("run.seed", 0));
  ex.n_trials = r.integer("run.trials", 0);
  ex.threads = static_cast<int>(r.integer("run.threads", 1));
  rc.log_path = r.str("run.out");
  rc.report_path = r.str("run.report");

  // Settings.
  auto& st = ex.settings;
  const auto skind = r.str("settings.kind", "iid");
  st.arity = static_cast<int>(r.integer("settings.arity", 2));
  if (skind == "iid") {
    st.kind = SettingKind::kIidUniform;
    st.include_removed = r.flag("settings.removed", false);
    st.stream = static_cast<std::uint64_t>(r.integer("settings.stream", 0));
  } else if (skind == "periodic") {
    st.kind = SettingKind::kPeriodic;
    if (!r.has("settings.pattern_a") || !r.has("settings.pattern_b")) {
      throw ConfigError(r.has("settings.pattern_a") ? "settings.pattern_b" : "settings.pattern_a",
                        "periodic settings need both patterns");
    }
    st.pattern_a = parse_pattern("settings.pattern_a", r.str("settings.pattern_a"));
    st.pattern_b = parse_pattern("settings.pattern_b", r.str("settings.pattern_b"));
  } else if (skind == "replay") {
    if (!r.has("settings.replay_a") || !r.has("settings.replay_b")) {
      throw ConfigError(r.has("settings.replay_a") ? "settings.replay_b" : "settings.replay_a",
                        "replayed settings need both files");
    }
    st = load_replay(r.str("settings.replay_a"), r.str("settings.replay_b"), st.arity);
  } else {
    throw ConfigError("settings.kind", "unknown setting strategy '" + skind + "'");
  }

  // Source.
  auto& src = ex.source;
  src.kind = parse_source_kind(r.str("source.kind", "singlet"));
  src.schmidt_r = r.num("source.r", src.schmidt_r);
  src.franson_delay = r.integer("source.franson_delay", 0);
  if (src.kind == SourceKind::kLhv) {
    if (!r.has("source.lhv")) throw ConfigError("source.lhv", "an lhv source needs a strategy");
    src.lhv.kind = parse_lhv_kind(r.str("source.lhv"));
    src.lhv.memory_period = static_cast<int>(r.integer("source.memory_period", 2));
    src.lhv.delay_slot_ticks = r.integer("source.delay_slot", 1);
    if (src.lhv.kind == LhvKind::kTable || src.lhv.kind == LhvKind::kDelayTable) {
      if (!r.has("source.table")) throw ConfigError("source.table", "strategy table file required");
      load_table(src.lhv, r.str("source.table"));
    }
  } else if (r.has("source.lhv")) {
    throw ConfigError("source.lhv", "only valid with source.kind = lhv");
  }

  const auto need = static_cast<std::size_t>(st.arity + 1);
  if (r.has("angles.preset")) {
    auto [a, b] = angle_preset(r.str("angles.preset"), src.kind);
    src.angles_a = a;
    src.angles_b = b;
  } else {
    src.angles_a.assign(need, 0.0);
    src.angles_b.assign(need, 0.0);
  }
  for (const auto* side : {"angles.a", "angles.b"}) {
    if (!r.has(side)) continue;
    const auto v = r.nums(side);
    if (v.size() != static_cast<std::size_t>(st.arity)) {
      throw ConfigError(side, "need " + std::to_string(st.arity) + " angles, got " + std::to_string(v.size()));
    }
    auto& dst = std::string(side) == "angles.a" ? src.angles_a : src.angles_b;
    dst.assign(1, 0.0);
    dst.insert(dst.end(), v.begin(), v.end());
  }
  if (src.angles_a.size() != need || src.angles_b.size() != need) {
    throw ConfigError("angles.preset", "preset arity does not match settings.arity");
  }

  // Channel.
  auto& ch = ex.channel;
  const double eta_a = r.num("channel.eta_a", 1.0);
  const double eta_b = r.num("channel.eta_b", 1.0);
  ch.eta_a = {eta_a, r.num("channel.eta_a_minus", eta_a)};
  ch.eta_b = {eta_b, r.num("channel.eta_b_minus", eta_b)};
  for (const auto* key : {"channel.eta_a", "channel.eta_b", "channel.eta_a_minus", "channel.eta_b_minus"}) {
    const double v = r.num(key, 1.0);
    if (!(v >= 0 && v <= 1)) throw ConfigError(key, "must lie in [0, 1]");
  }
  ch.dark_rate_hz = r.num("channel.dark_rate", 0.0);
  ch.jitter_sigma = r.num("channel.jitter_sigma", 0.0);

  // Timing.
  auto& tm = ex.timing;
  const auto mode = r.str("timing.mode", "slotted");
  if (mode == "slotted") {
    tm.mode = LogMode::kSlotted;
  } else if (mode == "continuous") {
    tm.mode = LogMode::kContinuous;
  } else {
    throw ConfigError("timing.mode", "expected slotted or continuous, got '" + mode + "'");
  }
  tm.trial_period = r.integer("timing.trial_period", tm.trial_period);
  tm.pair_rate_hz = r.num("timing.pair_rate", 0.0);
  tm.duration = r.integer("timing.duration", 0);
  tm.setting_bin = r.integer("timing.setting_bin", tm.setting_bin);

  // Coincidence.
  auto& cc = rc.coincidence;
  cc.policy = parse_policy(r.str("coincidence.policy", "slots"));
  cc.tau = r.integer("coincidence.tau", 0);
  cc.slot_len = r.integer("coincidence.slot_len", 0);
  cc.origin = r.integer("coincidence.origin", 0);
  cc.tolerance = r.integer("coincidence.tolerance", 0);
  if (cc.policy == PolicyKind::kWindow && cc.tau <= 0) {
    throw ConfigError("coincidence.tau", "window policy needs a positive width");
  }
  if (cc.policy == PolicyKind::kAsymmetric) {
    if (r.flag("coincidence.ch_compatible", false)) {
      if (cc.tau <= 0) throw ConfigError("coincidence.tau", "ch_compatible windows derive from a positive tau");
      cc.windows = AsymmetricWindows::ch_default(cc.tau);
      cc.windows.ch_compatible = true;
    }
    const char* names[2][2] = {{"coincidence.tau11", "coincidence.tau12"}, {"coincidence.tau21", "coincidence.tau22"}};
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        if (r.has(names[i][j])) cc.windows.tau[i][j] = r.integer(names[i][j], 0);
        if (cc.windows.tau[i][j] <= 0) throw ConfigError(names[i][j], "asymmetric windows must be positive");
      }
    }
    if (cc.windows.ch_compatible && !cc.windows.satisfies_nesting()) {
      throw ConfigError("coincidence.tau22", "ch_compatible windows must nest");
    }
  }
  if (cc.slot_len < 0) throw ConfigError("coincidence.slot_len", "must be nonnegative");
  if (cc.tolerance < 0) throw ConfigError("coincidence.tolerance", "must be nonnegative");

  // Analysis.
  auto& an = rc.analysis;
  if (r.has("analysis.inequalities")) {
    an.inequalities = split_list(r.str("analysis.inequalities"));
    for (const auto& name : an.inequalities) {
      if (std::find(known_inequalities().begin(), known_inequalities().end(), name) == known_inequalities().end()) {
        throw ConfigError("analysis.inequalities", "unknown inequality '" + name + "'");
      }
    }
  }
  an.nodetect = parse_nodetect(r.str("analysis.nodetect", "exclude"));
  an.chained_terms = static_cast<int>(r.integer("analysis.chained_terms", 6));
  if (an.chained_terms < 4 || an.chained_terms % 2) {
    throw ConfigError("analysis.chained_terms", "must be an even number of at least 4");
  }
  an.subtract_accidentals = r.flag("analysis.subtract_accidentals", false);
  an.accidental_tau = r.integer("analysis.accidental_tau", 0);
  an.subsamples = static_cast<int>(r.integer("analysis.subsamples", 0));
  if (an.subsamples < 0 || an.subsamples == 1) throw ConfigError("analysis.subsamples", "must be 0 or at least 2");

  std::ostringstream canon;
  for (const auto& [k, v] : text.values) canon << k << " = " << v << '\n';
  rc.canonical = canon.str();
  return rc;
}

RunConfig load_run_config(const std::string& path) { return build_run_config(read_config_file(path)); }

}  // namespace bellab
