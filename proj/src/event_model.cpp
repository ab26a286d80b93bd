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

#include "bellab/event_model.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

#include "bellab/error.hpp"

namespace bellab {

namespace {

constexpr const char* kColumns = "site,trial,time_ns,setting,channel";

const char* mode_name(LogMode m) { return m == LogMode::kSlotted ? "slotted" : "continuous"; }

template <typename T>
bool parse_number(const std::string& s, T& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

void write_row(std::string& buf, const DetectionEvent& e) {
  buf += site_name(e.site);
  buf += ',';
  if (e.trial) buf += std::to_string(*e.trial);
  buf += ',';
  buf += std::to_string(e.time);
  buf += ',';
  buf += e.setting == kRemoved ? std::string("inf") : std::to_string(e.setting);
  buf += ',';
  buf += e.channel == Channel::kPlus ? "+1" : "-1";
  buf += '\n';
}

}  // namespace

const char* site_name(Site s) { return s == Site::kA ? "A" : "B"; }

void validate(const EventLog& log) {
  const auto& h = log.header;
  if (h.arity < 1) throw ValidationError(0, "arity must be at least 1");
  if (h.tick_ns < 1) throw ValidationError(0, "tick_ns must be positive");
  Ticks last[2] = {0, 0};
  bool seen[2] = {false, false};
  std::set<std::int64_t> trials[2];
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    const auto& e = log.events[i];
    const int s = static_cast<int>(e.site);
    if (e.time < 0) throw ValidationError(i, "negative time");
    if (e.setting != kRemoved && (e.setting < 1 || e.setting > h.arity)) {
      throw ValidationError(i, "setting " + std::to_string(e.setting) + " outside arity " +
                                   std::to_string(h.arity));
    }
    if (seen[s] && e.time < last[s]) {
      throw ValidationError(i, std::string("time decreases within site ") + site_name(e.site));
    }
    seen[s] = true;
    last[s] = e.time;
    if (h.mode == LogMode::kSlotted) {
      if (!e.trial) throw ValidationError(i, "slotted log event without trial id");
      if (*e.trial < 0) throw ValidationError(i, "negative trial id");
      if (!trials[s].insert(*e.trial).second) {
        throw ValidationError(i, "second event for trial " + std::to_string(*e.trial) +
                                     " at site " + site_name(e.site));
      }
    } else if (e.trial) {
      throw ValidationError(i, "continuous log event carries a trial id");
    }
  }
}

void encode_log(const EventLog& log, std::ostream& out) {
  std::string buf;
  buf.reserve(64 + log.events.size() * 20);
  const auto& h = log.header;
  buf += "#mode=";
  buf += mode_name(h.mode);
  buf += "\n#arity=" + std::to_string(h.arity);
  buf += "\n#tick_ns=" + std::to_string(h.tick_ns);
  buf += "\n#seed=" + std::to_string(h.seed);
  buf += "\n#source=" + h.source + "\n";
  for (const auto& [k, v] : h.extra) buf += "#" + k + "=" + v + "\n";
  buf += kColumns;
  buf += '\n';
  std::size_t written = 0;
  constexpr std::size_t kChunk = 1 << 20;
  auto flush = [&] {
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("event log sink failed", written);
    written += buf.size();
    buf.clear();
  };
  for (const auto& e : log.events) {
    write_row(buf, e);
    if (buf.size() > kChunk) flush();
  }
  flush();
  out.flush();
  if (!out) throw IoError("event log sink failed on flush", written);
}

std::string encode_log(const EventLog& log) {
  std::ostringstream os;
  encode_log(log, os);
  return os.str();
}

EventLog decode_log(std::istream& in) {
  EventLog log;
  std::string line;
  std::size_t lineno = 0;
  bool columns_seen = false;
  bool have_mode = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!columns_seen) {
      if (line.empty()) continue;
      if (line[0] == '#') {
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(lineno, "header line without '='");
        const std::string key = line.substr(1, eq - 1);
        const std::string value = line.substr(eq + 1);
        auto& h = log.header;
        if (key == "mode") {
          if (value == "slotted") {
            h.mode = LogMode::kSlotted;
          } else if (value == "continuous") {
            h.mode = LogMode::kContinuous;
          } else {
            throw ParseError(lineno, "unknown mode '" + value + "'");
          }
          have_mode = true;
        } else if (key == "arity") {
          if (!parse_number(value, h.arity)) throw ParseError(lineno, "bad arity");
        } else if (key == "tick_ns") {
          if (!parse_number(value, h.tick_ns)) throw ParseError(lineno, "bad tick_ns");
        } else if (key == "seed") {
          if (!parse_number(value, h.seed)) throw ParseError(lineno, "bad seed");
        } else if (key == "source") {
          h.source = value;
        } else {
          h.extra[key] = value;
        }
        continue;
      }
      if (line != kColumns) throw ParseError(lineno, "expected column line '" + std::string(kColumns) + "'");
      if (!have_mode) throw ParseError(lineno, "header lacks #mode");
      columns_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 5) throw ParseError(lineno, "expected 5 fields, got " + std::to_string(f.size()));
    DetectionEvent e;
    if (f[0] == "A") {
      e.site = Site::kA;
    } else if (f[0] == "B") {
      e.site = Site::kB;
    } else {
      throw ParseError(lineno, "bad site '" + f[0] + "'");
    }
    if (!f[1].empty()) {
      std::int64_t t = 0;
      if (!parse_number(f[1], t)) throw ParseError(lineno, "bad trial id '" + f[1] + "'");
      e.trial = t;
    }
    if (!parse_number(f[2], e.time)) throw ParseError(lineno, "bad time '" + f[2] + "'");
    if (f[3] == "inf") {
      e.setting = kRemoved;
    } else if (!parse_number(f[3], e.setting) || e.setting == kRemoved) {
      throw ParseError(lineno, "bad setting '" + f[3] + "'");
    }
    if (f[4] == "+1") {
      e.channel = Channel::kPlus;
    } else if (f[4] == "-1") {
      e.channel = Channel::kMinus;
    } else {
      throw ParseError(lineno, "bad channel '" + f[4] + "'");
    }
    log.events.push_back(e);
  }
  if (!columns_seen) throw ParseError(lineno, "missing column line");
  validate(log);
  return log;
}

EventLog decode_log_string(const std::string& text) {
  std::istringstream is(text);
  return decode_log(is);
}

EventLog read_log_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return decode_log(in);
}

void write_log_file(const EventLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  encode_log(log, out);
}

std::vector<DetectionEvent> site_events(const EventLog& log, Site site) {
  std::vector<DetectionEvent> out;
  for (const auto& e : log.events) {
    if (e.site == site) out.push_back(e);
  }
  return out;
}

std::optional<std::string> header_value(const LogHeader& h, const std::string& key) {
  auto it = h.extra.find(key);
  if (it == h.extra.end()) return std::nullopt;
  return it->second;
}

std::optional<std::int64_t> header_int(const LogHeader& h, const std::string& key) {
  auto v = header_value(h, key);
  if (!v) return std::nullopt;
  std::int64_t out = 0;
  if (!parse_number(*v, out)) return std::nullopt;
  return out;
}

}  // namespace bellab
