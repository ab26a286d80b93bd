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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bellab {

/// Integer time in ticks. One tick is `LogHeader::tick_ns` nanoseconds (1 by default).
using Ticks = std::int64_t;

/// Analyzer setting index. Valid settings are 1..m; kRemoved marks an absent analyzer.
using Setting = int;
inline constexpr Setting kRemoved = 0;

enum class Site : std::uint8_t { kA, kB };
enum class Channel : std::int8_t { kMinus = -1, kPlus = +1 };
enum class Outcome : std::int8_t { kMinus = -1, kNoDetect = 0, kPlus = +1 };
enum class LogMode : std::uint8_t { kContinuous, kSlotted };

inline Outcome to_outcome(Channel c) {
  return c == Channel::kPlus ? Outcome::kPlus : Outcome::kMinus;
}
inline int sign_of(Channel c) { return static_cast<int>(c); }
const char* site_name(Site s);

struct DetectionEvent {
  Site site = Site::kA;
  std::optional<std::int64_t> trial;  // absent in continuous mode
  Ticks time = 0;
  Setting setting = 1;
  Channel channel = Channel::kPlus;

  bool operator==(const DetectionEvent&) const = default;
};

/// One joint trial. NODETECT outcomes carry no time.
struct TrialRecord {
  std::optional<std::int64_t> trial;
  Setting setting_a = 1;
  Setting setting_b = 1;
  Outcome outcome_a = Outcome::kNoDetect;
  Outcome outcome_b = Outcome::kNoDetect;
  std::optional<Ticks> time_a;
  std::optional<Ticks> time_b;

  bool operator==(const TrialRecord&) const = default;
};

struct LogHeader {
  LogMode mode = LogMode::kSlotted;
  int arity = 2;
  std::int64_t tick_ns = 1;
  std::uint64_t seed = 0;
  std::string source;
  /// Additional `#key=value` metadata (settings descriptor, trial period, flags, ...).
  std::map<std::string, std::string> extra;

  bool operator==(const LogHeader&) const = default;
};

struct EventLog {
  LogHeader header;
  std::vector<DetectionEvent> events;

  bool operator==(const EventLog&) const = default;
};

/// Throws ValidationError naming the first event that breaks an invariant:
/// negative time, setting outside 1..arity (or REMOVED), per-site time order,
/// trial id presence matching the mode, and one event per (site, trial) when slotted.
void validate(const EventLog& log);

/// Writes `#key=value` header lines, the column line and one row per event.
/// Throws IoError carrying the number of bytes written before the sink failed.
void encode_log(const EventLog& log, std::ostream& out);
std::string encode_log(const EventLog& log);

/// Parses and validates. Throws ParseError (with line number) or ValidationError.
EventLog decode_log(std::istream& in);
EventLog decode_log_string(const std::string& text);

EventLog read_log_file(const std::string& path);
void write_log_file(const EventLog& log, const std::string& path);

/// Events of one site, in log order.
std::vector<DetectionEvent> site_events(const EventLog& log, Site site);

/// Header lookup helpers for `extra`.
std::optional<std::string> header_value(const LogHeader& h, const std::string& key);
std::optional<std::int64_t> header_int(const LogHeader& h, const std::string& key);

}  // namespace bellab
