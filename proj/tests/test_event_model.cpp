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

#include <sstream>

#include "bellab/error.hpp"
#include "bellab/event_model.hpp"
#include "bellab/rng.hpp"

using namespace bellab;

namespace {

EventLog random_log(std::uint64_t seed, std::size_t n, LogMode mode) {
  EventLog log;
  log.header.mode = mode;
  log.header.arity = 3;
  log.header.seed = seed;
  log.header.source = "test";
  log.header.extra["note"] = "x=y";
  CounterRng rng(seed, Stream::kSource, 0);
  Ticks t = 0;
  std::int64_t trial = 0;
  for (std::size_t i = 0; i < n; ++i) {
    DetectionEvent e;
    e.site = rng.bernoulli(0.5) ? Site::kA : Site::kB;
    t += static_cast<Ticks>(rng.below(50));
    e.time = t;
    e.setting = static_cast<Setting>(rng.below(4));  // 0 is REMOVED
    e.channel = rng.bernoulli(0.5) ? Channel::kPlus : Channel::kMinus;
    if (mode == LogMode::kSlotted) e.trial = trial++;
    log.events.push_back(e);
  }
  return log;
}

}  // namespace

TEST(EventModel, EncodesSingleRow) {
  EventLog log;
  log.events.push_back({Site::kA, 0, 100, 1, Channel::kPlus});
  const auto text = encode_log(log);
  EXPECT_NE(text.find("\nA,0,100,1,+1\n"), std::string::npos);
}

TEST(EventModel, EmptyLogIsHeaderOnly) {
  EventLog log;
  const auto text = encode_log(log);
  EXPECT_EQ(text.back(), '\n');
  EXPECT_TRUE(text.ends_with("site,trial,time_ns,setting,channel\n"));
  EXPECT_EQ(decode_log_string(text), log);
}

TEST(EventModel, RemovedSettingEncodesAsInf) {
  EventLog log;
  log.events.push_back({Site::kB, 3, 7, kRemoved, Channel::kMinus});
  const auto text = encode_log(log);
  EXPECT_NE(text.find("B,3,7,inf,-1"), std::string::npos);
  EXPECT_EQ(decode_log_string(text).events.at(0).setting, kRemoved);
}

TEST(EventModel, RoundTripIsIdentityOnRandomLogs) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    for (auto mode : {LogMode::kSlotted, LogMode::kContinuous}) {
      const auto log = random_log(seed, 10000, mode);
      const auto text = encode_log(log);
      const auto back = decode_log_string(text);
      EXPECT_EQ(back, log);
      EXPECT_EQ(encode_log(back), text);
    }
  }
}

TEST(EventModel, MalformedRowReportsLine) {
  const std::string text = "#mode=slotted\n#arity=2\nsite,trial,time_ns,setting,channel\nA,0,1,1,+1\nA,1,2,1\n";
  try {
    decode_log_string(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 5u);
  }
}

TEST(EventModel, SettingOutsideArityRejected) {
  const std::string text = "#mode=slotted\n#arity=2\nsite,trial,time_ns,setting,channel\nA,0,1,5,+1\n";
  EXPECT_THROW(decode_log_string(text), ValidationError);
}

TEST(EventModel, DecreasingTimesNameFirstViolation) {
  const std::string text =
      "#mode=continuous\n#arity=2\nsite,trial,time_ns,setting,channel\nA,,10,1,+1\nB,,5,1,+1\nA,,4,1,+1\n";
  try {
    decode_log_string(text);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.index(), 2u);
  }
}

TEST(EventModel, ValidationRejectsOnlyListedViolations) {
  EventLog log = random_log(9, 200, LogMode::kSlotted);
  EXPECT_NO_THROW(validate(log));
  auto dup = log;
  dup.events[5].trial = dup.events[3].trial;
  dup.events[5].site = dup.events[3].site;
  EXPECT_THROW(validate(dup), ValidationError);
  auto neg = log;
  neg.events[0].time = -1;
  EXPECT_THROW(validate(neg), ValidationError);
  auto cont = random_log(9, 200, LogMode::kContinuous);
  cont.events[1].trial = 4;
  EXPECT_THROW(validate(cont), ValidationError);
}

TEST(EventModel, SinkFailureReportsPosition) {
  std::ostringstream out;
  out.setstate(std::ios::badbit);
  try {
    encode_log(random_log(1, 10, LogMode::kSlotted), out);
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_EQ(e.position(), 0u);
  }
}
