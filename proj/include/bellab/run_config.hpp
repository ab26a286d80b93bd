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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bellab/coincidence.hpp"
#include "bellab/inequalities.hpp"
#include "bellab/pair_source.hpp"

namespace bellab {

/// Ordered `section.key = value` pairs; `#` starts a comment.
struct ConfigText {
  std::map<std::string, std::string> values;
  std::map<std::string, std::size_t> lines;
};

ConfigText parse_config_text(const std::string& text);
ConfigText read_config_file(const std::string& path);

struct CoincidenceConfig {
  PolicyKind policy = PolicyKind::kSlots;
  Ticks tau = 0;        // WINDOW full width
  Ticks slot_len = 0;   // SLOTS; 0 takes the trial period from the log
  Ticks origin = 0;     // SLOTS / HERALDED
  Ticks tolerance = 0;  // HERALDED; 0 means half the trial period
  AsymmetricWindows windows;
};

struct AnalysisConfig {
  std::vector<std::string> inequalities{"chsh"};
  NodetectMode nodetect = NodetectMode::kExclude;
  int chained_terms = 6;
  bool subtract_accidentals = false;
  Ticks accidental_tau = 0;  // 0 uses the coincidence window
  /// Subsamples for the coarse-grained t test; 0 disables it.
  int subsamples = 0;
};

struct RunConfig {
  ExperimentConfig experiment;
  CoincidenceConfig coincidence;
  AnalysisConfig analysis;
  std::string log_path;     // run.out
  std::string report_path;  // run.report
  bool seed_given = false;
  /// Normalized config text, one `key = value` per line, sorted; hashed into the manifest.
  std::string canonical;
};

/// Throws ConfigError naming the offending field.
RunConfig build_run_config(const ConfigText& text);
RunConfig load_run_config(const std::string& path);

/// Analyzer angles for a named preset, index 0 unused. Two-qubit sources get polarizer angles.
std::pair<std::vector<double>, std::vector<double>> angle_preset(const std::string& name, SourceKind source);

std::uint64_t fnv1a64(const std::string& data);

}  // namespace bellab
