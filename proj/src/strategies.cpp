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

#include "bellab/strategies.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "bellab/error.hpp"

namespace bellab {

template <typename S>
void validate(const Mixture<S>& m) {
  if (m.weights.size() != m.strategies.size()) throw ValidationError(0, "mixture size mismatch");
  if (m.weights.empty()) throw ValidationError(0, "empty mixture");
  double total = 0.0;
  for (std::size_t i = 0; i < m.weights.size(); ++i) {
    if (!(m.weights[i] >= 0.0)) throw ValidationError(i, "negative mixture weight");
    total += m.weights[i];
  }
  if (std::abs(total - 1.0) > 1e-9) throw ValidationError(0, "mixture weights do not sum to 1");
}

template void validate(const Mixture<DetStrategy>&);
template void validate(const Mixture<DelayStrategy>&);

std::vector<LocalDetStrategy> enumerate_local_det() {
  // Per setting: 0 -> +1 detected, 1 -> -1 detected, 2 -> undetected.
  std::vector<LocalDetStrategy> out;
  for (int c1 = 0; c1 < 3; ++c1) {
    for (int c2 = 0; c2 < 3; ++c2) {
      LocalDetStrategy s;
      const int code[2] = {c1, c2};
      for (int k = 0; k < 2; ++k) {
        s.detect[k] = code[k] != 2;
        s.outcome[k] = code[k] == 1 ? -1 : 1;
      }
      out.push_back(s);
    }
  }
  return out;
}

std::vector<DetStrategy> enumerate_det() {
  const auto local = enumerate_local_det();
  std::vector<DetStrategy> out;
  for (const auto& a : local) {
    for (const auto& b : local) out.push_back({a, b});
  }
  return out;
}

std::vector<LocalDelayStrategy> enumerate_local_delay(int slots) {
  std::vector<LocalDelayStrategy> out;
  for (int o1 = 0; o1 < 2; ++o1) {
    for (int s1 = 0; s1 < slots; ++s1) {
      for (int o2 = 0; o2 < 2; ++o2) {
        for (int s2 = 0; s2 < slots; ++s2) {
          LocalDelayStrategy s;
          s.outcome = {static_cast<std::int8_t>(o1 ? -1 : 1), static_cast<std::int8_t>(o2 ? -1 : 1)};
          s.slot = {s1, s2};
          out.push_back(s);
        }
      }
    }
  }
  return out;
}

namespace {

std::string fmt_weight(double w) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", w);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) f.push_back(item);
  return f;
}

struct WitnessText {
  std::string kind;
  int slots = 0;
  int window = 0;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;
};

WitnessText read_text(std::istream& in) {
  WitnessText t;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ParseError(n, "header line without '='");
      const auto key = line.substr(1, eq - 1);
      const auto value = line.substr(eq + 1);
      if (key == "kind") t.kind = value;
      if (key == "slots") t.slots = std::stoi(value);
      if (key == "window") t.window = std::stoi(value);
      continue;
    }
    if (line.rfind("weight", 0) == 0) continue;
    t.rows.push_back(split_csv(line));
    t.lines.push_back(n);
  }
  return t;
}

std::int8_t parse_sign(const std::string& s, std::size_t line) {
  if (s == "+1" || s == "1") return 1;
  if (s == "-1") return -1;
  throw ParseError(line, "bad outcome '" + s + "'");
}

}  // namespace

void write_det_witness(const Mixture<DetStrategy>& m, std::ostream& out) {
  out << "#kind=det\n";
  out << "weight,a1_out,a1_det,a2_out,a2_det,b1_out,b1_det,b2_out,b2_det\n";
  auto side = [&](const LocalDetStrategy& s) {
    for (int k = 0; k < 2; ++k) {
      out << ',' << (s.outcome[k] > 0 ? "+1" : "-1") << ',' << (s.detect[k] ? 1 : 0);
    }
  };
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << fmt_weight(m.weights[i]);
    side(m.strategies[i].a);
    side(m.strategies[i].b);
    out << '\n';
  }
}

void write_delay_witness(const DelayWitness& w, std::ostream& out) {
  out << "#kind=delay\n#slots=" << w.slots << "\n#window=" << w.window << '\n';
  out << "weight,a1_out,a1_slot,a2_out,a2_slot,b1_out,b1_slot,b2_out,b2_slot\n";
  auto side = [&](const LocalDelayStrategy& s) {
    for (int k = 0; k < 2; ++k) out << ',' << (s.outcome[k] > 0 ? "+1" : "-1") << ',' << s.slot[k];
  };
  for (std::size_t i = 0; i < w.mixture.size(); ++i) {
    out << fmt_weight(w.mixture.weights[i]);
    side(w.mixture.strategies[i].a);
    side(w.mixture.strategies[i].b);
    out << '\n';
  }
}

Mixture<DetStrategy> read_det_witness(std::istream& in) {
  const auto t = read_text(in);
  if (t.kind != "det") throw ParseError(1, "witness kind is not 'det'");
  Mixture<DetStrategy> m;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& f = t.rows[r];
    if (f.size() != 9) throw ParseError(t.lines[r], "expected 9 fields");
    DetStrategy s;
    LocalDetStrategy* sides[2] = {&s.a, &s.b};
    for (int side = 0; side < 2; ++side) {
      for (int k = 0; k < 2; ++k) {
        sides[side]->outcome[k] = parse_sign(f[1 + side * 4 + k * 2], t.lines[r]);
        sides[side]->detect[k] = f[2 + side * 4 + k * 2] == "1";
      }
    }
    m.weights.push_back(std::stod(f[0]));
    m.strategies.push_back(s);
  }
  validate(m);
  return m;
}

DelayWitness read_delay_witness(std::istream& in) {
  const auto t = read_text(in);
  if (t.kind != "delay") throw ParseError(1, "witness kind is not 'delay'");
  DelayWitness w;
  w.slots = t.slots;
  w.window = t.window;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& f = t.rows[r];
    if (f.size() != 9) throw ParseError(t.lines[r], "expected 9 fields");
    DelayStrategy s;
    LocalDelayStrategy* sides[2] = {&s.a, &s.b};
    for (int side = 0; side < 2; ++side) {
      for (int k = 0; k < 2; ++k) {
        sides[side]->outcome[k] = parse_sign(f[1 + side * 4 + k * 2], t.lines[r]);
        sides[side]->slot[k] = std::stoi(f[2 + side * 4 + k * 2]);
      }
    }
    w.mixture.weights.push_back(std::stod(f[0]));
    w.mixture.strategies.push_back(s);
  }
  validate(w.mixture);
  return w;
}

}  // namespace bellab
