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

#include "bellab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "bellab/adversary_search.hpp"
#include "bellab/error.hpp"
#include "bellab/inequalities.hpp"

namespace bellab {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string tag(const char* prefix, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s_%.4f.txt", prefix, v);
  return buf;
}

std::vector<double> grid(double lo, double hi, int points) {
  if (points < 2) throw ConfigError("oracle.points", "need at least two grid points");
  std::vector<double> g;
  for (int i = 0; i < points; ++i) g.push_back(lo + (hi - lo) * i / (points - 1));
  return g;
}

}  // namespace

OracleOutput oracle_efficiency_curve(int points, double eta_lo) {
  if (!(eta_lo > 0 && eta_lo < 1)) throw ConfigError("oracle.eta_lo", "must lie in (0, 1)");
  OracleOutput out;
  std::ostringstream csv;
  csv << "eta,lp_value,closed_form,signs,witness\n";
  for (double eta : grid(eta_lo, 1.0, points)) {
    const auto res = max_conditional_chsh(eta, eta);
    const auto name = tag("efficiency", eta);
    csv << fmt(eta) << ',' << fmt(res.value) << ',' << fmt(bound_efficiency(eta)) << ',' << res.signs[0] << ' '
        << res.signs[1] << ',' << name << '\n';
    std::ostringstream w;
    write_det_witness(res.witness, w);
    out.witnesses.emplace_back(name, w.str());
  }
  out.csv = csv.str();
  return out;
}

OracleOutput oracle_coincidence_curve(int d, int w, int points, double gamma_lo) {
  if (!(gamma_lo > 0 && gamma_lo < 1)) throw ConfigError("oracle.gamma_lo", "must lie in (0, 1)");
  auto g = grid(gamma_lo, 1.0, points);
  g.push_back(0.8787);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end(), [](double x, double y) { return std::abs(x - y) < 1e-12; }), g.end());
  OracleOutput out;
  std::ostringstream csv;
  csv << "gamma,lp_value,envelope,witness_gamma,witness\n";
  for (double gamma : g) {
    const auto res = max_windowed_chsh(gamma, d, w);
    const auto name = tag("coincidence", gamma);
    csv << fmt(gamma) << ',' << fmt(res.value) << ',' << fmt(bound_coincidence(gamma)) << ',' << fmt(res.gamma)
        << ',' << name << '\n';
    std::ostringstream wt;
    write_delay_witness(res.witness, wt);
    out.witnesses.emplace_back(name, wt.str());
  }
  out.csv = csv.str();
  return out;
}

OracleOutput oracle_eberhard(int points, const MultiStartOptions& opt) {
  OracleOutput out;
  std::ostringstream csv;
  csv << "eta,ch_optimal,r_optimal,ch_maximal,ch_eta_a_one\n";
  for (double eta : grid(0.5, 1.0, points)) {
    const auto best = optimize_eberhard(eta, eta, StateRestriction::kOptimal, opt);
    const auto maximal = optimize_eberhard(eta, eta, StateRestriction::kMaximal, opt);
    const auto asym = optimize_eberhard(1.0, eta, StateRestriction::kOptimal, opt);
    csv << fmt(eta) << ',' << fmt(best.value) << ',' << fmt(best.r) << ',' << fmt(maximal.value) << ','
        << fmt(asym.value) << '\n';
  }
  std::ostringstream table;
  table << "state,sweep,bisection,ratio\n";
  const auto row = [&](const char* state, const char* sweep, StateRestriction r, EtaSweep s) {
    const auto c = critical_eta(r, s, opt);
    table << state << ',' << sweep << ',' << fmt(c.bisection) << ',' << fmt(c.ratio) << '\n';
  };
  row("optimal", "symmetric", StateRestriction::kOptimal, EtaSweep::kSymmetric);
  row("maximal", "symmetric", StateRestriction::kMaximal, EtaSweep::kSymmetric);
  row("optimal", "eta_a_one", StateRestriction::kOptimal, EtaSweep::kAFixedOne);
  out.csv = csv.str();
  out.witnesses.emplace_back("thresholds.csv", table.str());
  return out;
}

}  // namespace bellab
