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

#include "bellab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "bellab/channel_model.hpp"
#include "bellab/error.hpp"
#include "bellab/setting_source.hpp"

namespace bellab {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "UNAVAILABLE";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string base_source(const std::string& s) { return s.substr(0, s.find(':')); }

void copy_meta(const LogHeader& h, CorrelationTable& t) {
  for (const auto& [k, v] : h.extra) t.meta[k] = v;
  t.meta["source"] = base_source(h.source);
  if (const auto colon = h.source.find(':'); colon != std::string::npos) t.meta["lhv"] = h.source.substr(colon + 1);
}

Ticks accidental_window(const CoincidenceConfig& cc, const AnalysisConfig& an) {
  if (an.accidental_tau > 0) return an.accidental_tau;
  if (cc.policy == PolicyKind::kWindow) return cc.tau;
  if (cc.policy == PolicyKind::kAsymmetric) {
    Ticks w = 0;
    for (const auto& row : cc.windows.tau) {
      for (Ticks t : row) w = std::max(w, t);
    }
    return w;
  }
  return 0;
}

void evaluate(AnalysisReport& r, const std::string& name, const AnalysisConfig& an) {
  const auto& t = r.table;
  try {
    if (name == "chsh") {
      r.results.push_back(eval_chsh(t, an.nodetect));
    } else if (name == "bell") {
      r.results.push_back(eval_bell_original(t));
    } else if (name == "ch") {
      r.results.push_back(eval_ch(t, t.trials_defined ? ChVariant::kProbabilities : ChVariant::kCounts));
    } else if (name == "rate_chsh") {
      r.results.push_back(eval_rate_chsh(t));
    } else if (name == "no_enhancement") {
      auto ne = eval_no_enhancement(t);
      r.results.push_back(std::move(ne.ch_form));
      r.results.push_back(std::move(ne.chsh_form));
      r.results.push_back(std::move(ne.conditional_form));
    } else if (name == "chained") {
      r.results.push_back(eval_chained(t, an.chained_terms, an.nodetect));
    } else if (name == "ch_coincidence") {
      r.results.push_back(eval_ch_coincidence(t));
    } else {
      r.skipped.push_back({name, "unknown inequality"});
    }
  } catch (const MissingDataError& e) {
    r.skipped.push_back({name, e.what()});
  } catch (const DomainError& e) {
    r.skipped.push_back({name, e.what()});
  }
}

void coarse_grain(AnalysisReport& r, const MatchResult& m, int k) {
  std::vector<double> betas;
  const std::size_t n = m.pairs.size();
  for (int i = 0; i < k; ++i) {
    MatchResult part;
    part.policy = m.policy;
    const std::size_t lo = n * static_cast<std::size_t>(i) / static_cast<std::size_t>(k);
    const std::size_t hi = n * static_cast<std::size_t>(i + 1) / static_cast<std::size_t>(k);
    part.pairs.assign(m.pairs.begin() + static_cast<std::ptrdiff_t>(lo), m.pairs.begin() + static_cast<std::ptrdiff_t>(hi));
    try {
      betas.push_back(beta_star(build_table(part, r.table.arity)).beta);
    } catch (const DomainError& e) {
      r.warnings.push_back("coarse graining: subsample " + std::to_string(i) + " skipped: " + e.what());
    }
  }
  try {
    r.coarse = coarse_grained_t(betas);
  } catch (const DomainError& e) {
    r.warnings.push_back(std::string("coarse graining skipped: ") + e.what());
  }
}

std::string flag_value(bool b) { return b ? "1" : "0"; }

}  // namespace

MatchResult match_log(const EventLog& log, const CoincidenceConfig& cc, const SettingSchedule* schedule) {
  const auto a = site_events(log, Site::kA);
  const auto b = site_events(log, Site::kB);
  const auto period = header_int(log.header, "trial_period");
  switch (cc.policy) {
    case PolicyKind::kWindow:
      return match_window(a, b, cc.tau);
    case PolicyKind::kAsymmetric:
      return match_asymmetric(a, b, cc.windows);
    case PolicyKind::kSlots: {
      Ticks len = cc.slot_len;
      if (len == 0 && period) len = *period;
      if (len == 0 && schedule) len = schedule->bin_length;
      if (len <= 0) throw ConfigError("coincidence.slot_len", "log has no trial period; set a slot length");
      return match_slots(a, b, len, cc.origin, schedule);
    }
    case PolicyKind::kHeralded: {
      const auto trials = header_int(log.header, "trials");
      if (!period || !trials) throw MissingDataError("heralded matching needs a slotted log with trial metadata");
      std::vector<Ticks> heralds(static_cast<std::size_t>(*trials));
      for (std::int64_t k = 0; k < *trials; ++k) heralds[static_cast<std::size_t>(k)] = cc.origin + k * *period;
      const Ticks tol = cc.tolerance > 0 ? cc.tolerance : *period / 2;
      return match_heralded(a, b, heralds, tol, schedule);
    }
  }
  throw Error("unhandled coincidence policy");
}

AnalysisReport analyze_log(const EventLog& log, const CoincidenceConfig& cc, const AnalysisConfig& an) {
  AnalysisReport r;
  r.header = log.header;
  r.policy = cc.policy;
  const int arity = log.header.arity;
  const auto schedule = schedule_from_header(log.header);
  const SettingSchedule* sp = schedule ? &*schedule : nullptr;
  if (!sp) r.warnings.push_back("log carries no setting schedule: singles lack remote context, gamma UNAVAILABLE");

  const MatchResult m = match_log(log, cc, sp);
  std::optional<TrialCounts> counted;
  if (!m.trials && sp && log.header.mode == LogMode::kSlotted) counted = count_trials(*sp);
  const TrialCounts* tc = counted ? &*counted : nullptr;

  r.table = build_table(m, arity, sp, tc);
  copy_meta(log.header, r.table);
  r.coincidence = coincidence_stats(m, arity, sp, tc);

  if (an.subtract_accidentals) {
    const Ticks tau = accidental_window(cc, an);
    if (tau <= 0) {
      r.warnings.push_back("accidental subtraction needs a coincidence window; not applied");
    } else {
      r.raw_table = r.table;
      r.table = subtract_accidentals(r.table, estimate_accidentals(log, tau));
    }
  }

  for (const auto& name : an.inequalities) evaluate(r, name, an);

  if (arity >= 2) {
    try {
      r.test = make_test_report(r.table);
    } catch (const DomainError& e) {
      r.test_skip_reason = e.what();
    }
  } else {
    r.test_skip_reason = "CHSH estimate needs two settings per side";
  }
  if (an.subsamples >= 2) coarse_grain(r, m, an.subsamples);
  return r;
}

std::string format_report_kv(const AnalysisReport& r) {
  std::ostringstream o;
  const auto& t = r.table;
  o << "report.format=bellab-report-1\n";
  o << "log.source=" << r.header.source << '\n';
  o << "log.mode=" << (r.header.mode == LogMode::kSlotted ? "slotted" : "continuous") << '\n';
  o << "log.seed=" << r.header.seed << '\n';
  o << "table.arity=" << t.arity << '\n';
  o << "table.policy=" << policy_name(r.policy) << '\n';
  o << "table.ch_compatible=" << flag_value(t.ch_compatible) << '\n';
  o << "table.trials_defined=" << flag_value(t.trials_defined) << '\n';
  o << "flag.accidentals_subtracted=" << flag_value(t.accidentals_subtracted) << '\n';
  o << "flag.settings_predictable=" << flag_value(t.meta.count("settings_predictable") != 0) << '\n';
  o << "flag.memory_fallback=" << flag_value(t.meta.count("memory_fallback") != 0) << '\n';

  o << "coincidence.gamma.estimator=min over setting pairs of coincidences/trials\n";
  o << "coincidence.gamma=" << num(r.coincidence.gamma) << '\n';
  o << "coincidence.eta.estimator=min over setting pairs and sides of coincidences/singles\n";
  o << "coincidence.eta=" << num(r.coincidence.eta) << '\n';
  for (const auto& n : r.coincidence.notes) o << "coincidence.note=" << n << '\n';

  o << "cell.estimator=conditional correlation (N++ + N-- - N+- - N-+)/coincidences\n";
  for (Setting a = 1; a <= t.arity; ++a) {
    for (Setting b = 1; b <= t.arity; ++b) {
      const auto& c = t.at(a, b);
      const std::string p = "cell." + std::to_string(a) + "." + std::to_string(b) + ".";
      o << p << "coincidences=" << num(c.coincidences()) << '\n';
      o << p << "trials=" << num(c.trials) << '\n';
      o << p << "E=" << num(c.coincidences() > 0 ? c.correlation() : kUnavailable) << '\n';
    }
  }
  if (r.raw_table) {
    for (Setting a = 1; a <= t.arity; ++a) {
      for (Setting b = 1; b <= t.arity; ++b) {
        const auto& c = r.raw_table->at(a, b);
        const std::string p = "raw.cell." + std::to_string(a) + "." + std::to_string(b) + ".";
        o << p << "coincidences=" << num(c.coincidences()) << '\n';
        o << p << "E=" << num(c.coincidences() > 0 ? c.correlation() : kUnavailable) << '\n';
      }
    }
  }

  for (const auto& res : r.results) {
    const std::string p = "result." + res.name + ".";
    o << p << "estimator=" << res.estimator << '\n';
    o << p << "value=" << num(res.value) << '\n';
    o << p << "bound=" << num(res.bound.value) << '\n';
    o << p << "bound.name=" << res.bound.name << '\n';
    o << p << "bound.assumption=" << res.bound.assumption << '\n';
    o << p << "bound.established=" << flag_value(res.bound.established) << '\n';
    if (std::isfinite(res.lower_bound)) o << p << "lower_bound=" << num(res.lower_bound) << '\n';
    o << p << "violated=" << flag_value(res.violated) << '\n';
    o << p << "margin=" << num(res.margin) << '\n';
    for (const auto& alt : res.alternates) {
      o << p << "alt." << alt.name << '=' << num(alt.value) << '\n';
      o << p << "alt." << alt.name << ".assumption=" << alt.assumption << '\n';
      o << p << "alt." << alt.name << ".violated=" << flag_value(alt.established && res.value > alt.value) << '\n';
    }
    for (const auto& [k, v] : res.quantities) o << p << "q." << k << '=' << num(v) << '\n';
    if (res.violated && res.bound.assumption != "none") {
      o << p << "note=WARNING violation holds only under the assumption: " << res.bound.assumption << '\n';
    }
    for (const auto& n : res.notes) o << p << "note=" << n << '\n';
  }
  for (const auto& s : r.skipped) o << "skip." << s.name << '=' << s.reason << '\n';

  if (r.test) {
    const auto& e = r.test->estimate;
    o << "stats.estimator=beta* from conditional correlations, s^2 = sum (1-E^2)/N\n";
    o << "stats.beta=" << num(e.beta) << '\n';
    o << "stats.s=" << num(e.s) << '\n';
    o << "stats.k.estimator=(beta* - 2)/s\n";
    o << "stats.k=" << num(r.test->k) << '\n';
    o << "stats.p_normal.estimator=normal tail 1-Phi(k) and closed-form bound\n";
    o << "stats.p_normal=" << num(r.test->p_normal.tail) << '\n';
    o << "stats.p_normal.bound=" << num(r.test->p_normal.bound) << '\n';
    o << "stats.p_hoeffding.estimator=Hoeffding bound with min N over cells\n";
    o << "stats.p_hoeffding=" << num(r.test->p_hoeffding) << '\n';
    for (const auto& f : r.test->flags) o << "stats.flag=" << f << '\n';
  } else {
    o << "skip.stats=" << r.test_skip_reason << '\n';
  }
  if (r.coarse) {
    o << "coarse.estimator=Student t over subsample beta values\n";
    o << "coarse.beta=" << num(r.coarse->beta) << '\n';
    o << "coarse.t=" << num(r.coarse->t) << '\n';
    o << "coarse.dof=" << r.coarse->dof << '\n';
    o << "coarse.p=" << num(r.coarse->p) << '\n';
  }
  for (const auto& w : r.warnings) o << "warning=" << w << '\n';
  return o.str();
}

std::string format_report_text(const AnalysisReport& r) {
  std::ostringstream o;
  const auto& t = r.table;
  o << "source " << r.header.source << ", policy " << policy_name(r.policy) << ", arity " << t.arity << '\n';
  o << "  gamma " << num(r.coincidence.gamma) << "   eta " << num(r.coincidence.eta) << '\n';
  if (t.accidentals_subtracted) o << "  WARNING accidentals subtracted\n";
  for (const auto& res : r.results) {
    o << '\n' << res.name << " [" << res.estimator << "]\n";
    o << "  value " << num(res.value) << "  bound " << num(res.bound.value) << " (" << res.bound.name
      << ", assumption: " << res.bound.assumption << (res.bound.established ? "" : ", not established") << ")\n";
    o << "  " << (res.violated ? "VIOLATED" : "no violation") << ", margin " << num(res.margin) << '\n';
    if (res.violated && res.bound.assumption != "none") {
      o << "  WARNING violation holds only under the assumption: " << res.bound.assumption << '\n';
    }
    for (const auto& alt : res.alternates) {
      o << "  alt " << alt.name << " " << num(alt.value) << " (assumption: " << alt.assumption << ")"
        << (res.value > alt.value ? " exceeded" : "") << '\n';
    }
    for (const auto& n : res.notes) o << "  " << n << '\n';
  }
  for (const auto& s : r.skipped) o << '\n' << s.name << " skipped: " << s.reason << '\n';
  if (r.test) {
    o << "\nbeta* " << num(r.test->estimate.beta) << " +- " << num(r.test->estimate.s) << ", k " << num(r.test->k)
      << '\n';
    o << "  p_normal " << num(r.test->p_normal.tail) << " (tail bound " << num(r.test->p_normal.bound) << ")"
      << "  p_hoeffding " << num(r.test->p_hoeffding) << '\n';
    for (const auto& f : r.test->flags) o << "  " << f << '\n';
  }
  if (r.coarse) {
    o << "coarse-grained t " << num(r.coarse->t) << " on " << r.coarse->dof << " dof, p " << num(r.coarse->p)
      << '\n';
  }
  for (const auto& w : r.warnings) o << "warning: " << w << '\n';
  return o.str();
}

ReportEntries parse_report_kv(const std::string& text) {
  ReportEntries out;
  std::istringstream in(text);
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(no, "expected key=value");
    out.emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }
  if (out.empty() || out.front().first != "report.format") throw ParseError(1, "not a bellab report");
  return out;
}

std::string merge_reports(const std::vector<std::pair<std::string, ReportEntries>>& reports) {
  if (reports.empty()) throw ConfigError("report", "no reports given");
  std::vector<std::string> keys;
  std::set<std::string> seen;
  std::vector<std::map<std::string, std::string>> cols;
  std::string arity;
  for (const auto& [label, entries] : reports) {
    std::map<std::string, std::string> col;
    for (const auto& [k, v] : entries) {
      if (k.find("estimator") != std::string::npos || k.ends_with(".assumption") || k.ends_with("bound.name")) {
        continue;
      }
      auto& slot = col[k];
      slot = slot.empty() ? v : slot + "; " + v;
      if (seen.insert(k).second) keys.push_back(k);
    }
    const auto it = col.find("table.arity");
    const std::string a = it == col.end() ? "" : it->second;
    if (arity.empty()) {
      arity = a;
    } else if (a != arity) {
      throw ConfigError("report", "incompatible arities: " + arity + " vs " + a + " in " + label);
    }
    cols.push_back(std::move(col));
  }
  std::size_t kw = 3;
  for (const auto& k : keys) kw = std::max(kw, k.size());
  std::vector<std::size_t> widths;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    std::size_t w = reports[c].first.size();
    for (const auto& [k, v] : cols[c]) w = std::max(w, std::min<std::size_t>(v.size(), 40));
    widths.push_back(w);
  }
  std::ostringstream o;
  const auto pad = [&](const std::string& s, std::size_t w) {
    std::string cut = s.size() > w ? s.substr(0, w) : s;
    return cut + std::string(w - cut.size() + 2, ' ');
  };
  o << pad("key", kw);
  for (std::size_t c = 0; c < cols.size(); ++c) o << pad(reports[c].first, widths[c]);
  o << '\n';
  for (const auto& k : keys) {
    if (k == "report.format") continue;
    o << pad(k, kw);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto it = cols[c].find(k);
      o << pad(it == cols[c].end() ? "-" : it->second, widths[c]);
    }
    o << '\n';
  }
  return o.str();
}

}  // namespace bellab
