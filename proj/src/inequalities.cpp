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

#include "bellab/inequalities.hpp"

#include <algorithm>
#include <cmath>

#include "bellab/error.hpp"

namespace bellab {

namespace {

std::string cell_name(Setting a, Setting b) { return "(" + std::to_string(a) + "," + std::to_string(b) + ")"; }

bool is_franson(const CorrelationTable& t) {
  const auto it = t.meta.find("source");
  return it != t.meta.end() && it->second == "franson";
}

double trials_of(const CorrelationTable& t, Setting a, Setting b) {
  const auto& c = t.at(a, b);
  if (!c.has_trials()) throw MissingDataError("cell " + cell_name(a, b) + " has no trial count");
  if (c.trials <= 0) throw MissingDataError("cell " + cell_name(a, b) + " has no trials");
  return c.trials;
}

double p_plus_plus(const CorrelationTable& t, Setting a, Setting b) {
  return t.at(a, b).n[kIdxPlus][kIdxPlus] / trials_of(t, a, b);
}

/// P(A_a = +1) over all trials with a measured B setting.
double p_a_plus(const CorrelationTable& t, Setting a) {
  double num = 0, den = 0;
  for (Setting b = 1; b <= t.arity; ++b) {
    num += t.at(a, b).singles_a_plus();
    den += trials_of(t, a, b);
  }
  return num / den;
}

double p_b_plus(const CorrelationTable& t, Setting b) {
  double num = 0, den = 0;
  for (Setting a = 1; a <= t.arity; ++a) {
    num += t.at(a, b).singles_b_plus();
    den += trials_of(t, a, b);
  }
  return num / den;
}

void require_arity(const CorrelationTable& t, int arity, const char* what) {
  if (t.arity < arity) {
    throw DomainError(std::string(what) + " needs " + std::to_string(arity) + " settings per side, table has " +
                      std::to_string(t.arity));
  }
}

void carry_flags(const CorrelationTable& t, InequalityResult& r) {
  if (t.accidentals_subtracted) r.notes.push_back("WARNING accidentals subtracted: this opens a loophole");
  if (t.meta.count("settings_predictable")) r.notes.push_back("WARNING settings predictable - memory loophole open");
  if (t.meta.count("memory_fallback")) r.notes.push_back("memory adversary fell back to the sign model");
  for (const auto& w : t.warnings) r.notes.push_back(w);
}

Bound make_bound(std::string name, double value, std::string assumption, bool established = true) {
  Bound b;
  b.name = std::move(name);
  b.value = value;
  b.assumption = std::move(assumption);
  b.established = established;
  return b;
}

/// Governing and alternate bounds for CHSH-type sums computed from conditional correlations.
void conditional_bounds(const CorrelationTable& t, InequalityResult& r) {
  const double eta = conditional_efficiency(t);
  const double gamma = coincidence_probability(t);
  r.quantities["eta"] = eta;
  if (!std::isnan(gamma)) r.quantities["gamma"] = gamma;
  const auto safe = [](double (*f)(double), double x) { return x > 0 && x <= 1 ? f(x) : 4.0; };
  const Bound fair = make_bound("fair_sampling", 2.0, "fair sampling");
  if (is_franson(t)) {
    r.bound = make_bound("event_ready", safe(bound_event_ready, eta), "none");
    r.alternates.push_back(make_bound("franson_late_late", 3.0, "phase delay near detectors"));
    r.alternates.push_back(fair);
    return;
  }
  switch (t.policy) {
    case PolicyKind::kSlots:
    case PolicyKind::kHeralded:
      r.bound = make_bound("efficiency", safe(bound_efficiency, eta), "none");
      r.alternates.push_back(make_bound("event_ready", safe(bound_event_ready, eta), "none"));
      break;
    case PolicyKind::kWindow:
    case PolicyKind::kAsymmetric:
      if (!std::isnan(gamma)) {
        r.bound = make_bound("coincidence", safe(bound_coincidence, gamma), "none");
        r.alternates.push_back(make_bound("conditional_coincidence", safe(bound_coincidence, eta),
                                          "conjecture: conditional coincidence efficiency suffices"));
      } else {
        r.bound = make_bound("conditional_coincidence", safe(bound_coincidence, eta),
                             "conjecture: conditional coincidence efficiency suffices");
        r.notes.push_back("gamma UNAVAILABLE: trials not defined, conditional efficiency used");
      }
      break;
  }
  r.alternates.push_back(fair);
}

}  // namespace

const char* nodetect_name(NodetectMode m) {
  switch (m) {
    case NodetectMode::kZero: return "0";
    case NodetectMode::kMinusOne: return "-1";
    case NodetectMode::kExclude: return "exclude";
  }
  return "?";
}

void settle(InequalityResult& r) {
  // Rounding noise at equality is not a violation.
  const auto slack = [](double b) { return 1e-12 * std::max(1.0, std::abs(b)); };
  r.margin = r.value - r.bound.value;
  r.violated = r.bound.established && (r.value > r.bound.value + slack(r.bound.value) ||
                                       r.value < r.lower_bound - slack(r.lower_bound));
}

double cell_correlation(const CorrelationTable& t, Setting a, Setting b, NodetectMode mode) {
  const auto& c = t.at(a, b);
  if (mode == NodetectMode::kExclude) {
    if (c.coincidences() <= 0) throw MissingDataError("cell " + cell_name(a, b) + " has no coincidences");
    return c.correlation();
  }
  const double trials = trials_of(t, a, b);
  const double v = mode == NodetectMode::kZero ? 0.0 : -1.0;
  const double value[3] = {+1.0, -1.0, v};
  double s = 0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) s += value[i] * value[j] * c.n[i][j];
  }
  return s / trials;
}

double conditional_efficiency(const CorrelationTable& t) {
  double eta = kUnavailable;
  for (Setting a = 1; a <= t.arity; ++a) {
    for (Setting b = 1; b <= t.arity; ++b) {
      const auto& c = t.at(a, b);
      for (double singles : {c.singles_a(), c.singles_b()}) {
        if (singles <= 0) continue;
        const double e = c.coincidences() / singles;
        eta = std::isnan(eta) ? e : std::min(eta, e);
      }
    }
  }
  return eta;
}

double coincidence_probability(const CorrelationTable& t) {
  if (!t.trials_defined) return kUnavailable;
  double g = kUnavailable;
  for (Setting a = 1; a <= t.arity; ++a) {
    for (Setting b = 1; b <= t.arity; ++b) {
      const auto& c = t.at(a, b);
      if (!c.has_trials() || c.trials <= 0) continue;
      const double v = c.coincidences() / c.trials;
      g = std::isnan(g) ? v : std::min(g, v);
    }
  }
  return g;
}

InequalityResult eval_chsh(const CorrelationTable& t, NodetectMode mode) {
  require_arity(t, 2, "CHSH");
  InequalityResult r;
  r.name = "chsh";
  r.estimator = std::string("|E11+E12|+|E21-E22|, nodetect=") + nodetect_name(mode);
  const double e11 = cell_correlation(t, 1, 1, mode), e12 = cell_correlation(t, 1, 2, mode);
  const double e21 = cell_correlation(t, 2, 1, mode), e22 = cell_correlation(t, 2, 2, mode);
  r.value = std::abs(e11 + e12) + std::abs(e21 - e22);
  r.quantities["E11"] = e11;
  r.quantities["E12"] = e12;
  r.quantities["E21"] = e21;
  r.quantities["E22"] = e22;
  if (mode == NodetectMode::kExclude) {
    conditional_bounds(t, r);
  } else {
    r.bound = make_bound("lhv", 2.0, "none");
  }
  carry_flags(t, r);
  settle(r);
  return r;
}

InequalityResult eval_bell_original(const CorrelationTable& t, double defect_tolerance) {
  require_arity(t, 2, "Bell's inequality");
  const auto ia = t.meta.find("angles_a");
  const auto ib = t.meta.find("angles_b");
  InequalityResult r;
  if (ia != t.meta.end() && ib != t.meta.end()) {
    const auto first = [](const std::string& s) {
      const auto c1 = s.find(',');
      const auto c2 = s.find(',', c1 + 1);
      return std::stod(s.substr(c1 + 1, c2 - c1 - 1));
    };
    if (std::abs(first(ia->second) - first(ib->second)) > 1e-12) {
      throw DomainError("Bell's inequality needs equal first settings a1 = b1");
    }
  } else {
    r.notes.push_back("analyzer angles not recorded; a1 = b1 assumed");
  }
  r.name = "bell_original";
  r.estimator = "|E21-E22| <= 1+E12";
  const double e11 = cell_correlation(t, 1, 1, NodetectMode::kExclude);
  const double e12 = cell_correlation(t, 1, 2, NodetectMode::kExclude);
  const double e21 = cell_correlation(t, 2, 1, NodetectMode::kExclude);
  const double e22 = cell_correlation(t, 2, 2, NodetectMode::kExclude);
  r.value = std::abs(e21 - e22);
  const double defect = 1.0 + e11;
  r.quantities["anticorrelation_defect"] = defect;
  r.quantities["E11"] = e11;
  const bool perfect = defect <= defect_tolerance;
  r.bound = make_bound("bell", 1.0 + e12, "perfect anticorrelation", perfect);
  if (!perfect) r.notes.push_back("bound inapplicable without the perfect-anticorrelation assumption");
  carry_flags(t, r);
  settle(r);
  return r;
}

InequalityResult eval_ch(const CorrelationTable& t, ChVariant variant) {
  require_arity(t, 2, "CH");
  InequalityResult r;
  r.name = "ch";
  r.lower_bound = -1.0;
  r.bound = make_bound("ch", 0.0, "none");
  if (variant == ChVariant::kProbabilities) {
    r.estimator = "P11+P12+P21-P22-P(A1)-P(B1)";
    const double j = p_plus_plus(t, 1, 1) + p_plus_plus(t, 1, 2) + p_plus_plus(t, 2, 1) - p_plus_plus(t, 2, 2);
    const double pa = p_a_plus(t, 1), pb = p_b_plus(t, 1);
    r.value = j - pa - pb;
    r.quantities["J"] = j;
    r.quantities["P(A1)"] = pa;
    r.quantities["P(B1)"] = pb;
  } else {
    r.estimator = "N11+N12+N21-N22-N(A1)-N(B1), singles from cell (1,1)";
    const auto n = [&](Setting a, Setting b) { return t.at(a, b).n[kIdxPlus][kIdxPlus]; };
    const auto& c11 = t.at(1, 1);
    if (c11.singles_a() + c11.singles_b() <= 0) throw MissingDataError("no singles in cell (1,1)");
    r.value = n(1, 1) + n(1, 2) + n(2, 1) - n(2, 2) - c11.singles_a_plus() - c11.singles_b_plus();
    r.bound.assumption = "equal trials per setting pair";
    r.lower_bound = -std::numeric_limits<double>::infinity();
    if (c11.has_trials() && c11.trials > 0) r.quantities["per_trial"] = r.value / c11.trials;
  }
  carry_flags(t, r);
  settle(r);
  return r;
}

InequalityResult eval_rate_chsh(const CorrelationTable& t) {
  require_arity(t, 2, "rate CHSH");
  for (Setting s = 1; s <= 2; ++s) {
    if (!t.at(s, kRemoved).has_trials() || t.at(s, kRemoved).trials <= 0 || !t.at(kRemoved, s).has_trials() ||
        t.at(kRemoved, s).trials <= 0) {
      throw MissingDataError("rate CHSH needs runs with the remote analyzer removed");
    }
  }
  InequalityResult r;
  r.name = "rate_chsh";
  r.estimator = "R11+R12+|R21-R22| <= max(R(Ai)+R(Bj))";
  const auto R = [&](Setting a, Setting b) { return p_plus_plus(t, a, b); };
  r.value = R(1, 1) + R(1, 2) + std::abs(R(2, 1) - R(2, 2));
  double rhs = 0;
  for (Setting i = 1; i <= 2; ++i) {
    for (Setting j = 1; j <= 2; ++j) rhs = std::max(rhs, R(i, kRemoved) + R(kRemoved, j));
  }
  r.bound = make_bound("rate", rhs, "fair sampling");
  if (t.at(kRemoved, kRemoved).has_trials() && t.at(kRemoved, kRemoved).trials > 0) {
    r.quantities["R0"] = R(kRemoved, kRemoved);
  }
  carry_flags(t, r);
  settle(r);
  return r;
}

NoEnhancementResult eval_no_enhancement(const CorrelationTable& t) {
  require_arity(t, 2, "no-enhancement");
  const auto& c00 = t.at(kRemoved, kRemoved);
  if (!c00.has_trials() || c00.trials <= 0) {
    throw MissingDataError("no-enhancement needs runs with both analyzers removed");
  }
  const auto P = [&](Setting a, Setting b) { return p_plus_plus(t, a, b); };
  const double p_inf = P(kRemoved, kRemoved);
  NoEnhancementResult out;

  auto& ch = out.ch_form;
  ch.name = "no_enhancement_ch";
  ch.estimator = "P11+P12+P21-P22-P(A1,Binf)-P(Ainf,B1)";
  ch.value = P(1, 1) + P(1, 2) + P(2, 1) - P(2, 2) - P(1, kRemoved) - P(kRemoved, 1);
  ch.bound = make_bound("no_enhancement", 0.0, "no-enhancement");
  ch.lower_bound = -p_inf;
  ch.quantities["P(Ainf,Binf)"] = p_inf;
  carry_flags(t, ch);
  settle(ch);

  auto& chsh = out.chsh_form;
  chsh = eval_chsh(t, NodetectMode::kZero);
  chsh.name = "no_enhancement_chsh";
  chsh.bound = make_bound("no_enhancement", 2.0 * p_inf, "no-enhancement");
  chsh.quantities["P(Ainf,Binf)"] = p_inf;
  settle(chsh);

  auto& cond = out.conditional_form;
  try {
    cond = eval_chsh(t, NodetectMode::kExclude);
    cond.alternates.clear();
    cond.alternates.push_back(cond.bound);
  } catch (const MissingDataError& e) {
    cond.value = kUnavailable;
    cond.notes.push_back(std::string("conditional form unavailable: ") + e.what());
  }
  cond.name = "no_enhancement_conditional";
  cond.bound = make_bound("no_enhancement", 2.0, "no-enhancement, ideal polarizers");
  settle(cond);
  return out;
}

InequalityResult eval_chained(const CorrelationTable& t, int n_terms, NodetectMode mode) {
  if (n_terms < 4 || n_terms % 2 != 0) throw DomainError("chained inequality needs an even number of terms >= 4");
  const int k = n_terms / 2;
  if (t.arity != k) {
    throw DomainError("chained inequality with " + std::to_string(n_terms) + " terms needs arity " +
                      std::to_string(k) + ", table has " + std::to_string(t.arity));
  }
  InequalityResult r;
  r.name = "chained" + std::to_string(n_terms);
  r.estimator = std::string("sum |Eii+Ei,i+1| + |Ekk-Ek1|, nodetect=") + nodetect_name(mode);
  double v = 0;
  for (Setting i = 1; i < k; ++i) v += std::abs(cell_correlation(t, i, i, mode) + cell_correlation(t, i, i + 1, mode));
  v += std::abs(cell_correlation(t, k, k, mode) - cell_correlation(t, k, 1, mode));
  r.value = v;
  const double lhv = n_terms - 2;
  if (mode != NodetectMode::kExclude) {
    r.bound = make_bound("lhv", lhv, "none");
  } else if (is_franson(t)) {
    r.bound = make_bound("franson_chained", franson_chained_bound(n_terms), "phase delay near detectors");
    r.alternates.push_back(make_bound("fair_sampling", lhv, "fair sampling"));
    r.quantities["eta"] = conditional_efficiency(t);
  } else {
    r.bound = make_bound("lhv", lhv, "fair sampling");
    r.quantities["eta"] = conditional_efficiency(t);
  }
  carry_flags(t, r);
  settle(r);
  return r;
}

InequalityResult eval_ch_coincidence(const CorrelationTable& t) {
  InequalityResult r = eval_ch(t, ChVariant::kProbabilities);
  r.name = "ch_coincidence";
  r.estimator = "coincident P11+P12+P21-P22-P(A1)-P(B1)";
  const bool ok = t.policy == PolicyKind::kSlots || t.policy == PolicyKind::kHeralded ||
                  (t.policy == PolicyKind::kAsymmetric && t.ch_compatible);
  r.bound.name = "ch_coincidence";
  if (!ok) {
    r.bound.established = false;
    r.bound.assumption = "fair coincidence";
    r.notes.push_back(std::string("bound not established for this policy (") + policy_name(t.policy) + ")");
  }
  settle(r);
  return r;
}

double bound_efficiency(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("efficiency must lie in (0,1]");
  return std::min(4.0, 4.0 / eta - 2.0);
}

double bound_coincidence(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("coincidence probability must lie in (0,1]");
  return std::min(4.0, 6.0 / gamma - 4.0);
}

double bound_event_ready(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("efficiency must lie in (0,1]");
  return 4.0 / eta - 2.0;
}

double franson_chained_bound(int n_terms) {
  if (n_terms < 4 || n_terms % 2 != 0) throw DomainError("chained inequality needs an even number of terms >= 4");
  // Early-early half keeps the trivial bound n, late-late half obeys n - 2.
  return n_terms - 1.0;
}

}  // namespace bellab
