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

#include "bellab/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bellab/error.hpp"
#include "bellab/rng.hpp"

namespace bellab {

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& opt) {
  const std::size_t n = x0.size();
  if (n == 0) throw DomainError("Nelder-Mead needs at least one variable");
  NelderMeadResult res;
  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += opt.initial_step;
  auto eval = [&](const std::vector<double>& x) {
    ++res.evaluations;
    return f(x);
  };
  for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(pts[i]);
  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  auto point = [&](const std::vector<double>& from, double t, std::vector<double>& out) {
    for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + t * (from[j] - centroid[j]);
  };
  while (res.evaluations < opt.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order[0], worst = order[n], second = order[n - 1];
    double xspread = 0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t j = 0; j < n; ++j) xspread = std::max(xspread, std::abs(pts[i][j] - pts[best][j]));
    }
    if (std::abs(fv[worst] - fv[best]) <= opt.f_tolerance && xspread <= std::sqrt(opt.f_tolerance)) {
      res.converged = true;
      break;
    }
    if (xspread <= opt.x_tolerance) {
      res.converged = true;
      break;
    }
    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / static_cast<double>(n);
    }
    point(pts[worst], -1.0, xr);
    const double fr = eval(xr);
    if (fr < fv[best]) {
      point(pts[worst], -2.0, xe);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        fv[worst] = fe;
      } else {
        pts[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      pts[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    point(outside ? xr : pts[worst], 0.5, xc);
    const double fc = eval(xc);
    if (fc < (outside ? fr : fv[worst])) {
      pts[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < n; ++j) pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
      fv[i] = eval(pts[i]);
    }
  }
  const auto it = std::min_element(fv.begin(), fv.end());
  res.f = *it;
  res.x = pts[static_cast<std::size_t>(it - fv.begin())];
  return res;
}

NelderMeadResult multi_start_minimize(const Objective& f, const std::vector<double>& lo, const std::vector<double>& hi,
                                      const MultiStartOptions& opt) {
  if (lo.size() != hi.size() || lo.empty()) throw DomainError("search box bounds disagree");
  if (opt.starts < 1) throw DomainError("need at least one start");
  NelderMeadResult best;
  bool have = false;
  int total = 0;
  for (int s = 0; s < opt.starts; ++s) {
    CounterRng rng(opt.seed, Stream::kOptimizer, static_cast<std::uint64_t>(s));
    std::vector<double> x0(lo.size());
    for (std::size_t j = 0; j < lo.size(); ++j) x0[j] = lo[j] + (hi[j] - lo[j]) * rng.uniform();
    auto r = nelder_mead(f, x0, opt.local);
    total += r.evaluations;
    if (!have || r.f < best.f) {
      best = std::move(r);
      have = true;
    }
  }
  best.evaluations = total;
  return best;
}

}  // namespace bellab
