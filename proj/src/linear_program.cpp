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

#include "bellab/linear_program.hpp"

#include <cmath>
#include <limits>

#include "bellab/error.hpp"

namespace bellab {

namespace {

constexpr double kEps = 1e-11;

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), t_((rows + 1) * (cols + 1), 0.0), basis_(rows) {}

  double& at(std::size_t r, std::size_t c) { return t_[r * (n_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, n_); }
  std::size_t& basis(std::size_t r) { return basis_[r]; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double p = at(pr + 1, pc);
    for (std::size_t c = 0; c <= n_; ++c) at(pr + 1, c) /= p;
    for (std::size_t r = 0; r <= m_; ++r) {
      if (r == pr + 1) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= n_; ++c) at(r, c) -= f * at(pr + 1, c);
    }
    basis_[pr] = pc;
  }

  /// Sets row 0 to reduced costs for maximizing cost.x (stored as -reduced cost).
  void set_objective(const std::vector<double>& cost) {
    for (std::size_t c = 0; c <= n_; ++c) at(0, c) = c < n_ ? -cost[c] : 0.0;
    for (std::size_t r = 0; r < m_; ++r) {
      const double cb = cost[basis_[r]];
      if (cb == 0.0) continue;
      for (std::size_t c = 0; c <= n_; ++c) at(0, c) += cb * at(r + 1, c);
    }
  }

  /// Bland's rule iterations. Returns false when unbounded.
  bool optimize(const std::vector<bool>& allowed) {
    for (std::size_t iter = 0; iter < 100000; ++iter) {
      std::size_t enter = n_;
      for (std::size_t c = 0; c < n_; ++c) {
        if (allowed[c] && at(0, c) < -kEps) {
          enter = c;
          break;
        }
      }
      if (enter == n_) return true;
      std::size_t leave = m_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < m_; ++r) {
        const double a = at(r + 1, enter);
        if (a <= kEps) continue;
        const double ratio = rhs(r + 1) / a;
        if (ratio < best - 1e-14 || (std::abs(ratio - best) <= 1e-14 && basis_[r] < basis_[leave])) {
          best = ratio;
          leave = r;
        }
      }
      if (leave == m_) return false;
      pivot(leave, enter);
    }
    throw DomainError("simplex iteration limit reached");
  }

  double objective() { return at(0, n_); }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }

 private:
  std::size_t m_, n_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  const std::size_t n = lp.n();
  struct Row {
    std::vector<double> a;
    double b;
    int sense;  // -1 <=, 0 =, +1 >=
  };
  std::vector<Row> rows;
  auto add = [&](const std::vector<std::vector<double>>& a, const std::vector<double>& b, int sense) {
    if (a.size() != b.size()) throw DomainError("constraint matrix and bound sizes differ");
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].size() != n) throw DomainError("constraint row has the wrong width");
      Row r{a[i], b[i], sense};
      if (r.b < 0) {
        for (auto& v : r.a) v = -v;
        r.b = -r.b;
        r.sense = -r.sense;
      }
      rows.push_back(std::move(r));
    }
  };
  add(lp.le, lp.b_le, -1);
  add(lp.ge, lp.b_ge, +1);
  add(lp.eq, lp.b_eq, 0);

  const std::size_t m = rows.size();
  std::size_t n_slack = 0, n_art = 0;
  for (const auto& r : rows) {
    if (r.sense != 0) ++n_slack;
    if (r.sense >= 0) ++n_art;
  }
  const std::size_t cols = n + n_slack + n_art;
  Tableau t(m, cols);
  std::size_t s = n, a = n + n_slack;
  std::vector<bool> is_art(cols, false);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& r = rows[i];
    for (std::size_t j = 0; j < n; ++j) t.at(i + 1, j) = r.a[j];
    t.rhs(i + 1) = r.b;
    if (r.sense == -1) {
      t.at(i + 1, s) = 1.0;
      t.basis(i) = s++;
    } else {
      if (r.sense == 1) t.at(i + 1, s++) = -1.0;
      t.at(i + 1, a) = 1.0;
      is_art[a] = true;
      t.basis(i) = a++;
    }
  }

  LpSolution sol;
  std::vector<bool> allowed(cols, true);
  if (n_art > 0) {
    std::vector<double> phase1(cols, 0.0);
    for (std::size_t j = 0; j < cols; ++j) {
      if (is_art[j]) phase1[j] = -1.0;
    }
    t.set_objective(phase1);
    t.optimize(allowed);
    if (t.objective() < -1e-9) return sol;
    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (!is_art[t.basis(i)]) continue;
      for (std::size_t j = 0; j < n + n_slack; ++j) {
        if (std::abs(t.at(i + 1, j)) > 1e-9) {
          t.pivot(i, j);
          break;
        }
      }
    }
    for (std::size_t j = 0; j < cols; ++j) allowed[j] = !is_art[j];
  }
  std::vector<double> cost(cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) cost[j] = lp.c[j];
  t.set_objective(cost);
  if (!t.optimize(allowed)) {
    sol.status = LpStatus::kUnbounded;
    return sol;
  }
  sol.status = LpStatus::kOptimal;
  sol.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (t.basis(i) < n) sol.x[t.basis(i)] = std::max(0.0, t.rhs(i + 1));
  }
  sol.value = 0;
  for (std::size_t j = 0; j < n; ++j) sol.value += lp.c[j] * sol.x[j];
  return sol;
}

}  // namespace bellab
