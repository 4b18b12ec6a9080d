// Copyright 2026 The quantsyn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "quantsyn/lp.hpp"

#include <algorithm>
#include <map>

namespace quantsyn {

namespace {

/// Dense tableau in canonical form: every row has one basic column with a
/// unit entry. Column `width` holds the right-hand side.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows, std::vector<Rational>(cols + 1)), basis_(rows, 0), cols_(cols) {}

  Rational& at(std::size_t r, std::size_t c) { return rows_[r][c]; }
  Rational& rhs(std::size_t r) { return rows_[r][cols_]; }
  std::size_t& basic(std::size_t r) { return basis_[r]; }
  std::size_t rows() const { return rows_.size(); }
  std::size_t cols() const { return cols_; }

  void pivot(std::size_t r, std::size_t c) {
    auto& prow = rows_[r];
    const Rational inv = 1 / prow[c];
    for (auto& v : prow) {
      if (v != 0) v *= inv;
    }
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i == r) continue;
      auto& row = rows_[i];
      if (row[c] == 0) continue;
      const Rational factor = row[c];
      for (std::size_t j = 0; j <= cols_; ++j) {
        if (prow[j] != 0) row[j] -= factor * prow[j];
      }
    }
    basis_[r] = c;
  }

  /// Maximizes cost . x over columns with allowed[c]. Returns the optimum.
  /// The feasible region is bounded by construction, so this always ends.
  Rational maximize(const std::vector<Rational>& cost, const std::vector<bool>& allowed) {
    for (;;) {
      // Bland: lowest-index improving column.
      std::size_t enter = cols_;
      for (std::size_t c = 0; c < cols_ && enter == cols_; ++c) {
        if (!allowed[c] || is_basic(c)) continue;
        Rational reduced = cost[c];
        for (std::size_t r = 0; r < rows_.size(); ++r) {
          if (rows_[r][c] != 0) reduced -= cost[basis_[r]] * rows_[r][c];
        }
        if (reduced > 0) enter = c;
      }
      if (enter == cols_) break;
      std::size_t leave = rows_.size();
      Rational best;
      for (std::size_t r = 0; r < rows_.size(); ++r) {
        const Rational& a = rows_[r][enter];
        if (a <= 0) continue;
        Rational ratio = rows_[r][cols_] / a;
        if (leave == rows_.size() || ratio < best ||
            (ratio == best && basis_[r] < basis_[leave])) {
          best = std::move(ratio);
          leave = r;
        }
      }
      if (leave == rows_.size()) throw std::logic_error("unbounded direction in a boxed LP");
      pivot(leave, enter);
    }
    Rational value = 0;
    for (std::size_t r = 0; r < rows_.size(); ++r) value += cost[basis_[r]] * rows_[r][cols_];
    return value;
  }

  bool is_basic(std::size_t c) const {
    return std::find(basis_.begin(), basis_.end(), c) != basis_.end();
  }

  void drop_row(std::size_t r) {
    rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(r));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
  }

 private:
  std::vector<std::vector<Rational>> rows_;
  std::vector<std::size_t> basis_;
  std::size_t cols_;
};

struct Solution {
  bool feasible = false;
  Rational value;
};

// Variables are shifted to z = x - lo so that 0 <= z <= hi - lo.
Solution solve(const LinearExpression* objective, const std::vector<Constraint>& cs, const Box& box) {
  std::map<VarId, std::size_t> column;
  auto note = [&](const LinearExpression& e) {
    for (const auto& [id, k] : e.terms()) column.emplace(id, 0);
  };
  for (const auto& c : cs) note(c.expr);
  if (objective) note(*objective);
  std::vector<VarId> vars;
  for (auto& [id, col] : column) {
    col = vars.size();
    vars.push_back(id);
    if (box.at(id).empty()) return {};
  }

  struct Row {
    std::vector<std::pair<std::size_t, Rational>> terms;
    Rational rhs;
  };
  std::vector<Row> rows;
  for (const auto& c : cs) {
    Row row{{}, c.bound};
    for (const auto& [id, k] : c.expr.terms()) {
      row.terms.emplace_back(column[id], k);
      row.rhs -= k * box.at(id).lo;
    }
    if (row.terms.empty()) {
      if (row.rhs < 0) return {};
      continue;
    }
    rows.push_back(std::move(row));
  }
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const Interval& iv = box.at(vars[j]);
    rows.push_back(Row{{{j, Rational(1)}}, iv.hi - iv.lo});
  }

  const std::size_t n = vars.size();
  const std::size_t m = rows.size();
  std::size_t artificial_count = 0;
  for (const auto& r : rows) artificial_count += r.rhs < 0 ? 1 : 0;
  const std::size_t slack0 = n;
  const std::size_t art0 = n + m;
  Tableau t(m, n + m + artificial_count);
  std::size_t next_art = art0;
  for (std::size_t i = 0; i < m; ++i) {
    const bool flip = rows[i].rhs < 0;
    const Rational sign = flip ? Rational(-1) : Rational(1);
    for (const auto& [col, k] : rows[i].terms) t.at(i, col) += sign * k;
    t.at(i, slack0 + i) = sign;
    t.rhs(i) = sign * rows[i].rhs;
    if (flip) {
      t.at(i, next_art) = 1;
      t.basic(i) = next_art++;
    } else {
      t.basic(i) = slack0 + i;
    }
  }

  const std::size_t width = t.cols();
  if (artificial_count > 0) {
    std::vector<Rational> cost(width);
    for (std::size_t c = art0; c < width; ++c) cost[c] = -1;
    std::vector<bool> allowed(width, true);
    if (t.maximize(cost, allowed) < 0) return {};
    // Drive remaining (zero-valued) artificials out of the basis.
    for (std::size_t r = 0; r < t.rows();) {
      if (t.basic(r) < art0) {
        ++r;
        continue;
      }
      std::size_t col = art0;
      for (std::size_t c = 0; c < art0; ++c) {
        if (t.at(r, c) != 0) {
          col = c;
          break;
        }
      }
      if (col == art0) {
        t.drop_row(r);
      } else {
        t.pivot(r, col);
        ++r;
      }
    }
  }

  Solution sol;
  sol.feasible = true;
  if (!objective) return sol;
  std::vector<Rational> cost(width);
  Rational offset = objective->constant();
  for (const auto& [id, k] : objective->terms()) {
    cost[column[id]] = k;
    offset += k * box.at(id).lo;
  }
  std::vector<bool> allowed(width, true);
  for (std::size_t c = art0; c < width; ++c) allowed[c] = false;
  sol.value = t.maximize(cost, allowed) + offset;
  return sol;
}

}  // namespace

bool feasible(const std::vector<Constraint>& cs, const Box& box) {
  return solve(nullptr, cs, box).feasible;
}

std::optional<Rational> optimize(const LinearExpression& objective, const std::vector<Constraint>& cs,
                                 const Box& box, Direction direction) {
  if (direction == Direction::maximize) {
    Solution s = solve(&objective, cs, box);
    if (!s.feasible) return std::nullopt;
    return s.value;
  }
  const LinearExpression negated = -objective;
  Solution s = solve(&negated, cs, box);
  if (!s.feasible) return std::nullopt;
  return Rational(-s.value);
}

}  // namespace quantsyn
