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

#pragma once

/// @file
///
/// Exact-rational linear expressions, constraints and guarded predicates over
/// bounded variables, plus the bound-propagation and guard-enumeration
/// machinery that the feasibility engine and the abstraction build on.

#include "quantsyn/rational.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace quantsyn {

enum class Sort { real, integer, boolean };

std::string_view sort_name(Sort s);

struct VarDecl {
  std::string name;
  Sort sort = Sort::real;
  Rational lower;
  Rational upper;
};

using VarId = std::uint32_t;

/// Owns the declarations every expression refers to by index.
class VarTable {
 public:
  /// Validates bounds (lower <= upper, integral bounds for integer sort,
  /// {0,1} for booleans) and name uniqueness.
  VarId add(VarDecl decl);

  const VarDecl& operator[](VarId id) const { return decls_.at(id); }
  std::optional<VarId> find(std::string_view name) const;
  VarId at(std::string_view name) const;
  std::size_t size() const { return decls_.size(); }
  const std::vector<VarDecl>& decls() const { return decls_; }

 private:
  std::vector<VarDecl> decls_;
  std::unordered_map<std::string, VarId> index_;
};

struct Interval {
  Rational lo;
  Rational hi;

  bool empty() const { return lo > hi; }
  bool contains(const Rational& v) const { return lo <= v && v <= hi; }
  bool operator==(const Interval&) const = default;
};

/// One interval per VarId of a table.
using Box = std::vector<Interval>;

Box declared_box(const VarTable& vars);

/// Sparse sum of coefficient * variable plus a constant. Terms are kept
/// sorted by VarId and never hold a zero coefficient.
class LinearExpression {
 public:
  using Term = std::pair<VarId, Rational>;

  LinearExpression() = default;
  explicit LinearExpression(Rational constant) : constant_(std::move(constant)) {}

  static LinearExpression variable(VarId id, const Rational& coefficient = Rational(1));

  const std::vector<Term>& terms() const { return terms_; }
  const Rational& constant() const { return constant_; }
  Rational coefficient(VarId id) const;
  bool is_constant() const { return terms_.empty(); }

  void add_term(VarId id, const Rational& coefficient);
  void set_constant(Rational c) { constant_ = std::move(c); }

  LinearExpression& operator+=(const LinearExpression& other);
  LinearExpression& operator-=(const LinearExpression& other);
  LinearExpression& operator*=(const Rational& k);

  friend LinearExpression operator+(LinearExpression a, const LinearExpression& b) { return a += b; }
  friend LinearExpression operator-(LinearExpression a, const LinearExpression& b) { return a -= b; }
  friend LinearExpression operator*(LinearExpression a, const Rational& k) { return a *= k; }
  friend LinearExpression operator*(const Rational& k, LinearExpression a) { return a *= k; }
  LinearExpression operator-() const { return *this * Rational(-1); }

  bool operator==(const LinearExpression&) const = default;

  /// Replaces `id` by `replacement` everywhere.
  LinearExpression substitute(VarId id, const LinearExpression& replacement) const;

 private:
  std::vector<Term> terms_;
  Rational constant_;
};

using Valuation = std::map<VarId, Rational>;

Rational eval(const LinearExpression& expr, const Valuation& v);

/// Exact range of `expr` over `box`.
Interval range(const LinearExpression& expr, const Box& box);

/// expr <= bound. The expression's constant is always folded into the bound.
struct Constraint {
  LinearExpression expr;
  Rational bound;

  bool operator==(const Constraint&) const = default;
};

Constraint make_le(const LinearExpression& lhs, const LinearExpression& rhs);
std::vector<Constraint> le(const LinearExpression& lhs, const LinearExpression& rhs);
std::vector<Constraint> ge(const LinearExpression& lhs, const LinearExpression& rhs);
std::vector<Constraint> eq(const LinearExpression& lhs, const LinearExpression& rhs);

bool holds(const Constraint& c, const Valuation& v);

struct GuardedConstraint {
  VarId guard;
  bool positive = true;  // false: the body applies when the guard is 0
  Constraint body;

  bool operator==(const GuardedConstraint&) const = default;
};

/// Conjunction of plain and guarded constraints over one VarTable.
class GuardedPredicate {
 public:
  GuardedPredicate() = default;
  explicit GuardedPredicate(std::shared_ptr<const VarTable> vars) : vars_(std::move(vars)) {}

  void add(const Constraint& c);
  void add(const std::vector<Constraint>& cs);
  void add_guarded(VarId guard, bool positive, const Constraint& c);
  void add_guarded(VarId guard, bool positive, const std::vector<Constraint>& cs);

  const VarTable& vars() const { return *vars_; }
  const std::shared_ptr<const VarTable>& var_table() const { return vars_; }
  const std::vector<Constraint>& plain() const { return plain_; }
  const std::vector<GuardedConstraint>& guarded() const { return guarded_; }

  bool operator==(const GuardedPredicate& other) const {
    return plain_ == other.plain_ && guarded_ == other.guarded_;
  }

 private:
  void check_declared(const Constraint& c) const;

  std::shared_ptr<const VarTable> vars_;
  std::vector<Constraint> plain_;
  std::vector<GuardedConstraint> guarded_;
};

/// Throws UsageError when a variable is missing or out of its declaration.
void check_valuation(const VarTable& vars, const Valuation& v);

bool holds(const GuardedPredicate& p, const Valuation& v);

/// Big-M rewrite of every guarded constraint, with M computed per constraint
/// from the declared bounds. Over the declared box the result has exactly the
/// satisfying set of `p`.
std::vector<Constraint> to_conjunctive(const GuardedPredicate& p);

/// Interval constraint propagation. Tightens `box` in place and returns false
/// once some interval becomes empty or a constraint is violated outright.
/// Integer and boolean variables are rounded inward.
bool propagate_bounds(std::span<const Constraint> cs, const VarTable& vars, Box& box,
                      int max_passes = 8);

inline constexpr std::size_t kDefaultAssignmentCap = std::size_t{1} << 20;

/// Depth-first enumeration of the integral (integer/boolean) variables of a
/// predicate, pruned by bound propagation on the constraints that are active
/// under the partial assignment.
class AssignmentEnumerator {
 public:
  explicit AssignmentEnumerator(const GuardedPredicate& p);

  /// Values are listed in the order of integral_vars(). The box passed to the
  /// visitor is the propagated box of the full assignment.
  using Visitor = std::function<void(std::span<const Rational> values, const Box& box)>;

  /// Returns the number of visited assignments. Throws ResourceError when the
  /// count would exceed `cap`.
  std::size_t run(Box box, const Visitor& visit, std::size_t cap = kDefaultAssignmentCap) const;

  /// The real-variable projection of the predicate under a full assignment.
  std::vector<Constraint> residual(std::span<const Rational> values) const;

  const std::vector<VarId>& integral_vars() const { return integral_; }
  const GuardedPredicate& predicate() const { return *p_; }

 private:
  bool dfs(std::size_t depth, Box& box, std::vector<Rational>& values, const Visitor& visit,
           std::size_t& count, std::size_t cap) const;
  void active_constraints(std::size_t depth, const std::vector<Rational>& values,
                          std::vector<Constraint>& out) const;

  const GuardedPredicate* p_;
  std::vector<VarId> integral_;
  std::vector<int> position_;  // VarId -> index in integral_, or -1
};

struct GuardEmission {
  std::vector<std::pair<VarId, Rational>> assignment;
  std::vector<Constraint> residual;
};

/// Case split over all integral variables within their declared bounds.
std::vector<GuardEmission> enum_guards(const GuardedPredicate& p,
                                       std::size_t cap = kDefaultAssignmentCap);

std::string to_string(const LinearExpression& e, const VarTable& vars);
std::string to_string(const Constraint& c, const VarTable& vars);

}  // namespace quantsyn
