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

#include "quantsyn/predicate.hpp"

#include <algorithm>
#include <sstream>

namespace quantsyn {

std::string_view sort_name(Sort s) {
  switch (s) {
    case Sort::real: return "real";
    case Sort::integer: return "int";
    case Sort::boolean: return "bool";
  }
  return "?";
}

VarId VarTable::add(VarDecl decl) {
  if (decl.name.empty()) throw UsageError("variable without a name");
  if (index_.count(decl.name)) throw UsageError("duplicate variable '" + decl.name + "'");
  if (decl.sort == Sort::boolean) {
    decl.lower = 0;
    decl.upper = 1;
  }
  if (decl.lower > decl.upper) throw UsageError("empty bounds for '" + decl.name + "'");
  if (decl.sort == Sort::integer && (!is_integral(decl.lower) || !is_integral(decl.upper))) {
    throw UsageError("integer variable '" + decl.name + "' needs integral bounds");
  }
  const auto id = static_cast<VarId>(decls_.size());
  index_.emplace(decl.name, id);
  decls_.push_back(std::move(decl));
  return id;
}

std::optional<VarId> VarTable::find(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

VarId VarTable::at(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw UsageError("unknown variable '" + std::string(name) + "'");
}

Box declared_box(const VarTable& vars) {
  Box box;
  box.reserve(vars.size());
  for (const auto& d : vars.decls()) box.push_back({d.lower, d.upper});
  return box;
}

// LinearExpression

LinearExpression LinearExpression::variable(VarId id, const Rational& coefficient) {
  LinearExpression e;
  e.add_term(id, coefficient);
  return e;
}

Rational LinearExpression::coefficient(VarId id) const {
  const auto it = std::lower_bound(terms_.begin(), terms_.end(), id,
                                   [](const Term& t, VarId v) { return t.first < v; });
  if (it != terms_.end() && it->first == id) return it->second;
  return Rational(0);
}

void LinearExpression::add_term(VarId id, const Rational& coefficient) {
  if (coefficient == 0) return;
  auto it = std::lower_bound(terms_.begin(), terms_.end(), id,
                             [](const Term& t, VarId v) { return t.first < v; });
  if (it != terms_.end() && it->first == id) {
    it->second += coefficient;
    if (it->second == 0) terms_.erase(it);
  } else {
    terms_.insert(it, Term{id, coefficient});
  }
}

LinearExpression& LinearExpression::operator+=(const LinearExpression& other) {
  std::vector<Term> merged;
  merged.reserve(terms_.size() + other.terms_.size());
  auto a = terms_.begin();
  auto b = other.terms_.begin();
  while (a != terms_.end() || b != other.terms_.end()) {
    if (b == other.terms_.end() || (a != terms_.end() && a->first < b->first)) {
      merged.push_back(std::move(*a++));
    } else if (a == terms_.end() || b->first < a->first) {
      merged.push_back(*b++);
    } else {
      Rational sum = a->second + b->second;
      if (sum != 0) merged.emplace_back(a->first, std::move(sum));
      ++a;
      ++b;
    }
  }
  terms_ = std::move(merged);
  constant_ += other.constant_;
  return *this;
}

LinearExpression& LinearExpression::operator-=(const LinearExpression& other) {
  return *this += other * Rational(-1);
}

LinearExpression& LinearExpression::operator*=(const Rational& k) {
  if (k == 0) {
    terms_.clear();
    constant_ = 0;
    return *this;
  }
  for (auto& t : terms_) t.second *= k;
  constant_ *= k;
  return *this;
}

LinearExpression LinearExpression::substitute(VarId id, const LinearExpression& replacement) const {
  const Rational k = coefficient(id);
  if (k == 0) return *this;
  LinearExpression out = *this;
  out.add_term(id, -k);
  out += replacement * k;
  return out;
}

Rational eval(const LinearExpression& expr, const Valuation& v) {
  Rational sum = expr.constant();
  for (const auto& [id, k] : expr.terms()) {
    const auto it = v.find(id);
    if (it == v.end()) throw UsageError("valuation misses variable #" + std::to_string(id));
    sum += k * it->second;
  }
  return sum;
}

Interval range(const LinearExpression& expr, const Box& box) {
  Interval out{expr.constant(), expr.constant()};
  for (const auto& [id, k] : expr.terms()) {
    const Interval& iv = box.at(id);
    if (k > 0) {
      out.lo += k * iv.lo;
      out.hi += k * iv.hi;
    } else {
      out.lo += k * iv.hi;
      out.hi += k * iv.lo;
    }
  }
  return out;
}

Constraint make_le(const LinearExpression& lhs, const LinearExpression& rhs) {
  LinearExpression diff = lhs - rhs;
  Rational bound = -diff.constant();
  diff.set_constant(0);
  return Constraint{std::move(diff), std::move(bound)};
}

std::vector<Constraint> le(const LinearExpression& lhs, const LinearExpression& rhs) {
  return {make_le(lhs, rhs)};
}

std::vector<Constraint> ge(const LinearExpression& lhs, const LinearExpression& rhs) {
  return {make_le(rhs, lhs)};
}

std::vector<Constraint> eq(const LinearExpression& lhs, const LinearExpression& rhs) {
  return {make_le(lhs, rhs), make_le(rhs, lhs)};
}

bool holds(const Constraint& c, const Valuation& v) { return eval(c.expr, v) <= c.bound; }

// GuardedPredicate

void GuardedPredicate::check_declared(const Constraint& c) const {
  if (!vars_) throw UsageError("predicate without a variable table");
  for (const auto& [id, k] : c.expr.terms()) {
    if (id >= vars_->size()) throw UsageError("constraint references an undeclared variable");
  }
}

void GuardedPredicate::add(const Constraint& c) {
  check_declared(c);
  plain_.push_back(c);
}

void GuardedPredicate::add(const std::vector<Constraint>& cs) {
  for (const auto& c : cs) add(c);
}

void GuardedPredicate::add_guarded(VarId guard, bool positive, const Constraint& c) {
  check_declared(c);
  if (guard >= vars_->size() || (*vars_)[guard].sort != Sort::boolean) {
    throw UsageError("guard must be a declared boolean variable");
  }
  guarded_.push_back({guard, positive, c});
}

void GuardedPredicate::add_guarded(VarId guard, bool positive, const std::vector<Constraint>& cs) {
  for (const auto& c : cs) add_guarded(guard, positive, c);
}

void check_valuation(const VarTable& vars, const Valuation& v) {
  for (const auto& [id, value] : v) {
    if (id >= vars.size()) throw UsageError("valuation has an undeclared variable");
    const VarDecl& d = vars[id];
    if (value < d.lower || value > d.upper) {
      throw UsageError("value of '" + d.name + "' outside its declared bounds");
    }
    if (d.sort != Sort::real && !is_integral(value)) {
      throw UsageError("non-integral value for '" + d.name + "'");
    }
  }
}

bool holds(const GuardedPredicate& p, const Valuation& v) {
  for (const auto& c : p.plain()) {
    if (!holds(c, v)) return false;
  }
  for (const auto& g : p.guarded()) {
    const auto it = v.find(g.guard);
    if (it == v.end()) throw UsageError("valuation misses guard '" + p.vars()[g.guard].name + "'");
    const bool on = (it->second != 0) == g.positive;
    if (on && !holds(g.body, v)) return false;
  }
  return true;
}

std::vector<Constraint> to_conjunctive(const GuardedPredicate& p) {
  const Box box = declared_box(p.vars());
  std::vector<Constraint> out = p.plain();
  for (const auto& g : p.guarded()) {
    Rational big_m = range(g.body.expr, box).hi - g.body.bound;
    if (big_m < 0) big_m = 0;
    Constraint c = g.body;
    if (g.positive) {
      // L <= b + M (1 - y)
      c.expr.add_term(g.guard, big_m);
      c.bound += big_m;
    } else {
      // L <= b + M y
      c.expr.add_term(g.guard, -big_m);
    }
    out.push_back(std::move(c));
  }
  return out;
}

bool propagate_bounds(std::span<const Constraint> cs, const VarTable& vars, Box& box,
                      int max_passes) {
  Rational minsum;
  Rational contribution;
  Rational limit;
  for (int pass = 0; pass < max_passes; ++pass) {
    bool changed = false;
    for (const Constraint& c : cs) {
      minsum = 0;
      for (const auto& [id, k] : c.expr.terms()) {
        const Interval& iv = box[id];
        minsum += k > 0 ? Rational(k * iv.lo) : Rational(k * iv.hi);
      }
      if (minsum > c.bound) return false;
      for (const auto& [id, k] : c.expr.terms()) {
        Interval& iv = box[id];
        contribution = k > 0 ? Rational(k * iv.lo) : Rational(k * iv.hi);
        limit = (c.bound - (minsum - contribution)) / k;
        const bool is_int = vars[id].sort != Sort::real;
        if (k > 0) {
          if (is_int) limit = Rational(floor_integer(limit));
          if (limit < iv.hi) {
            iv.hi = limit;
            changed = true;
          }
        } else {
          if (is_int) limit = Rational(ceil_integer(limit));
          if (limit > iv.lo) {
            iv.lo = limit;
            changed = true;
          }
        }
        if (iv.lo > iv.hi) return false;
        // minsum must follow the tightened bound for the remaining terms
        const Rational updated = k > 0 ? Rational(k * iv.lo) : Rational(k * iv.hi);
        minsum += updated - contribution;
      }
    }
    if (!changed) break;
  }
  return true;
}

// AssignmentEnumerator

AssignmentEnumerator::AssignmentEnumerator(const GuardedPredicate& p) : p_(&p) {
  const VarTable& vars = p.vars();
  position_.assign(vars.size(), -1);
  for (VarId id = 0; id < vars.size(); ++id) {
    if (vars[id].sort != Sort::real) {
      position_[id] = static_cast<int>(integral_.size());
      integral_.push_back(id);
    }
  }
}

void AssignmentEnumerator::active_constraints(std::size_t depth, const std::vector<Rational>& values,
                                              std::vector<Constraint>& out) const {
  out.clear();
  out.insert(out.end(), p_->plain().begin(), p_->plain().end());
  for (const auto& g : p_->guarded()) {
    const int pos = position_[g.guard];
    if (pos < 0 || static_cast<std::size_t>(pos) >= depth) continue;
    const bool on = (values[pos] != 0) == g.positive;
    if (on) out.push_back(g.body);
  }
}

bool AssignmentEnumerator::dfs(std::size_t depth, Box& box, std::vector<Rational>& values,
                               const Visitor& visit, std::size_t& count, std::size_t cap) const {
  std::vector<Constraint> active;
  active_constraints(depth, values, active);
  if (!propagate_bounds(active, p_->vars(), box)) return false;
  if (depth == integral_.size()) {
    if (++count > cap) {
      throw ResourceError("guard enumeration exceeded the cap of " + std::to_string(cap) +
                          " assignments");
    }
    visit(values, box);
    return true;
  }
  const VarId id = integral_[depth];
  const Integer lo = ceil_integer(box[id].lo);
  const Integer hi = floor_integer(box[id].hi);
  bool any = false;
  for (Integer v = lo; v <= hi; ++v) {
    Box child = box;
    child[id] = {Rational(v), Rational(v)};
    values[depth] = Rational(v);
    any = dfs(depth + 1, child, values, visit, count, cap) || any;
  }
  return any;
}

std::size_t AssignmentEnumerator::run(Box box, const Visitor& visit, std::size_t cap) const {
  std::vector<Rational> values(integral_.size());
  std::size_t count = 0;
  dfs(0, box, values, visit, count, cap);
  return count;
}

std::vector<Constraint> AssignmentEnumerator::residual(std::span<const Rational> values) const {
  std::vector<Constraint> active;
  std::vector<Rational> vals(values.begin(), values.end());
  active_constraints(integral_.size(), vals, active);
  std::vector<Constraint> out;
  out.reserve(active.size());
  for (auto& c : active) {
    Constraint r{LinearExpression(), c.bound};
    for (const auto& [id, k] : c.expr.terms()) {
      const int pos = position_[id];
      if (pos >= 0) {
        r.bound -= k * values[pos];
      } else {
        r.expr.add_term(id, k);
      }
    }
    if (r.expr.is_constant() && r.bound >= 0) continue;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<GuardEmission> enum_guards(const GuardedPredicate& p, std::size_t cap) {
  AssignmentEnumerator en(p);
  std::vector<GuardEmission> out;
  en.run(declared_box(p.vars()),
         [&](std::span<const Rational> values, const Box&) {
           GuardEmission e;
           for (std::size_t i = 0; i < values.size(); ++i) {
             e.assignment.emplace_back(en.integral_vars()[i], values[i]);
           }
           e.residual = en.residual(values);
           out.push_back(std::move(e));
         },
         cap);
  return out;
}

std::string to_string(const LinearExpression& e, const VarTable& vars) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [id, k] : e.terms()) {
    if (!first) os << (k < 0 ? " - " : " + ");
    else if (k < 0) os << "-";
    const Rational mag = abs(k);
    if (mag != 1) os << mag << "*";
    os << vars[id].name;
    first = false;
  }
  if (first) {
    os << e.constant();
  } else if (e.constant() != 0) {
    os << (e.constant() < 0 ? " - " : " + ") << abs(e.constant());
  }
  return os.str();
}

std::string to_string(const Constraint& c, const VarTable& vars) {
  return to_string(c.expr, vars) + " <= " + c.bound.str();
}

}  // namespace quantsyn
