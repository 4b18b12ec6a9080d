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

#include "quantsyn/dtlhs.hpp"

#include "quantsyn/lp.hpp"

#include <algorithm>
#include <chrono>

namespace quantsyn {

namespace {

unsigned bits_for(std::uint64_t count) {
  unsigned b = 1;
  while ((std::uint64_t{1} << b) < count) ++b;
  return b;
}

Constraint folded(LinearExpression e, Rational bound) {
  bound -= e.constant();
  e.set_constant(Rational(0));
  return {std::move(e), std::move(bound)};
}

Interval intersect(const Interval& a, const Interval& b) {
  return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

/// Disjunction over many terms, combined pairwise so the intermediate
/// diagrams stay balanced.
class BddAccumulator {
 public:
  explicit BddAccumulator(BddManager& mgr) : mgr_(mgr) {}
  void add(Bdd f) {
    unsigned level = 0;
    while (!stack_.empty() && stack_.back().second == level) {
      f = stack_.back().first | f;
      stack_.pop_back();
      ++level;
    }
    stack_.emplace_back(std::move(f), level);
  }
  Bdd result() {
    Bdd out = mgr_.bdd_false();
    while (!stack_.empty()) {
      out = stack_.back().first | out;
      stack_.pop_back();
    }
    return out;
  }

 private:
  BddManager& mgr_;
  std::vector<std::pair<Bdd, unsigned>> stack_;
};

bool advance(Cell& cell, const std::vector<std::uint64_t>& counts) {
  for (std::size_t i = cell.size(); i-- > 0;) {
    if (++cell[i] < counts[i]) return true;
    cell[i] = 0;
  }
  return false;
}

}  // namespace

// Dtlhs

Dtlhs::Dtlhs(std::shared_ptr<const VarTable> vars, std::vector<VarId> x, std::vector<VarId> x_next,
             std::vector<VarId> u, std::vector<VarId> y, GuardedPredicate n)
    : vars_(std::move(vars)),
      x_(std::move(x)),
      x_next_(std::move(x_next)),
      u_(std::move(u)),
      y_(std::move(y)),
      n_(std::move(n)) {
  if (x_.size() != x_next_.size()) throw UsageError("every state variable needs a next-state copy");
  if (n_.var_table() != vars_) throw UsageError("transition predicate uses a different variable table");
  std::vector<int> role(vars_->size(), 0);
  auto mark = [&](const std::vector<VarId>& ids) {
    for (VarId id : ids) {
      if (id >= role.size()) throw UsageError("unknown variable in Dtlhs");
      if (role[id]++) throw UsageError("variable lists of a Dtlhs must be disjoint");
    }
  };
  mark(x_);
  mark(x_next_);
  mark(u_);
  mark(y_);
}

// DtlhsBuilder

VarId DtlhsBuilder::declare(VarDecl decl) {
  if (names_.count(decl.name)) throw UsageError("duplicate variable '" + decl.name + "'");
  VarTable probe;
  probe.add(decl);  // validates bounds and sort
  const VarId id = static_cast<VarId>(decls_.size());
  names_.emplace(decl.name, id);
  decls_.push_back(std::move(decl));
  return id;
}

VarId DtlhsBuilder::state(const std::string& name, const Rational& lo, const Rational& hi) {
  const VarId id = declare({name, Sort::real, lo, hi});
  const VarId nid = declare({name + "'", Sort::real, lo, hi});
  x_.push_back(id);
  x_next_.push_back(nid);
  return id;
}

VarId DtlhsBuilder::input(const std::string& name, Sort sort, const Rational& lo, const Rational& hi) {
  const VarId id = declare({name, sort, lo, hi});
  u_.push_back(id);
  return id;
}

VarId DtlhsBuilder::aux(const std::string& name, Sort sort, const Rational& lo, const Rational& hi) {
  const VarId id = declare({name, sort, lo, hi});
  y_.push_back(id);
  return id;
}

VarId DtlhsBuilder::next(VarId state_var) const {
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (x_[i] == state_var) return x_next_[i];
  }
  throw UsageError("not a state variable");
}

std::optional<VarId> DtlhsBuilder::find(const std::string& name) const {
  const auto it = names_.find(name);
  if (it == names_.end()) return std::nullopt;
  return it->second;
}

LinearExpression DtlhsBuilder::var(const std::string& name) const {
  const auto id = find(name);
  if (!id) throw UsageError("unknown variable '" + name + "'");
  return LinearExpression::variable(*id);
}

void DtlhsBuilder::push(std::optional<VarId> guard, bool positive, std::vector<Constraint> body,
                        bool equality, LinearExpression difference) {
  auto check = [&](const LinearExpression& e) {
    for (const auto& [id, k] : e.terms()) {
      if (id >= decls_.size()) throw UsageError("constraint refers to an undeclared variable");
    }
  };
  for (const auto& c : body) check(c.expr);
  if (guard && (*guard >= decls_.size() || decls_[*guard].sort != Sort::boolean)) {
    throw UsageError("guard must be a boolean variable");
  }
  pending_.push_back({guard, positive, std::move(body), equality, std::move(difference)});
}

void DtlhsBuilder::le(const LinearExpression& lhs, const LinearExpression& rhs) {
  push(std::nullopt, true, quantsyn::le(lhs, rhs), false, {});
}
void DtlhsBuilder::ge(const LinearExpression& lhs, const LinearExpression& rhs) {
  push(std::nullopt, true, quantsyn::ge(lhs, rhs), false, {});
}
void DtlhsBuilder::eq(const LinearExpression& lhs, const LinearExpression& rhs) {
  push(std::nullopt, true, quantsyn::eq(lhs, rhs), true, lhs - rhs);
}
void DtlhsBuilder::le(VarId guard, bool positive, const LinearExpression& lhs, const LinearExpression& rhs) {
  push(guard, positive, quantsyn::le(lhs, rhs), false, {});
}
void DtlhsBuilder::ge(VarId guard, bool positive, const LinearExpression& lhs, const LinearExpression& rhs) {
  push(guard, positive, quantsyn::ge(lhs, rhs), false, {});
}
void DtlhsBuilder::eq(VarId guard, bool positive, const LinearExpression& lhs, const LinearExpression& rhs) {
  push(guard, positive, quantsyn::eq(lhs, rhs), true, lhs - rhs);
}

Dtlhs DtlhsBuilder::build() const {
  std::vector<VarDecl> decls = decls_;
  Box box;
  for (const auto& d : decls) box.push_back({d.lower, d.upper});
  std::vector<char> is_next(decls.size(), 0);
  for (VarId id : x_next_) is_next[id] = 1;
  for (std::size_t i = 0; i < x_.size(); ++i) {
    const VarId nid = x_next_[i];
    Interval hull = box[x_[i]];
    bool defined = false;
    for (const auto& p : pending_) {
      if (!p.equality) continue;
      const Rational k = p.difference.coefficient(nid);
      if (k == 0) continue;
      LinearExpression rest = p.difference;
      rest.add_term(nid, -k);
      bool other_next = false;
      for (const auto& [id, c] : rest.terms()) other_next = other_next || is_next[id];
      if (other_next) continue;
      // nid = -rest / k
      const Interval r = range(rest * (Rational(-1) / k), box);
      hull.lo = std::min(hull.lo, r.lo);
      hull.hi = std::max(hull.hi, r.hi);
      defined = true;
    }
    if (!defined) {
      throw UsageError("no equality defines the next value of '" + decls[x_[i]].name + "'");
    }
    decls[nid].lower = hull.lo;
    decls[nid].upper = hull.hi;
  }
  auto table = std::make_shared<VarTable>();
  for (const auto& d : decls) table->add(d);
  GuardedPredicate n(table);
  for (const auto& p : pending_) {
    if (p.guard) {
      n.add_guarded(*p.guard, p.positive, p.body);
    } else {
      n.add(p.body);
    }
  }
  return Dtlhs(table, x_, x_next_, u_, y_, std::move(n));
}

// Quantizer

Quantizer Quantizer::uniform(const Interval& admissible, unsigned bits) {
  if (bits == 0 || bits > 30) throw UsageError("quantizer bits must be in 1..30");
  if (!(admissible.lo < admissible.hi)) throw UsageError("quantized interval must have positive width");
  Quantizer q;
  q.admissible = admissible;
  q.origin = admissible.lo;
  q.count = std::uint64_t{1} << bits;
  q.width = (admissible.hi - admissible.lo) / Rational(q.count);
  q.bits = bits;
  return q;
}

Quantizer Quantizer::floor_scaled(const Interval& admissible, const Rational& scale) {
  if (scale <= 0) throw UsageError("quantizer scale must be positive");
  if (!(admissible.lo < admissible.hi)) throw UsageError("quantized interval must have positive width");
  const Integer first = floor_integer(scale * admissible.lo);
  const Rational top = scale * admissible.hi;
  const Integer last = is_integral(top) ? Integer(floor_integer(top) - 1) : floor_integer(top);
  Quantizer q;
  q.admissible = admissible;
  q.origin = Rational(first) / scale;
  q.width = 1 / scale;
  q.first_index = first.convert_to<std::int64_t>();
  q.count = static_cast<std::uint64_t>((last - first + 1).convert_to<std::int64_t>());
  q.bits = bits_for(q.count);
  return q;
}

std::optional<std::uint64_t> Quantizer::code(const Rational& v) const {
  if (!admissible.contains(v)) return std::nullopt;
  const Integer c = floor_integer((v - origin) / width);
  if (c < 0) return 0;
  const auto cc = static_cast<std::uint64_t>(c.convert_to<std::int64_t>());
  return std::min(cc, count - 1);
}

std::optional<std::uint64_t> Quantizer::code(double v) const { return code(from_double(v)); }

Interval Quantizer::cell(std::uint64_t c) const {
  if (c >= count) throw UsageError("cell code out of range");
  const Rational lo = origin + width * Rational(c);
  return intersect({lo, lo + width}, admissible);
}

// Quantization

Quantization::Quantization(const Dtlhs& h, std::vector<Quantizer> state) : state_(std::move(state)) {
  if (state_.size() != h.x().size()) throw UsageError("one quantizer per state variable is required");
  for (std::size_t i = 0; i < state_.size(); ++i) {
    const VarDecl& d = h.vars()[h.x()[i]];
    if (state_[i].admissible.lo < d.lower || state_[i].admissible.hi > d.upper) {
      throw UsageError("admissible interval of '" + d.name + "' exceeds its declared bounds");
    }
  }
  for (VarId u : h.u()) {
    const VarDecl& d = h.vars()[u];
    if (d.sort == Sort::real) throw UsageError("input '" + d.name + "' must be boolean or integer");
    std::vector<Rational> values;
    for (Integer v = ceil_integer(d.lower); v <= floor_integer(d.upper); ++v) values.emplace_back(v);
    std::stable_sort(values.begin(), values.end(), [](const Rational& a, const Rational& b) {
      const Rational aa = abs(a), ab = abs(b);
      if (aa != ab) return aa < ab;
      return a < b;
    });
    input_bits_.push_back(bits_for(values.size()));
    inputs_.push_back(std::move(values));
  }
}

unsigned Quantization::action_bits() const {
  unsigned total = 0;
  for (unsigned b : input_bits_) total += b;
  return std::max(total, 1u);
}

std::uint64_t Quantization::cell_count() const {
  std::uint64_t n = 1;
  for (const auto& q : state_) n *= q.count;
  return n;
}

std::optional<std::vector<Rational>> Quantization::action_values(std::uint64_t code) const {
  if (code >= action_code_count()) return std::nullopt;
  std::vector<Rational> out(inputs_.size());
  for (std::size_t i = inputs_.size(); i-- > 0;) {
    const std::uint64_t field = code & ((std::uint64_t{1} << input_bits_[i]) - 1);
    code >>= input_bits_[i];
    if (field >= inputs_[i].size()) return std::nullopt;
    out[i] = inputs_[i][field];
  }
  if (code != 0) return std::nullopt;
  return out;
}

std::optional<std::uint64_t> Quantization::action_code(const std::vector<Rational>& values) const {
  if (values.size() != inputs_.size()) return std::nullopt;
  std::uint64_t code = 0;
  for (std::size_t i = 0; i < inputs_.size(); ++i) {
    const auto it = std::find(inputs_[i].begin(), inputs_[i].end(), values[i]);
    if (it == inputs_[i].end()) return std::nullopt;
    code = (code << input_bits_[i]) | static_cast<std::uint64_t>(it - inputs_[i].begin());
  }
  return code;
}

std::vector<Interval> Quantization::cell_box(const std::vector<std::uint64_t>& cell) const {
  if (cell.size() != state_.size()) throw UsageError("cell arity does not match the quantization");
  std::vector<Interval> out;
  for (std::size_t i = 0; i < cell.size(); ++i) out.push_back(state_[i].cell(cell[i]));
  return out;
}

std::optional<Quantized> gamma(const Dtlhs& h, const Quantization& q, const Valuation& v) {
  Quantized out;
  for (std::size_t i = 0; i < h.x().size(); ++i) {
    const auto it = v.find(h.x()[i]);
    if (it == v.end()) throw UsageError("valuation misses a state variable");
    const auto c = q.state()[i].code(it->second);
    if (!c) return std::nullopt;
    out.cell.push_back(*c);
  }
  std::vector<Rational> values;
  for (VarId u : h.u()) {
    const auto it = v.find(u);
    if (it == v.end()) throw UsageError("valuation misses an input variable");
    values.push_back(it->second);
  }
  const auto a = q.action_code(values);
  if (!a) return std::nullopt;
  out.action = *a;
  return out;
}

bool transition_check(const Dtlhs& h, const Valuation& x, const Valuation& u, const Valuation& x_next) {
  Box box = declared_box(h.vars());
  auto pin = [&](const std::vector<VarId>& ids, const Valuation& v) {
    for (VarId id : ids) {
      const auto it = v.find(id);
      if (it == v.end()) throw UsageError("transition check misses a variable");
      if (!box[id].contains(it->second)) return false;
      box[id] = {it->second, it->second};
    }
    return true;
  };
  if (!pin(h.x(), x) || !pin(h.u(), u) || !pin(h.x_next(), x_next)) return false;
  AssignmentEnumerator en(h.n());
  bool found = false;
  en.run(box, [&](std::span<const Rational> values, const Box& leaf) {
    if (!found && feasible(en.residual(values), leaf)) found = true;
  });
  return found;
}

bool contains(const Region& r, const Valuation& v) {
  return std::all_of(r.begin(), r.end(), [&](const Constraint& c) { return holds(c, v); });
}

// CodeBox / AbstractImage

bool CodeBox::contains(const Cell& c) const {
  if (c.size() != ranges.size()) return false;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] < ranges[i].first || c[i] > ranges[i].second) return false;
  }
  return true;
}

std::set<Cell> AbstractImage::cells() const {
  std::set<Cell> out;
  for (const auto& b : boxes) {
    Cell c;
    for (const auto& r : b.ranges) c.push_back(r.first);
    if (c.empty()) continue;
    for (;;) {
      out.insert(c);
      std::size_t i = c.size();
      while (i-- > 0) {
        if (c[i] < b.ranges[i].second) {
          ++c[i];
          break;
        }
        c[i] = b.ranges[i].first;
      }
      if (i == static_cast<std::size_t>(-1)) break;
    }
  }
  return out;
}

bool AbstractImage::contains(const Cell& c) const {
  return std::any_of(boxes.begin(), boxes.end(), [&](const CodeBox& b) { return b.contains(c); });
}

// BitLayout

BitLayout BitLayout::create(BddManager& mgr, const std::vector<unsigned>& field_bits,
                            const std::vector<std::string>& names, unsigned action_bits, bool with_sink) {
  if (names.size() != field_bits.size()) throw UsageError("one name per state field is required");
  BitLayout l;
  l.field_bits = field_bits;
  for (std::size_t i = 0; i < field_bits.size(); ++i) {
    l.present.emplace_back();
    l.next.emplace_back();
    for (unsigned b = 0; b < field_bits[i]; ++b) {
      const std::string suffix = "[" + std::to_string(field_bits[i] - 1 - b) + "]";
      l.present.back().push_back(mgr.new_var(names[i] + suffix));
      l.next.back().push_back(mgr.new_var(names[i] + "'" + suffix));
    }
  }
  if (with_sink) {
    l.sink = mgr.new_var("sink");
    l.sink_next = mgr.new_var("sink'");
  }
  for (unsigned b = 0; b < action_bits; ++b) {
    l.action.push_back(mgr.new_var("a[" + std::to_string(action_bits - 1 - b) + "]"));
  }
  return l;
}

unsigned BitLayout::state_bits() const {
  unsigned n = 0;
  for (unsigned b : field_bits) n += b;
  return n;
}

std::vector<unsigned> BitLayout::cell_vars() const {
  std::vector<unsigned> out;
  for (const auto& f : present) out.insert(out.end(), f.begin(), f.end());
  return out;
}

std::vector<unsigned> BitLayout::cell_next_vars() const {
  std::vector<unsigned> out;
  for (const auto& f : next) out.insert(out.end(), f.begin(), f.end());
  return out;
}

std::vector<unsigned> BitLayout::present_vars() const {
  std::vector<unsigned> out = cell_vars();
  if (sink) out.push_back(*sink);
  return out;
}

std::vector<unsigned> BitLayout::next_vars() const {
  std::vector<unsigned> out = cell_next_vars();
  if (sink_next) out.push_back(*sink_next);
  return out;
}

std::vector<std::pair<unsigned, unsigned>> BitLayout::present_to_next() const {
  std::vector<std::pair<unsigned, unsigned>> out;
  const auto p = present_vars();
  const auto n = next_vars();
  for (std::size_t i = 0; i < p.size(); ++i) out.emplace_back(p[i], n[i]);
  return out;
}

std::vector<std::pair<unsigned, unsigned>> BitLayout::next_to_present() const {
  auto out = present_to_next();
  for (auto& [a, b] : out) std::swap(a, b);
  return out;
}

int BitLayout::code_bit(unsigned bdd_var) const {
  unsigned below = state_bits();
  for (std::size_t i = 0; i < present.size(); ++i) {
    below -= field_bits[i];
    for (unsigned b = 0; b < field_bits[i]; ++b) {
      if (present[i][b] == bdd_var) return static_cast<int>(below + field_bits[i] - 1 - b);
    }
  }
  return -1;
}

std::uint64_t BitLayout::encode(const Cell& cell) const {
  if (cell.size() != field_bits.size()) throw UsageError("cell arity does not match the layout");
  std::uint64_t code = 0;
  for (std::size_t i = 0; i < cell.size(); ++i) {
    if (cell[i] >> field_bits[i]) throw UsageError("cell code does not fit its field");
    code = (code << field_bits[i]) | cell[i];
  }
  return code;
}

Cell BitLayout::decode(std::uint64_t code) const {
  Cell cell(field_bits.size());
  for (std::size_t i = field_bits.size(); i-- > 0;) {
    cell[i] = code & ((std::uint64_t{1} << field_bits[i]) - 1);
    code >>= field_bits[i];
  }
  return cell;
}

Bdd BitLayout::state(BddManager& mgr, std::uint64_t code, bool next_copy) const {
  std::vector<unsigned> vars = next_copy ? cell_next_vars() : cell_vars();
  std::vector<bool> bits(vars.size());
  for (std::size_t k = 0; k < vars.size(); ++k) bits[k] = (code >> (vars.size() - 1 - k)) & 1u;
  if (sink) {
    vars.push_back(next_copy ? *sink_next : *sink);
    bits.push_back(false);
  }
  return mgr.minterm(vars, bits);
}

Bdd BitLayout::cell_state(BddManager& mgr, const Cell& cell, bool next_copy) const {
  return state(mgr, encode(cell), next_copy);
}

Bdd BitLayout::action_code(BddManager& mgr, std::uint64_t code) const {
  std::vector<bool> bits(action.size());
  for (std::size_t k = 0; k < action.size(); ++k) bits[k] = (code >> (action.size() - 1 - k)) & 1u;
  return mgr.minterm(action, bits);
}

Bdd BitLayout::sink_state(BddManager& mgr, bool next_copy) const {
  if (!sink) return mgr.bdd_false();
  std::vector<unsigned> vars = next_copy ? cell_next_vars() : cell_vars();
  std::vector<bool> bits(vars.size(), false);
  vars.push_back(next_copy ? *sink_next : *sink);
  bits.push_back(true);
  return mgr.minterm(vars, bits);
}

std::uint64_t AbstractLts::count_states(const Bdd& set) const {
  const Bdd s = set & valid;
  return s.sat_count(layout.present_vars());
}

// Abstractor

namespace {

struct Leaf {
  std::vector<Rational> values;
  Box box;
  std::vector<Constraint> residual;
  std::vector<Constraint> reduced;
  std::vector<std::optional<LinearExpression>> next_def;
};

/// Eliminates the next-state variables and then the real auxiliaries through
/// the equalities of `residual`. Returns false when the system is found
/// inconsistent on the way.
bool reduce(const Dtlhs& h, const std::vector<Constraint>& residual, const Box& box, Leaf& leaf) {
  std::vector<LinearExpression> eqs;
  std::vector<Constraint> ineqs;
  std::vector<char> paired(residual.size(), 0);
  for (std::size_t i = 0; i < residual.size(); ++i) {
    if (paired[i]) continue;
    for (std::size_t j = i + 1; j < residual.size(); ++j) {
      if (paired[j] || residual[j].bound != -residual[i].bound) continue;
      if (residual[j].expr != -residual[i].expr) continue;
      paired[i] = paired[j] = 1;
      eqs.push_back(residual[i].expr + LinearExpression(Rational(-residual[i].bound)));
      break;
    }
    if (!paired[i]) ineqs.push_back(residual[i]);
  }

  std::vector<std::pair<VarId, LinearExpression>> solved;
  bool ok = true;
  auto clean = [&]() {
    std::vector<LinearExpression> keep_eqs;
    for (auto& e : eqs) {
      if (!e.is_constant()) {
        keep_eqs.push_back(std::move(e));
      } else if (e.constant() != 0) {
        ok = false;
      }
    }
    eqs = std::move(keep_eqs);
    std::vector<Constraint> keep;
    for (auto& c : ineqs) {
      Constraint f = folded(std::move(c.expr), std::move(c.bound));
      if (!f.expr.is_constant()) {
        keep.push_back(std::move(f));
      } else if (f.bound < 0) {
        ok = false;
      }
    }
    ineqs = std::move(keep);
  };
  auto eliminate = [&](VarId v) {
    const auto it = std::find_if(eqs.begin(), eqs.end(),
                                 [&](const LinearExpression& e) { return e.coefficient(v) != 0; });
    if (it == eqs.end()) return;
    LinearExpression def = *it;
    const Rational k = def.coefficient(v);
    def.add_term(v, -k);
    def *= Rational(-1) / k;
    eqs.erase(it);
    for (auto& e : eqs) e = e.substitute(v, def);
    for (auto& c : ineqs) c.expr = c.expr.substitute(v, def);
    for (auto& [id, d] : solved) d = d.substitute(v, def);
    ineqs.push_back(folded(def, box[v].hi));
    ineqs.push_back(folded(-def, -box[v].lo));
    solved.emplace_back(v, std::move(def));
    clean();
  };
  clean();
  for (VarId v : h.x_next()) eliminate(v);
  for (VarId v : h.y()) {
    if (h.vars()[v].sort == Sort::real) eliminate(v);
  }
  if (!ok) return false;
  for (auto& e : eqs) {
    Constraint c = folded(e, Rational(0));
    ineqs.push_back(c);
    ineqs.push_back({-c.expr, -c.bound});
  }
  leaf.reduced = std::move(ineqs);
  leaf.next_def.assign(h.x().size(), std::nullopt);
  for (std::size_t i = 0; i < h.x().size(); ++i) {
    for (const auto& [id, d] : solved) {
      if (id == h.x_next()[i]) leaf.next_def[i] = d;
    }
  }
  return true;
}

}  // namespace

struct Abstractor::Impl {
  const Dtlhs& h;
  const Quantization& q;
  AbstractionOptions options;
  AssignmentEnumerator en;
  std::vector<std::vector<Leaf>> leaves;  // per action code
  std::size_t assignments = 0;

  Impl(const Dtlhs& hh, const Quantization& qq, AbstractionOptions opt)
      : h(hh), q(qq), options(opt), en(hh.n()) {
    const std::uint64_t codes = q.action_code_count();
    leaves.resize(codes);
    Box base = declared_box(h.vars());
    for (std::size_t i = 0; i < h.x().size(); ++i) {
      base[h.x()[i]] = intersect(base[h.x()[i]], q.state()[i].admissible);
    }
    for (std::uint64_t a = 0; a < codes; ++a) {
      const auto values = q.action_values(a);
      if (!values) continue;
      Box box = base;
      for (std::size_t j = 0; j < h.u().size(); ++j) box[h.u()[j]] = {(*values)[j], (*values)[j]};
      en.run(
          box,
          [&](std::span<const Rational> vals, const Box& leaf_box) {
            Leaf leaf;
            leaf.values.assign(vals.begin(), vals.end());
            leaf.box = leaf_box;
            leaf.residual = en.residual(vals);
            if (reduce(h, leaf.residual, leaf_box, leaf)) leaves[a].push_back(std::move(leaf));
          },
          options.assignment_cap);
      assignments += leaves[a].size();
    }
  }

  /// Leaf box restricted to the cell, or nullopt when they are disjoint.
  std::optional<Box> restrict(const Leaf& leaf, const std::vector<Interval>& cell_box) const {
    Box b = leaf.box;
    for (std::size_t i = 0; i < h.x().size(); ++i) {
      Interval& iv = b[h.x()[i]];
      iv = intersect(iv, cell_box[i]);
      if (iv.empty()) return std::nullopt;
    }
    return b;
  }

  const std::vector<Leaf>* leaves_for(std::uint64_t action) const {
    if (action >= leaves.size() || !q.action_values(action)) return nullptr;
    return &leaves[action];
  }

  AbstractImage image(const Cell& cell, std::uint64_t action, ImageMethod method) const {
    AbstractImage out;
    const auto* ls = leaves_for(action);
    if (!ls) return out;
    const std::vector<Interval> cb = q.cell_box(cell);
    const std::size_t n = h.x().size();
    std::vector<Interval> next(n);
    for (const Leaf& leaf : *ls) {
      auto b = restrict(leaf, cb);
      if (!b) continue;
      const bool by_interval = method == ImageMethod::interval;
      if (by_interval) {
        if (!propagate_bounds(leaf.reduced, h.vars(), *b)) continue;
        for (std::size_t i = 0; i < n; ++i) {
          next[i] = leaf.next_def[i] ? range(*leaf.next_def[i], *b) : (*b)[h.x_next()[i]];
          next[i] = intersect(next[i], leaf.box[h.x_next()[i]]);
        }
      } else {
        bool feasible_leaf = true;
        for (std::size_t i = 0; i < n && feasible_leaf; ++i) {
          const auto e = LinearExpression::variable(h.x_next()[i]);
          const auto lo = optimize(e, leaf.residual, *b, Direction::minimize);
          if (!lo) {
            feasible_leaf = false;
            break;
          }
          const auto hi = optimize(e, leaf.residual, *b, Direction::maximize);
          next[i] = {*lo, *hi};
        }
        if (!feasible_leaf) continue;
      }
      out.blocked = false;
      CodeBox box;
      bool inside_any = true;
      for (std::size_t i = 0; i < n; ++i) {
        const Quantizer& qz = q.state()[i];
        if (next[i].lo < qz.admissible.lo || next[i].hi > qz.admissible.hi) {
          if (!by_interval || may_leave(leaf, *b, i, next[i], qz.admissible)) out.exits = true;
        }
        const Interval clipped = intersect(next[i], qz.admissible);
        if (clipped.empty()) {
          inside_any = false;
          continue;
        }
        box.ranges.emplace_back(*qz.code(clipped.lo), *qz.code(clipped.hi));
      }
      if (inside_any) add_box(out, std::move(box));
    }
    return out;
  }

  static void add_box(AbstractImage& out, CodeBox box) {
    if (std::find(out.boxes.begin(), out.boxes.end(), box) == out.boxes.end()) {
      out.boxes.push_back(std::move(box));
    }
  }

  /// Narrows `b` to x'_i in `target` and propagates.
  bool narrow_next(const Leaf& leaf, Box& b, std::size_t i, const Interval& target,
                   std::vector<Constraint>& extra) const {
    const VarId v = h.x_next()[i];
    if (leaf.next_def[i]) {
      const LinearExpression& d = *leaf.next_def[i];
      extra.push_back(make_le(d, LinearExpression(target.hi)));
      extra.push_back(make_le(LinearExpression(target.lo), d));
    } else {
      b[v] = intersect(b[v], target);
      if (b[v].empty()) return false;
    }
    return true;
  }

  bool may_leave(const Leaf& leaf, const Box& b, std::size_t i, const Interval& next,
                 const Interval& admissible) const {
    const std::pair<Interval, bool> sides[2] = {{{next.lo, admissible.lo}, next.lo < admissible.lo},
                                                {{admissible.hi, next.hi}, next.hi > admissible.hi}};
    for (const auto& [side, present] : sides) {
      if (!present) continue;
      Box nb = b;
      std::vector<Constraint> cs = leaf.reduced;
      if (narrow_next(leaf, nb, i, side, cs) && propagate_bounds(cs, h.vars(), nb)) return true;
    }
    return false;
  }

  bool drop_self_loop(const Cell& cell, std::uint64_t action, SelfLoopMode mode) const {
    if (mode == SelfLoopMode::keep) return false;
    const auto* ls = leaves_for(action);
    if (!ls) return true;
    const std::vector<Interval> cb = q.cell_box(cell);
    const std::size_t n = h.x().size();
    // certified[2 * i + s]: progress of sign s on variable i holds on every leaf so far.
    std::vector<char> certified(2 * n, 1);
    for (const Leaf& leaf : *ls) {
      auto b = restrict(leaf, cb);
      if (!b) continue;
      if (mode == SelfLoopMode::certificate) {
        std::vector<Constraint> cs = leaf.reduced;
        for (std::size_t i = 0; i < n; ++i) {
          if (leaf.next_def[i]) {
            cs.push_back(folded(*leaf.next_def[i], cb[i].hi));
            cs.push_back(folded(-*leaf.next_def[i], -cb[i].lo));
          } else {
            Interval& iv = (*b)[h.x_next()[i]];
            iv = intersect(iv, cb[i]);
            if (iv.empty()) b.reset();
          }
          if (!b) break;
        }
        if (!b || !propagate_bounds(cs, h.vars(), *b)) continue;
        for (std::size_t i = 0; i < n; ++i) {
          if (!leaf.next_def[i]) {
            certified[2 * i] = certified[2 * i + 1] = 0;
            continue;
          }
          const LinearExpression progress = *leaf.next_def[i] - LinearExpression::variable(h.x()[i]);
          const Interval r = range(progress, *b);
          if (!(r.lo > 0)) certified[2 * i] = 0;
          if (!(r.hi < 0)) certified[2 * i + 1] = 0;
        }
      } else {
        for (std::size_t i = 0; i < n; ++i) {
          Interval& iv = (*b)[h.x_next()[i]];
          iv = intersect(iv, cb[i]);
          if (iv.empty()) b.reset();
          if (!b) break;
        }
        if (!b) continue;
        if (!feasible(leaf.residual, *b)) continue;
        for (std::size_t i = 0; i < n; ++i) {
          const LinearExpression progress =
              LinearExpression::variable(h.x_next()[i]) - LinearExpression::variable(h.x()[i]);
          if (certified[2 * i]) {
            const auto lo = optimize(progress, leaf.residual, *b, Direction::minimize);
            if (!(lo && *lo > 0)) certified[2 * i] = 0;
          }
          if (certified[2 * i + 1]) {
            const auto hi = optimize(progress, leaf.residual, *b, Direction::maximize);
            if (!(hi && *hi < 0)) certified[2 * i + 1] = 0;
          }
        }
      }
      if (std::none_of(certified.begin(), certified.end(), [](char c) { return c != 0; })) return false;
    }
    return true;
  }
};

Abstractor::Abstractor(const Dtlhs& h, const Quantization& q, AbstractionOptions options)
    : impl_(std::make_unique<Impl>(h, q, options)) {}

Abstractor::~Abstractor() = default;

AbstractImage Abstractor::image(const Cell& cell, std::uint64_t action) const {
  return impl_->image(cell, action, impl_->options.image);
}

bool Abstractor::drop_self_loop(const Cell& cell, std::uint64_t action, SelfLoopMode mode) const {
  return impl_->drop_self_loop(cell, action, mode);
}

std::size_t Abstractor::assignment_count() const { return impl_->assignments; }

std::vector<AffineMode> Abstractor::modes(std::uint64_t action) const {
  std::vector<AffineMode> out;
  const auto* ls = impl_->leaves_for(action);
  if (!ls) return out;
  for (const Leaf& leaf : *ls) out.push_back({leaf.values, leaf.reduced, leaf.next_def});
  return out;
}

AbstractImage abstract_image(const Dtlhs& h, const Quantization& q, const Cell& cell, std::uint64_t action,
                             ImageMethod method) {
  AbstractionOptions opt;
  opt.image = method;
  Abstractor a(h, q, opt);
  return a.image(cell, action);
}

bool self_loop_filter(const Dtlhs& h, const Quantization& q, const Cell& cell, std::uint64_t action,
                      bool exact) {
  Abstractor a(h, q);
  return a.drop_self_loop(cell, action, exact ? SelfLoopMode::exact_certificate : SelfLoopMode::certificate);
}

CellRegions abstract_regions(const Quantization& q, const std::vector<VarId>& x, const Region& init,
                             const Region& goal) {
  if (x.size() != q.state().size()) throw UsageError("one state variable per quantizer is required");
  VarId top = 0;
  for (VarId id : x) top = std::max(top, id);
  auto check_region = [&](const Region& r) {
    for (const auto& c : r) {
      for (const auto& [id, k] : c.expr.terms()) {
        if (std::find(x.begin(), x.end(), id) == x.end()) {
          throw UsageError("regions may only constrain state variables");
        }
      }
    }
  };
  check_region(init);
  check_region(goal);
  const bool init_separable = std::all_of(init.begin(), init.end(),
                                          [](const Constraint& c) { return c.expr.terms().size() <= 1; });
  std::vector<std::uint64_t> counts;
  for (const auto& qz : q.state()) counts.push_back(qz.count);
  CellRegions out;
  Box box(top + 1, Interval{Rational(0), Rational(0)});
  Cell cell(x.size(), 0);
  do {
    const auto cb = q.cell_box(cell);
    for (std::size_t i = 0; i < x.size(); ++i) box[x[i]] = cb[i];
    const bool in_goal = std::all_of(goal.begin(), goal.end(),
                                     [&](const Constraint& c) { return range(c.expr, box).hi <= c.bound; });
    if (in_goal) out.goal.push_back(cell);
    bool meets_init;
    if (init_separable) {
      meets_init = std::all_of(init.begin(), init.end(),
                               [&](const Constraint& c) { return range(c.expr, box).lo <= c.bound; });
    } else {
      meets_init = feasible(init, box);
    }
    if (meets_init) out.init.push_back(cell);
  } while (advance(cell, counts));
  return out;
}

AbstractLts build_abstraction(const Dtlhs& h, const Quantization& q, const Region& init, const Region& goal,
                              const AbstractionOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  if (q.cell_count() > options.cell_cap) {
    throw ResourceError("abstraction needs " + std::to_string(q.cell_count()) + " cells, above the cap of " +
                        std::to_string(options.cell_cap));
  }
  AbstractLts out;
  out.mgr = std::make_shared<BddManager>();
  BddManager& mgr = *out.mgr;
  std::vector<unsigned> field_bits;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < q.state().size(); ++i) {
    field_bits.push_back(q.state()[i].bits);
    names.push_back(h.vars()[h.x()[i]].name);
    out.cell_counts.push_back(q.state()[i].count);
  }
  out.layout = BitLayout::create(mgr, field_bits, names, q.action_bits(), true);
  const BitLayout& layout = out.layout;
  for (std::uint64_t a = 0; a < q.action_code_count(); ++a) {
    if (q.action_values(a)) out.action_count = a + 1;
  }

  // Valid encodings: every field below its cell count, sink bit clear.
  Bdd valid = !mgr.var(*layout.sink);
  for (std::size_t i = 0; i < field_bits.size(); ++i) {
    valid &= mgr.range(layout.present[i], 0, out.cell_counts[i] - 1);
  }
  out.valid = valid;

  std::vector<Bdd> next_range_cache;
  Abstractor abs(h, q, options);
  out.stats.assignments = abs.assignment_count();
  BddAccumulator trans(mgr);
  const Bdd not_sink_next = !mgr.var(*layout.sink_next);
  const Bdd sink_next = layout.sink_state(mgr, true);
  Cell cell(field_bits.size(), 0);
  do {
    const Bdd present = layout.cell_state(mgr, cell);
    BddAccumulator per_cell(mgr);
    for (std::uint64_t a = 0; a < q.action_code_count(); ++a) {
      if (!q.action_values(a)) continue;
      ++out.stats.pairs;
      const AbstractImage img = abs.image(cell, a);
      if (img.blocked) {
        ++out.stats.blocked_pairs;
        continue;
      }
      Bdd succ = mgr.bdd_false();
      for (const auto& box : img.boxes) {
        Bdd b = not_sink_next;
        for (std::size_t i = 0; i < box.ranges.size(); ++i) {
          b &= mgr.range(layout.next[i], box.ranges[i].first, box.ranges[i].second);
        }
        succ |= b;
      }
      if (img.contains(cell)) {
        if (abs.drop_self_loop(cell, a, options.self_loops)) {
          succ &= !layout.cell_state(mgr, cell, true);
          ++out.stats.dropped_self_loops;
        } else {
          ++out.stats.kept_self_loops;
        }
      }
      if (img.exits) {
        succ |= sink_next;
        ++out.stats.exit_pairs;
      }
      if (succ.is_false()) continue;
      per_cell.add(layout.action_code(mgr, a) & succ);
    }
    trans.add(present & per_cell.result());
  } while (advance(cell, out.cell_counts));
  out.trans = trans.result();

  const CellRegions regions = abstract_regions(q, h.x(), init, goal);
  BddAccumulator init_acc(mgr);
  for (const auto& c : regions.init) init_acc.add(layout.cell_state(mgr, c));
  out.init = init_acc.result();
  BddAccumulator goal_acc(mgr);
  for (const auto& c : regions.goal) goal_acc.add(layout.cell_state(mgr, c));
  out.goal = goal_acc.result();
  out.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace quantsyn
