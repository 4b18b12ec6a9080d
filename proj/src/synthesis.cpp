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

#include "quantsyn/synthesis.hpp"

#include <algorithm>
#include <chrono>

namespace quantsyn {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<unsigned> sorted(std::vector<unsigned> v) {
  std::sort(v.begin(), v.end());
  return v;
}

struct Vars {
  std::vector<unsigned> present;
  std::vector<unsigned> next;
  std::vector<unsigned> action;
  std::vector<std::pair<unsigned, unsigned>> to_next;
};

Vars vars_of(const AbstractLts& abs) {
  return {abs.layout.present_vars(), abs.layout.next_vars(), abs.layout.action,
          abs.layout.present_to_next()};
}

SynthesisResult finish(const AbstractLts& abs, const Bdd& k, const Vars& v, Clock::time_point start,
                       SynthesisResult r) {
  r.mgr = abs.mgr;
  r.controller = k;
  r.domain = k.exists(v.action);
  r.initial_controllable = abs.init.implies(r.domain);
  r.elapsed = seconds_since(start);
  return r;
}

/// Restriction of `f` to non-sink states, with the sink bit quantified away.
Bdd without_sink(const AbstractLts& abs, const Bdd& f) {
  if (!abs.layout.sink) return f;
  const unsigned sink = *abs.layout.sink;
  return f.cofactor(sink, false);
}

}  // namespace

Bdd strong_preimage(const Bdd& trans, const Bdd& target_next, std::span<const unsigned> next_vars) {
  const Bdd adm = trans.exists(next_vars);
  const Bdd escape = trans.and_exists(!target_next, next_vars);
  return adm & !escape;
}

SynthesisResult mgo_ctr(const AbstractLts& abs) {
  const auto start = Clock::now();
  BddManager& mgr = *abs.mgr;
  const Vars v = vars_of(abs);
  const Bdd adm = abs.trans.exists(v.next);
  Bdd k = mgr.bdd_false();
  Bdd d = abs.goal;
  SynthesisResult r;
  for (;;) {
    ++r.iterations;
    const Bdd escape = abs.trans.and_exists(!d.rename(v.to_next), v.next);
    const Bdd f = adm & !escape;
    k |= f & !k.exists(v.action);
    const Bdd previous = d;
    const Bdd dom = k.exists(v.action);
    d |= dom;
    r.telemetry.push_back({k.node_count(), abs.count_states(dom), 0});
    if (d == previous) break;
  }
  return finish(abs, k, v, start, std::move(r));
}

SynthesisResult small_ctr(const AbstractLts& abs, const std::vector<std::uint64_t>& priority) {
  const auto start = Clock::now();
  BddManager& mgr = *abs.mgr;
  std::vector<std::uint64_t> order = priority;
  if (order.empty()) {
    for (std::uint64_t a = 0; a < abs.action_count; ++a) order.push_back(a);
  }
  {
    std::vector<std::uint64_t> check = order;
    std::sort(check.begin(), check.end());
    for (std::size_t i = 0; i < check.size(); ++i) {
      if (check[i] != i) throw UsageError("priority must list every action code exactly once");
    }
    if (check.size() != abs.action_count) throw UsageError("priority must list every action code exactly once");
  }
  const Vars v = vars_of(abs);
  std::vector<Bdd> action_bdds;
  for (std::uint64_t a : order) action_bdds.push_back(abs.layout.action_code(mgr, a));
  const Bdd adm = abs.trans.exists(v.next);

  Bdd k = mgr.bdd_false();
  Bdd d = mgr.bdd_false();
  SynthesisResult r;
  for (;;) {
    ++r.iterations;
    const Bdd o_next = (d | abs.goal).rename(v.to_next);
    Bdd e = mgr.bdd_false();
    std::size_t inner = 0;
    for (;;) {
      ++inner;
      const Bdd target = e.rename(v.to_next) | o_next;
      const Bdd f = adm & !abs.trans.and_exists(!target, v.next);
      const Bdd previous = e;
      e |= f;
      if (e == previous) break;
    }
    for (const Bdd& a : action_bdds) {
      k |= e & a & !k.exists(v.action);
    }
    const Bdd previous = d;
    const Bdd dom = k.exists(v.action);
    d |= dom;
    r.telemetry.push_back({k.node_count(), abs.count_states(dom), inner});
    if (d == previous) break;
  }
  return finish(abs, k, v, start, std::move(r));
}

bool is_control_law(const AbstractLts& abs, const Bdd& controller) {
  BddManager& mgr = *abs.mgr;
  const std::size_t codes = std::size_t{1} << abs.layout.action.size();
  std::vector<Bdd> per_action;
  for (std::uint64_t a = 0; a < codes; ++a) {
    per_action.push_back((controller & abs.layout.action_code(mgr, a)).exists(abs.layout.action));
  }
  Bdd seen = mgr.bdd_false();
  for (const Bdd& s : per_action) {
    if (!(seen & s).is_false()) return false;
    seen |= s;
  }
  return true;
}

Rational avg_worst_case_path(const AbstractLts& abs, const Bdd& controller) {
  const Vars v = vars_of(abs);
  BddManager& mgr = *abs.mgr;
  const Bdd dom = controller.exists(v.action);
  const std::uint64_t size = abs.count_states(dom);
  if (size == 0) throw UsageError("controller has an empty domain");
  const Bdd closed = abs.trans & controller;
  const Bdd goal_next = abs.goal.rename(v.to_next);
  // reached_n: states of the domain whose worst-case distance is at most n.
  Bdd reached = mgr.bdd_false();
  Integer total = 0;
  for (;;) {
    total += size - abs.count_states(reached);
    const Bdd target = goal_next | reached.rename(v.to_next);
    const Bdd escape = closed.and_exists(!target, v.next).exists(v.action);
    const Bdd next = dom & !escape;
    if (next == dom) break;
    if (next == reached) throw UsageError("some worst-case distance is unbounded");
    reached = next;
  }
  return Rational(total) / Rational(size);
}

void for_each_minterm(const Bdd& f, std::span<const unsigned> vars,
                      const std::function<void(std::uint64_t)>& visit) {
  if (vars.size() > 63) throw UsageError("too many variables to enumerate");
  for (std::size_t i = 1; i < vars.size(); ++i) {
    if (vars[i - 1] >= vars[i]) throw UsageError("enumeration variables must be ascending");
  }
  std::function<void(const Bdd&, std::size_t, std::uint64_t)> walk = [&](const Bdd& g, std::size_t i,
                                                                          std::uint64_t code) {
    if (g.is_false()) return;
    if (i == vars.size()) {
      if (!g.is_true()) throw UsageError("enumeration variables miss part of the support");
      visit(code);
      return;
    }
    if (!g.is_constant() && g.top_var() < vars[i]) {
      throw UsageError("enumeration variables miss part of the support");
    }
    if (!g.is_constant() && g.top_var() == vars[i]) {
      walk(g.low(), i + 1, code << 1);
      walk(g.high(), i + 1, (code << 1) | 1u);
    } else {
      walk(g, i + 1, code << 1);
      walk(g, i + 1, (code << 1) | 1u);
    }
  };
  walk(f, 0, 0);
}

AbstractLts from_explicit(const ExplicitLts& lts, const StateSet& init, const StateSet& goal) {
  if (lts.state_count() == 0 || lts.action_count() == 0) {
    throw UsageError("explicit system needs at least one state and one action");
  }
  auto bits = [](std::size_t n) {
    unsigned b = 1;
    while ((std::size_t{1} << b) < n) ++b;
    return b;
  };
  AbstractLts abs;
  abs.mgr = std::make_shared<BddManager>();
  BddManager& mgr = *abs.mgr;
  abs.layout = BitLayout::create(mgr, {bits(lts.state_count())}, {"s"}, bits(lts.action_count()), false);
  abs.cell_counts = {lts.state_count()};
  abs.action_count = lts.action_count();
  abs.valid = mgr.range(abs.layout.present[0], 0, lts.state_count() - 1);
  abs.trans = mgr.bdd_false();
  for (const Transition& t : lts.transitions()) {
    abs.trans |= abs.layout.state(mgr, t.source) & abs.layout.action_code(mgr, t.action) &
                 abs.layout.state(mgr, t.target, true);
  }
  abs.init = encode_states(abs, init);
  abs.goal = encode_states(abs, goal);
  return abs;
}

ExplicitProblem to_explicit(const AbstractLts& abs) {
  const BitLayout& l = abs.layout;
  const unsigned sbits = l.state_bits();
  if (sbits > 20) throw UsageError("abstraction too large for an explicit copy");
  const std::uint64_t sink_index = std::uint64_t{1} << sbits;
  const std::size_t states = static_cast<std::size_t>(sink_index) + (l.sink ? 1 : 0);
  const std::size_t actions = std::size_t{1} << l.action.size();
  ExplicitProblem out{ExplicitLts(states, actions), decode_states(abs, abs.init),
                      decode_states(abs, abs.goal)};

  // Enumerate over every variable in order, then split the packed code.
  std::vector<unsigned> all = l.present_vars();
  const auto nv = l.next_vars();
  all.insert(all.end(), nv.begin(), nv.end());
  all.insert(all.end(), l.action.begin(), l.action.end());
  all = sorted(all);
  auto field = [&](std::uint64_t code, const std::vector<unsigned>& which) {
    std::uint64_t v = 0;
    for (unsigned var : which) {
      const auto pos = static_cast<std::size_t>(std::find(all.begin(), all.end(), var) - all.begin());
      v = (v << 1) | ((code >> (all.size() - 1 - pos)) & 1u);
    }
    return v;
  };
  const auto cells = l.cell_vars();
  const auto cells_next = l.cell_next_vars();
  for_each_minterm(abs.trans, all, [&](std::uint64_t code) {
    auto state_of = [&](const std::vector<unsigned>& cv, const std::optional<unsigned>& sink) {
      if (sink && field(code, {*sink})) return sink_index;
      return field(code, cv);
    };
    const std::uint64_t s = state_of(cells, l.sink);
    const std::uint64_t t = state_of(cells_next, l.sink_next);
    out.lts.add(static_cast<unsigned>(s), static_cast<unsigned>(field(code, l.action)),
                static_cast<unsigned>(t));
  });
  return out;
}

StateSet decode_states(const AbstractLts& abs, const Bdd& set) {
  StateSet out;
  for_each_minterm(without_sink(abs, set), abs.layout.cell_vars(),
                   [&](std::uint64_t code) { out.insert(static_cast<unsigned>(code)); });
  return out;
}

ControllerRel decode_controller(const AbstractLts& abs, const Bdd& controller) {
  const BitLayout& l = abs.layout;
  std::vector<unsigned> vars = l.cell_vars();
  vars.insert(vars.end(), l.action.begin(), l.action.end());
  const std::size_t abits = l.action.size();
  ControllerRel out;
  for_each_minterm(without_sink(abs, controller), vars, [&](std::uint64_t code) {
    out.emplace(static_cast<unsigned>(code >> abits),
                static_cast<unsigned>(code & ((std::uint64_t{1} << abits) - 1)));
  });
  return out;
}

Bdd encode_states(const AbstractLts& abs, const StateSet& states) {
  Bdd out = abs.mgr->bdd_false();
  for (unsigned s : states) out |= abs.layout.state(*abs.mgr, s);
  return out;
}

Bdd encode_controller(const AbstractLts& abs, const ControllerRel& k) {
  Bdd out = abs.mgr->bdd_false();
  for (const auto& [s, a] : k) {
    out |= abs.layout.state(*abs.mgr, s) & abs.layout.action_code(*abs.mgr, a);
  }
  return out;
}

}  // namespace quantsyn
