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

#include "quantsyn/lts.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace quantsyn {

ExplicitLts::ExplicitLts(std::size_t states, std::size_t actions)
    : states_(states), actions_(actions), succ_(states * actions) {}

void ExplicitLts::check(unsigned s, unsigned a) const {
  if (s >= states_ || a >= actions_) throw UsageError("state or action index out of range");
}

void ExplicitLts::add(unsigned s, unsigned a, unsigned t) {
  check(s, a);
  if (t >= states_) throw UsageError("target state out of range");
  auto& v = succ_[s * actions_ + a];
  auto it = std::lower_bound(v.begin(), v.end(), t);
  if (it == v.end() || *it != t) v.insert(it, t);
}

bool ExplicitLts::has(unsigned s, unsigned a, unsigned t) const {
  check(s, a);
  const auto& v = succ_[s * actions_ + a];
  return std::binary_search(v.begin(), v.end(), t);
}

std::vector<unsigned> ExplicitLts::adm(unsigned s) const {
  check(s, 0);
  std::vector<unsigned> out;
  for (unsigned a = 0; a < actions_; ++a) {
    if (!succ_[s * actions_ + a].empty()) out.push_back(a);
  }
  return out;
}

const std::vector<unsigned>& ExplicitLts::img(unsigned s, unsigned a) const {
  check(s, a);
  return succ_[s * actions_ + a];
}

std::vector<Transition> ExplicitLts::transitions() const {
  std::vector<Transition> out;
  for (unsigned s = 0; s < states_; ++s) {
    for (unsigned a = 0; a < actions_; ++a) {
      for (unsigned t : succ_[s * actions_ + a]) out.push_back({s, a, t});
    }
  }
  return out;
}

std::size_t ExplicitLts::transition_count() const {
  std::size_t n = 0;
  for (const auto& v : succ_) n += v.size();
  return n;
}

StateSet domain(const ControllerRel& k) {
  StateSet out;
  for (const auto& [s, a] : k) out.insert(s);
  return out;
}

bool is_controller(const ExplicitLts& lts, const ControllerRel& k) {
  for (const auto& [s, a] : k) {
    if (s >= lts.state_count() || a >= lts.action_count()) return false;
    if (lts.img(s, a).empty()) return false;
  }
  return true;
}

bool is_control_law(const ControllerRel& k) {
  std::optional<unsigned> last;
  for (const auto& [s, a] : k) {
    if (last && *last == s) return false;
    last = s;
  }
  return true;
}

ExplicitLts closed_loop(const ExplicitLts& lts, const ControllerRel& k) {
  if (!is_controller(lts, k)) throw UsageError("controller enables a pair without successors");
  ExplicitLts out(lts.state_count(), lts.action_count());
  for (const auto& [s, a] : k) {
    for (unsigned t : lts.img(s, a)) out.add(s, a, t);
  }
  return out;
}

DistanceMap worst_case_distance(const ExplicitLts& lts, const StateSet& goal) {
  const std::size_t n = lts.state_count();
  std::vector<char> in_goal(n, 0);
  for (unsigned g : goal) {
    if (g >= n) throw UsageError("goal state out of range");
    in_goal[g] = 1;
  }
  DistanceMap dist(n);
  // Layer k holds the states whose every path reaches the goal within k steps.
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<unsigned> fresh;
    for (unsigned s = 0; s < n; ++s) {
      if (dist[s]) continue;
      bool any = false;
      bool all = true;
      for (unsigned a = 0; a < lts.action_count() && all; ++a) {
        for (unsigned t : lts.img(s, a)) {
          any = true;
          if (!in_goal[t] && !(dist[t] && *dist[t] < k)) {
            all = false;
            break;
          }
        }
      }
      if (any && all) fresh.push_back(s);
    }
    if (fresh.empty()) break;
    for (unsigned s : fresh) dist[s] = k;
  }
  return dist;
}

bool is_solution(const ExplicitLts& lts, const ControllerRel& k, const StateSet& init,
                 const StateSet& goal) {
  if (!is_controller(lts, k)) return false;
  const StateSet dom = domain(k);
  if (!std::includes(dom.begin(), dom.end(), init.begin(), init.end())) return false;
  const DistanceMap j = worst_case_distance(closed_loop(lts, k), goal);
  return std::all_of(dom.begin(), dom.end(), [&](unsigned s) { return j[s].has_value(); });
}

ExplicitSynthesis mgo_oracle(const ExplicitLts& lts, const StateSet& init, const StateSet& goal) {
  const std::size_t n = lts.state_count();
  std::vector<char> d(n, 0);
  for (unsigned g : goal) {
    if (g >= n) throw UsageError("goal state out of range");
    d[g] = 1;
  }
  std::vector<char> controlled(n, 0);
  ExplicitSynthesis out;
  for (;;) {
    ControllerRel f;
    for (unsigned s = 0; s < n; ++s) {
      for (unsigned a = 0; a < lts.action_count(); ++a) {
        const auto& succ = lts.img(s, a);
        if (!succ.empty() && std::all_of(succ.begin(), succ.end(), [&](unsigned t) { return d[t] != 0; })) {
          f.emplace(s, a);
        }
      }
    }
    for (const auto& [s, a] : f) {
      if (!controlled[s]) out.controller.emplace(s, a);
    }
    bool changed = false;
    for (const auto& [s, a] : out.controller) {
      controlled[s] = 1;
      if (!d[s]) {
        d[s] = 1;
        changed = true;
      }
    }
    if (!changed) break;
  }
  out.domain = domain(out.controller);
  out.initial_controllable = std::includes(out.domain.begin(), out.domain.end(), init.begin(), init.end());
  return out;
}

Rational avg_worst_case_path(const ExplicitLts& lts, const ControllerRel& k, const StateSet& goal) {
  const StateSet dom = domain(k);
  if (dom.empty()) throw UsageError("average path over an empty controller domain");
  const DistanceMap j = worst_case_distance(closed_loop(lts, k), goal);
  Integer sum = 0;
  for (unsigned s : dom) {
    if (!j[s]) throw UsageError("controller is not a solution: infinite worst-case distance");
    sum += *j[s];
  }
  return Rational(sum) / Rational(dom.size());
}

LtsFixture parse_lts(std::istream& in) {
  std::string line;
  std::optional<LtsFixture> out;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw UsageError("line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    if (!out) {
      std::string kw_states, kw_actions, kw_goal;
      std::size_t n = 0, m = 0;
      if (!(ls >> kw_states >> n >> kw_actions >> m >> kw_goal) || kw_states != "states" ||
          kw_actions != "actions" || kw_goal != "goal") {
        fail("expected 'states n actions m goal ...'");
      }
      out.emplace();
      out->lts = ExplicitLts(n, m);
      unsigned g;
      while (ls >> g) {
        if (g >= n) fail("goal state out of range");
        out->goal.insert(g);
      }
      if (!ls.eof()) fail("malformed goal list");
      continue;
    }
    unsigned s, a, t;
    if (!(ls >> s >> a >> t)) fail("expected a transition 's a t'");
    std::string rest;
    if (ls >> rest) fail("trailing text after transition");
    if (s >= out->lts.state_count() || t >= out->lts.state_count() || a >= out->lts.action_count()) {
      fail("transition index out of range");
    }
    out->lts.add(s, a, t);
  }
  if (!out) throw UsageError("empty LTS description");
  return *out;
}

LtsFixture parse_lts(const std::string& text) {
  std::istringstream in(text);
  return parse_lts(in);
}

void write_lts(std::ostream& out, const LtsFixture& fixture) {
  out << "states " << fixture.lts.state_count() << " actions " << fixture.lts.action_count() << " goal";
  for (unsigned g : fixture.goal) out << ' ' << g;
  out << '\n';
  for (const auto& t : fixture.lts.transitions()) out << t.source << ' ' << t.action << ' ' << t.target << '\n';
}

LtsFixture random_lts(std::size_t states, std::size_t actions, double density, std::uint64_t seed) {
  if (states == 0 || actions == 0) throw UsageError("random LTS needs states and actions");
  std::mt19937_64 rng(seed);
  // Raw 53-bit draws keep the sequence identical across standard libraries.
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  LtsFixture out;
  out.lts = ExplicitLts(states, actions);
  for (unsigned s = 0; s < states; ++s) {
    for (unsigned a = 0; a < actions; ++a) {
      for (unsigned t = 0; t < states; ++t) {
        if (uniform() < density) out.lts.add(s, a, t);
      }
    }
  }
  for (unsigned s = 0; s < states; ++s) {
    if (uniform() < 0.15) out.goal.insert(s);
  }
  if (out.goal.empty()) out.goal.insert(static_cast<unsigned>(rng() % states));
  return out;
}

LtsFixture example_lts() {
  return parse_lts(
      "states 5 actions 2 goal 0\n"
      "0 0 0\n0 1 0\n"
      "1 0 0\n1 1 2\n"
      "2 0 1\n2 1 3\n"
      "3 0 2\n3 1 1\n"
      "4 0 4\n4 1 0\n");
}

}  // namespace quantsyn
