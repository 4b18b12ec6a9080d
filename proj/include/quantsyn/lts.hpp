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
/// Explicit-state labeled transition systems and the control-problem
/// semantics over them: closed loops, worst-case distances, solutions and a
/// direct transliteration of the most-general-optimal fixpoint. Everything
/// here is meant for small systems and serves as a reference for the
/// symbolic algorithms.

#include "quantsyn/rational.hpp"

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace quantsyn {

using StateSet = std::set<unsigned>;
/// Enabled (state, action) pairs.
using ControllerRel = std::set<std::pair<unsigned, unsigned>>;
/// Per-state distance; nullopt stands for +infinity.
using DistanceMap = std::vector<std::optional<std::size_t>>;

struct Transition {
  unsigned source = 0;
  unsigned action = 0;
  unsigned target = 0;

  auto operator<=>(const Transition&) const = default;
};

class ExplicitLts {
 public:
  ExplicitLts() = default;
  ExplicitLts(std::size_t states, std::size_t actions);

  std::size_t state_count() const { return states_; }
  std::size_t action_count() const { return actions_; }

  /// Adds (s, a, t); duplicates are ignored. Throws UsageError when an index is
  /// out of range.
  void add(unsigned s, unsigned a, unsigned t);
  bool has(unsigned s, unsigned a, unsigned t) const;

  /// Actions with at least one successor, ascending.
  std::vector<unsigned> adm(unsigned s) const;
  /// Successors of s under a, ascending.
  const std::vector<unsigned>& img(unsigned s, unsigned a) const;

  std::vector<Transition> transitions() const;
  std::size_t transition_count() const;

  bool operator==(const ExplicitLts&) const = default;

 private:
  void check(unsigned s, unsigned a) const;

  std::size_t states_ = 0;
  std::size_t actions_ = 0;
  std::vector<std::vector<unsigned>> succ_;  // index s * actions_ + a
};

/// Restricts the transitions to the pairs enabled by `k`. Throws UsageError
/// when `k` enables a pair without successors.
ExplicitLts closed_loop(const ExplicitLts& lts, const ControllerRel& k);

StateSet domain(const ControllerRel& k);

/// True iff every enabled pair is in range and has a successor.
bool is_controller(const ExplicitLts& lts, const ControllerRel& k);

/// True iff at most one action is enabled per state.
bool is_control_law(const ControllerRel& k);

/// Worst-case number of steps (at least one) to reach `goal` from each state.
DistanceMap worst_case_distance(const ExplicitLts& lts, const StateSet& goal);

bool is_solution(const ExplicitLts& lts, const ControllerRel& k, const StateSet& init,
                 const StateSet& goal);

struct ExplicitSynthesis {
  bool initial_controllable = false;
  StateSet domain;
  ControllerRel controller;
};

/// Explicit-state version of the most-general-optimal fixpoint.
ExplicitSynthesis mgo_oracle(const ExplicitLts& lts, const StateSet& init, const StateSet& goal);

/// Mean worst-case distance over dom(k) in the closed loop. Throws UsageError
/// when dom(k) is empty or some distance on it is infinite.
Rational avg_worst_case_path(const ExplicitLts& lts, const ControllerRel& k, const StateSet& goal);

/// Fixture text format: a header "states n actions m goal g1 g2 ..." followed
/// by one "s a t" triple per line. Lines starting with '#' are comments.
struct LtsFixture {
  ExplicitLts lts;
  StateSet goal;
};

LtsFixture parse_lts(std::istream& in);
LtsFixture parse_lts(const std::string& text);
void write_lts(std::ostream& out, const LtsFixture& fixture);

/// Seeded random system: every (s, a) pair gets each successor independently
/// with probability `density`; at least one goal state is always present.
/// The same arguments produce the same system on every platform.
LtsFixture random_lts(std::size_t states, std::size_t actions, double density, std::uint64_t seed);

/// The five-state example system: goal {0}, actions {0, 1}.
LtsFixture example_lts();

}  // namespace quantsyn
