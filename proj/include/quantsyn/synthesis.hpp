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
/// Symbolic controller synthesis over a Bdd-encoded abstraction: the
/// most-general-optimal fixpoint and the small-controller fixpoint, plus the
/// conversions between symbolic and explicit systems used to check them.

#include "quantsyn/dtlhs.hpp"
#include "quantsyn/lts.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace quantsyn {

struct IterationStat {
  std::size_t controller_nodes = 0;
  std::uint64_t domain_states = 0;
  std::size_t inner_iterations = 0;  // small controller only
};

struct SynthesisResult {
  std::shared_ptr<BddManager> mgr;
  bool initial_controllable = false;
  Bdd domain;      // over present state bits
  Bdd controller;  // over present state and action bits
  std::size_t iterations = 0;
  double elapsed = 0;
  std::vector<IterationStat> telemetry;
};

/// Pairs (s, a) with at least one successor and all successors in `target`,
/// which is given over the next-state variables.
Bdd strong_preimage(const Bdd& trans, const Bdd& target_next, std::span<const unsigned> next_vars);

SynthesisResult mgo_ctr(const AbstractLts& abs);

/// `priority` lists every action code below abs.action_count exactly once;
/// an empty list means ascending codes.
SynthesisResult small_ctr(const AbstractLts& abs, const std::vector<std::uint64_t>& priority = {});

/// True iff the controller enables at most one action per state.
bool is_control_law(const AbstractLts& abs, const Bdd& controller);

/// Mean worst-case number of closed-loop steps to the goal over the
/// controller's domain. Throws UsageError when the domain is empty or some
/// distance is unbounded.
Rational avg_worst_case_path(const AbstractLts& abs, const Bdd& controller);

/// Calls `visit` with every satisfying assignment of `f` over `vars`, packed
/// into an integer whose most significant bit is vars.front(). `vars` must be
/// ascending and cover the support of `f`; at most 63 of them.
void for_each_minterm(const Bdd& f, std::span<const unsigned> vars,
                      const std::function<void(std::uint64_t)>& visit);

/// A symbolic copy of an explicit system: one state field of
/// ceil(log2 n) bits, no sink. State i is encoded as the code i.
AbstractLts from_explicit(const ExplicitLts& lts, const StateSet& init, const StateSet& goal);

struct ExplicitProblem {
  ExplicitLts lts;
  StateSet init;
  StateSet goal;
};

/// Explicit view of an abstraction. States are the concatenated cell codes;
/// the sink, when present, is the extra state 2^state_bits.
ExplicitProblem to_explicit(const AbstractLts& abs);

StateSet decode_states(const AbstractLts& abs, const Bdd& set);
ControllerRel decode_controller(const AbstractLts& abs, const Bdd& controller);
Bdd encode_states(const AbstractLts& abs, const StateSet& states);
Bdd encode_controller(const AbstractLts& abs, const ControllerRel& k);

}  // namespace quantsyn
