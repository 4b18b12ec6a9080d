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
/// Exact linear feasibility and optimization over boxed variables, by a
/// two-phase dense tableau simplex with Bland's rule on rationals.
///
/// All variables are treated as reals. Integral variables must be fixed by
/// the caller (see AssignmentEnumerator) before asking for an exact answer.

#include "quantsyn/predicate.hpp"

#include <optional>
#include <vector>

namespace quantsyn {

enum class Direction { minimize, maximize };

/// True iff some point of `box` satisfies every constraint.
bool feasible(const std::vector<Constraint>& cs, const Box& box);

/// Optimum of `objective` over the polytope, or nullopt when it is empty.
std::optional<Rational> optimize(const LinearExpression& objective, const std::vector<Constraint>& cs,
                                 const Box& box, Direction direction);

}  // namespace quantsyn
