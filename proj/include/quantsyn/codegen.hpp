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
/// From a controller relation to control software: a deterministic control
/// law, its C rendering as a goto program over the shared decision diagram,
/// and an interpreter for that program.
///
/// The emitted ctrlLaw takes the state code as a bit array, least significant
/// bit first (x[0]). Each diagram node becomes one labeled if/else block.
/// The roots f_1..f_k are visited in turn; reaching the 1 terminal of root i
/// sets action bit i of the accumulator.

#include "quantsyn/dtlhs.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace quantsyn {

struct ControlLaw {
  std::shared_ptr<BddManager> mgr;
  BitLayout layout;
  /// One function per action bit, most significant first, over cell bits.
  std::vector<Bdd> bits;
  /// dom(K) over cell bits.
  Bdd region;
};

/// Picks, in every state of dom(K), the enabled action with the smallest code.
/// Outside dom(K) each bit is completed by whichever of restrict(f, region),
/// f & region and f | !region has the fewest nodes (first one on ties).
/// Throws UsageError when K is empty.
ControlLaw extract_law(const AbstractLts& abs, const Bdd& controller);

/// True iff K(x, F(x)) holds on the whole region.
bool law_is_valid(const AbstractLts& abs, const Bdd& controller, const ControlLaw& law);

/// Action code chosen by the law at a state code, or nullopt outside the region.
std::optional<std::uint64_t> evaluate_law(const ControlLaw& law, std::uint64_t state_code);

struct BranchTarget {
  enum class Kind { node, zero, one };
  Kind kind = Kind::zero;
  std::size_t node = 0;  // index into BranchProgram blocks, for Kind::node

  bool operator==(const BranchTarget&) const = default;
};

struct BranchBlock {
  std::size_t label = 0;  // L_v<label>
  unsigned bit = 0;       // tested position of the state code
  BranchTarget low;
  BranchTarget high;
};

struct BranchProgram {
  unsigned state_bits = 0;
  std::vector<BranchTarget> roots;  // one per action bit, most significant first
  std::vector<BranchBlock> blocks;
  BranchTarget region_root;
  std::vector<BranchBlock> region_blocks;
};

struct GeneratedSource {
  std::string text;
  std::size_t block_count = 0;  // law blocks, shared across action bits
  std::size_t height = 0;       // longest decision path of the law
  std::size_t region_blocks = 0;
  std::size_t region_height = 0;
};

struct Emission {
  GeneratedSource source;
  BranchProgram program;
};

Emission emit(const ControlLaw& law);

/// Runs the program on a state code. nullopt means ctrlRegion returned 0.
std::optional<std::uint64_t> interpret(const BranchProgram& prog, std::uint64_t state_code);

struct Footprint {
  std::size_t bytes = 0;
  std::size_t block_count = 0;
  std::size_t height = 0;
};

Footprint footprint(const GeneratedSource& src);

/// "<model>_<algo>_<b>.c"
std::string source_file_name(const std::string& model, const std::string& algo, unsigned bits);

}  // namespace quantsyn
