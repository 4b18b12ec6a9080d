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

#include "quantsyn/codegen.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace quantsyn {

ControlLaw extract_law(const AbstractLts& abs, const Bdd& controller) {
  BddManager& mgr = *abs.mgr;
  const BitLayout& l = abs.layout;
  Bdd k = controller;
  if (l.sink) k = k.cofactor(*l.sink, false);
  if (k.is_false()) throw UsageError("cannot extract a law from an empty controller");
  ControlLaw law;
  law.mgr = abs.mgr;
  law.layout = l;
  law.region = k.exists(l.action);
  for (std::size_t i = 0; i < l.action.size(); ++i) {
    // Earlier bits are already pinned in k, so every action bit is quantified.
    const Bdd a = mgr.var(l.action[i]);
    const Bdd zero_ok = k.and_exists(!a, l.action);
    const Bdd f = law.region & !zero_ok;
    k &= !(a ^ f);
    const Bdd candidates[] = {f.restrict_to(law.region), f, f | !law.region};
    Bdd best = candidates[0];
    for (const Bdd& c : candidates) {
      if (c.node_count() < best.node_count()) best = c;
    }
    law.bits.push_back(best);
  }
  return law;
}

bool law_is_valid(const AbstractLts& abs, const Bdd& controller, const ControlLaw& law) {
  BddManager& mgr = *abs.mgr;
  Bdd chosen = mgr.bdd_true();
  for (std::size_t i = 0; i < law.bits.size(); ++i) {
    if (law.bits[i].exists(abs.layout.action) != law.bits[i]) return false;
    chosen &= !(mgr.var(abs.layout.action[i]) ^ law.bits[i]);
  }
  Bdd k = controller;
  if (abs.layout.sink) k = k.cofactor(*abs.layout.sink, false);
  const Bdd ok = k.and_exists(chosen, abs.layout.action);
  return (law.region & !ok).is_false();
}

namespace {

std::vector<bool> assignment_for(const ControlLaw& law, std::uint64_t state_code) {
  std::vector<bool> assignment(law.mgr->var_count(), false);
  for (unsigned v : law.layout.cell_vars()) {
    assignment[v] = (state_code >> law.layout.code_bit(v)) & 1u;
  }
  return assignment;
}

struct Builder {
  const BitLayout& layout;
  std::map<std::uint32_t, std::size_t> index;
  std::vector<BranchBlock> blocks;

  BranchTarget visit(const Bdd& f) {
    if (f.is_false()) return {BranchTarget::Kind::zero, 0};
    if (f.is_true()) return {BranchTarget::Kind::one, 0};
    const auto it = index.find(f.id());
    if (it != index.end()) return {BranchTarget::Kind::node, it->second};
    const std::size_t at = blocks.size();
    index.emplace(f.id(), at);
    blocks.push_back({at + 1, static_cast<unsigned>(layout.code_bit(f.top_var())), {}, {}});
    const BranchTarget high = visit(f.high());
    const BranchTarget low = visit(f.low());
    blocks[at].high = high;
    blocks[at].low = low;
    return {BranchTarget::Kind::node, at};
  }
};

std::size_t height_of(const std::vector<BranchBlock>& blocks, const BranchTarget& t,
                      std::vector<std::optional<std::size_t>>& memo) {
  if (t.kind != BranchTarget::Kind::node) return 0;
  auto& m = memo[t.node];
  if (!m) {
    const BranchBlock& b = blocks[t.node];
    m = 1 + std::max(height_of(blocks, b.low, memo), height_of(blocks, b.high, memo));
  }
  return *m;
}

std::string label(const BranchTarget& t) { return "L_v" + std::to_string(t.node + 1); }

}  // namespace

std::optional<std::uint64_t> evaluate_law(const ControlLaw& law, std::uint64_t state_code) {
  const auto assignment = assignment_for(law, state_code);
  if (!law.region.evaluate(assignment)) return std::nullopt;
  std::uint64_t action = 0;
  for (const Bdd& f : law.bits) action = (action << 1) | (f.evaluate(assignment) ? 1u : 0u);
  return action;
}

Emission emit(const ControlLaw& law) {
  Emission out;
  BranchProgram& prog = out.program;
  prog.state_bits = law.layout.state_bits();
  Builder law_builder{law.layout, {}, {}};
  for (const Bdd& f : law.bits) prog.roots.push_back(law_builder.visit(f));
  prog.blocks = std::move(law_builder.blocks);
  Builder region_builder{law.layout, {}, {}};
  prog.region_root = region_builder.visit(law.region);
  prog.region_blocks = std::move(region_builder.blocks);

  GeneratedSource& src = out.source;
  src.block_count = prog.blocks.size();
  src.region_blocks = prog.region_blocks.size();
  {
    std::vector<std::optional<std::size_t>> memo(prog.blocks.size());
    for (const auto& r : prog.roots) src.height = std::max(src.height, height_of(prog.blocks, r, memo));
    std::vector<std::optional<std::size_t>> rmemo(prog.region_blocks.size());
    src.region_height = height_of(prog.region_blocks, prog.region_root, rmemo);
  }

  const std::size_t k = prog.roots.size();
  std::ostringstream os;
  os << "/* x[0.." << prog.state_bits - 1 << "]: bits of the quantized state code, x[0] least significant. */\n\n";
  os << "int ctrlLaw(unsigned char *x){\n";
  os << "  int act=0;\n";
  os << "  int k=0;\n";
  os << "L_root:\n";
  os << "  switch (k) {\n";
  auto jump = [](const BranchTarget& t) -> std::string {
    switch (t.kind) {
      case BranchTarget::Kind::zero:
        return "goto L_zero;";
      case BranchTarget::Kind::one:
        return "goto L_one;";
      default:
        return "goto " + label(t) + ";";
    }
  };
  for (std::size_t i = 0; i < k; ++i) os << "    case " << i << ": " << jump(prog.roots[i]) << "\n";
  os << "    default: return act;\n";
  os << "  }\n";
  os << "L_one:\n";
  os << "  act |= 1 << (" << k - 1 << " - k);\n";
  os << "L_zero:\n";
  os << "  k++;\n";
  os << "  goto L_root;\n";
  for (const BranchBlock& b : prog.blocks) {
    os << "L_v" << b.label << ": if (x[" << b.bit << "]==1) " << jump(b.high) << "\n";
    os << "         else " << jump(b.low) << "\n";
  }
  os << "}\n\n";

  os << "int ctrlRegion(unsigned char *x){\n";
  auto region_jump = [](const BranchTarget& t) -> std::string {
    switch (t.kind) {
      case BranchTarget::Kind::zero:
        return "return 0;";
      case BranchTarget::Kind::one:
        return "return 1;";
      default:
        return "goto " + label(t) + ";";
    }
  };
  if (prog.region_root.kind != BranchTarget::Kind::node) {
    os << "  " << region_jump(prog.region_root) << "\n";
  }
  for (const BranchBlock& b : prog.region_blocks) {
    os << "L_v" << b.label << ": if (x[" << b.bit << "]==1) " << region_jump(b.high) << "\n";
    os << "         else " << region_jump(b.low) << "\n";
  }
  os << "}\n";
  src.text = os.str();
  return out;
}

namespace {

bool run(const std::vector<BranchBlock>& blocks, BranchTarget t, std::uint64_t code) {
  std::size_t steps = 0;
  while (t.kind == BranchTarget::Kind::node) {
    if (++steps > blocks.size()) throw UsageError("branch program has a cycle");
    const BranchBlock& b = blocks.at(t.node);
    t = ((code >> b.bit) & 1u) ? b.high : b.low;
  }
  return t.kind == BranchTarget::Kind::one;
}

}  // namespace

std::optional<std::uint64_t> interpret(const BranchProgram& prog, std::uint64_t state_code) {
  if (prog.state_bits < 64 && (state_code >> prog.state_bits) != 0) {
    throw UsageError("state code wider than the program's state bits");
  }
  if (!run(prog.region_blocks, prog.region_root, state_code)) return std::nullopt;
  std::uint64_t action = 0;
  for (const auto& r : prog.roots) action = (action << 1) | (run(prog.blocks, r, state_code) ? 1u : 0u);
  return action;
}

Footprint footprint(const GeneratedSource& src) { return {src.text.size(), src.block_count, src.height}; }

std::string source_file_name(const std::string& model, const std::string& algo, unsigned bits) {
  return model + "_" + algo + "_" + std::to_string(bits) + ".c";
}

}  // namespace quantsyn
