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
/// Discrete-time linear hybrid systems, their quantization and the finite
/// symbolic abstraction consumed by the synthesis algorithms.
///
/// The abstraction is over-approximating. For every (cell, action) pair the
/// guard assignments consistent with the cell are enumerated; for each one,
/// the real auxiliary variables are eliminated through the equalities of the
/// transition predicate, bounds are propagated, and the resulting next-state
/// box is covered with cells. Successors leaving the admissible region go to
/// an absorbing sink state.

#include "quantsyn/bdd.hpp"
#include "quantsyn/predicate.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace quantsyn {

/// The plant (X, U, Y, N). `x_next[i]` is the primed copy of `x[i]`.
class Dtlhs {
 public:
  Dtlhs() = default;
  Dtlhs(std::shared_ptr<const VarTable> vars, std::vector<VarId> x, std::vector<VarId> x_next,
        std::vector<VarId> u, std::vector<VarId> y, GuardedPredicate n);

  const VarTable& vars() const { return *vars_; }
  const std::shared_ptr<const VarTable>& var_table() const { return vars_; }
  const std::vector<VarId>& x() const { return x_; }
  const std::vector<VarId>& x_next() const { return x_next_; }
  const std::vector<VarId>& u() const { return u_; }
  const std::vector<VarId>& y() const { return y_; }
  const GuardedPredicate& n() const { return n_; }

 private:
  std::shared_ptr<const VarTable> vars_;
  std::vector<VarId> x_, x_next_, u_, y_;
  GuardedPredicate n_;
};

/// Incremental construction of a Dtlhs. Next-state variables are created with
/// the state variables; their declared bounds are derived in build() from the
/// equalities that define them, so the declaration never cuts off a
/// successor.
class DtlhsBuilder {
 public:
  VarId state(const std::string& name, const Rational& lo, const Rational& hi);
  VarId input(const std::string& name, Sort sort, const Rational& lo, const Rational& hi);
  VarId aux(const std::string& name, Sort sort, const Rational& lo, const Rational& hi);

  VarId next(VarId state_var) const;
  std::optional<VarId> find(const std::string& name) const;
  LinearExpression var(const std::string& name) const;

  void le(const LinearExpression& lhs, const LinearExpression& rhs);
  void ge(const LinearExpression& lhs, const LinearExpression& rhs);
  void eq(const LinearExpression& lhs, const LinearExpression& rhs);
  void le(VarId guard, bool positive, const LinearExpression& lhs, const LinearExpression& rhs);
  void ge(VarId guard, bool positive, const LinearExpression& lhs, const LinearExpression& rhs);
  void eq(VarId guard, bool positive, const LinearExpression& lhs, const LinearExpression& rhs);

  /// Throws UsageError when the bounds of a next-state variable cannot be
  /// derived (no equality defines it).
  Dtlhs build() const;

 private:
  struct Pending {
    std::optional<VarId> guard;
    bool positive = true;
    std::vector<Constraint> body;
    bool equality = false;
    LinearExpression difference;  // lhs - rhs, for equalities
  };
  VarId declare(VarDecl decl);
  void push(std::optional<VarId> guard, bool positive, std::vector<Constraint> body, bool equality,
            LinearExpression difference);

  std::vector<VarDecl> decls_;
  std::map<std::string, VarId> names_;
  std::vector<VarId> x_, x_next_, u_, y_;
  std::vector<Pending> pending_;
};

/// A uniform partition of an admissible interval into `count` cells of equal
/// width starting at `origin`. Cells are half open except the last one,
/// which also takes the upper endpoint.
struct Quantizer {
  Interval admissible;
  Rational origin;
  Rational width;
  std::int64_t first_index = 0;  // index reported for code 0
  std::uint64_t count = 0;
  unsigned bits = 0;

  /// 2^bits cells over `admissible`.
  static Quantizer uniform(const Interval& admissible, unsigned bits);
  /// Index floor(scale * v); the top endpoint is clamped into the last cell
  /// when scale * hi is an integer.
  static Quantizer floor_scaled(const Interval& admissible, const Rational& scale);

  /// Code in [0, count), or nullopt outside the admissible interval.
  std::optional<std::uint64_t> code(const Rational& v) const;
  std::optional<std::uint64_t> code(double v) const;
  std::int64_t index(std::uint64_t code) const { return first_index + static_cast<std::int64_t>(code); }
  /// Closed box of the cell, clipped to the admissible interval.
  Interval cell(std::uint64_t code) const;
};

/// (A, Gamma): one quantizer per state variable and the finite value list of
/// every input. Action codes concatenate per-input fields, first input in the
/// most significant position; within a field values are ordered by absolute
/// value, negative first.
class Quantization {
 public:
  Quantization() = default;
  Quantization(const Dtlhs& h, std::vector<Quantizer> state);

  const std::vector<Quantizer>& state() const { return state_; }
  const std::vector<std::vector<Rational>>& input_values() const { return inputs_; }
  const std::vector<unsigned>& input_bits() const { return input_bits_; }
  unsigned action_bits() const;
  /// Number of codes representable on action_bits(); some may be unused.
  std::uint64_t action_code_count() const { return std::uint64_t{1} << action_bits(); }
  std::uint64_t cell_count() const;

  /// Input values for an action code, or nullopt for an unused code.
  std::optional<std::vector<Rational>> action_values(std::uint64_t code) const;
  std::optional<std::uint64_t> action_code(const std::vector<Rational>& values) const;

  std::vector<Interval> cell_box(const std::vector<std::uint64_t>& cell) const;

 private:
  std::vector<Quantizer> state_;
  std::vector<std::vector<Rational>> inputs_;
  std::vector<unsigned> input_bits_;
};

using Cell = std::vector<std::uint64_t>;

struct Quantized {
  Cell cell;
  std::uint64_t action = 0;
};

/// Gamma applied to a valuation of X and U; nullopt when outside A.
std::optional<Quantized> gamma(const Dtlhs& h, const Quantization& q, const Valuation& v);

/// exists y . N(x, u, y, x'), decided exactly.
bool transition_check(const Dtlhs& h, const Valuation& x, const Valuation& u, const Valuation& x_next);

/// Closed region over the state variables, given as a conjunction.
using Region = std::vector<Constraint>;

bool contains(const Region& r, const Valuation& v);

enum class ImageMethod { interval, exact };
enum class SelfLoopMode { keep, certificate, exact_certificate };

struct AbstractionOptions {
  ImageMethod image = ImageMethod::interval;
  SelfLoopMode self_loops = SelfLoopMode::certificate;
  std::uint64_t cell_cap = std::uint64_t{1} << 22;
  std::size_t assignment_cap = kDefaultAssignmentCap;
};

/// Product of per-variable inclusive code ranges.
struct CodeBox {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> ranges;
  bool contains(const Cell& c) const;
  bool operator==(const CodeBox&) const = default;
};

struct AbstractImage {
  std::vector<CodeBox> boxes;
  bool exits = false;
  /// True when no concrete transition starts in the cell under the action.
  bool blocked = true;

  std::set<Cell> cells() const;
  bool contains(const Cell& c) const;
};

/// Bit assignment of the abstract system. Present and next bits of each state
/// variable are interleaved, most significant bit first; the optional sink
/// pair follows, then the action bits.
struct BitLayout {
  std::vector<unsigned> field_bits;
  std::vector<std::vector<unsigned>> present;
  std::vector<std::vector<unsigned>> next;
  std::optional<unsigned> sink;
  std::optional<unsigned> sink_next;
  std::vector<unsigned> action;

  static BitLayout create(BddManager& mgr, const std::vector<unsigned>& field_bits,
                          const std::vector<std::string>& names, unsigned action_bits, bool with_sink);

  unsigned state_bits() const;
  /// Cell bits only.
  std::vector<unsigned> cell_vars() const;
  std::vector<unsigned> cell_next_vars() const;
  /// Cell bits plus the sink bit.
  std::vector<unsigned> present_vars() const;
  std::vector<unsigned> next_vars() const;
  std::vector<std::pair<unsigned, unsigned>> present_to_next() const;
  std::vector<std::pair<unsigned, unsigned>> next_to_present() const;
  /// Position of a present cell bit inside the concatenated state code
  /// (0 = least significant), or -1.
  int code_bit(unsigned bdd_var) const;

  std::uint64_t encode(const Cell& cell) const;
  Cell decode(std::uint64_t code) const;

  Bdd state(BddManager& mgr, std::uint64_t code, bool next = false) const;
  Bdd cell_state(BddManager& mgr, const Cell& cell, bool next = false) const;
  Bdd action_code(BddManager& mgr, std::uint64_t code) const;
  /// The sink state (with all cell bits 0), present or next copy.
  Bdd sink_state(BddManager& mgr, bool next = false) const;
};

struct AbstractionStats {
  std::uint64_t pairs = 0;
  std::uint64_t blocked_pairs = 0;
  std::uint64_t exit_pairs = 0;
  std::uint64_t dropped_self_loops = 0;
  std::uint64_t kept_self_loops = 0;
  std::size_t assignments = 0;
  double seconds = 0;
};

struct AbstractLts {
  std::shared_ptr<BddManager> mgr;
  BitLayout layout;
  std::vector<std::uint64_t> cell_counts;
  std::uint64_t action_count = 0;
  Bdd valid;  // in-range, non-sink present states
  Bdd trans;
  Bdd init;
  Bdd goal;
  AbstractionStats stats;

  /// Number of valid abstract states in a set over present bits.
  std::uint64_t count_states(const Bdd& set) const;
};

/// One guard assignment of the transition predicate after eliminating the
/// next-state and real auxiliary variables through its equalities.
struct AffineMode {
  std::vector<Rational> assignment;  // in AssignmentEnumerator order
  /// Remaining constraints; they mention only state variables when every
  /// real auxiliary was eliminated.
  std::vector<Constraint> conditions;
  /// x'_i as an expression, when an equality defined it.
  std::vector<std::optional<LinearExpression>> next;
};

/// Precomputes the per-assignment reduced systems of a Dtlhs under a
/// quantization and answers image and self-loop queries per (cell, action).
class Abstractor {
 public:
  Abstractor(const Dtlhs& h, const Quantization& q, AbstractionOptions options = {});
  ~Abstractor();
  Abstractor(const Abstractor&) = delete;
  Abstractor& operator=(const Abstractor&) = delete;

  AbstractImage image(const Cell& cell, std::uint64_t action) const;
  /// True when the self-loop on `cell` may be removed under `action`.
  bool drop_self_loop(const Cell& cell, std::uint64_t action, SelfLoopMode mode) const;
  std::size_t assignment_count() const;

  /// The guard assignments feasible under `action`, each with its reduced
  /// system (see AffineMode).
  std::vector<AffineMode> modes(std::uint64_t action) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

AbstractImage abstract_image(const Dtlhs& h, const Quantization& q, const Cell& cell, std::uint64_t action,
                             ImageMethod method = ImageMethod::interval);

/// `exact` selects the linear-programming certificate instead of interval
/// bounds.
bool self_loop_filter(const Dtlhs& h, const Quantization& q, const Cell& cell, std::uint64_t action,
                      bool exact = false);

/// Ĝ: cells whose closed box lies inside `goal`. Î: cells whose box meets
/// `init`. Both as sets of cells.
struct CellRegions {
  std::vector<Cell> init;
  std::vector<Cell> goal;
};
CellRegions abstract_regions(const Quantization& q, const std::vector<VarId>& x, const Region& init,
                             const Region& goal);

AbstractLts build_abstraction(const Dtlhs& h, const Quantization& q, const Region& init, const Region& goal,
                              const AbstractionOptions& options = {});

}  // namespace quantsyn
