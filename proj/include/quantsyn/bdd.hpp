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
/// Reduced ordered binary decision diagrams without complement edges.
///
/// A BddManager owns the node store, the unique table and the operation
/// cache. Bdd is a reference-counted handle into one manager; nodes that no
/// handle can reach are reclaimed by a mark-and-sweep pass that only runs at
/// the entry of a public operation. The variable order is the order of
/// creation and never changes.

#include "quantsyn/rational.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace quantsyn {

class BddManager;

struct BddVar {
  unsigned index = 0;
  std::string label;
};

class Bdd {
 public:
  Bdd() = default;
  Bdd(const Bdd& other);
  Bdd(Bdd&& other) noexcept;
  Bdd& operator=(const Bdd& other);
  Bdd& operator=(Bdd&& other) noexcept;
  ~Bdd();

  BddManager* manager() const { return mgr_; }
  std::uint32_t id() const { return id_; }
  bool valid() const { return mgr_ != nullptr; }
  bool is_false() const { return valid() && id_ == 0; }
  bool is_true() const { return valid() && id_ == 1; }
  bool is_constant() const { return valid() && id_ <= 1; }

  /// Index of the top variable; the variable count for constants.
  unsigned top_var() const;
  Bdd low() const;
  Bdd high() const;

  Bdd operator&(const Bdd& g) const;
  Bdd operator|(const Bdd& g) const;
  Bdd operator^(const Bdd& g) const;
  Bdd operator!() const;
  Bdd& operator&=(const Bdd& g) { return *this = *this & g; }
  Bdd& operator|=(const Bdd& g) { return *this = *this | g; }

  /// f -> g is the constant true.
  bool implies(const Bdd& g) const;

  bool operator==(const Bdd& g) const { return mgr_ == g.mgr_ && id_ == g.id_; }
  bool operator!=(const Bdd& g) const { return !(*this == g); }

  Bdd exists(std::span<const unsigned> vars) const;
  Bdd forall(std::span<const unsigned> vars) const;
  /// exists vars . (this & g), without building the conjunction.
  Bdd and_exists(const Bdd& g, std::span<const unsigned> vars) const;

  /// Substitutes variables. Pairs are (from, to). Throws UsageError when the
  /// substitution would break the variable order on this function.
  Bdd rename(std::span<const std::pair<unsigned, unsigned>> mapping) const;

  Bdd cofactor(unsigned var, bool value) const;

  /// Coudert-Madre restrict: agrees with this function wherever `care` holds.
  Bdd restrict_to(const Bdd& care) const;

  /// `assignment` is indexed by variable; it must cover the support.
  bool evaluate(const std::vector<bool>& assignment) const;

  /// Some satisfying assignment over all manager variables (unconstrained
  /// variables are 0), or nullopt for the false function.
  std::optional<std::vector<bool>> pick_assignment() const;

  /// Internal nodes reachable from this root.
  std::size_t node_count() const;
  /// Longest root-to-terminal path, counted in edges.
  std::size_t height() const;
  /// Satisfying assignments over `support`, which must contain the support of
  /// this function. At most 63 support variables.
  std::uint64_t sat_count(std::span<const unsigned> support) const;

 private:
  friend class BddManager;
  Bdd(BddManager* mgr, std::uint32_t id);
  void check_same(const Bdd& g) const;

  BddManager* mgr_ = nullptr;
  std::uint32_t id_ = 0;
};

struct BddStats {
  std::size_t live_nodes = 0;
  std::size_t peak_nodes = 0;
  std::size_t gc_runs = 0;
};

class BddManager {
 public:
  BddManager();
  BddManager(const BddManager&) = delete;
  BddManager& operator=(const BddManager&) = delete;

  /// Appends a variable at the bottom of the order.
  unsigned new_var(std::string label);
  unsigned var_count() const { return static_cast<unsigned>(labels_.size()); }
  const std::string& label(unsigned var) const { return labels_.at(var); }
  BddVar var_info(unsigned var) const { return {var, labels_.at(var)}; }

  Bdd constant(bool value);
  Bdd bdd_true() { return constant(true); }
  Bdd bdd_false() { return constant(false); }
  Bdd var(unsigned index);
  Bdd nvar(unsigned index);
  Bdd ite(const Bdd& c, const Bdd& f, const Bdd& g);
  /// Conjunction of the positive literals of `vars`.
  Bdd cube(std::span<const unsigned> vars);
  /// Conjunction of literals; bits[i] is the polarity of vars[i].
  Bdd minterm(std::span<const unsigned> vars, const std::vector<bool>& bits);
  /// Set of codes lo..hi of an unsigned number whose bits are `vars`, most
  /// significant first.
  Bdd range(std::span<const unsigned> vars, std::uint64_t lo, std::uint64_t hi);

  /// Internal nodes reachable from any of the roots, counted once.
  std::size_t shared_node_count(std::span<const Bdd> roots);

  /// Node list "id var low high" from the root down, for debugging only.
  void dump(std::ostream& os, const Bdd& f);

  void collect_garbage();
  BddStats stats() const;
  std::size_t live_nodes() const { return nodes_.size() - free_.size() - 2; }

 private:
  friend class Bdd;

  struct Node {
    std::uint32_t var;
    std::uint32_t lo;
    std::uint32_t hi;
  };
  struct CacheEntry {
    std::uint32_t op = 0;
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    std::uint32_t c = 0;
    std::uint32_t result = 0;
  };
  enum Op : std::uint32_t { kNone = 0, kAnd, kOr, kXor, kNot, kIte, kExists, kAndExists, kRestrict };

  static constexpr std::uint32_t kTerminalVar = 0xFFFFFFFFu;

  void ref(std::uint32_t id) { ++refs_[id]; }
  void deref(std::uint32_t id) { --refs_[id]; }
  void maybe_gc();

  std::uint32_t top(std::uint32_t f) const { return nodes_[f].var; }
  std::uint32_t mk(std::uint32_t var, std::uint32_t lo, std::uint32_t hi);
  std::uint32_t and_rec(std::uint32_t f, std::uint32_t g);
  std::uint32_t or_rec(std::uint32_t f, std::uint32_t g);
  std::uint32_t xor_rec(std::uint32_t f, std::uint32_t g);
  std::uint32_t not_rec(std::uint32_t f);
  std::uint32_t ite_rec(std::uint32_t f, std::uint32_t g, std::uint32_t h);
  std::uint32_t exists_rec(std::uint32_t f, std::uint32_t cube);
  std::uint32_t and_exists_rec(std::uint32_t f, std::uint32_t g, std::uint32_t cube);
  std::uint32_t restrict_rec(std::uint32_t f, std::uint32_t care);
  std::uint32_t cube_raw(std::span<const unsigned> vars);

  bool cache_lookup(std::uint32_t op, std::uint32_t a, std::uint32_t b, std::uint32_t c,
                    std::uint32_t& result) const;
  void cache_store(std::uint32_t op, std::uint32_t a, std::uint32_t b, std::uint32_t c,
                   std::uint32_t result);
  void rehash(std::size_t buckets);

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> refs_;
  std::vector<std::uint32_t> next_;     // unique-table chain
  std::vector<std::uint32_t> buckets_;  // unique-table heads
  std::vector<std::uint32_t> free_;
  std::vector<CacheEntry> cache_;
  std::vector<std::string> labels_;
  std::size_t gc_threshold_;
  BddStats stats_;
};

}  // namespace quantsyn
