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

#include "quantsyn/bdd.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace quantsyn {

namespace {

constexpr std::uint32_t kFreeVar = 0xFFFFFFFEu;
constexpr std::size_t kInitialBuckets = std::size_t{1} << 16;
constexpr std::size_t kMaxCache = std::size_t{1} << 22;
constexpr std::size_t kInitialGcThreshold = std::size_t{1} << 20;

inline std::size_t mix(std::uint64_t h) {
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  h *= 0xc4ceb9fe1a85ec53ULL;
  h ^= h >> 33;
  return static_cast<std::size_t>(h);
}

inline std::size_t hash3(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
  return mix((std::uint64_t{a} << 42) ^ (std::uint64_t{b} << 21) ^ std::uint64_t{c} ^
             (std::uint64_t{c} << 50));
}

}  // namespace

// Bdd handle

Bdd::Bdd(BddManager* mgr, std::uint32_t id) : mgr_(mgr), id_(id) {
  if (mgr_) mgr_->ref(id_);
}

Bdd::Bdd(const Bdd& other) : mgr_(other.mgr_), id_(other.id_) {
  if (mgr_) mgr_->ref(id_);
}

Bdd::Bdd(Bdd&& other) noexcept : mgr_(other.mgr_), id_(other.id_) { other.mgr_ = nullptr; }

Bdd& Bdd::operator=(const Bdd& other) {
  if (this == &other) return *this;
  if (other.mgr_) other.mgr_->ref(other.id_);
  if (mgr_) mgr_->deref(id_);
  mgr_ = other.mgr_;
  id_ = other.id_;
  return *this;
}

Bdd& Bdd::operator=(Bdd&& other) noexcept {
  if (this == &other) return *this;
  if (mgr_) mgr_->deref(id_);
  mgr_ = other.mgr_;
  id_ = other.id_;
  other.mgr_ = nullptr;
  return *this;
}

Bdd::~Bdd() {
  if (mgr_) mgr_->deref(id_);
}

void Bdd::check_same(const Bdd& g) const {
  if (!mgr_ || !g.mgr_) throw UsageError("operation on an empty Bdd handle");
  if (mgr_ != g.mgr_) throw UsageError("Bdd operands belong to different managers");
}

unsigned Bdd::top_var() const {
  if (is_constant()) return mgr_->var_count();
  return mgr_->nodes_[id_].var;
}

Bdd Bdd::low() const {
  if (is_constant()) return *this;
  return Bdd(mgr_, mgr_->nodes_[id_].lo);
}

Bdd Bdd::high() const {
  if (is_constant()) return *this;
  return Bdd(mgr_, mgr_->nodes_[id_].hi);
}

Bdd Bdd::operator&(const Bdd& g) const {
  check_same(g);
  mgr_->maybe_gc();
  return Bdd(mgr_, mgr_->and_rec(id_, g.id_));
}

Bdd Bdd::operator|(const Bdd& g) const {
  check_same(g);
  mgr_->maybe_gc();
  return Bdd(mgr_, mgr_->or_rec(id_, g.id_));
}

Bdd Bdd::operator^(const Bdd& g) const {
  check_same(g);
  mgr_->maybe_gc();
  return Bdd(mgr_, mgr_->xor_rec(id_, g.id_));
}

Bdd Bdd::operator!() const {
  check_same(*this);
  mgr_->maybe_gc();
  return Bdd(mgr_, mgr_->not_rec(id_));
}

bool Bdd::implies(const Bdd& g) const {
  check_same(g);
  mgr_->maybe_gc();
  const std::uint32_t ng = mgr_->not_rec(g.id_);
  return mgr_->and_rec(id_, ng) == 0;
}

Bdd Bdd::exists(std::span<const unsigned> vars) const {
  check_same(*this);
  mgr_->maybe_gc();
  const Bdd c(mgr_, mgr_->cube_raw(vars));
  return Bdd(mgr_, mgr_->exists_rec(id_, c.id_));
}

Bdd Bdd::forall(std::span<const unsigned> vars) const {
  check_same(*this);
  mgr_->maybe_gc();
  const Bdd c(mgr_, mgr_->cube_raw(vars));
  const Bdd nf(mgr_, mgr_->not_rec(id_));
  const Bdd e(mgr_, mgr_->exists_rec(nf.id_, c.id_));
  return Bdd(mgr_, mgr_->not_rec(e.id_));
}

Bdd Bdd::and_exists(const Bdd& g, std::span<const unsigned> vars) const {
  check_same(g);
  mgr_->maybe_gc();
  const Bdd c(mgr_, mgr_->cube_raw(vars));
  return Bdd(mgr_, mgr_->and_exists_rec(id_, g.id_, c.id_));
}

Bdd Bdd::rename(std::span<const std::pair<unsigned, unsigned>> mapping) const {
  check_same(*this);
  mgr_->maybe_gc();
  const unsigned n = mgr_->var_count();
  std::vector<std::uint32_t> target(n);
  std::iota(target.begin(), target.end(), 0u);
  std::vector<char> used(n, 0);
  for (const auto& [from, to] : mapping) {
    if (from >= n || to >= n) throw UsageError("rename refers to an unknown variable");
    if (used[to]) throw UsageError("rename mapping is not injective");
    used[to] = 1;
    target[from] = to;
  }
  std::unordered_map<std::uint32_t, std::uint32_t> memo;
  auto& nodes = mgr_->nodes_;
  auto rec = [&](auto&& self, std::uint32_t f) -> std::uint32_t {
    if (f <= 1) return f;
    if (auto it = memo.find(f); it != memo.end()) return it->second;
    const std::uint32_t var = nodes[f].var;
    const std::uint32_t lo = self(self, nodes[f].lo);
    const std::uint32_t hi = self(self, nodes[f].hi);
    const std::uint32_t nv = target[var];
    if (nv >= mgr_->top(lo) || nv >= mgr_->top(hi)) {
      throw UsageError("rename mapping is not compatible with the variable order");
    }
    const std::uint32_t r = mgr_->mk(nv, lo, hi);
    memo.emplace(f, r);
    return r;
  };
  return Bdd(mgr_, rec(rec, id_));
}

Bdd Bdd::cofactor(unsigned var, bool value) const {
  check_same(*this);
  mgr_->maybe_gc();
  std::unordered_map<std::uint32_t, std::uint32_t> memo;
  auto& nodes = mgr_->nodes_;
  auto rec = [&](auto&& self, std::uint32_t f) -> std::uint32_t {
    if (f <= 1 || nodes[f].var > var) return f;
    if (nodes[f].var == var) return value ? nodes[f].hi : nodes[f].lo;
    if (auto it = memo.find(f); it != memo.end()) return it->second;
    const std::uint32_t v = nodes[f].var;
    const std::uint32_t lo = self(self, nodes[f].lo);
    const std::uint32_t hi = self(self, nodes[f].hi);
    const std::uint32_t r = mgr_->mk(v, lo, hi);
    memo.emplace(f, r);
    return r;
  };
  return Bdd(mgr_, rec(rec, id_));
}

Bdd Bdd::restrict_to(const Bdd& care) const {
  check_same(care);
  mgr_->maybe_gc();
  return Bdd(mgr_, mgr_->restrict_rec(id_, care.id_));
}

bool Bdd::evaluate(const std::vector<bool>& assignment) const {
  check_same(*this);
  std::uint32_t f = id_;
  const auto& nodes = mgr_->nodes_;
  while (f > 1) {
    const std::uint32_t v = nodes[f].var;
    if (v >= assignment.size()) throw UsageError("assignment does not cover the support");
    f = assignment[v] ? nodes[f].hi : nodes[f].lo;
  }
  return f == 1;
}

std::optional<std::vector<bool>> Bdd::pick_assignment() const {
  check_same(*this);
  if (id_ == 0) return std::nullopt;
  std::vector<bool> out(mgr_->var_count(), false);
  std::uint32_t f = id_;
  const auto& nodes = mgr_->nodes_;
  while (f > 1) {
    if (nodes[f].lo != 0) {
      f = nodes[f].lo;
    } else {
      out[nodes[f].var] = true;
      f = nodes[f].hi;
    }
  }
  return out;
}

std::size_t Bdd::node_count() const {
  check_same(*this);
  return mgr_->shared_node_count(std::span<const Bdd>(this, 1));
}

std::size_t Bdd::height() const {
  check_same(*this);
  std::unordered_map<std::uint32_t, std::size_t> memo;
  const auto& nodes = mgr_->nodes_;
  auto rec = [&](auto&& self, std::uint32_t f) -> std::size_t {
    if (f <= 1) return 0;
    if (auto it = memo.find(f); it != memo.end()) return it->second;
    const std::size_t h = 1 + std::max(self(self, nodes[f].lo), self(self, nodes[f].hi));
    memo.emplace(f, h);
    return h;
  };
  return rec(rec, id_);
}

std::uint64_t Bdd::sat_count(std::span<const unsigned> support) const {
  check_same(*this);
  std::vector<unsigned> sorted(support.begin(), support.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.size() > 63) throw UsageError("sat_count supports at most 63 variables");
  const std::size_t n = sorted.size();
  std::unordered_map<unsigned, std::size_t> position;
  for (std::size_t i = 0; i < n; ++i) position.emplace(sorted[i], i);
  const auto& nodes = mgr_->nodes_;
  auto pos_of = [&](std::uint32_t f) -> std::size_t {
    if (f <= 1) return n;
    const auto it = position.find(nodes[f].var);
    if (it == position.end()) throw UsageError("sat_count support misses a variable of the function");
    return it->second;
  };
  std::unordered_map<std::uint32_t, std::uint64_t> memo;
  // count(f) = satisfying assignments of the support variables at and below pos_of(f)
  auto rec = [&](auto&& self, std::uint32_t f) -> std::uint64_t {
    if (f == 0) return 0;
    if (f == 1) return 1;
    if (auto it = memo.find(f); it != memo.end()) return it->second;
    const std::size_t p = pos_of(f);
    const std::uint32_t lo = nodes[f].lo;
    const std::uint32_t hi = nodes[f].hi;
    const std::uint64_t c = (self(self, lo) << (pos_of(lo) - p - 1)) +
                            (self(self, hi) << (pos_of(hi) - p - 1));
    memo.emplace(f, c);
    return c;
  };
  return rec(rec, id_) << pos_of(id_);
}

// BddManager

BddManager::BddManager() : gc_threshold_(kInitialGcThreshold) {
  nodes_.push_back({kTerminalVar, 0, 0});
  nodes_.push_back({kTerminalVar, 1, 1});
  refs_.assign(2, 1);
  next_.assign(2, 0);
  buckets_.assign(kInitialBuckets, 0);
  cache_.assign(kInitialBuckets, CacheEntry{});
}

unsigned BddManager::new_var(std::string label) {
  labels_.push_back(std::move(label));
  return static_cast<unsigned>(labels_.size() - 1);
}

Bdd BddManager::constant(bool value) { return Bdd(this, value ? 1u : 0u); }

Bdd BddManager::var(unsigned index) {
  if (index >= var_count()) throw UsageError("unknown BDD variable");
  return Bdd(this, mk(index, 0, 1));
}

Bdd BddManager::nvar(unsigned index) {
  if (index >= var_count()) throw UsageError("unknown BDD variable");
  return Bdd(this, mk(index, 1, 0));
}

Bdd BddManager::ite(const Bdd& c, const Bdd& f, const Bdd& g) {
  c.check_same(f);
  c.check_same(g);
  if (c.manager() != this) throw UsageError("Bdd operands belong to different managers");
  maybe_gc();
  return Bdd(this, ite_rec(c.id(), f.id(), g.id()));
}

std::uint32_t BddManager::cube_raw(std::span<const unsigned> vars) {
  std::vector<unsigned> sorted(vars.begin(), vars.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::uint32_t r = 1;
  for (auto it = sorted.rbegin(); it != sorted.rend(); ++it) {
    if (*it >= var_count()) throw UsageError("unknown BDD variable");
    r = mk(*it, 0, r);
  }
  return r;
}

Bdd BddManager::cube(std::span<const unsigned> vars) {
  maybe_gc();
  return Bdd(this, cube_raw(vars));
}

Bdd BddManager::minterm(std::span<const unsigned> vars, const std::vector<bool>& bits) {
  if (vars.size() != bits.size()) throw UsageError("minterm needs one polarity per variable");
  maybe_gc();
  std::vector<std::pair<unsigned, bool>> lits;
  for (std::size_t i = 0; i < vars.size(); ++i) lits.emplace_back(vars[i], bits[i]);
  std::sort(lits.begin(), lits.end());
  std::uint32_t r = 1;
  for (auto it = lits.rbegin(); it != lits.rend(); ++it) {
    if (it->first >= var_count()) throw UsageError("unknown BDD variable");
    r = it->second ? mk(it->first, 0, r) : mk(it->first, r, 0);
  }
  return Bdd(this, r);
}

Bdd BddManager::range(std::span<const unsigned> vars, std::uint64_t lo, std::uint64_t hi) {
  for (std::size_t i = 1; i < vars.size(); ++i) {
    if (vars[i - 1] >= vars[i]) throw UsageError("range bits must follow the variable order");
  }
  for (unsigned v : vars) {
    if (v >= var_count()) throw UsageError("unknown BDD variable");
  }
  maybe_gc();
  if (lo > hi) return constant(false);
  const std::size_t n = vars.size();
  std::uint32_t ge = 1;
  std::uint32_t le = 1;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = n - 1 - k;  // from least significant bit upward
    const bool lo_bit = (lo >> k) & 1u;
    const bool hi_bit = (hi >> k) & 1u;
    ge = lo_bit ? mk(vars[i], 0, ge) : mk(vars[i], ge, 1);
    le = hi_bit ? mk(vars[i], 1, le) : mk(vars[i], le, 0);
  }
  if (n < 64 && (hi >> n) != 0) le = 1;
  if (n < 64 && (lo >> n) != 0) return constant(false);
  return Bdd(this, and_rec(ge, le));
}

std::size_t BddManager::shared_node_count(std::span<const Bdd> roots) {
  std::unordered_set<std::uint32_t> seen;
  std::vector<std::uint32_t> stack;
  for (const auto& r : roots) {
    if (r.manager() != this) throw UsageError("Bdd operands belong to different managers");
    stack.push_back(r.id());
  }
  while (!stack.empty()) {
    const std::uint32_t f = stack.back();
    stack.pop_back();
    if (f <= 1 || !seen.insert(f).second) continue;
    stack.push_back(nodes_[f].lo);
    stack.push_back(nodes_[f].hi);
  }
  return seen.size();
}

void BddManager::dump(std::ostream& os, const Bdd& f) {
  std::vector<std::uint32_t> order;
  std::unordered_set<std::uint32_t> seen;
  auto rec = [&](auto&& self, std::uint32_t g) -> void {
    if (g <= 1 || !seen.insert(g).second) return;
    order.push_back(g);
    self(self, nodes_[g].lo);
    self(self, nodes_[g].hi);
  };
  rec(rec, f.id());
  for (std::uint32_t g : order) {
    os << g << ' ' << labels_[nodes_[g].var] << ' ' << nodes_[g].lo << ' ' << nodes_[g].hi << '\n';
  }
}

BddStats BddManager::stats() const {
  BddStats s = stats_;
  s.live_nodes = live_nodes();
  return s;
}

void BddManager::maybe_gc() {
  if (live_nodes() > gc_threshold_) {
    collect_garbage();
    gc_threshold_ = std::max(kInitialGcThreshold, 2 * live_nodes());
  }
}

void BddManager::collect_garbage() {
  std::vector<char> marked(nodes_.size(), 0);
  marked[0] = marked[1] = 1;
  std::vector<std::uint32_t> stack;
  for (std::uint32_t id = 2; id < nodes_.size(); ++id) {
    if (refs_[id] > 0 && nodes_[id].var != kFreeVar) stack.push_back(id);
  }
  while (!stack.empty()) {
    const std::uint32_t f = stack.back();
    stack.pop_back();
    if (marked[f]) continue;
    marked[f] = 1;
    stack.push_back(nodes_[f].lo);
    stack.push_back(nodes_[f].hi);
  }
  std::fill(buckets_.begin(), buckets_.end(), 0);
  const std::size_t mask = buckets_.size() - 1;
  for (std::uint32_t id = 2; id < nodes_.size(); ++id) {
    Node& n = nodes_[id];
    if (n.var == kFreeVar) continue;
    if (!marked[id]) {
      n.var = kFreeVar;
      free_.push_back(id);
      continue;
    }
    const std::size_t b = hash3(n.var, n.lo, n.hi) & mask;
    next_[id] = buckets_[b];
    buckets_[b] = id;
  }
  std::fill(cache_.begin(), cache_.end(), CacheEntry{});
  ++stats_.gc_runs;
}

void BddManager::rehash(std::size_t buckets) {
  buckets_.assign(buckets, 0);
  const std::size_t mask = buckets - 1;
  for (std::uint32_t id = 2; id < nodes_.size(); ++id) {
    const Node& n = nodes_[id];
    if (n.var == kFreeVar) continue;
    const std::size_t b = hash3(n.var, n.lo, n.hi) & mask;
    next_[id] = buckets_[b];
    buckets_[b] = id;
  }
  const std::size_t cache_size = std::min(kMaxCache, buckets);
  if (cache_size > cache_.size()) cache_.assign(cache_size, CacheEntry{});
}

std::uint32_t BddManager::mk(std::uint32_t var, std::uint32_t lo, std::uint32_t hi) {
  if (lo == hi) return lo;
  const std::size_t b = hash3(var, lo, hi) & (buckets_.size() - 1);
  for (std::uint32_t id = buckets_[b]; id != 0; id = next_[id]) {
    const Node& n = nodes_[id];
    if (n.var == var && n.lo == lo && n.hi == hi) return id;
  }
  std::uint32_t id;
  if (!free_.empty()) {
    id = free_.back();
    free_.pop_back();
    nodes_[id] = {var, lo, hi};
    refs_[id] = 0;
  } else {
    if (nodes_.size() >= 0xFFFFFFF0u) throw ResourceError("BDD node store exhausted");
    id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({var, lo, hi});
    refs_.push_back(0);
    next_.push_back(0);
  }
  next_[id] = buckets_[b];
  buckets_[b] = id;
  const std::size_t live = live_nodes();
  stats_.peak_nodes = std::max(stats_.peak_nodes, live);
  if (live > 2 * buckets_.size()) rehash(buckets_.size() * 4);
  return id;
}

bool BddManager::cache_lookup(std::uint32_t op, std::uint32_t a, std::uint32_t b, std::uint32_t c,
                              std::uint32_t& result) const {
  const CacheEntry& e = cache_[(hash3(a, b, c) + op * 0x9E3779B9u) & (cache_.size() - 1)];
  if (e.op == op && e.a == a && e.b == b && e.c == c) {
    result = e.result;
    return true;
  }
  return false;
}

void BddManager::cache_store(std::uint32_t op, std::uint32_t a, std::uint32_t b, std::uint32_t c,
                             std::uint32_t result) {
  cache_[(hash3(a, b, c) + op * 0x9E3779B9u) & (cache_.size() - 1)] = {op, a, b, c, result};
}

std::uint32_t BddManager::and_rec(std::uint32_t f, std::uint32_t g) {
  if (f == 0 || g == 0) return 0;
  if (f == 1) return g;
  if (g == 1 || f == g) return f;
  if (f > g) std::swap(f, g);
  std::uint32_t r;
  if (cache_lookup(kAnd, f, g, 0, r)) return r;
  const Node nf = nodes_[f];
  const Node ng = nodes_[g];
  const std::uint32_t v = std::min(nf.var, ng.var);
  const std::uint32_t f0 = nf.var == v ? nf.lo : f, f1 = nf.var == v ? nf.hi : f;
  const std::uint32_t g0 = ng.var == v ? ng.lo : g, g1 = ng.var == v ? ng.hi : g;
  const std::uint32_t lo = and_rec(f0, g0);
  const std::uint32_t hi = and_rec(f1, g1);
  r = mk(v, lo, hi);
  cache_store(kAnd, f, g, 0, r);
  return r;
}

std::uint32_t BddManager::or_rec(std::uint32_t f, std::uint32_t g) {
  if (f == 1 || g == 1) return 1;
  if (f == 0) return g;
  if (g == 0 || f == g) return f;
  if (f > g) std::swap(f, g);
  std::uint32_t r;
  if (cache_lookup(kOr, f, g, 0, r)) return r;
  const Node nf = nodes_[f];
  const Node ng = nodes_[g];
  const std::uint32_t v = std::min(nf.var, ng.var);
  const std::uint32_t f0 = nf.var == v ? nf.lo : f, f1 = nf.var == v ? nf.hi : f;
  const std::uint32_t g0 = ng.var == v ? ng.lo : g, g1 = ng.var == v ? ng.hi : g;
  const std::uint32_t lo = or_rec(f0, g0);
  const std::uint32_t hi = or_rec(f1, g1);
  r = mk(v, lo, hi);
  cache_store(kOr, f, g, 0, r);
  return r;
}

std::uint32_t BddManager::xor_rec(std::uint32_t f, std::uint32_t g) {
  if (f == g) return 0;
  if (f == 0) return g;
  if (g == 0) return f;
  if (f == 1) return not_rec(g);
  if (g == 1) return not_rec(f);
  if (f > g) std::swap(f, g);
  std::uint32_t r;
  if (cache_lookup(kXor, f, g, 0, r)) return r;
  const Node nf = nodes_[f];
  const Node ng = nodes_[g];
  const std::uint32_t v = std::min(nf.var, ng.var);
  const std::uint32_t f0 = nf.var == v ? nf.lo : f, f1 = nf.var == v ? nf.hi : f;
  const std::uint32_t g0 = ng.var == v ? ng.lo : g, g1 = ng.var == v ? ng.hi : g;
  const std::uint32_t lo = xor_rec(f0, g0);
  const std::uint32_t hi = xor_rec(f1, g1);
  r = mk(v, lo, hi);
  cache_store(kXor, f, g, 0, r);
  return r;
}

std::uint32_t BddManager::not_rec(std::uint32_t f) {
  if (f <= 1) return f ^ 1u;
  std::uint32_t r;
  if (cache_lookup(kNot, f, 0, 0, r)) return r;
  const Node n = nodes_[f];
  const std::uint32_t lo = not_rec(n.lo);
  const std::uint32_t hi = not_rec(n.hi);
  r = mk(n.var, lo, hi);
  cache_store(kNot, f, 0, 0, r);
  return r;
}

std::uint32_t BddManager::ite_rec(std::uint32_t f, std::uint32_t g, std::uint32_t h) {
  if (f == 1) return g;
  if (f == 0) return h;
  if (g == h) return g;
  if (g == 1 && h == 0) return f;
  if (g == 0 && h == 1) return not_rec(f);
  if (g == 1) return or_rec(f, h);
  if (h == 0) return and_rec(f, g);
  std::uint32_t r;
  if (cache_lookup(kIte, f, g, h, r)) return r;
  const Node nf = nodes_[f];
  const Node ng = nodes_[g];
  const Node nh = nodes_[h];
  const std::uint32_t v = std::min({nf.var, ng.var, nh.var});
  auto lo_of = [v](const Node& n, std::uint32_t id) { return n.var == v ? n.lo : id; };
  auto hi_of = [v](const Node& n, std::uint32_t id) { return n.var == v ? n.hi : id; };
  const std::uint32_t lo = ite_rec(lo_of(nf, f), lo_of(ng, g), lo_of(nh, h));
  const std::uint32_t hi = ite_rec(hi_of(nf, f), hi_of(ng, g), hi_of(nh, h));
  r = mk(v, lo, hi);
  cache_store(kIte, f, g, h, r);
  return r;
}

std::uint32_t BddManager::exists_rec(std::uint32_t f, std::uint32_t cube) {
  if (f <= 1) return f;
  while (cube > 1 && nodes_[cube].var < nodes_[f].var) cube = nodes_[cube].hi;
  if (cube == 1) return f;
  std::uint32_t r;
  if (cache_lookup(kExists, f, cube, 0, r)) return r;
  const Node nf = nodes_[f];
  if (nf.var == nodes_[cube].var) {
    const std::uint32_t rest = nodes_[cube].hi;
    const std::uint32_t lo = exists_rec(nf.lo, rest);
    if (lo == 1) {
      r = 1;
    } else {
      const std::uint32_t hi = exists_rec(nf.hi, rest);
      r = or_rec(lo, hi);
    }
  } else {
    const std::uint32_t lo = exists_rec(nf.lo, cube);
    const std::uint32_t hi = exists_rec(nf.hi, cube);
    r = mk(nf.var, lo, hi);
  }
  cache_store(kExists, f, cube, 0, r);
  return r;
}

std::uint32_t BddManager::and_exists_rec(std::uint32_t f, std::uint32_t g, std::uint32_t cube) {
  if (f == 0 || g == 0) return 0;
  if (f == 1 && g == 1) return 1;
  if (f == 1) return exists_rec(g, cube);
  if (g == 1 || f == g) return exists_rec(f, cube);
  if (cube == 1) return and_rec(f, g);
  if (f > g) std::swap(f, g);
  const Node nf = nodes_[f];
  const Node ng = nodes_[g];
  const std::uint32_t v = std::min(nf.var, ng.var);
  while (cube > 1 && nodes_[cube].var < v) cube = nodes_[cube].hi;
  if (cube == 1) return and_rec(f, g);
  std::uint32_t r;
  if (cache_lookup(kAndExists, f, g, cube, r)) return r;
  const std::uint32_t f0 = nf.var == v ? nf.lo : f, f1 = nf.var == v ? nf.hi : f;
  const std::uint32_t g0 = ng.var == v ? ng.lo : g, g1 = ng.var == v ? ng.hi : g;
  if (nodes_[cube].var == v) {
    const std::uint32_t rest = nodes_[cube].hi;
    const std::uint32_t lo = and_exists_rec(f0, g0, rest);
    if (lo == 1) {
      r = 1;
    } else {
      const std::uint32_t hi = and_exists_rec(f1, g1, rest);
      r = or_rec(lo, hi);
    }
  } else {
    const std::uint32_t lo = and_exists_rec(f0, g0, cube);
    const std::uint32_t hi = and_exists_rec(f1, g1, cube);
    r = mk(v, lo, hi);
  }
  cache_store(kAndExists, f, g, cube, r);
  return r;
}

std::uint32_t BddManager::restrict_rec(std::uint32_t f, std::uint32_t care) {
  if (care == 0) return 0;
  if (care == 1 || f <= 1) return f;
  if (f == care) return 1;
  std::uint32_t r;
  if (cache_lookup(kRestrict, f, care, 0, r)) return r;
  const Node nf = nodes_[f];
  const Node nc = nodes_[care];
  if (nc.var < nf.var) {
    // f does not depend on this variable: drop it from the care set.
    r = restrict_rec(f, or_rec(nc.lo, nc.hi));
  } else {
    const std::uint32_t v = nf.var;
    const std::uint32_t c0 = nc.var == v ? nc.lo : care, c1 = nc.var == v ? nc.hi : care;
    if (c0 == 0) {
      r = restrict_rec(nf.hi, c1);
    } else if (c1 == 0) {
      r = restrict_rec(nf.lo, c0);
    } else {
      const std::uint32_t lo = restrict_rec(nf.lo, c0);
      const std::uint32_t hi = restrict_rec(nf.hi, c1);
      r = mk(v, lo, hi);
    }
  }
  cache_store(kRestrict, f, care, 0, r);
  return r;
}

}  // namespace quantsyn
