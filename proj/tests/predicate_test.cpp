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

#include "quantsyn/predicate.hpp"

#include "quantsyn/models.hpp"

#include <gtest/gtest.h>

#include <random>

namespace quantsyn {
namespace {

std::shared_ptr<VarTable> table(std::initializer_list<VarDecl> decls) {
  auto t = std::make_shared<VarTable>();
  for (const auto& d : decls) t->add(d);
  return t;
}

LinearExpression v(VarId id, Rational k = 1) { return LinearExpression::variable(id, k); }
LinearExpression c(Rational k) { return LinearExpression(std::move(k)); }

TEST(VarTableTest, RejectsBadDeclarations) {
  VarTable t;
  EXPECT_THROW(t.add({"x", Sort::real, 2, 1}), UsageError);
  EXPECT_THROW(t.add({"k", Sort::integer, Rational(1, 2), 3}), UsageError);
  const VarId b = t.add({"b", Sort::boolean, 0, 2});
  EXPECT_EQ(t[b].upper, 1);
  const VarId x = t.add({"x", Sort::real, 0, 1});
  EXPECT_THROW(t.add({"x", Sort::real, 0, 1}), UsageError);
  EXPECT_EQ(t.at("x"), x);
  EXPECT_FALSE(t.find("y"));
}

TEST(LinearExpressionTest, DropsZeroCoefficients) {
  LinearExpression e = v(0, 2) + v(1) - v(0, 2);
  ASSERT_EQ(e.terms().size(), 1u);
  EXPECT_EQ(e.coefficient(0), 0);
  EXPECT_EQ(e.coefficient(1), 1);
}

TEST(LinearExpressionTest, Evaluates) {
  const LinearExpression e = v(0, 2) + c(3);
  EXPECT_EQ(eval(e, {{0, Rational(1, 2)}}), 4);
  EXPECT_THROW(eval(e, {}), UsageError);
}

TEST(LinearExpressionTest, RangeOverBox) {
  const Box box{{0, 1}, {-2, 3}};
  const Interval r = range(v(0, 2) - v(1) + c(1), box);
  EXPECT_EQ(r.lo, -2);
  EXPECT_EQ(r.hi, 5);
}

TEST(LinearExpressionTest, Substitutes) {
  const LinearExpression e = v(0, 3) + v(1);
  const LinearExpression s = e.substitute(0, v(2) + c(1));
  EXPECT_EQ(s, v(1) + v(2, 3) + c(3));
}

TEST(ConstraintTest, FoldsConstantIntoBound) {
  const Constraint k = make_le(v(0) + c(2), c(5));
  EXPECT_EQ(k.bound, 3);
  EXPECT_EQ(k.expr.constant(), 0);
  EXPECT_EQ(eq(v(0), c(1)).size(), 2u);
}

TEST(GuardedPredicateTest, GuardOffDisablesBody) {
  auto t = table({{"x", Sort::real, 0, 10}, {"y", Sort::boolean, 0, 1}});
  GuardedPredicate p(t);
  p.add_guarded(1, true, le(v(0), c(5)));
  EXPECT_TRUE(holds(p, {{0, 9}, {1, 0}}));
  EXPECT_FALSE(holds(p, {{0, 9}, {1, 1}}));
}

TEST(GuardedPredicateTest, GuardMustBeBoolean) {
  auto t = table({{"x", Sort::real, 0, 10}, {"k", Sort::integer, 0, 3}});
  GuardedPredicate p(t);
  EXPECT_THROW(p.add_guarded(1, true, le(v(0), c(5))), UsageError);
  EXPECT_THROW(p.add(le(v(7), c(5))), UsageError);
}

TEST(GuardedPredicateTest, PendulumHoldsAtRest) {
  const ModelInstance m = pendulum_model(Rational(2), Rational(1, 10), 8, Rational(1, 10));
  const VarTable& vars = m.plant.vars();
  Valuation val;
  for (VarId id = 0; id < vars.size(); ++id) val[id] = 0;
  val[vars.at("y3")] = 1;
  EXPECT_TRUE(holds(m.plant.n(), val));
  val[vars.at("x2'")] = Rational(1, 10);
  EXPECT_FALSE(holds(m.plant.n(), val));
}

TEST(ToConjunctiveTest, PositiveGuardBigM) {
  auto t = table({{"x", Sort::real, 0, 10}, {"y", Sort::boolean, 0, 1}});
  GuardedPredicate p(t);
  p.add_guarded(1, true, le(v(0), c(5)));
  const auto cs = to_conjunctive(p);
  ASSERT_EQ(cs.size(), 1u);
  // x + 5y <= 10
  EXPECT_EQ(cs[0].expr, v(0) + v(1, 5));
  EXPECT_EQ(cs[0].bound, 10);
}

TEST(ToConjunctiveTest, NegatedGuardBigM) {
  auto t = table({{"x", Sort::real, 0, 10}, {"y", Sort::boolean, 0, 1}});
  GuardedPredicate p(t);
  p.add_guarded(1, false, ge(v(0), c(1)));
  const auto cs = to_conjunctive(p);
  ASSERT_EQ(cs.size(), 1u);
  // x >= 1 - y
  EXPECT_EQ(cs[0].expr, v(0, -1) - v(1));
  EXPECT_EQ(cs[0].bound, -1);
}

TEST(ToConjunctiveTest, PlainPartUnchanged) {
  auto t = table({{"x", Sort::real, 0, 10}});
  GuardedPredicate p(t);
  p.add(le(v(0), c(4)));
  p.add(ge(v(0), c(1)));
  EXPECT_EQ(to_conjunctive(p), p.plain());
}

// Both rewrites must accept exactly the same grid points of the box.
TEST(ToConjunctiveTest, SameSatisfyingSetOnGrid) {
  auto t = table({{"x", Sort::real, 0, 10}, {"z", Sort::real, -3, 3}, {"y", Sort::boolean, 0, 1},
                  {"w", Sort::boolean, 0, 1}});
  GuardedPredicate p(t);
  p.add_guarded(2, true, le(v(0) + v(1), c(5)));
  p.add_guarded(2, false, ge(v(0), c(1)));
  p.add_guarded(3, true, le(v(1, 2) - v(0), c(-1)));
  p.add(le(v(1), c(2)));
  const auto cs = to_conjunctive(p);
  for (int y = 0; y <= 1; ++y) {
    for (int w = 0; w <= 1; ++w) {
      for (int xi = 0; xi <= 40; ++xi) {
        for (int zi = -12; zi <= 12; ++zi) {
          const Valuation val{{0, Rational(xi, 4)}, {1, Rational(zi, 4)}, {2, y}, {3, w}};
          bool conj = true;
          for (const auto& k : cs) conj = conj && holds(k, val);
          ASSERT_EQ(holds(p, val), conj) << "x=" << xi << "/4 z=" << zi << "/4 y=" << y << " w=" << w;
        }
      }
    }
  }
}

TEST(ToConjunctiveTest, RandomValuationsAgree) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> coef(-4, 4);
  for (int round = 0; round < 40; ++round) {
    auto t = table({{"a", Sort::real, -2, 2}, {"b", Sort::real, 0, 5}, {"g", Sort::boolean, 0, 1},
                    {"h", Sort::boolean, 0, 1}});
    GuardedPredicate p(t);
    for (int k = 0; k < 3; ++k) {
      const auto body = make_le(v(0, coef(rng)) + v(1, coef(rng)), c(coef(rng)));
      p.add_guarded(2 + (k % 2), k == 1, body);
    }
    const auto cs = to_conjunctive(p);
    std::uniform_int_distribution<int> pick(0, 20);
    for (int s = 0; s < 200; ++s) {
      const Valuation val{{0, Rational(pick(rng) - 10, 5)}, {1, Rational(pick(rng), 4)},
                          {2, pick(rng) % 2}, {3, pick(rng) % 2}};
      bool conj = true;
      for (const auto& k : cs) conj = conj && holds(k, val);
      ASSERT_EQ(holds(p, val), conj);
    }
  }
}

TEST(CheckValuationTest, RejectsOutOfBoundsAndFractionalIntegers) {
  auto t = table({{"x", Sort::real, 0, 1}, {"k", Sort::integer, -1, 1}});
  EXPECT_NO_THROW(check_valuation(*t, {{0, Rational(1, 2)}, {1, -1}}));
  EXPECT_THROW(check_valuation(*t, {{0, 2}}), UsageError);
  EXPECT_THROW(check_valuation(*t, {{1, Rational(1, 2)}}), UsageError);
}

TEST(PropagateBoundsTest, TightensAndDetectsConflict) {
  auto t = table({{"x", Sort::real, 0, 10}, {"k", Sort::integer, 0, 10}});
  Box box = declared_box(*t);
  std::vector<Constraint> cs = le(v(0) + v(1), c(Rational(7, 2)));
  ASSERT_TRUE(propagate_bounds(cs, *t, box));
  EXPECT_EQ(box[0].hi, Rational(7, 2));
  EXPECT_EQ(box[1].hi, 3);
  cs.push_back(make_le(c(5), v(0)));
  Box again = declared_box(*t);
  EXPECT_FALSE(propagate_bounds(cs, *t, again));
}

TEST(EnumGuardsTest, OneGuardTwoEmissions) {
  auto t = table({{"x", Sort::real, 0, 10}, {"y", Sort::boolean, 0, 1}});
  GuardedPredicate p(t);
  p.add_guarded(1, true, le(v(0), c(5)));
  const auto em = enum_guards(p);
  ASSERT_EQ(em.size(), 2u);
  EXPECT_EQ(em[0].assignment.front().second, 0);
  EXPECT_TRUE(em[0].residual.empty());
  EXPECT_EQ(em[1].assignment.front().second, 1);
  ASSERT_EQ(em[1].residual.size(), 1u);
  EXPECT_EQ(em[1].residual[0], make_le(v(0), c(5)));
}

TEST(EnumGuardsTest, PrunesInconsistentAssignments) {
  auto t = table({{"x", Sort::real, 0, 10}, {"y", Sort::boolean, 0, 1}, {"w", Sort::boolean, 0, 1}});
  GuardedPredicate p(t);
  p.add(ge(v(1) + v(2), c(1)));
  p.add_guarded(1, true, le(v(0), c(-1)));
  const auto em = enum_guards(p);
  // y = 1 forces x <= -1, impossible; y = 0 requires w = 1.
  ASSERT_EQ(em.size(), 1u);
  EXPECT_EQ(em[0].assignment[0].second, 0);
  EXPECT_EQ(em[0].assignment[1].second, 1);
}

TEST(EnumGuardsTest, CapRaisesResourceError) {
  auto t = std::make_shared<VarTable>();
  for (int i = 0; i < 12; ++i) t->add({"b" + std::to_string(i), Sort::boolean, 0, 1});
  GuardedPredicate p(t);
  EXPECT_EQ(enum_guards(p).size(), 4096u);
  EXPECT_THROW(enum_guards(p, 100), ResourceError);
}

TEST(EnumGuardsTest, PendulumQuarterSelectorsResidualsAreReal) {
  const ModelInstance m = pendulum_model(Rational(2), Rational(1, 10), 8, Rational(1, 10));
  const VarTable& vars = m.plant.vars();
  const auto em = enum_guards(m.plant.n());
  ASSERT_FALSE(em.empty());
  const std::vector<VarId> selectors{vars.at("y1"), vars.at("y2"), vars.at("y3"), vars.at("y4")};
  for (const auto& e : em) {
    int on = 0;
    for (const auto& [id, value] : e.assignment) {
      if (std::find(selectors.begin(), selectors.end(), id) != selectors.end()) on += value == 1;
    }
    EXPECT_GE(on, 1);
    EXPECT_LE(on, 4);
    for (const auto& k : e.residual) {
      for (const auto& [id, coef] : k.expr.terms()) EXPECT_EQ(vars[id].sort, Sort::real);
    }
  }
}

TEST(EnumGuardsTest, BuckAssignmentsOverSwitchAndDiode) {
  const ModelInstance m = buck_model(1, Rational(1, 1000000), 8, Rational(1, 100));
  const VarTable& vars = m.plant.vars();
  const auto em = enum_guards(m.plant.n());
  ASSERT_FALSE(em.empty());
  for (const auto& e : em) {
    std::set<std::string> names;
    for (const auto& [id, value] : e.assignment) names.insert(vars[id].name);
    EXPECT_EQ(names, (std::set<std::string>{"q0", "u1"}));
  }
}

}  // namespace
}  // namespace quantsyn
