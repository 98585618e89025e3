#include <gtest/gtest.h>

#include <algorithm>
#include <functional>

#include "lazyconv/checker.hpp"
#include "lazyconv/corpus.hpp"
#include "lazyconv/preshare.hpp"

using namespace lazyconv;

namespace {

std::size_t occurrences(const TermPtr& t, const std::string& x) {
  std::size_t n = 0;
  std::function<void(const TermPtr&)> go = [&](const TermPtr& u) {
    if (auto v = u->as<Var>()) n += v->name == x;
    else if (auto l = u->as<Lam>()) go(l->body);
    else if (auto a = u->as<App>()) go(a->fun), go(a->arg);
    else if (auto c = u->as<Ctor>()) for (auto& x : c->args) go(x);
    else if (auto m = u->as<Match>()) {
      go(m->scrutinee);
      for (auto& b : m->branches) go(b.body);
    }
  };
  go(t);
  return n;
}

}  // namespace

TEST(Preshare, UnshareRestoresBothSides) {
  for (const auto& p : gen_corpus(3, 200, 14)) {
    GeneralizedProblem g = preshare(p.lhs, p.rhs);
    auto [l, r] = unshare(g);
    EXPECT_TRUE(alpha_equal(l, p.lhs));
    EXPECT_TRUE(alpha_equal(r, p.rhs));
  }
}

TEST(Preshare, BindingsAreClosedOverEarlierBindingsAndUsedTwice) {
  for (const auto& p : gen_corpus(4, 200, 14)) {
    GeneralizedProblem g = preshare(p.lhs, p.rhs);
    std::vector<std::string> seen;
    for (std::size_t i = 0; i < g.bindings.size(); ++i) {
      const auto& [name, body] = g.bindings[i];
      EXPECT_EQ(name[0], '#');
      for (const auto& fv : free_vars(body))
        EXPECT_TRUE(std::find(seen.begin(), seen.end(), fv) != seen.end()) << fv << " in " << name;
      seen.push_back(name);
      std::size_t uses = occurrences(g.lhs, name) + occurrences(g.rhs, name);
      for (std::size_t j = i + 1; j < g.bindings.size(); ++j) uses += occurrences(g.bindings[j].second, name);
      EXPECT_GE(uses, 2u) << name;
    }
  }
}

TEST(Preshare, RepeatedSubtermIsBoundOnce) {
  GlobalDefs d = parse_defs("data Nat := O 0 | S 1;");
  TermPtr big = parse_term("S (S (S O))", d);
  GeneralizedProblem g = preshare(mk_ctor("S", {big}), big);
  ASSERT_FALSE(g.bindings.empty());
  EXPECT_TRUE(alpha_equal(g.bindings.back().second, big));
}

TEST(Preshare, DoesNotChangeVerdicts) {
  Options plain, shared;
  shared.presharing = true;
  shared.check_invariants = true;
  for (const auto& p : gen_corpus(5, 150, 12)) {
    auto a = run_check(*p.defs, p.lhs, p.rhs, plain, 1000000);
    auto b = run_check(*p.defs, p.lhs, p.rhs, shared, 1000000);
    if (decided(a.verdict) && decided(b.verdict)) EXPECT_EQ(a.verdict, b.verdict) << print_term(p.lhs);
    EXPECT_EQ(b.stats.invariant_violations, 0u) << b.stats.first_violation;
  }
}

TEST(Preshare, TrivialProblemHasNoBindings) {
  TermPtr x = mk_var("x");
  GeneralizedProblem g = trivial_problem(x, x);
  EXPECT_TRUE(g.bindings.empty());
}
