#include <gtest/gtest.h>

#include "lazyconv/corpus.hpp"
#include "lazyconv/oracle.hpp"

using namespace lazyconv;

namespace {

const GlobalDefs& defs() {
  static const GlobalDefs d = parse_defs(corpus_defs_text());
  return d;
}

TermPtr t(const char* src) { return parse_term(src, defs()); }

}  // namespace

TEST(Substitute, AvoidsCapture) {
  TermPtr r = substitute_naive(t("\\y. x y"), "x", t("y"));
  EXPECT_TRUE(alpha_equal(r, t("\\z. y z")));
  TermPtr m = substitute_naive(t("match n with O -> x | S y -> x y end"), "x", t("y"));
  EXPECT_TRUE(alpha_equal(m, t("match n with O -> y | S z -> y z end")));
  // Shadowed occurrences stay put.
  EXPECT_TRUE(alpha_equal(substitute_naive(t("\\x. x"), "x", t("O")), t("\\x. x")));
}

TEST(StepNaive, ContractsLeftmostOutermostFirst) {
  auto s = step_naive(defs(), t("(\\x. x) ((\\y. y) O)"));
  ASSERT_TRUE(s);
  EXPECT_TRUE(alpha_equal(*s, t("(\\y. y) O")));
  auto d = step_naive(defs(), t("pred (S O)"));
  ASSERT_TRUE(d);
  EXPECT_TRUE(alpha_equal(*d, t("(\\n. match n with O -> O | S m -> m end) (S O)")));
  auto m = step_naive(defs(), t("match S O with O -> True | S k -> False end"));
  ASSERT_TRUE(m);
  EXPECT_TRUE(alpha_equal(*m, t("False")));
  EXPECT_FALSE(step_naive(defs(), t("\\x. x O")));
  EXPECT_FALSE(step_naive(defs(), t("match x with O -> O | S k -> k end")));
}

TEST(NormalizeNaive, ExamplesAndFuel) {
  auto r = normalize_naive(defs(), t("double (S (S O))"), 1000);
  ASSERT_FALSE(r.out_of_fuel());
  EXPECT_TRUE(alpha_equal(r.term, t("S (S (S (S O)))")));
  EXPECT_GT(r.contractions, 0u);
  EXPECT_TRUE(normalize_naive(defs(), t("(\\x. x x) (\\x. x x)"), 50).out_of_fuel());
  // Normal order finds the normal form that an eager strategy would miss.
  auto k = normalize_naive(defs(), t("k O ((\\x. x x) (\\x. x x))"), 100);
  ASSERT_FALSE(k.out_of_fuel());
  EXPECT_TRUE(alpha_equal(k.term, t("O")));
}

TEST(NormalizeNaive, IsIdempotent) {
  for (const auto& p : gen_corpus(31, 100, 14)) {
    auto a = normalize_naive(*p.defs, p.lhs, 100000);
    if (a.out_of_fuel()) continue;
    auto b = normalize_naive(*p.defs, a.term, 100000);
    EXPECT_EQ(b.contractions, 0u);
    EXPECT_TRUE(alpha_equal(a.term, b.term));
    EXPECT_FALSE(step_naive(*p.defs, a.term));
  }
}

// Any reduction order that reaches a normal form reaches the same one.
TEST(NormalizeNaive, RandomOrderReachesSameNormalForm) {
  std::size_t compared = 0;
  for (const auto& p : gen_corpus(32, 120, 12)) {
    auto ref = normalize_naive(*p.defs, p.lhs, 100000);
    if (ref.out_of_fuel()) continue;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      auto r = normalize_random_order(*p.defs, p.lhs, 100000, seed);
      if (r.out_of_fuel()) continue;
      EXPECT_TRUE(alpha_equal(r.term, ref.term)) << print_term(p.lhs);
      ++compared;
    }
  }
  EXPECT_GT(compared, 200u);
}

TEST(OracleConvertible, Verdicts) {
  EXPECT_TRUE(oracle_convertible(defs(), t("\\x. x"), t("\\y. id y"), 1000).convertible);
  auto no = oracle_convertible(defs(), t("S O"), t("O"), 1000);
  EXPECT_TRUE(no.decided);
  EXPECT_FALSE(no.convertible);
  EXPECT_FALSE(oracle_convertible(defs(), t("(\\x. x x) (\\x. x x)"), t("O"), 100).decided);
}

TEST(OracleConvertible, SymmetricAndReflexiveOnCorpus) {
  for (const auto& p : gen_corpus(33, 100, 12)) {
    auto lr = oracle_convertible(*p.defs, p.lhs, p.rhs, 100000);
    auto rl = oracle_convertible(*p.defs, p.rhs, p.lhs, 100000);
    EXPECT_EQ(lr.decided, rl.decided);
    if (lr.decided) EXPECT_EQ(lr.convertible, rl.convertible);
    auto self = oracle_convertible(*p.defs, p.lhs, p.lhs, 100000);
    if (self.decided) EXPECT_TRUE(self.convertible);
  }
}
