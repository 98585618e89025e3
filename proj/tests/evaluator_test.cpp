#include <gtest/gtest.h>

#include <set>

#include "lazyconv/checker.hpp"
#include "lazyconv/corpus.hpp"
#include "lazyconv/oracle.hpp"

using namespace lazyconv;

namespace {

const GlobalDefs& nat_defs() {
  static const GlobalDefs d = parse_defs(R"(
data Bool := True 0 | False 0;
data Nat := O 0 | S 1;
def plus := \m n. match m with O -> n | S p -> S (plus p n) end;
def double := \n. plus n n;
def exp2 := \n. match n with O -> S O | S m -> double (exp2 m) end;
)");
  return d;
}

TermPtr nf(const std::string& src, const GlobalDefs& d = nat_defs(), Options o = {}) {
  o.check_invariants = true;
  auto r = normalize(d, parse_term(src, d), o, 10000000);
  EXPECT_EQ(r.status, RunStatus::Done) << src;
  EXPECT_EQ(r.stats.invariant_violations, 0u) << r.stats.first_violation;
  return r.term;
}

void expect_nf(const std::string& src, const std::string& expected) {
  TermPtr got = nf(src);
  ASSERT_TRUE(got);
  EXPECT_TRUE(alpha_equal(got, parse_term(expected, nat_defs()))) << src << " gave " << print_term(got);
}

}  // namespace

TEST(Normalize, SmallExamples) {
  expect_nf("(\\x. x) (\\y. y)", "\\y. y");
  expect_nf("\\x. (\\y. y) x", "\\x. x");
  expect_nf("exp2 3", "8");
  expect_nf("plus 2 (S n)", "S (S (S n))");
  expect_nf("\\f. f ((\\x. x) O) (match S O with O -> True | S k -> False end)", "\\f. f O False");
  expect_nf("match b with True -> (\\x. x) O | False -> plus 1 1 end", "match b with True -> O | False -> 2 end");
  expect_nf("(match b with True -> \\x. x | False -> \\y. O end) 3",
            "(match b with True -> \\x. x | False -> \\y. O end) 3");
}

TEST(Normalize, CaptureIsAvoided) {
  expect_nf("(\\x. \\y. x) y", "\\z. y");
  expect_nf("(\\x. \\y. \\z. x z) (\\q. y)", "\\a. \\b. y");
}

TEST(Normalize, AgreesWithReferenceOnCorpusTerms) {
  std::size_t compared = 0;
  for (const auto& p : gen_corpus(11, 200, 14)) {
    for (const TermPtr& t : {p.lhs}) {
      NaiveResult ref = normalize_naive(*p.defs, t, 100000);
      if (ref.out_of_fuel()) continue;
      TermPtr got = nf(print_term(t), *p.defs);
      ASSERT_TRUE(got);
      EXPECT_TRUE(alpha_equal(got, ref.term)) << print_term(t) << "\n machine " << print_term(got)
                                              << "\n reference " << print_term(ref.term);
      ++compared;
    }
  }
  EXPECT_GE(compared, 190u);
}

TEST(Normalize, OptionsDoNotChangeNormalForms) {
  for (const auto& p : gen_corpus(12, 60, 12)) {
    NaiveResult ref = normalize_naive(*p.defs, p.rhs, 100000);
    if (ref.out_of_fuel()) continue;
    for (int mask = 0; mask < 4; ++mask) {
      Options o;
      o.frozen = mask & 1;
      o.conv_sharing = mask & 2;
      TermPtr got = nf(print_term(p.rhs), *p.defs, o);
      ASSERT_TRUE(got);
      EXPECT_TRUE(alpha_equal(got, ref.term));
    }
  }
}

TEST(Normalize, OutOfFuelAndStuckEvaluation) {
  const GlobalDefs& d = nat_defs();
  auto r = normalize(d, parse_term("(\\x. x x) (\\x. x x)", d), Options{}, 5000);
  EXPECT_EQ(r.status, RunStatus::OutOfFuel);
  EXPECT_FALSE(r.term);
  // Strong reduction keeps unfolding a recursive constant under an open scrutinee.
  EXPECT_EQ(normalize(d, parse_term("plus n 0", d), Options{}, 5000).status, RunStatus::OutOfFuel);
  EXPECT_THROW(normalize(d, parse_term("match (\\x. x) with True -> O | False -> O end", d), Options{}, 1000),
               MachineError);
}

// A closure passed to two places is evaluated under its binder once; the
// second use finds the body channel already finished.
TEST(Normalize, SharedClosureBodyIsEvaluatedOnce) {
  const GlobalDefs& d = nat_defs();
  auto body_channels = [&](const std::string& src, std::uint64_t* steps) {
    TermPtr t = parse_term(src, d);
    Machine m(d, Options{});
    m.init_normalize(t);
    EXPECT_EQ(m.run(1000000), RunStatus::Done);
    std::set<ChannelId> bodies;
    for (ChannelId c = 0; c < m.channel_count(); ++c) {
      if (m.payload_kind(c) != PayloadKind::Value) continue;
      if (auto cl = m.value_of(c)->as<Closure>(); cl && cl->lam->binder == "x") bodies.insert(cl->body);
    }
    *steps = 0;
    for (ChannelId b : bodies) *steps += m.stats().eval_steps(b);
    return bodies.size();
  };
  std::uint64_t once = 0, twice = 0;
  EXPECT_EQ(body_channels("(\\f. g f) (\\x. plus 3 x)", &once), 1u);
  EXPECT_EQ(body_channels("(\\f. g f f) (\\x. plus 3 x)", &twice), 1u);
  EXPECT_GT(once, 0u);
  EXPECT_EQ(once, twice);
  EXPECT_TRUE(alpha_equal(nf("(\\f. g f f) (\\x. plus 3 x)"),
                          parse_term("g (\\x. S (S (S x))) (\\x. S (S (S x)))", d)));
}

TEST(Normalize, ArgumentsAreEvaluatedAtMostOnce) {
  const GlobalDefs& d = nat_defs();
  auto steps = [&](const char* src) {
    auto r = normalize(d, parse_term(src, d), Options{}, 1000000);
    EXPECT_EQ(r.status, RunStatus::Done);
    return r.stats.eval_steps_total();
  };
  EXPECT_LT(steps("(\\y. plus y (plus y y)) (exp2 5)") + 100, steps("plus (exp2 5) (plus (exp2 5) (exp2 5))"));
}
