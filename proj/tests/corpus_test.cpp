#include <gtest/gtest.h>

#include "lazyconv/corpus.hpp"
#include "lazyconv/oracle.hpp"

using namespace lazyconv;

TEST(Corpus, DeterministicInSeed) {
  auto a = gen_corpus(99, 50, 12), b = gen_corpus(99, 50, 12), c = gen_corpus(100, 50, 12);
  ASSERT_EQ(a.size(), 50u);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(print_term(a[i].lhs), print_term(b[i].lhs));
    EXPECT_EQ(print_term(a[i].rhs), print_term(b[i].rhs));
    differs |= print_term(a[i].lhs) != print_term(c[i].lhs);
  }
  EXPECT_TRUE(differs);
}

TEST(Corpus, TermsAreWellFormedAndSourceIsBounded) {
  for (const auto& p : gen_corpus(5, 300, 12)) {
    check_term(p.lhs, *p.defs);
    check_term(p.rhs, *p.defs);
    EXPECT_FALSE(p.how.empty());
  }
}

TEST(Corpus, ConvertibleLabelsAgreeWithReference) {
  std::size_t checked = 0;
  for (const auto& p : gen_corpus(6, 300, 12)) {
    if (p.label != PairLabel::Convertible) continue;
    auto r = oracle_convertible(*p.defs, p.lhs, p.rhs, 100000);
    if (!r.decided) continue;
    EXPECT_TRUE(r.convertible) << p.how << ": " << print_term(p.lhs) << " / " << print_term(p.rhs);
    ++checked;
  }
  EXPECT_GT(checked, 100u);
}

TEST(Corpus, MixesConvertibleAndUnrelatedPairs) {
  std::size_t conv = 0, unknown = 0;
  for (const auto& p : gen_corpus(8, 200, 12)) (p.label == PairLabel::Convertible ? conv : unknown)++;
  EXPECT_GT(conv, 40u);
  EXPECT_GT(unknown, 40u);
}

TEST(Corpus, GoldenFirstPair) {
  auto c = gen_corpus(1, 1, 12);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(print_term(c[0].lhs), "(\\b. (\\n. match n with O -> O | S m -> m end) (double O)) (is_zero O)");
  EXPECT_EQ(print_term(c[0].rhs), "(\\b. pred (double O)) (is_zero O)");
  EXPECT_EQ(c[0].how, "unfold");
}
