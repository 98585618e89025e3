#include <gtest/gtest.h>

#include "lazyconv/corpus.hpp"
#include "lazyconv/syntax.hpp"

using namespace lazyconv;

namespace {

const char* kDefs = R"(
data Bool := True 0 | False 0;
data Nat := O 0 | S 1;  -- comments run to end of line
def not := \b. match b with True -> False | False -> True end;
def plus := \m n. match m with O -> n | S p -> S (plus p n) end;
)";

GlobalDefs defs() { return parse_defs(kDefs); }

int error_line(const char* text) {
  try {
    parse_defs(text);
  } catch (const SyntaxError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(Parse, DefinitionsAreRegisteredInOrder) {
  GlobalDefs d = defs();
  ASSERT_EQ(d.data_decls().size(), 2u);
  ASSERT_EQ(d.const_defs().size(), 2u);
  EXPECT_EQ(d.const_defs()[1].name, "plus");
  EXPECT_EQ(d.find_ctor("S")->arity, 1u);
  EXPECT_TRUE(d.is_type_name("Nat"));
  EXPECT_FALSE(d.find_const("minus"));
}

TEST(Parse, PrintParseRoundTrip) {
  GlobalDefs d = defs();
  for (const char* src : {"\\x. x", "\\x y. x y y", "plus (S O) (S (S O))", "\\f. f (\\x. not x) True",
                          "match S O with O -> True | S m -> not (not False) end", "(\\x. x) (\\y. y)",
                          "\\n. (match n with O -> \\z. z | S p -> \\z. plus z p end) O"}) {
    TermPtr t = parse_term(src, d);
    TermPtr back = parse_term(print_term(t), d);
    EXPECT_TRUE(alpha_equal(t, back)) << src << " printed as " << print_term(t);
  }
}

TEST(Parse, CorpusTermsRoundTrip) {
  for (const auto& p : gen_corpus(7, 100, 14))
    for (const auto& t : {p.lhs, p.rhs}) EXPECT_TRUE(alpha_equal(t, parse_term(print_term(t), *p.defs)));
}

TEST(Parse, NumeralsExpandToUnary) {
  GlobalDefs d = defs();
  EXPECT_TRUE(alpha_equal(parse_term("plus 2 0", d), parse_term("plus (S (S O)) O", d)));
  EXPECT_THROW(parse_term("3", GlobalDefs{}), SyntaxError);
}

TEST(Parse, UnknownLowercaseNamesAreFreeVariables) {
  TermPtr t = parse_term("\\x. f x y", defs());
  EXPECT_EQ(free_vars(t), (std::vector<std::string>{"f", "y"}));
  EXPECT_FALSE(is_closed(t));
}

TEST(Parse, Rejections) {
  GlobalDefs d = defs();
  EXPECT_THROW(parse_term("S", d), SyntaxError);                                  // unsaturated
  EXPECT_THROW(parse_term("S O O", d), SyntaxError);                              // oversaturated
  EXPECT_THROW(parse_term("Foo", d), SyntaxError);                                // unknown ctor
  EXPECT_THROW(parse_term("match O with O -> O end", d), SyntaxError);            // not exhaustive
  EXPECT_THROW(parse_term("match O with O -> O | O -> O | S m -> O end", d), SyntaxError);
  EXPECT_THROW(parse_term("match O with O -> O | True -> O end", d), SyntaxError);  // mixed types
  EXPECT_THROW(parse_term("match O with O -> O end O", d), SyntaxError);  // needs parentheses
  EXPECT_THROW(parse_term("match O with O -> O | S a b -> O end", d), SyntaxError);  // wrong binder count
  EXPECT_THROW(parse_term("\\x x", d), SyntaxError);
  EXPECT_THROW(parse_term("x )", d), SyntaxError);
}

TEST(Parse, DefinitionErrorsCarryLocations) {
  EXPECT_EQ(error_line("data Nat := O 0 | S 1;\ndef f := \\x. g x;"), 2);  // undeclared constant
  EXPECT_EQ(error_line("data A := X 0;\ndata B := X 0;"), 2);             // duplicate ctor
  EXPECT_EQ(error_line("def f := \\x. x;\n\ndef f := \\y. y;"), 3);
  EXPECT_EQ(error_line("data A := X;"), 1);
  EXPECT_EQ(error_line("def f := \\x. x"), 1);
}

TEST(Parse, RecursiveAndForwardReferences) {
  GlobalDefs d = parse_defs("def f := \\x. g x;\ndef g := \\x. f x;");
  EXPECT_EQ(d.const_defs().size(), 2u);
}

TEST(Alpha, BoundNamesDoNotMatter) {
  GlobalDefs d = defs();
  EXPECT_TRUE(alpha_equal(parse_term("\\x y. x", d), parse_term("\\a b. a", d)));
  EXPECT_FALSE(alpha_equal(parse_term("\\x y. x", d), parse_term("\\a b. b", d)));
  EXPECT_FALSE(alpha_equal(parse_term("\\x. y", d), parse_term("\\x. z", d)));
  EXPECT_TRUE(alpha_equal(parse_term("match O with O -> O | S m -> m end", d),
                          parse_term("match O with O -> O | S k -> k end", d)));
  // A free name is not the same as a bound one with that name.
  EXPECT_FALSE(alpha_equal(parse_term("\\x. \\y. x", d), parse_term("\\y. \\y. y", d)));
}

TEST(Terms, SizeCountsNodes) {
  GlobalDefs d = defs();
  EXPECT_EQ(term_size(parse_term("x", d)), 1u);
  EXPECT_EQ(term_size(parse_term("\\x. x x", d)), 4u);
}

TEST(Terms, TidyNamesAvoidsCapture) {
  TermPtr t = mk_lam("x#3", mk_lam("x", mk_app(mk_var("x#3"), mk_var("x"))));
  TermPtr u = tidy_names(t);
  EXPECT_TRUE(alpha_equal(t, u));
  EXPECT_EQ(print_term(u).find('#'), std::string::npos);
}

TEST(Alpha, IsAnEquivalenceOnCorpusTerms) {
  std::vector<TermPtr> terms;
  for (const auto& p : gen_corpus(13, 60, 10)) terms.push_back(p.lhs), terms.push_back(p.rhs);
  for (const auto& a : terms) {
    EXPECT_TRUE(alpha_equal(a, a));
    EXPECT_TRUE(alpha_equal(a, tidy_names(a)));
  }
  for (const auto& a : terms)
    for (const auto& b : terms) {
      bool ab = alpha_equal(a, b);
      EXPECT_EQ(ab, alpha_equal(b, a));
      if (!ab) continue;
      for (const auto& c : terms)
        if (alpha_equal(b, c)) EXPECT_TRUE(alpha_equal(a, c));
    }
}
