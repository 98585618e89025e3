#include <gtest/gtest.h>

#include <regex>

#include "lazyconv/bench.hpp"
#include "lazyconv/checker.hpp"
#include "lazyconv/corpus.hpp"
#include "lazyconv/oracle.hpp"

using namespace lazyconv;

namespace {

Options checked(Options o = {}) {
  o.check_invariants = true;
  return o;
}

Verdict check(const std::string& l, const std::string& r, Options o = {}, std::uint64_t fuel = 10000000) {
  const GlobalDefs& d = bench_defs();
  auto res = run_check(d, parse_term(l, d), parse_term(r, d), checked(o), fuel);
  EXPECT_EQ(res.stats.invariant_violations, 0u) << res.stats.first_violation;
  return res.verdict;
}

std::vector<Options> all_configs() {
  std::vector<Options> out;
  for (int mask = 0; mask < 16; ++mask) {
    Options o;
    o.frozen = mask & 1;
    o.conv_sharing = mask & 2;
    o.presharing = mask & 4;
    o.eta = mask & 8;
    out.push_back(checked(o));
  }
  return out;
}

}  // namespace

TEST(Convert, BasicVerdicts) {
  EXPECT_EQ(check("\\x. x", "\\y. y"), Verdict::Convertible);
  EXPECT_EQ(check("\\x y. x", "\\x y. y"), Verdict::NotConvertible);
  EXPECT_EQ(check("x", "y"), Verdict::NotConvertible);
  EXPECT_EQ(check("plus 2 2", "4"), Verdict::Convertible);
  EXPECT_EQ(check("exp2 3", "double (double (double 1))"), Verdict::Convertible);
  EXPECT_EQ(check("exp2 3", "7"), Verdict::NotConvertible);
  EXPECT_EQ(check("MkPair True 0", "MkPair True (plus 0 0)"), Verdict::Convertible);
  EXPECT_EQ(check("\\x. x", "O"), Verdict::NotConvertible);
  EXPECT_EQ(check("f (exp2 2)", "f 4"), Verdict::Convertible);
  EXPECT_EQ(check("match b with True -> exp2 2 | False -> O end", "match b with True -> 4 | False -> 0 end"),
            Verdict::Convertible);
  EXPECT_EQ(check("match b with True -> 1 | False -> O end", "match b with True -> O | False -> 1 end"),
            Verdict::NotConvertible);
  EXPECT_EQ(check("\\n. plus 0 n", "\\m. m"), Verdict::Convertible);
  EXPECT_EQ(check("\\n. plus n 0", "\\m. m"), Verdict::NotConvertible);
}

TEST(Convert, EtaOnlyWhenEnabled) {
  Options eta;
  eta.eta = true;
  EXPECT_EQ(check("\\x. f x", "f"), Verdict::NotConvertible);
  EXPECT_EQ(check("\\x. f x", "f", eta), Verdict::Convertible);
  EXPECT_EQ(check("g", "\\x. \\y. g x y", eta), Verdict::Convertible);
  EXPECT_EQ(check("\\x. plus x", "plus", eta), Verdict::Convertible);
  EXPECT_EQ(check("\\x. f x x", "f", eta), Verdict::NotConvertible);
}

TEST(Convert, FuelExhaustionIsReported) {
  EXPECT_EQ(check("exp2 10", "exp2 (plus 9 1)", {}, 1), Verdict::UnknownFuel);
  EXPECT_EQ(check("(\\x. x x) (\\x. x x)", "O", {}, 10000), Verdict::UnknownFuel);
}

TEST(Convert, DistinctHeadsFailWithoutEvaluatingArguments) {
  const GlobalDefs& d = bench_defs();
  Machine m(d, checked());
  m.init_conv(trivial_problem(parse_term("x (exp2 25)", d), parse_term("y (exp2 25)", d)));
  ASSERT_EQ(m.run(100000), RunStatus::Done);
  EXPECT_FALSE(m.bool_of(m.root()));
  for (ChannelId side : {m.lhs_channel(), m.rhs_channel()}) {
    const Neutral* n = m.value_of(side)->as<Neutral>();
    ASSERT_NE(n, nullptr);
    ASSERT_EQ(n->args.size(), 1u);
    EXPECT_EQ(m.stats().eval_steps(n->args[0]), 0u);
  }
}

TEST(Convert, SymmetricAndReflexiveOnCorpus) {
  for (const auto& p : gen_corpus(21, 150, 12)) {
    Options o = checked();
    auto lr = run_check(*p.defs, p.lhs, p.rhs, o, 1000000).verdict;
    auto rl = run_check(*p.defs, p.rhs, p.lhs, o, 1000000).verdict;
    if (decided(lr) && decided(rl)) EXPECT_EQ(lr, rl) << print_term(p.lhs) << " / " << print_term(p.rhs);
    auto self = run_check(*p.defs, p.lhs, p.lhs, o, 1000000).verdict;
    EXPECT_NE(self, Verdict::NotConvertible) << print_term(p.lhs);
  }
}

TEST(Convert, AgreesWithReferenceInEveryConfiguration) {
  std::size_t decided_pairs = 0;
  for (const auto& p : gen_corpus(22, 120, 12)) {
    OracleResult ref = oracle_convertible(*p.defs, p.lhs, p.rhs, 100000);
    if (!ref.decided) continue;
    ++decided_pairs;
    for (const Options& o : all_configs()) {
      auto got = run_check(*p.defs, p.lhs, p.rhs, o, 1000000);
      EXPECT_EQ(got.stats.invariant_violations, 0u) << got.stats.first_violation;
      if (!decided(got.verdict)) continue;
      // The reference normalizer has no eta rule.
      if (o.eta && !ref.convertible) continue;
      EXPECT_EQ(got.verdict == Verdict::Convertible, ref.convertible)
          << print_term(p.lhs) << " / " << print_term(p.rhs) << " frozen=" << o.frozen
          << " share=" << o.conv_sharing << " preshare=" << o.presharing << " eta=" << o.eta;
    }
  }
  EXPECT_GT(decided_pairs, 100u);
}

TEST(Convert, CorpusLabelsHold) {
  for (const auto& p : gen_corpus(23, 200, 12)) {
    if (p.label != PairLabel::Convertible) continue;
    auto got = run_check(*p.defs, p.lhs, p.rhs, checked(), 1000000);
    EXPECT_NE(got.verdict, Verdict::NotConvertible) << p.how << ": " << print_term(p.lhs);
  }
}

TEST(Convert, RunsAreDeterministic) {
  for (const auto& p : gen_corpus(24, 40, 12)) {
    auto a = run_check(*p.defs, p.lhs, p.rhs, Options{}, 1000000);
    auto b = run_check(*p.defs, p.lhs, p.rhs, Options{}, 1000000);
    EXPECT_EQ(a.verdict, b.verdict);
    EXPECT_EQ(a.stats.to_text(), b.stats.to_text());
  }
}

TEST(Convert, SharingReducesWorkOnRepeatedComparisons) {
  Options off;
  off.conv_sharing = false;
  off.frozen = false;
  const GlobalDefs& d = bench_defs();
  TermPtr l = parse_term("perfect 8 L", d), r = parse_term("perfect 7 (N L L)", d);
  auto with = run_check(d, l, r, Options{}, 100000000);
  auto without = run_check(d, l, r, off, 100000000);
  EXPECT_EQ(with.verdict, Verdict::Convertible);
  EXPECT_EQ(without.verdict, Verdict::Convertible);
  EXPECT_GT(with.stats.memo_hits, 0u);
  EXPECT_EQ(without.stats.memo_hits, 0u);
  EXPECT_LT(with.stats.transitions * 10, without.stats.transitions);
}

TEST(Convert, TraceReportsUnfoldingDecisions) {
  const GlobalDefs& d = bench_defs();
  std::vector<std::string> lines;
  Options o;
  o.trace = [&](const TraceEvent& e) { lines.push_back(format_trace(e)); };
  auto res = run_check(d, parse_term("exp2 3", d), parse_term("double (exp2 2)", d), o, 1000000);
  EXPECT_EQ(res.verdict, Verdict::Convertible);
  ASSERT_FALSE(lines.empty());
  std::regex shape(R"(step=\d+ chan=\d+ const=[a-z0-9_]+ side=[LR] rule=\d+)");
  for (const auto& l : lines) EXPECT_TRUE(std::regex_match(l, shape)) << l;
  // Nothing is unfolded when the heads already disagree.
  lines.clear();
  run_check(d, parse_term("x (exp2 3)", d), parse_term("y (exp2 3)", d), o, 1000000);
  EXPECT_TRUE(lines.empty());
}

TEST(Convert, PresharedReflexivityCostsNothingExtra) {
  const GlobalDefs& d = bench_defs();
  Options o;
  o.presharing = true;
  auto cost = [&](const char* src) {
    TermPtr t = parse_term(src, d);
    auto r = run_check(d, t, t, checked(o), 1000000);
    EXPECT_EQ(r.verdict, Verdict::Convertible);
    return r.stats.transitions;
  };
  EXPECT_EQ(cost("exp2 5"), cost("exp2 18"));
  EXPECT_EQ(cost("perfect 3 L"), cost("perfect 20 L"));
}
