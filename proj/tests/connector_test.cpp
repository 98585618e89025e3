#include <gtest/gtest.h>

#include <optional>

#include "lazyconv/machine.hpp"

using namespace lazyconv;

namespace {

// One side of a connector: a literal that finishes when first scheduled,
// or a computation that never finishes.
enum class Side { True, False, Diverge };

const char* name(Side s) { return s == Side::True ? "T" : s == Side::False ? "F" : "_"; }

struct Outcome {
  std::optional<bool> result;  // nullopt: still running when fuel ran out
  bool queue_empty;
  std::string violation;
};

Outcome run_connector(Connective op, Side a, Side b) {
  static const GlobalDefs defs;
  static const TermPtr omega = parse_term("(\\x. x x) (\\x. x x)", defs);
  Options o;
  o.check_invariants = true;
  Machine m(defs, o);
  auto side = [&](Side s) {
    return s == Side::Diverge ? m.alloc(EvalP{omega.get(), nullptr}) : m.alloc(LitP{s == Side::True});
  };
  ChannelId ca = side(a), cb = side(b);
  ChannelId root = m.alloc(ConnectP{op, ca, cb});
  m.make_root(root);
  RunStatus st = m.run(400);
  Outcome out;
  if (st == RunStatus::Done) out.result = m.bool_of(root);
  out.queue_empty = m.scheduler().queue_size() == 0;
  out.violation = m.stats().first_violation;
  if (out.violation.empty()) out.violation = m.scheduler().check_all();
  return out;
}

struct Row {
  Side a, b;
  std::optional<bool> expect;  // nullopt: must not decide
};

void check_table(Connective op, const std::vector<Row>& rows) {
  for (const Row& r : rows) {
    Outcome got = run_connector(op, r.a, r.b);
    std::string label = std::string(name(r.a)) + " " + name(r.b);
    EXPECT_EQ(got.result, r.expect) << label;
    EXPECT_EQ(got.violation, "") << label;
    // A decided connector leaves nothing behind: the losing side is dequeued.
    if (got.result) EXPECT_TRUE(got.queue_empty) << label;
    if (!got.result) EXPECT_FALSE(got.queue_empty) << label;
  }
}

constexpr Side T = Side::True, F = Side::False, D = Side::Diverge;

}  // namespace

TEST(Connector, And) {
  check_table(Connective::And, {{T, T, true}, {T, F, false}, {F, T, false}, {F, F, false},
                                {F, D, false}, {D, F, false}, {T, D, std::nullopt}, {D, T, std::nullopt},
                                {D, D, std::nullopt}});
}

TEST(Connector, Or) {
  check_table(Connective::Or, {{T, T, true}, {T, F, true}, {F, T, true}, {F, F, false},
                               {T, D, true}, {D, T, true}, {F, D, std::nullopt}, {D, F, std::nullopt},
                               {D, D, std::nullopt}});
}

TEST(Connector, BiasedChoicePrefersLeftTrue) {
  check_table(Connective::Biased, {{T, T, true}, {T, F, true}, {F, T, true}, {F, F, false},
                                   {T, D, true}, {D, T, true}, {D, F, false},
                                   {F, D, std::nullopt}, {D, D, std::nullopt}});
}

TEST(Connector, ChoiceTakesWhicheverFinishesFirst) {
  check_table(Connective::Choice, {{T, T, true}, {F, F, false}, {T, D, true}, {F, D, false},
                                   {D, T, true}, {D, F, false}, {D, D, std::nullopt}});
  // With both sides ready either answer is allowed.
  for (auto [a, b] : {std::pair{T, F}, std::pair{F, T}}) {
    Outcome got = run_connector(Connective::Choice, a, b);
    ASSERT_TRUE(got.result.has_value());
    EXPECT_TRUE(got.queue_empty);
  }
}

TEST(Connector, CancelledBranchIsNoLongerWaitedOn) {
  static const GlobalDefs defs;
  static const TermPtr omega = parse_term("(\\x. x x) (\\x. x x)", defs);
  Machine m(defs, Options{});
  ChannelId spin = m.alloc(EvalP{omega.get(), nullptr});
  ChannelId lit = m.alloc(LitP{false});
  ChannelId root = m.alloc(ConnectP{Connective::And, spin, lit});
  m.make_root(root);
  ASSERT_EQ(m.run(1000), RunStatus::Done);
  EXPECT_FALSE(m.bool_of(root));
  EXPECT_FALSE(m.finished(spin));
  EXPECT_FALSE(m.scheduler().in_queue(spin));
  EXPECT_TRUE(m.scheduler().waiters(spin).empty());
  EXPECT_TRUE(m.scheduler().waits_on(spin).empty());
}
