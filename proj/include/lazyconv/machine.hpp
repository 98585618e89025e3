#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "lazyconv/preshare.hpp"
#include "lazyconv/scheduler.hpp"
#include "lazyconv/syntax.hpp"

namespace lazyconv {

class MachineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using VarId = std::uint32_t;
using XiId = std::uint32_t;  // 0 is the empty renaming
using Args = std::vector<ChannelId>;

struct EnvNode;
using Env = std::shared_ptr<const EnvNode>;
struct EnvNode {
  const std::string* name;
  ChannelId chan;
  Env next;
};

// ---------------------------------------------------------------------------
// Values

struct Closure {
  const Lam* lam;
  Env env;
  VarId fresh;
  ChannelId body;  // evaluates the body with the binder bound to Neutral(fresh)
};

struct Neutral {
  VarId head;
  Args args;
};

struct ConstApp {
  std::uint32_t constant;
  Args args;
  ChannelId unfold;  // evaluates the definition applied to args
};

struct Frozen {
  std::uint32_t constant;
  Args args;
};

struct CtorVal {
  const std::string* name;
  Args args;
};

/// A match whose scrutinee evaluated to something that is not a
/// constructor. Branch bodies are evaluated under fresh binders on demand.
struct StuckMatch {
  ChannelId scrut;
  const Match* match;
  std::vector<std::vector<VarId>> binders;  // per branch
  std::vector<ChannelId> bodies;            // per branch
  Args args;                                // extra arguments applied to the match
};

struct Value {
  std::variant<Closure, Neutral, ConstApp, Frozen, CtorVal, StuckMatch> v;
  template <class T> const T* as() const { return std::get_if<T>(&v); }
};
using ValuePtr = std::shared_ptr<const Value>;

/// Either a channel still to be read (val == nullptr) or a value already
/// received from `chan`.
struct Operand {
  ChannelId chan = kNoChannel;
  ValuePtr val;
};

// ---------------------------------------------------------------------------
// Process expressions. Evaluator stacks are stored reversed: back() is the
// first argument.

struct EvalP {
  const Term* t;
  Env e;
};
struct ReduceP {
  const Term* t;
  Env e;
  Args s;
};
struct ApplyP {
  Operand f;
  Args s;
};
struct CaseP {
  Operand scrut;
  const Match* m;
  Env e;
  Args s;
};
struct ReadbackP {
  Operand src;
};
struct AssembleP {
  ValuePtr v;
  std::vector<ChannelId> parts;
};
struct ConvP {
  ChannelId l, r;
  XiId xi;
};
struct ConvVP {
  Operand l, r;
  XiId xi;
};
struct ConvItem {
  ChannelId l, r;
  XiId xi;
};
struct ConvStackP {
  std::shared_ptr<const std::vector<ConvItem>> items;
  std::size_t from;
};
enum class Connective { And, Choice, Biased, Or };
struct ConnectP {
  Connective op;
  ChannelId a, b;
};
struct ForwardP {
  ChannelId a;
};
struct LitP {
  bool b;
};

using ProcExpr = std::variant<std::monostate, EvalP, ReduceP, ApplyP, CaseP, ReadbackP, AssembleP, ConvP,
                              ConvVP, ConvStackP, ConnectP, ForwardP, LitP>;

enum class PayloadKind : std::uint8_t { None, Value, Bool, Term };

// ---------------------------------------------------------------------------

struct TraceEvent {
  std::uint64_t step;
  ChannelId chan;
  std::string constant;
  char side;  // 'L' or 'R'
  int rule;
};
std::string format_trace(const TraceEvent& e);

struct Options {
  bool frozen = true;
  bool conv_sharing = true;
  bool presharing = false;
  bool eta = false;
  /// Local scheduler invariant checks after every transition.
  bool check_invariants = false;
  std::function<void(const TraceEvent&)> trace;
};

struct Stats {
  std::uint64_t transitions = 0;
  std::uint64_t processes_created = 0;
  std::uint64_t conv_processes = 0;
  std::uint64_t peak_queue = 0;
  std::uint64_t memo_hits = 0;
  std::vector<std::uint32_t> eval_steps_by_channel;
  std::uint64_t invariant_violations = 0;
  std::string first_violation;

  std::uint64_t eval_steps(ChannelId c) const {
    return c < eval_steps_by_channel.size() ? eval_steps_by_channel[c] : 0;
  }
  std::uint64_t eval_steps_total() const;
  /// Flat "key: value" lines.
  std::string to_text() const;
};

enum class RunStatus { Done, OutOfFuel, Deadlock };

class Machine {
 public:
  Machine(const GlobalDefs& defs, Options opts);
  Machine(const Machine&) = delete;
  Machine& operator=(const Machine&) = delete;

  /// Root Conv(beta, beta', []) over the two sides of `p`.
  void init_conv(const GeneralizedProblem& p);
  /// Root Readback(Recv beta) with beta evaluating t.
  void init_normalize(const TermPtr& t);

  /// Runs until the root finishes, the queue empties, or `fuel` total
  /// transitions have been performed.
  RunStatus run(std::uint64_t fuel);
  /// One transition; false when the queue is empty.
  bool step();

  ChannelId root() const { return root_; }
  ChannelId lhs_channel() const { return lhs_; }
  ChannelId rhs_channel() const { return rhs_; }
  const Stats& stats() const { return stats_; }
  const Scheduler& scheduler() const { return sched_; }

  bool finished(ChannelId c) const { return sched_.is_finished(c); }
  PayloadKind payload_kind(ChannelId c) const { return procs_[c].kind; }
  const ValuePtr& value_of(ChannelId c) const;
  bool bool_of(ChannelId c) const;
  const TermPtr& term_of(ChannelId c) const;
  const ProcExpr& expr_of(ChannelId c) const { return procs_[c].expr; }
  const std::string& var_name(VarId v) const { return var_names_[v]; }
  bool is_fresh_var(VarId v) const { return var_fresh_[v]; }
  std::size_t channel_count() const { return procs_.size(); }

  // Low-level construction, used by the initial states and by tests.
  ChannelId alloc(ProcExpr e);
  ChannelId alloc_finished_bool(bool b);
  ChannelId alloc_finished_value(ValuePtr v);
  void make_root(ChannelId c);
  void need_from(ChannelId alpha, ChannelId beta) { sched_.need(alpha, beta); }

 private:
  struct Proc {
    ProcExpr expr;
    ValuePtr value;
    TermPtr term;
    bool boolean = false;
    PayloadKind kind = PayloadKind::None;
  };

  struct ConvKey {
    ChannelId l, r;
    XiId xi;
    bool operator==(const ConvKey& o) const { return l == o.l && r == o.r && xi == o.xi; }
  };
  struct ConvKeyHash {
    std::size_t operator()(const ConvKey& k) const {
      std::uint64_t h = (std::uint64_t(k.l) << 32) ^ k.r;
      h ^= std::uint64_t(k.xi) * 0x9E3779B97F4A7C15ull;
      h ^= h >> 29;
      return static_cast<std::size_t>(h * 0xBF58476D1CE4E5B9ull);
    }
  };
  struct XiNode {
    XiId parent;
    VarId l, r;
  };

  // Transitions.
  void step_eval(ChannelId a, EvalP& e);
  void step_reduce(ChannelId a, ReduceP& e);
  void step_apply(ChannelId a, ApplyP& e);
  void step_case(ChannelId a, CaseP& e);
  void step_readback(ChannelId a, ReadbackP& e);
  void step_assemble(ChannelId a, AssembleP& e);
  void step_conv(ChannelId a, ConvP& e);
  void step_convv(ChannelId a, ConvVP& e);
  void step_convstack(ChannelId a, ConvStackP& e);
  void step_connect(ChannelId a, ConnectP& e);
  void step_forward(ChannelId a, ForwardP& e);

  // Scheduling helpers.
  void to_tail(ChannelId a, ProcExpr next);
  /// Sets a's expression and makes it wait on the unfinished channels in
  /// deps (re-queueing a if all of them are already finished).
  void wait_for(ChannelId a, ProcExpr next, std::initializer_list<ChannelId> deps);
  void wait_for(ChannelId a, ProcExpr next, const std::vector<ChannelId>& deps);
  void finish_common(ChannelId a);
  void finish_value(ChannelId a, ValuePtr v);
  void finish_bool(ChannelId a, bool b);
  void finish_term(ChannelId a, TermPtr t);

  // Builders.
  ChannelId alloc_conv(ConvP c, bool* hit);
  ChannelId alloc_readback(ChannelId src);
  ChannelId arg_channel(const Term* t, const Env& e);
  ChannelId fresh_neutral_channel(VarId y);
  VarId fresh_var(const std::string& base);
  VarId free_var(const std::string& name);
  XiId xi_push(XiId xi, VarId l, VarId r);
  bool heads_equal(XiId xi, VarId l, VarId r) const;
  void trace(ChannelId a, std::uint32_t constant, char side, int rule);
  void check_after_step(ChannelId a);
  ValuePtr freeze(const ConstApp& c) const;
  /// The channel an operand was received from, or a finished channel
  /// holding its value.
  ChannelId operand_channel(const Operand& o);
  /// A finished channel holding the frozen form of the constant received
  /// on o.chan; one per source channel.
  ChannelId frozen_channel(const Operand& o, const ConstApp& c);
  /// Conv(l, r, xi), through the memo when sharing is on.
  ChannelId conv_channels(ChannelId l, ChannelId r, XiId xi);
  static ValuePtr make(Value v) { return std::make_shared<const Value>(std::move(v)); }
  TermPtr assemble_term(const Value& v, const std::vector<ChannelId>& parts) const;

  GlobalDefs defs_;
  Options opts_;
  std::vector<TermPtr> keep_alive_;
  std::vector<std::shared_ptr<std::vector<std::string>>> names_keep_;
  std::vector<ChannelId> globals_;  // K: constant index -> channel
  std::vector<Proc> procs_;
  Scheduler sched_;
  Stats stats_;
  ChannelId root_ = kNoChannel;
  ChannelId lhs_ = kNoChannel, rhs_ = kNoChannel;

  std::vector<std::string> var_names_;
  std::vector<bool> var_fresh_;
  std::unordered_map<std::string, VarId> free_vars_;
  std::uint64_t fresh_counter_ = 0;

  std::vector<XiNode> xi_nodes_;
  std::unordered_map<ConvKey, XiId, ConvKeyHash> xi_index_;
  std::unordered_map<ConvKey, ChannelId, ConvKeyHash> conv_memo_;
  std::unordered_map<ChannelId, ChannelId> readback_memo_;
  std::unordered_map<ChannelId, ChannelId> frozen_memo_;
};

}  // namespace lazyconv
