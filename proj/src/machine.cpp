#include "lazyconv/machine.hpp"

#include <algorithm>
#include <sstream>

namespace lazyconv {

namespace {

const EnvNode* lookup(const Env& e, const std::string& name) {
  for (const EnvNode* n = e.get(); n; n = n->next.get())
    if (*n->name == name) return n;
  return nullptr;
}

Env extend(Env e, const std::string* name, ChannelId c) {
  return std::make_shared<const EnvNode>(EnvNode{name, c, std::move(e)});
}

// Appends a reversed evaluator stack to an argument list in natural order.
Args append_stack(const Args& args, const Args& reversed) {
  Args out;
  out.reserve(args.size() + reversed.size());
  out.insert(out.end(), args.begin(), args.end());
  out.insert(out.end(), reversed.rbegin(), reversed.rend());
  return out;
}

std::shared_ptr<const std::vector<ConvItem>> zip_args(const Args& l, const Args& r, XiId xi) {
  auto items = std::make_shared<std::vector<ConvItem>>();
  items->reserve(l.size());
  for (std::size_t i = 0; i < l.size(); ++i) items->push_back({l[i], r[i], xi});
  return items;
}

bool is_neutral_like(const Value& v) {
  return v.as<Neutral>() || v.as<Frozen>() || v.as<StuckMatch>();
}

ValuePtr with_extra_arg(const Value& v, ChannelId b) {
  Value out = v;
  std::visit(
      [b](auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Neutral> || std::is_same_v<T, Frozen> || std::is_same_v<T, StuckMatch>)
          x.args.push_back(b);
      },
      out.v);
  return std::make_shared<const Value>(std::move(out));
}

}  // namespace

std::string format_trace(const TraceEvent& e) {
  std::ostringstream os;
  os << "step=" << e.step << " chan=" << e.chan << " const=" << e.constant << " side=" << e.side
     << " rule=" << e.rule;
  return os.str();
}

std::uint64_t Stats::eval_steps_total() const {
  std::uint64_t n = 0;
  for (auto s : eval_steps_by_channel) n += s;
  return n;
}

std::string Stats::to_text() const {
  std::ostringstream os;
  os << "transitions: " << transitions << "\n";
  os << "processes_created: " << processes_created << "\n";
  os << "eval_steps_by_channel:";
  for (std::size_t c = 0; c < eval_steps_by_channel.size(); ++c)
    if (eval_steps_by_channel[c]) os << ' ' << c << '=' << eval_steps_by_channel[c];
  os << "\n";
  os << "eval_steps_total: " << eval_steps_total() << "\n";
  os << "conv_processes: " << conv_processes << "\n";
  os << "peak_queue: " << peak_queue << "\n";
  os << "memo_hits: " << memo_hits << "\n";
  if (invariant_violations) {
    os << "invariant_violations: " << invariant_violations << "\n";
    os << "first_violation: " << first_violation << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Construction

Machine::Machine(const GlobalDefs& defs, Options opts) : defs_(defs), opts_(std::move(opts)) {
  sched_.set_tracking(opts_.check_invariants);
  xi_nodes_.push_back({0, 0, 0});
  for (const auto& c : defs_.const_defs()) globals_.push_back(alloc(EvalP{c.body.get(), nullptr}));
}

ChannelId Machine::alloc(ProcExpr e) {
  ChannelId id = sched_.add_channel();
  if (std::holds_alternative<ConvP>(e) || std::holds_alternative<ConvVP>(e) ||
      std::holds_alternative<ConvStackP>(e))
    ++stats_.conv_processes;
  procs_.push_back(Proc{std::move(e), nullptr, nullptr, false, PayloadKind::None});
  stats_.eval_steps_by_channel.push_back(0);
  ++stats_.processes_created;
  return id;
}

ChannelId Machine::alloc_finished_value(ValuePtr v) {
  ChannelId c = alloc(std::monostate{});
  procs_[c].value = std::move(v);
  procs_[c].kind = PayloadKind::Value;
  sched_.finish(c);
  return c;
}

ChannelId Machine::alloc_finished_bool(bool b) {
  ChannelId c = alloc(std::monostate{});
  procs_[c].boolean = b;
  procs_[c].kind = PayloadKind::Bool;
  sched_.finish(c);
  return c;
}

void Machine::make_root(ChannelId c) {
  root_ = c;
  sched_.set_root(c);
  sched_.push_back(c);
}

void Machine::init_conv(const GeneralizedProblem& p) {
  keep_alive_.push_back(p.lhs);
  keep_alive_.push_back(p.rhs);
  // Binding names must outlive the environments that point at them.
  auto names = std::make_shared<std::vector<std::string>>();
  for (const auto& b : p.bindings) names->push_back(b.first);
  names_keep_.push_back(names);

  Env env;
  for (std::size_t i = 0; i < p.bindings.size(); ++i) {
    keep_alive_.push_back(p.bindings[i].second);
    ChannelId g = alloc(EvalP{p.bindings[i].second.get(), env});
    env = extend(env, &(*names)[i], g);
  }
  auto side = [&](const TermPtr& t) {
    if (auto* v = t->as<Var>())
      if (auto* n = lookup(env, v->name)) return n->chan;
    return alloc(EvalP{t.get(), env});
  };
  lhs_ = side(p.lhs);
  rhs_ = side(p.rhs);
  ChannelId r = alloc(ConvP{lhs_, rhs_, 0});
  if (opts_.conv_sharing) conv_memo_.emplace(ConvKey{lhs_, rhs_, 0}, r);
  make_root(r);
}

void Machine::init_normalize(const TermPtr& t) {
  keep_alive_.push_back(t);
  lhs_ = alloc(EvalP{t.get(), nullptr});
  make_root(alloc(ReadbackP{{lhs_, nullptr}}));
}

const ValuePtr& Machine::value_of(ChannelId c) const {
  if (procs_[c].kind != PayloadKind::Value) throw std::logic_error("channel does not carry a value");
  return procs_[c].value;
}

bool Machine::bool_of(ChannelId c) const {
  if (procs_[c].kind != PayloadKind::Bool) throw std::logic_error("channel does not carry a Boolean");
  return procs_[c].boolean;
}

const TermPtr& Machine::term_of(ChannelId c) const {
  if (procs_[c].kind != PayloadKind::Term) throw std::logic_error("channel does not carry a term");
  return procs_[c].term;
}

// ---------------------------------------------------------------------------
// Driver

RunStatus Machine::run(std::uint64_t fuel) {
  while (!sched_.is_finished(root_)) {
    if (stats_.transitions >= fuel) return RunStatus::OutOfFuel;
    if (!step()) return RunStatus::Deadlock;
  }
  return RunStatus::Done;
}

bool Machine::step() {
  auto next = sched_.pop_head();
  if (!next) return false;
  ChannelId a = *next;
  ++stats_.transitions;
  if (opts_.check_invariants && !sched_.demanded(a)) {
    ++stats_.invariant_violations;
    if (stats_.first_violation.empty())
      stats_.first_violation = "channel " + std::to_string(a) + " ran without being needed";
  }
  ProcExpr e = std::move(procs_[a].expr);
  procs_[a].expr = std::monostate{};
  std::visit(
      [&](auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, EvalP>) step_eval(a, x);
        else if constexpr (std::is_same_v<T, ReduceP>) step_reduce(a, x);
        else if constexpr (std::is_same_v<T, ApplyP>) step_apply(a, x);
        else if constexpr (std::is_same_v<T, CaseP>) step_case(a, x);
        else if constexpr (std::is_same_v<T, ReadbackP>) step_readback(a, x);
        else if constexpr (std::is_same_v<T, AssembleP>) step_assemble(a, x);
        else if constexpr (std::is_same_v<T, ConvP>) step_conv(a, x);
        else if constexpr (std::is_same_v<T, ConvVP>) step_convv(a, x);
        else if constexpr (std::is_same_v<T, ConvStackP>) step_convstack(a, x);
        else if constexpr (std::is_same_v<T, ConnectP>) step_connect(a, x);
        else if constexpr (std::is_same_v<T, ForwardP>) step_forward(a, x);
        else if constexpr (std::is_same_v<T, LitP>) finish_bool(a, x.b);
        else throw std::logic_error("stepping an empty process");
      },
      e);
  stats_.peak_queue = std::max<std::uint64_t>(stats_.peak_queue, sched_.queue_size());
  if (opts_.check_invariants) check_after_step(a);
  return true;
}

void Machine::check_after_step(ChannelId) {
  for (ChannelId c : sched_.take_touched()) {
    std::string err = sched_.check_channel(c);
    if (err.empty() && !sched_.is_finished(c) && !sched_.in_queue(c) && !sched_.waiters(c).empty() &&
        sched_.waits_on(c).empty())
      err = "channel " + std::to_string(c) + " is needed but neither queued nor blocked";
    if (err.empty() && sched_.is_finished(c) && !sched_.waits_on(c).empty())
      err = "channel " + std::to_string(c) + " finished while still waiting";
    if (!err.empty()) {
      ++stats_.invariant_violations;
      if (stats_.first_violation.empty()) stats_.first_violation = err;
    }
  }
}

void Machine::to_tail(ChannelId a, ProcExpr next) {
  procs_[a].expr = std::move(next);
  sched_.push_back(a);
}

void Machine::wait_for(ChannelId a, ProcExpr next, std::initializer_list<ChannelId> deps) {
  procs_[a].expr = std::move(next);
  bool blocked = false;
  for (ChannelId d : deps)
    if (!sched_.is_finished(d)) {
      sched_.need(a, d);
      blocked = true;
    }
  if (!blocked) sched_.push_back(a);
}

void Machine::wait_for(ChannelId a, ProcExpr next, const std::vector<ChannelId>& deps) {
  procs_[a].expr = std::move(next);
  bool blocked = false;
  for (ChannelId d : deps)
    if (!sched_.is_finished(d)) {
      sched_.need(a, d);
      blocked = true;
    }
  if (!blocked) sched_.push_back(a);
}

void Machine::finish_common(ChannelId a) {
  procs_[a].expr = std::monostate{};
  std::vector<ChannelId> deps = sched_.waits_on(a);
  for (ChannelId d : deps) sched_.unneed(a, d);
  sched_.finish(a);
}

void Machine::finish_value(ChannelId a, ValuePtr v) {
  procs_[a].value = std::move(v);
  procs_[a].kind = PayloadKind::Value;
  finish_common(a);
}

void Machine::finish_bool(ChannelId a, bool b) {
  procs_[a].boolean = b;
  procs_[a].kind = PayloadKind::Bool;
  finish_common(a);
}

void Machine::finish_term(ChannelId a, TermPtr t) {
  procs_[a].term = std::move(t);
  procs_[a].kind = PayloadKind::Term;
  finish_common(a);
}

// ---------------------------------------------------------------------------
// Names and renamings

VarId Machine::fresh_var(const std::string& base) {
  auto id = static_cast<VarId>(var_names_.size());
  std::string b = base.substr(0, base.find('#'));
  var_names_.push_back(b + "#" + std::to_string(++fresh_counter_));
  var_fresh_.push_back(true);
  return id;
}

VarId Machine::free_var(const std::string& name) {
  auto it = free_vars_.find(name);
  if (it != free_vars_.end()) return it->second;
  auto id = static_cast<VarId>(var_names_.size());
  var_names_.push_back(name);
  var_fresh_.push_back(false);
  free_vars_.emplace(name, id);
  return id;
}

ChannelId Machine::fresh_neutral_channel(VarId y) {
  return alloc_finished_value(make(Value{Neutral{y, {}}}));
}

XiId Machine::xi_push(XiId xi, VarId l, VarId r) {
  if (!var_fresh_[l] || !var_fresh_[r]) throw MachineError("renaming extended with a non-fresh variable");
  ConvKey key{l, r, xi};
  auto it = xi_index_.find(key);
  if (it != xi_index_.end()) return it->second;
  auto id = static_cast<XiId>(xi_nodes_.size());
  xi_nodes_.push_back({xi, l, r});
  xi_index_.emplace(key, id);
  return id;
}

bool Machine::heads_equal(XiId xi, VarId l, VarId r) const {
  for (XiId i = xi; i != 0; i = xi_nodes_[i].parent) {
    const XiNode& n = xi_nodes_[i];
    if (n.l == l || n.r == r) return n.l == l && n.r == r;
  }
  return l == r;
}

void Machine::trace(ChannelId a, std::uint32_t constant, char side, int rule) {
  if (!opts_.trace) return;
  opts_.trace(TraceEvent{stats_.transitions, a, defs_.const_defs()[constant].name, side, rule});
}

ValuePtr Machine::freeze(const ConstApp& c) const { return make(Value{Frozen{c.constant, c.args}}); }

ChannelId Machine::operand_channel(const Operand& o) {
  return o.chan != kNoChannel ? o.chan : alloc_finished_value(o.val);
}

ChannelId Machine::frozen_channel(const Operand& o, const ConstApp& c) {
  if (o.chan == kNoChannel) return alloc_finished_value(freeze(c));
  auto it = frozen_memo_.find(o.chan);
  if (it != frozen_memo_.end()) return it->second;
  ChannelId f = alloc_finished_value(freeze(c));
  frozen_memo_.emplace(o.chan, f);
  return f;
}

ChannelId Machine::conv_channels(ChannelId l, ChannelId r, XiId xi) {
  bool hit = false;
  return alloc_conv(ConvP{l, r, xi}, &hit);
}

// ---------------------------------------------------------------------------
// Evaluation

ChannelId Machine::arg_channel(const Term* t, const Env& e) {
  // A bound variable argument reuses its channel; this is what lets the
  // same source binding reach both sides of a comparison as one channel.
  if (auto* v = t->as<Var>())
    if (auto* n = lookup(e, v->name)) return n->chan;
  return alloc(EvalP{t, e});
}

void Machine::step_eval(ChannelId a, EvalP& e) {
  ++stats_.eval_steps_by_channel[a];
  to_tail(a, ReduceP{e.t, std::move(e.e), {}});
}

void Machine::step_reduce(ChannelId a, ReduceP& r) {
  ++stats_.eval_steps_by_channel[a];
  const Term& t = *r.t;
  if (auto* app = t.as<App>()) {
    r.s.push_back(arg_channel(app->arg.get(), r.e));
    to_tail(a, ReduceP{app->fun.get(), std::move(r.e), std::move(r.s)});
  } else if (auto* lam = t.as<Lam>()) {
    VarId y = fresh_var(lam->binder);
    ChannelId g = fresh_neutral_channel(y);
    ChannelId d = alloc(EvalP{lam->body.get(), extend(r.e, &lam->binder, g)});
    ValuePtr v = make(Value{Closure{lam, r.e, y, d}});
    to_tail(a, ApplyP{{kNoChannel, std::move(v)}, std::move(r.s)});
  } else if (auto* var = t.as<Var>()) {
    if (auto* n = lookup(r.e, var->name)) {
      to_tail(a, ApplyP{{n->chan, nullptr}, std::move(r.s)});
    } else {
      to_tail(a, ApplyP{{kNoChannel, make(Value{Neutral{free_var(var->name), {}}})}, std::move(r.s)});
    }
  } else if (auto* c = t.as<Const>()) {
    auto idx = defs_.find_const(c->name);
    if (!idx) throw MachineError("undeclared constant '" + c->name + "'");
    auto ci = static_cast<std::uint32_t>(*idx);
    to_tail(a, ApplyP{{kNoChannel, make(Value{ConstApp{ci, {}, globals_[ci]}})}, std::move(r.s)});
  } else if (auto* k = t.as<Ctor>()) {
    Args args;
    args.reserve(k->args.size());
    for (const auto& x : k->args) args.push_back(arg_channel(x.get(), r.e));
    to_tail(a, ApplyP{{kNoChannel, make(Value{CtorVal{&k->name, std::move(args)}})}, std::move(r.s)});
  } else {
    const auto& m = *t.as<Match>();
    ChannelId s = arg_channel(m.scrutinee.get(), r.e);
    to_tail(a, CaseP{{s, nullptr}, &m, std::move(r.e), std::move(r.s)});
  }
}

void Machine::step_apply(ChannelId a, ApplyP& p) {
  ++stats_.eval_steps_by_channel[a];
  if (!p.f.val) {
    if (sched_.is_finished(p.f.chan)) {
      p.f.val = value_of(p.f.chan);
      to_tail(a, std::move(p));
    } else {
      ChannelId b = p.f.chan;
      wait_for(a, std::move(p), {b});
    }
    return;
  }
  if (p.s.empty()) {
    finish_value(a, std::move(p.f.val));
    return;
  }
  const Value& v = *p.f.val;
  if (auto* cl = v.as<Closure>()) {
    ChannelId b = p.s.back();
    p.s.pop_back();
    to_tail(a, ReduceP{cl->lam->body.get(), extend(cl->env, &cl->lam->binder, b), std::move(p.s)});
  } else if (auto* n = v.as<Neutral>()) {
    finish_value(a, make(Value{Neutral{n->head, append_stack(n->args, p.s)}}));
  } else if (auto* c = v.as<ConstApp>()) {
    Args extended = append_stack(c->args, p.s);
    ChannelId g = alloc(ApplyP{{c->unfold, nullptr}, std::move(p.s)});
    finish_value(a, make(Value{ConstApp{c->constant, std::move(extended), g}}));
  } else if (auto* f = v.as<Frozen>()) {
    finish_value(a, make(Value{Frozen{f->constant, append_stack(f->args, p.s)}}));
  } else if (auto* sm = v.as<StuckMatch>()) {
    StuckMatch out = *sm;
    out.args = append_stack(sm->args, p.s);
    finish_value(a, make(Value{std::move(out)}));
  } else {
    throw MachineError("constructor over-applied");
  }
}

void Machine::step_case(ChannelId a, CaseP& p) {
  ++stats_.eval_steps_by_channel[a];
  if (!p.scrut.val) {
    if (sched_.is_finished(p.scrut.chan)) {
      p.scrut.val = value_of(p.scrut.chan);
      to_tail(a, std::move(p));
    } else {
      ChannelId b = p.scrut.chan;
      wait_for(a, std::move(p), {b});
    }
    return;
  }
  const Value& v = *p.scrut.val;
  if (auto* k = v.as<CtorVal>()) {
    const Branch* br = p.m->find_branch(*k->name);
    if (!br || br->binders.size() != k->args.size()) throw MachineError("no match branch for '" + *k->name + "'");
    Env e = p.e;
    for (std::size_t i = 0; i < br->binders.size(); ++i) e = extend(e, &br->binders[i], k->args[i]);
    to_tail(a, ReduceP{br->body.get(), std::move(e), std::move(p.s)});
  } else if (auto* c = v.as<ConstApp>()) {
    to_tail(a, CaseP{{c->unfold, nullptr}, p.m, std::move(p.e), std::move(p.s)});
  } else if (v.as<Closure>()) {
    throw MachineError("match on function");
  } else {
    StuckMatch sm{p.scrut.chan, p.m, {}, {}, {}};
    for (const auto& br : p.m->branches) {
      std::vector<VarId> ys;
      Env e = p.e;
      for (const auto& x : br.binders) {
        VarId y = fresh_var(x);
        ys.push_back(y);
        e = extend(e, &x, fresh_neutral_channel(y));
      }
      sm.binders.push_back(std::move(ys));
      sm.bodies.push_back(alloc(EvalP{br.body.get(), std::move(e)}));
    }
    sm.args.assign(p.s.rbegin(), p.s.rend());
    finish_value(a, make(Value{std::move(sm)}));
  }
}

// ---------------------------------------------------------------------------
// Readback

ChannelId Machine::alloc_readback(ChannelId src) {
  auto it = readback_memo_.find(src);
  if (it != readback_memo_.end()) return it->second;
  ChannelId c = alloc(ReadbackP{{src, nullptr}});
  readback_memo_.emplace(src, c);
  return c;
}

void Machine::step_readback(ChannelId a, ReadbackP& p) {
  if (!p.src.val) {
    if (sched_.is_finished(p.src.chan)) {
      p.src.val = value_of(p.src.chan);
      to_tail(a, std::move(p));
    } else {
      ChannelId b = p.src.chan;
      wait_for(a, std::move(p), {b});
    }
    return;
  }
  const Value& v = *p.src.val;
  std::vector<ChannelId> parts;
  auto add_all = [&](const Args& args) {
    for (ChannelId x : args) parts.push_back(alloc_readback(x));
  };
  if (auto* cl = v.as<Closure>()) {
    parts.push_back(alloc_readback(cl->body));
  } else if (auto* n = v.as<Neutral>()) {
    add_all(n->args);
  } else if (auto* c = v.as<ConstApp>()) {
    to_tail(a, ReadbackP{{c->unfold, nullptr}});
    return;
  } else if (auto* f = v.as<Frozen>()) {
    add_all(f->args);
  } else if (auto* k = v.as<CtorVal>()) {
    add_all(k->args);
  } else {
    const auto& sm = *v.as<StuckMatch>();
    parts.push_back(alloc_readback(sm.scrut));
    add_all(sm.bodies);
    add_all(sm.args);
  }
  std::vector<ChannelId> deps = parts;
  wait_for(a, AssembleP{std::move(p.src.val), std::move(parts)}, deps);
}

void Machine::step_assemble(ChannelId a, AssembleP& p) {
  std::vector<ChannelId> pending;
  for (ChannelId c : p.parts)
    if (!sched_.is_finished(c)) pending.push_back(c);
  if (!pending.empty()) {
    wait_for(a, std::move(p), pending);
    return;
  }
  finish_term(a, assemble_term(*p.v, p.parts));
}

TermPtr Machine::assemble_term(const Value& v, const std::vector<ChannelId>& parts) const {
  std::vector<TermPtr> ts;
  ts.reserve(parts.size());
  for (ChannelId c : parts) ts.push_back(term_of(c));
  if (auto* cl = v.as<Closure>()) return mk_lam(var_names_[cl->fresh], ts[0]);
  if (auto* n = v.as<Neutral>()) return mk_apps(mk_var(var_names_[n->head]), ts);
  if (auto* f = v.as<Frozen>()) return mk_apps(mk_const(defs_.const_defs()[f->constant].name), ts);
  if (auto* k = v.as<CtorVal>()) return mk_ctor(*k->name, std::move(ts));
  const auto& sm = *v.as<StuckMatch>();
  std::vector<Branch> branches;
  for (std::size_t i = 0; i < sm.match->branches.size(); ++i) {
    Branch b{sm.match->branches[i].ctor, {}, ts[1 + i]};
    for (VarId y : sm.binders[i]) b.binders.push_back(var_names_[y]);
    branches.push_back(std::move(b));
  }
  std::vector<TermPtr> rest(ts.begin() + 1 + static_cast<long>(sm.bodies.size()), ts.end());
  return mk_apps(mk_match(ts[0], std::move(branches)), rest);
}

// ---------------------------------------------------------------------------
// Convertibility

ChannelId Machine::alloc_conv(ConvP c, bool* hit) {
  *hit = false;
  if (!opts_.conv_sharing) return alloc(c);
  ConvKey key{c.l, c.r, c.xi};
  auto it = conv_memo_.find(key);
  if (it != conv_memo_.end()) {
    *hit = true;
    ++stats_.memo_hits;
    return it->second;
  }
  ChannelId id = alloc(c);
  conv_memo_.emplace(key, id);
  return id;
}

void Machine::step_conv(ChannelId a, ConvP& c) {
  if (c.l == c.r) {
    finish_bool(a, true);
    return;
  }
  to_tail(a, ConvVP{{c.l, nullptr}, {c.r, nullptr}, c.xi});
}

void Machine::step_convv(ChannelId a, ConvVP& p) {
  // Obtaining the values, one side per transition.
  if (!p.l.val && sched_.is_finished(p.l.chan)) {
    p.l.val = value_of(p.l.chan);
    to_tail(a, std::move(p));
    return;
  }
  if (!p.r.val && sched_.is_finished(p.r.chan)) {
    p.r.val = value_of(p.r.chan);
    to_tail(a, std::move(p));
    return;
  }
  if (!p.l.val || !p.r.val) {
    ChannelId l = p.l.chan, r = p.r.chan;
    bool need_l = !p.l.val, need_r = !p.r.val;
    procs_[a].expr = std::move(p);
    if (need_r) sched_.need(a, r);
    if (need_l) sched_.need(a, l);
    return;
  }

  const Value& lv = *p.l.val;
  const Value& rv = *p.r.val;
  const XiId xi = p.xi;
  const auto* lc = lv.as<ConstApp>();
  const auto* rc = rv.as<ConstApp>();
  const auto* lcl = lv.as<Closure>();
  const auto* rcl = rv.as<Closure>();

  // Closure vs closure: compare the bodies under (y, y').
  if (lcl && rcl) {
    XiId xi2 = xi_push(xi, lcl->fresh, rcl->fresh);
    ConvKey key{lcl->body, rcl->body, xi2};
    if (opts_.conv_sharing) {
      auto it = conv_memo_.find(key);
      if (it != conv_memo_.end() && it->second != a) {
        ++stats_.memo_hits;
        ChannelId other = it->second;
        wait_for(a, ForwardP{other}, {other});
        return;
      }
      conv_memo_.emplace(key, a);
    }
    to_tail(a, ConvP{lcl->body, rcl->body, xi2});
    return;
  }

  // Neutral vs neutral.
  if (auto* ln = lv.as<Neutral>()) {
    if (auto* rn = rv.as<Neutral>()) {
      if (heads_equal(xi, ln->head, rn->head) && ln->args.size() == rn->args.size())
        to_tail(a, ConvStackP{zip_args(ln->args, rn->args, xi), 0});
      else
        finish_bool(a, false);
      return;
    }
  }

  if (lc && rc) {
    if (lc->unfold == rc->unfold) {
      finish_bool(a, true);
      return;
    }
    ChannelId left_fixed = opts_.frozen ? frozen_channel(p.l, *lc) : operand_channel(p.l);
    ChannelId b = conv_channels(left_fixed, rc->unfold, xi);
    ChannelId g = conv_channels(lc->unfold, operand_channel(p.r), xi);
    Connective pick = opts_.frozen ? Connective::Biased : Connective::Choice;
    bool same = lc->constant == rc->constant && lc->args.size() == rc->args.size();
    int rule = same ? 8 : 7;
    trace(a, rc->constant, 'R', rule);
    trace(a, lc->constant, 'L', rule);
    if (!same) {
      wait_for(a, ConnectP{pick, b, g}, {b, g});
      return;
    }
    ChannelId eta = alloc(ConvStackP{zip_args(lc->args, rc->args, xi), 0});
    ChannelId zeta = alloc(ConnectP{pick, b, g});
    procs_[a].expr = ConnectP{Connective::Biased, eta, zeta};
    sched_.need(a, eta);
    // zeta is not queued itself: it starts out blocked on its two branches.
    // Branches shared through the memo may already be finished.
    bool blocked = false;
    for (ChannelId d : {b, g})
      if (!sched_.is_finished(d)) {
        sched_.need(zeta, d);
        blocked = true;
      }
    if (blocked)
      sched_.add_waiter(a, zeta);
    else
      sched_.need(a, zeta);
    return;
  }

  const auto* lf = lv.as<Frozen>();
  const auto* rf = rv.as<Frozen>();
  if (lf && rf) {
    if (lf->constant == rf->constant && lf->args.size() == rf->args.size())
      to_tail(a, ConvStackP{zip_args(lf->args, rf->args, xi), 0});
    else
      finish_bool(a, false);
    return;
  }
  if (lf && rc && lf->constant == rc->constant && lf->args.size() == rc->args.size()) {
    ChannelId b = alloc(ConvStackP{zip_args(lf->args, rc->args, xi), 0});
    ChannelId g = conv_channels(operand_channel(p.l), rc->unfold, xi);
    trace(a, rc->constant, 'R', 10);
    wait_for(a, ConnectP{Connective::Or, b, g}, {b, g});
    return;
  }
  if (lc && rf && lc->constant == rf->constant && lc->args.size() == rf->args.size()) {
    ChannelId b = alloc(ConvStackP{zip_args(lc->args, rf->args, xi), 0});
    ChannelId g = conv_channels(lc->unfold, operand_channel(p.r), xi);
    trace(a, lc->constant, 'L', 10);
    wait_for(a, ConnectP{Connective::Or, b, g}, {b, g});
    return;
  }

  // Eta against a constant: apply the frozen constant to a fresh variable,
  // or unfold it. Checked before the plain unfolding rule, which would
  // otherwise always win.
  if (opts_.eta && lcl && rc) {
    VarId y2 = fresh_var(var_names_[lcl->fresh]);
    ChannelId yb = fresh_neutral_channel(y2);
    Args args = rc->args;
    args.push_back(yb);
    ChannelId e = alloc(ConvVP{{lcl->body, nullptr}, {kNoChannel, make(Value{Frozen{rc->constant, std::move(args)}})},
                               xi_push(xi, lcl->fresh, y2)});
    ChannelId g = alloc(ConvVP{{kNoChannel, p.l.val}, {rc->unfold, nullptr}, xi});
    trace(a, rc->constant, 'R', 13);
    wait_for(a, ConnectP{Connective::Biased, e, g}, {e, g});
    return;
  }
  if (opts_.eta && lc && rcl) {
    VarId y1 = fresh_var(var_names_[rcl->fresh]);
    ChannelId yb = fresh_neutral_channel(y1);
    Args args = lc->args;
    args.push_back(yb);
    ChannelId e = alloc(ConvVP{{kNoChannel, make(Value{Frozen{lc->constant, std::move(args)}})}, {rcl->body, nullptr},
                               xi_push(xi, y1, rcl->fresh)});
    ChannelId g = alloc(ConvVP{{lc->unfold, nullptr}, {kNoChannel, p.r.val}, xi});
    trace(a, lc->constant, 'L', 13);
    wait_for(a, ConnectP{Connective::Biased, e, g}, {e, g});
    return;
  }

  // A constant against anything else: unfold it.
  if (lc) {
    trace(a, lc->constant, 'L', 11);
    to_tail(a, ConvVP{{lc->unfold, nullptr}, std::move(p.r), xi});
    return;
  }
  if (rc) {
    trace(a, rc->constant, 'R', 11);
    to_tail(a, ConvVP{std::move(p.l), {rc->unfold, nullptr}, xi});
    return;
  }

  if (auto* lk = lv.as<CtorVal>()) {
    if (auto* rk = rv.as<CtorVal>()) {
      if (*lk->name == *rk->name && lk->args.size() == rk->args.size())
        to_tail(a, ConvStackP{zip_args(lk->args, rk->args, xi), 0});
      else
        finish_bool(a, false);
      return;
    }
  }

  if (auto* lm = lv.as<StuckMatch>()) {
    if (auto* rm = rv.as<StuckMatch>()) {
      if (lm->args.size() != rm->args.size() || lm->bodies.size() != rm->bodies.size()) {
        finish_bool(a, false);
        return;
      }
      auto items = std::make_shared<std::vector<ConvItem>>();
      items->push_back({lm->scrut, rm->scrut, xi});
      for (std::size_t i = 0; i < lm->match->branches.size(); ++i) {
        const Branch& lb = lm->match->branches[i];
        std::size_t j = 0;
        while (j < rm->match->branches.size() && rm->match->branches[j].ctor != lb.ctor) ++j;
        if (j == rm->match->branches.size() || lm->binders[i].size() != rm->binders[j].size()) {
          finish_bool(a, false);
          return;
        }
        XiId bxi = xi;
        for (std::size_t k = 0; k < lm->binders[i].size(); ++k) bxi = xi_push(bxi, lm->binders[i][k], rm->binders[j][k]);
        items->push_back({lm->bodies[i], rm->bodies[j], bxi});
      }
      for (std::size_t k = 0; k < lm->args.size(); ++k) items->push_back({lm->args[k], rm->args[k], xi});
      to_tail(a, ConvStackP{std::move(items), 0});
      return;
    }
  }

  if (opts_.eta && lcl && is_neutral_like(rv)) {
    VarId y2 = fresh_var(var_names_[lcl->fresh]);
    ChannelId yb = fresh_neutral_channel(y2);
    to_tail(a, ConvVP{{lcl->body, nullptr}, {kNoChannel, with_extra_arg(rv, yb)}, xi_push(xi, lcl->fresh, y2)});
    return;
  }
  if (opts_.eta && rcl && is_neutral_like(lv)) {
    VarId y1 = fresh_var(var_names_[rcl->fresh]);
    ChannelId yb = fresh_neutral_channel(y1);
    to_tail(a, ConvVP{{kNoChannel, with_extra_arg(lv, yb)}, {rcl->body, nullptr}, xi_push(xi, y1, rcl->fresh)});
    return;
  }

  finish_bool(a, false);
}

void Machine::step_convstack(ChannelId a, ConvStackP& p) {
  if (p.from == p.items->size()) {
    finish_bool(a, true);
    return;
  }
  const ConvItem& it = (*p.items)[p.from];
  bool hit = false;
  ChannelId g = alloc_conv(ConvP{it.l, it.r, it.xi}, &hit);
  ChannelId h = alloc(ConvStackP{p.items, p.from + 1});
  wait_for(a, ConnectP{Connective::And, g, h}, {g, h});
}

void Machine::step_connect(ChannelId a, ConnectP& p) {
  const bool af = sched_.is_finished(p.a), bf = sched_.is_finished(p.b);
  const bool av = af && bool_of(p.a), bv = bf && bool_of(p.b);
  switch (p.op) {
    case Connective::And:
      if ((af && !av) || (bf && !bv)) return finish_bool(a, false);
      if (af) return wait_for(a, ForwardP{p.b}, {p.b});
      if (bf) return wait_for(a, ForwardP{p.a}, {p.a});
      break;
    case Connective::Choice:
      if (af) return finish_bool(a, av);
      if (bf) return finish_bool(a, bv);
      break;
    case Connective::Biased:
      if (af && av) return finish_bool(a, true);
      if (af) return wait_for(a, ForwardP{p.b}, {p.b});
      if (bf) return finish_bool(a, bv);
      break;
    case Connective::Or:
      if ((af && av) || (bf && bv)) return finish_bool(a, true);
      if (af) return wait_for(a, ForwardP{p.b}, {p.b});
      if (bf) return wait_for(a, ForwardP{p.a}, {p.a});
      break;
  }
  ChannelId x = p.a, y = p.b;
  wait_for(a, p, {x, y});
}

void Machine::step_forward(ChannelId a, ForwardP& p) {
  if (sched_.is_finished(p.a)) {
    finish_bool(a, bool_of(p.a));
    return;
  }
  ChannelId b = p.a;
  wait_for(a, p, {b});
}

}  // namespace lazyconv
