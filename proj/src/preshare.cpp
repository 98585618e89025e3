#include "lazyconv/preshare.hpp"

#include <unordered_map>

namespace lazyconv {

namespace {

struct Node {
  bool closed = false;
  bool atom = false;
  std::vector<int> kids;
  int refs = 0;
  int binding = -1;  // index into bindings once emitted
};

// One entry per subterm occurrence, in pre-order.
struct Occurrence {
  int id;
  int size;  // number of occurrences in this subtree, itself included
};

class Sharer {
 public:
  GeneralizedProblem run(const TermPtr& lhs, const TermPtr& rhs) {
    std::vector<std::string> ctx;
    int lhs_pos = static_cast<int>(order_.size());
    intern(lhs, ctx);
    int rhs_pos = static_cast<int>(order_.size());
    intern(rhs, ctx);

    count(order_[lhs_pos].id);
    count(order_[rhs_pos].id);

    GeneralizedProblem out;
    out_ = &out;
    out.lhs = emit(lhs, lhs_pos);
    out.rhs = emit(rhs, rhs_pos);
    return out;
  }

 private:
  // Returns how many binders above this subterm it refers to.
  int intern(const TermPtr& t, std::vector<std::string>& ctx) {
    int pos = static_cast<int>(order_.size());
    order_.push_back({-1, 0});
    std::string key;
    std::vector<int> kids;
    int escape = 0;
    bool atom = false;

    auto child = [&](const TermPtr& c, int binders) {
      int child_pos = static_cast<int>(order_.size());
      int e = intern(c, ctx);
      kids.push_back(order_[child_pos].id);
      key += std::to_string(order_[child_pos].id);
      key += ',';
      escape = std::max(escape, e - binders);
    };

    if (auto* v = t->as<Var>()) {
      atom = true;
      long idx = -1;
      for (std::size_t i = ctx.size(); i-- > 0;)
        if (ctx[i] == v->name) {
          idx = static_cast<long>(ctx.size() - 1 - i);
          break;
        }
      if (idx >= 0) {
        key = "b" + std::to_string(idx);
        escape = static_cast<int>(idx) + 1;
      } else {
        key = "v" + v->name;
      }
    } else if (auto* c = t->as<Const>()) {
      atom = true;
      key = "c" + c->name;
    } else if (auto* k = t->as<Ctor>()) {
      atom = k->args.empty();
      key = "k" + k->name + '(';
      for (const auto& a : k->args) child(a, 0);
    } else if (auto* a = t->as<App>()) {
      key = "a(";
      child(a->fun, 0);
      child(a->arg, 0);
    } else if (auto* l = t->as<Lam>()) {
      key = "l(";
      ctx.push_back(l->binder);
      child(l->body, 1);
      ctx.pop_back();
    } else {
      const auto& m = *t->as<Match>();
      key = "m(";
      child(m.scrutinee, 0);
      for (const auto& b : m.branches) {
        key += b.ctor + '/';
        for (const auto& x : b.binders) ctx.push_back(x);
        child(b.body, static_cast<int>(b.binders.size()));
        ctx.resize(ctx.size() - b.binders.size());
      }
    }

    auto [it, fresh] = index_.try_emplace(std::move(key), static_cast<int>(nodes_.size()));
    if (fresh) {
      Node n;
      n.closed = escape == 0;
      n.atom = atom;
      n.kids = std::move(kids);
      nodes_.push_back(std::move(n));
    }
    order_[pos].id = it->second;
    order_[pos].size = static_cast<int>(order_.size()) - pos;
    return escape;
  }

  bool shareable(const Node& n) const { return n.closed && !n.atom; }

  // Occurrence counting on the transcribed DAG: a closed node expands its
  // children once however often it is referenced; an open node has a fresh
  // identity at each occurrence.
  void count(int id) {
    Node& n = nodes_[id];
    if (shareable(n)) {
      if (++n.refs > 1) return;
    }
    for (int k : n.kids) count(k);
  }

  TermPtr emit(const TermPtr& t, int pos) {
    Node& n = nodes_[order_[pos].id];
    if (!shareable(n) || n.refs < 2) return rebuild(t, pos);
    if (n.binding < 0) {
      TermPtr body = rebuild(t, pos);
      n.binding = static_cast<int>(out_->bindings.size());
      out_->bindings.emplace_back("#s" + std::to_string(n.binding), body);
    }
    return mk_var(out_->bindings[n.binding].first);
  }

  TermPtr rebuild(const TermPtr& t, int pos) {
    if (t->is<Var>() || t->is<Const>()) return t;
    int child_pos = pos + 1;
    auto next = [&](const TermPtr& c) {
      TermPtr r = emit(c, child_pos);
      child_pos += order_[child_pos].size;
      return r;
    };
    if (auto* k = t->as<Ctor>()) {
      if (k->args.empty()) return t;
      std::vector<TermPtr> args;
      for (const auto& a : k->args) args.push_back(next(a));
      return mk_ctor(k->name, std::move(args));
    }
    if (auto* a = t->as<App>()) {
      TermPtr f = next(a->fun);
      TermPtr x = next(a->arg);
      return mk_app(f, x);
    }
    if (auto* l = t->as<Lam>()) return mk_lam(l->binder, next(l->body));
    const auto& m = *t->as<Match>();
    TermPtr scrut = next(m.scrutinee);
    std::vector<Branch> branches;
    for (const auto& b : m.branches) branches.push_back({b.ctor, b.binders, next(b.body)});
    return mk_match(scrut, std::move(branches));
  }

  std::vector<Node> nodes_;
  std::vector<Occurrence> order_;
  std::unordered_map<std::string, int> index_;
  GeneralizedProblem* out_ = nullptr;
};

TermPtr substitute(const TermPtr& t, const std::unordered_map<std::string, TermPtr>& sub) {
  if (auto* v = t->as<Var>()) {
    auto it = sub.find(v->name);
    return it == sub.end() ? t : it->second;
  }
  if (t->is<Const>()) return t;
  if (auto* k = t->as<Ctor>()) {
    std::vector<TermPtr> args;
    for (const auto& a : k->args) args.push_back(substitute(a, sub));
    return mk_ctor(k->name, std::move(args));
  }
  if (auto* a = t->as<App>()) return mk_app(substitute(a->fun, sub), substitute(a->arg, sub));
  if (auto* l = t->as<Lam>()) return mk_lam(l->binder, substitute(l->body, sub));
  const auto& m = *t->as<Match>();
  std::vector<Branch> branches;
  for (const auto& b : m.branches) branches.push_back({b.ctor, b.binders, substitute(b.body, sub)});
  return mk_match(substitute(m.scrutinee, sub), std::move(branches));
}

}  // namespace

GeneralizedProblem preshare(const TermPtr& lhs, const TermPtr& rhs) { return Sharer().run(lhs, rhs); }

GeneralizedProblem trivial_problem(const TermPtr& lhs, const TermPtr& rhs) { return {{}, lhs, rhs}; }

std::pair<TermPtr, TermPtr> unshare(const GeneralizedProblem& p) {
  // Binding names are outside the source namespace, so plain replacement
  // cannot capture.
  std::unordered_map<std::string, TermPtr> sub;
  for (const auto& [name, body] : p.bindings) sub[name] = substitute(body, sub);
  return {substitute(p.lhs, sub), substitute(p.rhs, sub)};
}

}  // namespace lazyconv
