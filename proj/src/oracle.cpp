#include "lazyconv/oracle.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

namespace lazyconv {

namespace {

struct OutOfFuel {};

using Subst = std::map<std::string, TermPtr>;

void collect_free(const TermPtr& t, std::set<std::string>& bound, std::set<std::string>& out) {
  if (auto* v = t->as<Var>()) {
    if (!bound.count(v->name)) out.insert(v->name);
  } else if (auto* l = t->as<Lam>()) {
    bool added = bound.insert(l->binder).second;
    collect_free(l->body, bound, out);
    if (added) bound.erase(l->binder);
  } else if (auto* a = t->as<App>()) {
    collect_free(a->fun, bound, out);
    collect_free(a->arg, bound, out);
  } else if (auto* k = t->as<Ctor>()) {
    for (const auto& x : k->args) collect_free(x, bound, out);
  } else if (auto* m = t->as<Match>()) {
    collect_free(m->scrutinee, bound, out);
    for (const auto& b : m->branches) {
      std::vector<std::string> added;
      for (const auto& x : b.binders)
        if (bound.insert(x).second) added.push_back(x);
      collect_free(b.body, bound, out);
      for (const auto& x : added) bound.erase(x);
    }
  }
}

std::set<std::string> fv(const TermPtr& t) {
  std::set<std::string> bound, out;
  collect_free(t, bound, out);
  return out;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  for (int i = 1;; ++i) {
    std::string n = base + "_" + std::to_string(i);
    if (!avoid.count(n)) return n;
  }
}

// Simultaneous capture-avoiding substitution.
TermPtr subst(const TermPtr& t, const Subst& s) {
  if (s.empty()) return t;
  if (auto* v = t->as<Var>()) {
    auto it = s.find(v->name);
    return it == s.end() ? t : it->second;
  }
  if (t->is<Const>()) return t;
  if (auto* a = t->as<App>()) return mk_app(subst(a->fun, s), subst(a->arg, s));
  if (auto* k = t->as<Ctor>()) {
    if (k->args.empty()) return t;
    std::vector<TermPtr> args;
    for (const auto& x : k->args) args.push_back(subst(x, s));
    return mk_ctor(k->name, std::move(args));
  }

  // Under binders: drop shadowed entries, rename binders that would capture.
  auto under = [&](const std::vector<std::string>& binders, const TermPtr& body,
                   std::vector<std::string>& new_binders) -> TermPtr {
    Subst inner = s;
    for (const auto& x : binders) inner.erase(x);
    if (inner.empty()) {
      new_binders = binders;
      return body;
    }
    std::set<std::string> body_fv = fv(body);
    std::set<std::string> incoming;
    for (auto& [x, u] : inner)
      if (body_fv.count(x))
        for (const auto& y : fv(u)) incoming.insert(y);
    new_binders = binders;
    for (auto& b : new_binders) {
      if (!incoming.count(b)) continue;
      std::set<std::string> avoid = incoming;
      avoid.insert(body_fv.begin(), body_fv.end());
      avoid.insert(new_binders.begin(), new_binders.end());
      for (auto& [x, u] : inner) avoid.insert(x);
      std::string nb = fresh_name(b, avoid);
      inner[b] = mk_var(nb);
      b = nb;
    }
    return subst(body, inner);
  };

  if (auto* l = t->as<Lam>()) {
    std::vector<std::string> nb;
    TermPtr body = under({l->binder}, l->body, nb);
    return mk_lam(nb[0], body);
  }
  const auto& m = *t->as<Match>();
  std::vector<Branch> branches;
  for (const auto& b : m.branches) {
    std::vector<std::string> nb;
    TermPtr body = under(b.binders, b.body, nb);
    branches.push_back({b.ctor, nb, body});
  }
  return mk_match(subst(m.scrutinee, s), std::move(branches));
}

// Flattens an application spine.
TermPtr spine(const TermPtr& t, std::vector<TermPtr>& args) {
  TermPtr h = t;
  while (auto* a = h->as<App>()) {
    args.push_back(a->arg);
    h = a->fun;
  }
  std::reverse(args.begin(), args.end());
  return h;
}

TermPtr rebuild(TermPtr h, const std::vector<TermPtr>& args, std::size_t from) {
  for (std::size_t i = from; i < args.size(); ++i) h = mk_app(h, args[i]);
  return h;
}

class Reducer {
 public:
  Reducer(const GlobalDefs& defs, std::uint64_t fuel) : defs_(defs), fuel_(fuel) {}

  std::uint64_t used() const { return used_; }

  void tick() {
    if (used_ >= fuel_) throw OutOfFuel{};
    ++used_;
  }

  TermPtr unfold(const Const& c) {
    auto i = defs_.find_const(c.name);
    if (!i) throw std::runtime_error("undeclared constant '" + c.name + "'");
    return defs_.const_defs()[*i].body;
  }

  // Contracts a match whose scrutinee is a constructor.
  TermPtr iota(const Match& m, const Ctor& k) {
    const Branch* b = m.find_branch(k.name);
    if (!b) throw std::runtime_error("no branch for constructor '" + k.name + "'");
    Subst s;
    for (std::size_t i = 0; i < b->binders.size(); ++i) s[b->binders[i]] = k.args[i];
    return subst(b->body, s);
  }

  // Head reduction to weak head normal form.
  TermPtr whnf(TermPtr t) {
    for (;;) {
      std::vector<TermPtr> args;
      TermPtr h = spine(t, args);
      if (auto* l = h->as<Lam>(); l && !args.empty()) {
        tick();
        t = rebuild(subst(l->body, {{l->binder, args[0]}}), args, 1);
      } else if (auto* c = h->as<Const>()) {
        tick();
        t = rebuild(unfold(*c), args, 0);
      } else if (auto* m = h->as<Match>()) {
        TermPtr s = whnf(m->scrutinee);
        if (auto* k = s->as<Ctor>()) {
          tick();
          t = rebuild(iota(*m, *k), args, 0);
        } else {
          return rebuild(mk_match(s, m->branches), args, 0);
        }
      } else {
        return t;
      }
    }
  }

  TermPtr nf(const TermPtr& t0) {
    TermPtr t = whnf(t0);
    std::vector<TermPtr> args;
    TermPtr h = spine(t, args);
    TermPtr head;
    if (auto* l = h->as<Lam>()) {
      head = mk_lam(l->binder, nf(l->body));
    } else if (auto* k = h->as<Ctor>()) {
      std::vector<TermPtr> xs;
      for (const auto& x : k->args) xs.push_back(nf(x));
      head = mk_ctor(k->name, std::move(xs));
    } else if (auto* m = h->as<Match>()) {
      TermPtr s = nf(m->scrutinee);
      std::vector<Branch> bs;
      for (const auto& b : m->branches) bs.push_back({b.ctor, b.binders, nf(b.body)});
      head = mk_match(s, std::move(bs));
    } else {
      head = h;
    }
    for (auto& a : args) a = nf(a);
    return rebuild(head, args, 0);
  }

  // Enumerates redexes in pre-order; contracts the one with index `pick`.
  // Returns the rewritten term and sets `count` to the number of redexes seen.
  TermPtr contract_nth(const TermPtr& t, std::size_t pick, std::size_t& count) {
    bool redex = false;
    if (auto* a = t->as<App>()) redex = a->fun->is<Lam>();
    else if (t->is<Const>()) redex = true;
    else if (auto* m = t->as<Match>()) redex = m->scrutinee->is<Ctor>();
    if (redex) {
      if (count++ == pick) {
        if (auto* a = t->as<App>()) {
          auto* l = a->fun->as<Lam>();
          return subst(l->body, {{l->binder, a->arg}});
        }
        if (auto* c = t->as<Const>()) return unfold(*c);
        auto* m = t->as<Match>();
        return iota(*m, *m->scrutinee->as<Ctor>());
      }
    }
    if (auto* a = t->as<App>()) {
      TermPtr f = contract_nth(a->fun, pick, count);
      TermPtr x = contract_nth(a->arg, pick, count);
      return f == a->fun && x == a->arg ? t : mk_app(f, x);
    }
    if (auto* l = t->as<Lam>()) {
      TermPtr b = contract_nth(l->body, pick, count);
      return b == l->body ? t : mk_lam(l->binder, b);
    }
    if (auto* k = t->as<Ctor>()) {
      bool changed = false;
      std::vector<TermPtr> xs;
      for (const auto& x : k->args) {
        xs.push_back(contract_nth(x, pick, count));
        changed |= xs.back() != x;
      }
      return changed ? mk_ctor(k->name, std::move(xs)) : t;
    }
    if (auto* m = t->as<Match>()) {
      bool changed = false;
      TermPtr s = contract_nth(m->scrutinee, pick, count);
      changed |= s != m->scrutinee;
      std::vector<Branch> bs;
      for (const auto& b : m->branches) {
        bs.push_back({b.ctor, b.binders, contract_nth(b.body, pick, count)});
        changed |= bs.back().body != b.body;
      }
      return changed ? mk_match(s, std::move(bs)) : t;
    }
    return t;
  }

 private:
  const GlobalDefs& defs_;
  std::uint64_t fuel_;
  std::uint64_t used_ = 0;
};

}  // namespace

TermPtr substitute_naive(const TermPtr& t, const std::string& x, const TermPtr& u) { return subst(t, {{x, u}}); }

NaiveResult normalize_naive(const GlobalDefs& defs, const TermPtr& t, std::uint64_t fuel) {
  Reducer r(defs, fuel);
  NaiveResult out;
  try {
    out.term = r.nf(t);
  } catch (const OutOfFuel&) {
  }
  out.contractions = r.used();
  return out;
}

NaiveResult normalize_random_order(const GlobalDefs& defs, const TermPtr& t, std::uint64_t fuel,
                                   std::uint64_t seed) {
  Reducer r(defs, fuel);
  std::mt19937_64 rng(seed);
  NaiveResult out;
  TermPtr cur = t;
  for (;;) {
    std::size_t n = 0;
    r.contract_nth(cur, SIZE_MAX, n);
    if (n == 0) {
      out.term = cur;
      break;
    }
    if (out.contractions >= fuel) break;
    std::size_t seen = 0;
    cur = r.contract_nth(cur, std::uniform_int_distribution<std::size_t>(0, n - 1)(rng), seen);
    ++out.contractions;
  }
  return out;
}

std::optional<TermPtr> step_naive(const GlobalDefs& defs, const TermPtr& t) {
  // Leftmost-outermost is the first redex in pre-order.
  Reducer r(defs, UINT64_MAX);
  std::size_t n = 0;
  TermPtr out = r.contract_nth(t, 0, n);
  if (n == 0) return std::nullopt;
  return out;
}

OracleResult oracle_convertible(const GlobalDefs& defs, const TermPtr& t, const TermPtr& u, std::uint64_t fuel) {
  NaiveResult a = normalize_naive(defs, t, fuel);
  if (a.out_of_fuel()) return {};
  NaiveResult b = normalize_naive(defs, u, fuel);
  if (b.out_of_fuel()) return {};
  return {true, alpha_equal(a.term, b.term)};
}

}  // namespace lazyconv
