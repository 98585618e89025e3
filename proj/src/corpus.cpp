#include "lazyconv/corpus.hpp"

#include <functional>
#include <random>

#include "lazyconv/oracle.hpp"

namespace lazyconv {

const char* corpus_defs_text() {
  return R"(data Bool := True 0 | False 0;
data Nat := O 0 | S 1;
def id := \x. x;
def k := \x y. x;
def not := \b. match b with True -> False | False -> True end;
def and := \a b. match a with True -> b | False -> False end;
def is_zero := \n. match n with O -> True | S m -> False end;
def pred := \n. match n with O -> O | S m -> m end;
def plus := \m n. match m with O -> n | S p -> S (plus p n) end;
def double := \n. match n with O -> O | S p -> S (S (double p)) end;
def twice := \f x. f (f x);
def compose := \f g x. f (g x);
)";
}

namespace {

enum class TyK { Bool, Nat, Arr };
struct Ty;
using TyPtr = std::shared_ptr<const Ty>;
struct Ty {
  TyK k;
  TyPtr a, b;
};

TyPtr tbool = std::make_shared<const Ty>(Ty{TyK::Bool, nullptr, nullptr});
TyPtr tnat = std::make_shared<const Ty>(Ty{TyK::Nat, nullptr, nullptr});
TyPtr arr(TyPtr a, TyPtr b) { return std::make_shared<const Ty>(Ty{TyK::Arr, std::move(a), std::move(b)}); }

bool same(const TyPtr& x, const TyPtr& y) {
  if (x->k != y->k) return false;
  return x->k != TyK::Arr || (same(x->a, y->a) && same(x->b, y->b));
}

// Recursive constants only ever receive closed arguments: unfolding them
// under an open scrutinee would never terminate under strong reduction.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  bool coin(unsigned percent) { return below(100) < percent; }

  TyPtr base_type() { return coin(50) ? tbool : tnat; }

  TyPtr any_type() {
    switch (below(7)) {
      case 0:
      case 1: return tbool;
      case 2:
      case 3: return tnat;
      case 4: return arr(tnat, tnat);
      case 5: return arr(tbool, tbool);
      default: return arr(tnat, tbool);
    }
  }

  using Ctx = std::vector<std::pair<std::string, TyPtr>>;

  std::string binder_for(const TyPtr& t) {
    static const char* nat_names[] = {"n", "m", "p"};
    static const char* bool_names[] = {"b", "c"};
    static const char* fun_names[] = {"f", "g"};
    if (t->k == TyK::Nat) return nat_names[below(3)];
    if (t->k == TyK::Bool) return bool_names[below(2)];
    return fun_names[below(2)];
  }

  // A variable of type t visible in ctx (innermost binding of each name).
  TermPtr pick_var(const TyPtr& t, const Ctx& ctx) {
    std::vector<std::string> ok;
    for (std::size_t i = ctx.size(); i-- > 0;) {
      bool shadowed = false;
      for (std::size_t j = i + 1; j < ctx.size(); ++j) shadowed |= ctx[j].first == ctx[i].first;
      if (!shadowed && same(ctx[i].second, t)) ok.push_back(ctx[i].first);
    }
    if (ok.empty()) return nullptr;
    return mk_var(ok[below(ok.size())]);
  }

  TermPtr leaf(const TyPtr& t, const Ctx& ctx) {
    if (coin(40))
      if (TermPtr v = pick_var(t, ctx)) return v;
    switch (t->k) {
      case TyK::Bool: return mk_ctor(coin(50) ? "True" : "False");
      case TyK::Nat: return coin(60) ? mk_ctor("O") : mk_ctor("S", {mk_ctor("O")});
      case TyK::Arr: break;
    }
    if (t->a->k == TyK::Nat && t->b->k == TyK::Nat) {
      switch (below(3)) {
        case 0: return mk_const("pred");
        case 1: return mk_const("id");
        default: return mk_lam("n", mk_ctor("S", {mk_var("n")}));
      }
    }
    if (t->a->k == TyK::Bool && t->b->k == TyK::Bool) return coin(60) ? mk_const("not") : mk_const("id");
    if (t->a->k == TyK::Nat && t->b->k == TyK::Bool) return mk_const("is_zero");
    std::string x = binder_for(t->a);
    Ctx inner = ctx;
    inner.emplace_back(x, t->a);
    return mk_lam(x, leaf(t->b, inner));
  }

  TermPtr gen(const TyPtr& t, std::size_t budget, const Ctx& ctx) {
    if (budget <= 1) return leaf(t, ctx);
    std::size_t b = budget - 1;
    auto half = [&]() { return std::max<std::size_t>(1, b / 2); };

    // Shapes available at every type.
    switch (below(10)) {
      case 0: {  // beta redex
        TyPtr a = base_type();
        std::string x = binder_for(a);
        Ctx inner = ctx;
        inner.emplace_back(x, a);
        return mk_app(mk_lam(x, gen(t, half(), inner)), gen(a, half(), ctx));
      }
      case 1:  // k t junk
        return mk_apps(mk_const("k"), {gen(t, half(), ctx), gen(any_type(), std::max<std::size_t>(1, b / 3), ctx)});
      case 2: {  // match on a scrutinee of base type
        if (coin(50)) {
          return mk_match(gen(tbool, half(), ctx),
                          {{"True", {}, gen(t, b / 4 + 1, ctx)}, {"False", {}, gen(t, b / 4 + 1, ctx)}});
        }
        std::string v = binder_for(tnat);
        Ctx inner = ctx;
        inner.emplace_back(v, tnat);
        return mk_match(gen(tnat, half(), ctx),
                        {{"O", {}, gen(t, b / 4 + 1, ctx)}, {"S", {v}, gen(t, b / 4 + 1, inner)}});
      }
      default: break;
    }

    switch (t->k) {
      case TyK::Bool:
        switch (below(5)) {
          case 0: return mk_app(mk_const("not"), gen(tbool, b, ctx));
          case 1: return mk_apps(mk_const("and"), {gen(tbool, half(), ctx), gen(tbool, half(), ctx)});
          case 2: return mk_app(mk_const("is_zero"), gen(tnat, b, ctx));
          case 3: return mk_app(gen(arr(tnat, tbool), half(), ctx), gen(tnat, half(), ctx));
          default: return mk_app(gen(arr(tbool, tbool), half(), ctx), gen(tbool, half(), ctx));
        }
      case TyK::Nat:
        switch (below(7)) {
          case 0: return mk_ctor("S", {gen(tnat, b, ctx)});
          case 1: return mk_app(mk_const("pred"), gen(tnat, b, ctx));
          case 2: return mk_apps(mk_const("plus"), {gen(tnat, half(), {}), gen(tnat, half(), {})});
          case 3: return mk_app(mk_const("double"), gen(tnat, b, {}));
          case 4: return mk_apps(mk_const("twice"), {gen(arr(tnat, tnat), half(), ctx), gen(tnat, half(), ctx)});
          case 5: return mk_app(gen(arr(tnat, tnat), half(), ctx), gen(tnat, half(), ctx));
          default: return leaf(t, ctx);
        }
      case TyK::Arr:
        if (same(t->a, t->b) && coin(35)) {
          if (coin(50)) return mk_apps(mk_const("compose"), {gen(t, half(), ctx), gen(t, half(), ctx)});
          return mk_app(mk_const("twice"), gen(t, b, ctx));
        }
        {
          std::string x = binder_for(t->a);
          Ctx inner = ctx;
          inner.emplace_back(x, t->a);
          return mk_lam(x, gen(t->b, b, inner));
        }
    }
    return leaf(t, ctx);
  }

  std::mt19937_64 rng_;
};

// Subterm positions in pre-order, for picking a random rewrite site.
void positions(const TermPtr& t, std::vector<TermPtr>& out) {
  out.push_back(t);
  if (auto* a = t->as<App>()) {
    positions(a->fun, out);
    positions(a->arg, out);
  } else if (auto* l = t->as<Lam>()) {
    positions(l->body, out);
  } else if (auto* k = t->as<Ctor>()) {
    for (const auto& x : k->args) positions(x, out);
  } else if (auto* m = t->as<Match>()) {
    positions(m->scrutinee, out);
    for (const auto& b : m->branches) positions(b.body, out);
  }
}

// Replaces the subterm node `at` (by identity) with f(at).
TermPtr rewrite(const TermPtr& t, const Term* at, const std::function<TermPtr(const TermPtr&)>& f) {
  if (t.get() == at) return f(t);
  if (auto* a = t->as<App>()) return mk_app(rewrite(a->fun, at, f), rewrite(a->arg, at, f));
  if (auto* l = t->as<Lam>()) return mk_lam(l->binder, rewrite(l->body, at, f));
  if (auto* k = t->as<Ctor>()) {
    std::vector<TermPtr> xs;
    for (const auto& x : k->args) xs.push_back(rewrite(x, at, f));
    return mk_ctor(k->name, std::move(xs));
  }
  if (auto* m = t->as<Match>()) {
    std::vector<Branch> bs;
    for (const auto& b : m->branches) bs.push_back({b.ctor, b.binders, rewrite(b.body, at, f)});
    return mk_match(rewrite(m->scrutinee, at, f), std::move(bs));
  }
  return t;
}

// Renames every binder to a distinct new name.
TermPtr alpha_rename(const TermPtr& t, std::vector<std::pair<std::string, std::string>>& scope, int& counter) {
  if (auto* v = t->as<Var>()) {
    for (std::size_t i = scope.size(); i-- > 0;)
      if (scope[i].first == v->name) return mk_var(scope[i].second);
    return t;
  }
  if (auto* a = t->as<App>()) return mk_app(alpha_rename(a->fun, scope, counter), alpha_rename(a->arg, scope, counter));
  if (auto* l = t->as<Lam>()) {
    std::string nb = "v" + std::to_string(++counter);
    scope.emplace_back(l->binder, nb);
    TermPtr body = alpha_rename(l->body, scope, counter);
    scope.pop_back();
    return mk_lam(nb, body);
  }
  if (auto* k = t->as<Ctor>()) {
    std::vector<TermPtr> xs;
    for (const auto& x : k->args) xs.push_back(alpha_rename(x, scope, counter));
    return mk_ctor(k->name, std::move(xs));
  }
  if (auto* m = t->as<Match>()) {
    TermPtr s = alpha_rename(m->scrutinee, scope, counter);
    std::vector<Branch> bs;
    for (const auto& b : m->branches) {
      std::vector<std::string> nbs;
      for (const auto& x : b.binders) {
        nbs.push_back("v" + std::to_string(++counter));
        scope.emplace_back(x, nbs.back());
      }
      bs.push_back({b.ctor, nbs, alpha_rename(b.body, scope, counter)});
      scope.resize(scope.size() - b.binders.size());
    }
    return mk_match(s, std::move(bs));
  }
  return t;
}

}  // namespace

std::vector<CorpusPair> gen_corpus(std::uint64_t seed, std::size_t count, std::size_t max_size) {
  auto defs = std::make_shared<const GlobalDefs>(parse_defs(corpus_defs_text()));
  Gen g(seed);
  std::vector<CorpusPair> out;
  max_size = std::max<std::size_t>(max_size, 1);

  auto fresh_term = [&](const TyPtr& ty) {
    for (;;) {
      TermPtr t = g.gen(ty, 1 + g.below(max_size), {});
      if (term_size(t) <= max_size) return t;
    }
  };

  while (out.size() < count) {
    TyPtr ty = g.any_type();
    TermPtr t = fresh_term(ty);
    std::vector<TermPtr> pos;
    positions(t, pos);
    auto site = [&](auto pred) -> const Term* {
      std::vector<const Term*> ok;
      for (const auto& p : pos)
        if (pred(*p)) ok.push_back(p.get());
      return ok.empty() ? nullptr : ok[g.below(ok.size())];
    };

    CorpusPair cp;
    cp.defs = defs;
    cp.lhs = t;
    switch (g.below(8)) {
      case 0: {
        std::vector<std::pair<std::string, std::string>> scope;
        int counter = 0;
        cp.rhs = alpha_rename(t, scope, counter);
        cp.label = PairLabel::Convertible;
        cp.how = "alpha";
        break;
      }
      case 1: {
        const Term* at = site([](const Term& x) { return x.is<Const>(); });
        if (!at) continue;
        cp.rhs = rewrite(t, at, [&](const TermPtr& c) {
          return defs->const_defs()[*defs->find_const(c->as<Const>()->name)].body;
        });
        cp.label = PairLabel::Convertible;
        cp.how = "unfold";
        break;
      }
      case 2: {
        const Term* at = pos[g.below(pos.size())].get();
        bool use_id = g.coin(50);
        cp.rhs = rewrite(t, at, [&](const TermPtr& s) {
          if (use_id) return mk_app(mk_lam("z", mk_var("z")), s);
          return mk_apps(mk_const("k"), {s, mk_ctor("O")});
        });
        cp.label = PairLabel::Convertible;
        cp.how = "expand";
        break;
      }
      case 3: {
        auto s = step_naive(*defs, t);
        if (!s) continue;
        cp.rhs = *s;
        cp.label = PairLabel::Convertible;
        cp.how = "step";
        break;
      }
      case 4:
      case 5: {
        cp.rhs = fresh_term(ty);
        cp.label = PairLabel::Unknown;
        cp.how = "random";
        break;
      }
      case 6: {
        const Term* at = site([](const Term& x) {
          auto* k = x.as<Ctor>();
          return k && (k->name == "True" || k->name == "False" || k->name == "O");
        });
        if (!at) continue;
        cp.rhs = rewrite(t, at, [](const TermPtr& c) {
          const auto& n = c->as<Ctor>()->name;
          if (n == "True") return mk_ctor("False");
          if (n == "False") return mk_ctor("True");
          return mk_ctor("S", {mk_ctor("O")});
        });
        cp.label = PairLabel::Unknown;
        cp.how = "mutate";
        break;
      }
      default: {
        // Swap the two arguments of a binary constant.
        const Term* at = site([](const Term& x) {
          auto* a = x.as<App>();
          if (!a) return false;
          auto* inner = a->fun->as<App>();
          if (!inner) return false;
          auto* c = inner->fun->as<Const>();
          return c && (c->name == "and" || c->name == "plus");
        });
        if (!at) continue;
        cp.rhs = rewrite(t, at, [](const TermPtr& x) {
          auto* a = x->as<App>();
          auto* inner = a->fun->as<App>();
          return mk_apps(inner->fun, {a->arg, inner->arg});
        });
        cp.label = PairLabel::Unknown;
        cp.how = "swap";
        break;
      }
    }
    if (g.coin(50)) std::swap(cp.lhs, cp.rhs);
    out.push_back(std::move(cp));
  }
  return out;
}

}  // namespace lazyconv
