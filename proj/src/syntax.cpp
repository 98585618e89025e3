#include "lazyconv/syntax.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <unordered_set>

namespace lazyconv {

TermPtr mk_var(std::string name) { return std::make_shared<Term>(Term{Var{std::move(name)}}); }

TermPtr mk_lam(std::string binder, TermPtr body) {
  return std::make_shared<Term>(Term{Lam{std::move(binder), std::move(body)}});
}

TermPtr mk_app(TermPtr fun, TermPtr arg) {
  return std::make_shared<Term>(Term{App{std::move(fun), std::move(arg)}});
}

TermPtr mk_apps(TermPtr head, const std::vector<TermPtr>& args) {
  for (const auto& a : args) head = mk_app(std::move(head), a);
  return head;
}

TermPtr mk_const(std::string name) { return std::make_shared<Term>(Term{Const{std::move(name)}}); }

TermPtr mk_ctor(std::string name, std::vector<TermPtr> args) {
  return std::make_shared<Term>(Term{Ctor{std::move(name), std::move(args)}});
}

TermPtr mk_match(TermPtr scrutinee, std::vector<Branch> branches) {
  return std::make_shared<Term>(Term{Match{std::move(scrutinee), std::move(branches)}});
}

const Branch* Match::find_branch(std::string_view ctor) const {
  for (const auto& b : branches)
    if (b.ctor == ctor) return &b;
  return nullptr;
}

SyntaxError::SyntaxError(const std::string& what, int line, int column)
    : std::runtime_error(line > 0 ? std::to_string(line) + ":" + std::to_string(column) + ": " + what
                                  : what),
      line_(line),
      column_(column) {}

// ---------------------------------------------------------------------------
// GlobalDefs

std::optional<CtorInfo> GlobalDefs::find_ctor(std::string_view name) const {
  auto it = ctor_index_.find(std::string(name));
  if (it == ctor_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> GlobalDefs::find_const(std::string_view name) const {
  auto it = const_index_.find(std::string(name));
  if (it == const_index_.end()) return std::nullopt;
  return it->second;
}

bool GlobalDefs::is_type_name(std::string_view name) const {
  return type_index_.count(std::string(name)) != 0;
}

void GlobalDefs::add_data(DataDecl decl) {
  if (type_index_.count(decl.name)) throw SyntaxError("duplicate data type '" + decl.name + "'", 0, 0);
  std::size_t data_index = data_.size();
  for (std::size_t i = 0; i < decl.ctors.size(); ++i) {
    const auto& c = decl.ctors[i];
    if (ctor_index_.count(c.name)) throw SyntaxError("duplicate constructor '" + c.name + "'", 0, 0);
    ctor_index_.emplace(c.name, CtorInfo{data_index, i, c.arity});
  }
  type_index_.emplace(decl.name, data_index);
  data_.push_back(std::move(decl));
}

void GlobalDefs::declare_const(std::string name) {
  if (const_index_.count(name)) throw SyntaxError("duplicate constant '" + name + "'", 0, 0);
  const_index_.emplace(name, consts_.size());
  consts_.push_back(ConstDef{std::move(name), nullptr});
}

void GlobalDefs::define_const(std::string_view name, TermPtr body) {
  auto idx = find_const(name);
  if (!idx) throw SyntaxError("undeclared constant '" + std::string(name) + "'", 0, 0);
  consts_[*idx].body = std::move(body);
}

// ---------------------------------------------------------------------------
// Printing

namespace {

enum class Prec { Term = 0, App = 1, Atom = 2 };

void print_rec(const Term& t, Prec prec, std::string& out) {
  if (auto* v = t.as<Var>()) {
    out += v->name;
  } else if (auto* c = t.as<Const>()) {
    out += c->name;
  } else if (auto* k = t.as<Ctor>()) {
    if (k->args.empty()) {
      out += k->name;
      return;
    }
    bool paren = prec == Prec::Atom;
    if (paren) out += '(';
    out += k->name;
    for (const auto& a : k->args) {
      out += ' ';
      print_rec(*a, Prec::Atom, out);
    }
    if (paren) out += ')';
  } else if (auto* a = t.as<App>()) {
    bool paren = prec == Prec::Atom;
    if (paren) out += '(';
    print_rec(*a->fun, Prec::App, out);
    out += ' ';
    print_rec(*a->arg, Prec::Atom, out);
    if (paren) out += ')';
  } else if (auto* l = t.as<Lam>()) {
    bool paren = prec != Prec::Term;
    if (paren) out += '(';
    out += '\\';
    out += l->binder;
    out += ". ";
    print_rec(*l->body, Prec::Term, out);
    if (paren) out += ')';
  } else if (auto* m = t.as<Match>()) {
    bool paren = prec != Prec::Term;
    if (paren) out += '(';
    out += "match ";
    print_rec(*m->scrutinee, Prec::Term, out);
    out += " with ";
    bool first = true;
    for (const auto& b : m->branches) {
      if (!first) out += " | ";
      first = false;
      out += b.ctor;
      for (const auto& x : b.binders) {
        out += ' ';
        out += x;
      }
      out += " -> ";
      print_rec(*b.body, Prec::Term, out);
    }
    out += " end";
    if (paren) out += ')';
  }
}

}  // namespace

std::string print_term(const TermPtr& t) {
  std::string out;
  print_rec(*t, Prec::Term, out);
  return out;
}

// ---------------------------------------------------------------------------
// Alpha equality

namespace {

using BinderStack = std::vector<std::pair<const std::string*, const std::string*>>;

// Returns the binder depth of `name` on one side, or -1 if free.
long lookup_depth(const BinderStack& stack, const std::string& name, bool left) {
  for (std::size_t i = stack.size(); i-- > 0;) {
    const std::string* n = left ? stack[i].first : stack[i].second;
    if (*n == name) return static_cast<long>(i);
  }
  return -1;
}

bool alpha_rec(const Term& t, const Term& u, BinderStack& stack) {
  if (t.node.index() != u.node.index()) return false;
  if (auto* v = t.as<Var>()) {
    const auto& w = *u.as<Var>();
    long dl = lookup_depth(stack, v->name, true);
    long dr = lookup_depth(stack, w.name, false);
    if (dl < 0 && dr < 0) return v->name == w.name;
    return dl == dr;
  }
  if (auto* c = t.as<Const>()) return c->name == u.as<Const>()->name;
  if (auto* k = t.as<Ctor>()) {
    const auto& k2 = *u.as<Ctor>();
    if (k->name != k2.name || k->args.size() != k2.args.size()) return false;
    for (std::size_t i = 0; i < k->args.size(); ++i)
      if (!alpha_rec(*k->args[i], *k2.args[i], stack)) return false;
    return true;
  }
  if (auto* a = t.as<App>()) {
    const auto& a2 = *u.as<App>();
    return alpha_rec(*a->fun, *a2.fun, stack) && alpha_rec(*a->arg, *a2.arg, stack);
  }
  if (auto* l = t.as<Lam>()) {
    const auto& l2 = *u.as<Lam>();
    stack.emplace_back(&l->binder, &l2.binder);
    bool r = alpha_rec(*l->body, *l2.body, stack);
    stack.pop_back();
    return r;
  }
  const auto& m = *t.as<Match>();
  const auto& m2 = *u.as<Match>();
  if (!alpha_rec(*m.scrutinee, *m2.scrutinee, stack)) return false;
  if (m.branches.size() != m2.branches.size()) return false;
  for (const auto& b : m.branches) {
    const Branch* b2 = m2.find_branch(b.ctor);
    if (!b2 || b2->binders.size() != b.binders.size()) return false;
    for (std::size_t i = 0; i < b.binders.size(); ++i) stack.emplace_back(&b.binders[i], &b2->binders[i]);
    bool r = alpha_rec(*b.body, *b2->body, stack);
    stack.resize(stack.size() - b.binders.size());
    if (!r) return false;
  }
  return true;
}

}  // namespace

bool alpha_equal(const TermPtr& t, const TermPtr& u) {
  if (t == u) return true;
  BinderStack stack;
  return alpha_rec(*t, *u, stack);
}

// ---------------------------------------------------------------------------
// Free variables, size

namespace {

void free_rec(const Term& t, std::vector<std::string>& bound, std::set<std::string>& out) {
  if (auto* v = t.as<Var>()) {
    if (std::find(bound.begin(), bound.end(), v->name) == bound.end()) out.insert(v->name);
  } else if (auto* k = t.as<Ctor>()) {
    for (const auto& a : k->args) free_rec(*a, bound, out);
  } else if (auto* a = t.as<App>()) {
    free_rec(*a->fun, bound, out);
    free_rec(*a->arg, bound, out);
  } else if (auto* l = t.as<Lam>()) {
    bound.push_back(l->binder);
    free_rec(*l->body, bound, out);
    bound.pop_back();
  } else if (auto* m = t.as<Match>()) {
    free_rec(*m->scrutinee, bound, out);
    for (const auto& b : m->branches) {
      bound.insert(bound.end(), b.binders.begin(), b.binders.end());
      free_rec(*b.body, bound, out);
      bound.resize(bound.size() - b.binders.size());
    }
  }
}

}  // namespace

std::vector<std::string> free_vars(const TermPtr& t) {
  std::vector<std::string> bound;
  std::set<std::string> out;
  free_rec(*t, bound, out);
  return {out.begin(), out.end()};
}

bool is_closed(const TermPtr& t) { return free_vars(t).empty(); }

std::size_t term_size(const TermPtr& t) {
  std::size_t n = 1;
  if (auto* k = t->as<Ctor>()) {
    for (const auto& a : k->args) n += term_size(a);
  } else if (auto* a = t->as<App>()) {
    n += term_size(a->fun) + term_size(a->arg);
  } else if (auto* l = t->as<Lam>()) {
    n += term_size(l->body);
  } else if (auto* m = t->as<Match>()) {
    n += term_size(m->scrutinee);
    for (const auto& b : m->branches) n += term_size(b.body);
  }
  return n;
}

// ---------------------------------------------------------------------------
// Name tidying

namespace {

struct Tidier {
  std::unordered_set<std::string> reserved;  // free names of the whole term
  std::vector<std::pair<std::string, std::string>> scope;  // original -> chosen

  static std::string base_of(const std::string& name) {
    auto pos = name.find('#');
    std::string base = pos == std::string::npos ? name : name.substr(0, pos);
    if (base.empty()) base = "x";
    return base;
  }

  bool in_scope(const std::string& n) const {
    for (const auto& s : scope)
      if (s.second == n) return true;
    return false;
  }

  std::string choose(const std::string& name) {
    if (name.find('#') == std::string::npos && !reserved.count(name) && !in_scope(name)) return name;
    std::string base = base_of(name);
    std::string cand = base;
    for (int i = 1; reserved.count(cand) || in_scope(cand); ++i) cand = base + std::to_string(i);
    return cand;
  }

  std::string rename_var(const std::string& n) const {
    for (std::size_t i = scope.size(); i-- > 0;)
      if (scope[i].first == n) return scope[i].second;
    return n;
  }

  TermPtr go(const TermPtr& t) {
    if (auto* v = t->as<Var>()) return mk_var(rename_var(v->name));
    if (t->is<Const>()) return t;
    if (auto* k = t->as<Ctor>()) {
      std::vector<TermPtr> args;
      for (const auto& a : k->args) args.push_back(go(a));
      return mk_ctor(k->name, std::move(args));
    }
    if (auto* a = t->as<App>()) return mk_app(go(a->fun), go(a->arg));
    if (auto* l = t->as<Lam>()) {
      std::string chosen = choose(l->binder);
      scope.emplace_back(l->binder, chosen);
      TermPtr body = go(l->body);
      scope.pop_back();
      return mk_lam(chosen, body);
    }
    const auto& m = *t->as<Match>();
    TermPtr scrut = go(m.scrutinee);
    std::vector<Branch> branches;
    for (const auto& b : m.branches) {
      Branch nb{b.ctor, {}, nullptr};
      for (const auto& x : b.binders) {
        std::string chosen = choose(x);
        scope.emplace_back(x, chosen);
        nb.binders.push_back(chosen);
      }
      nb.body = go(b.body);
      scope.resize(scope.size() - b.binders.size());
      branches.push_back(std::move(nb));
    }
    return mk_match(scrut, std::move(branches));
  }
};

}  // namespace

TermPtr tidy_names(const TermPtr& t) {
  Tidier tidier;
  for (auto& v : free_vars(t)) tidier.reserved.insert(v);
  return tidier.go(t);
}

// ---------------------------------------------------------------------------
// Well-formedness

namespace {

void check_match_shape(const Match& m, const GlobalDefs& defs) {
  if (m.branches.empty()) throw SyntaxError("match with no branches", 0, 0);
  std::optional<std::size_t> data;
  std::vector<bool> seen;
  for (const auto& b : m.branches) {
    auto info = defs.find_ctor(b.ctor);
    if (!info) throw SyntaxError("unknown constructor '" + b.ctor + "'", 0, 0);
    if (!data) {
      data = info->data_index;
      seen.assign(defs.data_decls()[*data].ctors.size(), false);
    } else if (*data != info->data_index) {
      throw SyntaxError("match mixes constructors of different data types", 0, 0);
    }
    if (seen[info->ctor_index]) throw SyntaxError("duplicated match branch '" + b.ctor + "'", 0, 0);
    seen[info->ctor_index] = true;
    if (b.binders.size() != info->arity)
      throw SyntaxError("branch '" + b.ctor + "' binds " + std::to_string(b.binders.size()) +
                            " variables, constructor arity is " + std::to_string(info->arity),
                        0, 0);
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i])
      throw SyntaxError("non-exhaustive match: missing '" + defs.data_decls()[*data].ctors[i].name + "'", 0, 0);
}

void check_rec(const Term& t, const GlobalDefs& defs) {
  if (auto* c = t.as<Const>()) {
    if (!defs.find_const(c->name)) throw SyntaxError("undeclared constant '" + c->name + "'", 0, 0);
  } else if (auto* k = t.as<Ctor>()) {
    auto info = defs.find_ctor(k->name);
    if (!info) throw SyntaxError("unknown constructor '" + k->name + "'", 0, 0);
    if (info->arity != k->args.size()) throw SyntaxError("unsaturated constructor '" + k->name + "'", 0, 0);
    for (const auto& a : k->args) check_rec(*a, defs);
  } else if (auto* a = t.as<App>()) {
    const Term* head = a->fun.get();
    while (auto* inner = head->as<App>()) head = inner->fun.get();
    if (head->is<Ctor>()) throw SyntaxError("constructor over-applied", 0, 0);
    check_rec(*a->fun, defs);
    check_rec(*a->arg, defs);
  } else if (auto* l = t.as<Lam>()) {
    check_rec(*l->body, defs);
  } else if (auto* m = t.as<Match>()) {
    check_match_shape(*m, defs);
    check_rec(*m->scrutinee, defs);
    for (const auto& b : m->branches) check_rec(*b.body, defs);
  }
}

}  // namespace

void check_term(const TermPtr& t, const GlobalDefs& defs) { check_rec(*t, defs); }

}  // namespace lazyconv
