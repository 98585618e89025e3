#include <algorithm>
#include <cctype>
#include <set>

#include "lazyconv/syntax.hpp"

namespace lazyconv {

namespace {

enum class Tok { Lower, Upper, Number, Punct, Keyword, Eof };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

const std::set<std::string> kKeywords = {"data", "def", "match", "with", "end"};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    int tl = line, tc = col;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      std::string text(src.substr(i, j - i));
      Tok kind = kKeywords.count(text) ? Tok::Keyword
                 : std::isupper(static_cast<unsigned char>(c)) ? Tok::Upper
                                                                : Tok::Lower;
      out.push_back({kind, std::move(text), tl, tc});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Number, std::string(src.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    if (src.substr(i, 2) == ":=" || src.substr(i, 2) == "->") {
      out.push_back({Tok::Punct, std::string(src.substr(i, 2)), tl, tc});
      advance(2);
      continue;
    }
    if (std::string_view("\\.()|;").find(c) != std::string_view::npos) {
      out.push_back({Tok::Punct, std::string(1, c), tl, tc});
      advance(1);
      continue;
    }
    throw SyntaxError(std::string("unexpected character '") + c + "'", tl, tc);
  }
  out.push_back({Tok::Eof, "", line, col});
  return out;
}

// An application spine element before constructor saturation is resolved.
struct Item {
  TermPtr term;          // set for ordinary atoms
  std::string ctor;      // set for a bare constructor name
  int line = 0, col = 0;
};

class Parser {
 public:
  // `strict` rejects unknown lowercase names instead of making them free variables.
  Parser(const std::vector<Token>& toks, const GlobalDefs& defs, bool strict)
      : toks_(toks), defs_(defs), strict_(strict) {}

  const Token& peek() const { return toks_[pos_]; }
  bool at_punct(const char* p) const { return peek().kind == Tok::Punct && peek().text == p; }
  bool at_keyword(const char* k) const { return peek().kind == Tok::Keyword && peek().text == k; }
  const Token& next() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& msg) const { fail_at(msg, peek()); }
  [[noreturn]] static void fail_at(const std::string& msg, const Token& t) {
    throw SyntaxError(msg, t.line, t.col);
  }

  void expect_punct(const char* p) {
    if (!at_punct(p)) fail(std::string("expected '") + p + "'" + found());
    ++pos_;
  }
  void expect_keyword(const char* k) {
    if (!at_keyword(k)) fail(std::string("expected '") + k + "'" + found());
    ++pos_;
  }
  std::string found() const {
    if (peek().kind == Tok::Eof) return ", found end of input";
    return ", found '" + peek().text + "'";
  }

  std::string expect_lower(const char* what) {
    if (peek().kind != Tok::Lower) fail(std::string("expected ") + what + found());
    return next().text;
  }

  TermPtr term() {
    if (at_punct("\\")) {
      ++pos_;
      std::vector<std::string> binders;
      binders.push_back(expect_lower("variable name"));
      while (peek().kind == Tok::Lower) binders.push_back(next().text);
      expect_punct(".");
      for (auto& b : binders) scope_.push_back(b);
      TermPtr body = term();
      scope_.resize(scope_.size() - binders.size());
      for (std::size_t i = binders.size(); i-- > 0;) body = mk_lam(binders[i], body);
      return body;
    }
    if (at_keyword("match")) return match();
    return appterm();
  }

  TermPtr match() {
    const Token start = next();
    TermPtr scrut = term();
    expect_keyword("with");
    if (at_punct("|")) ++pos_;
    std::vector<Branch> branches;
    std::vector<Token> branch_toks;
    for (;;) {
      if (peek().kind != Tok::Upper) fail("expected constructor in match branch" + found());
      branch_toks.push_back(peek());
      Branch b;
      b.ctor = next().text;
      while (peek().kind == Tok::Lower) b.binders.push_back(next().text);
      expect_punct("->");
      for (auto& x : b.binders) scope_.push_back(x);
      b.body = term();
      scope_.resize(scope_.size() - b.binders.size());
      branches.push_back(std::move(b));
      if (at_punct("|")) {
        ++pos_;
        continue;
      }
      break;
    }
    expect_keyword("end");
    check_branches(branches, branch_toks, start);
    return mk_match(scrut, std::move(branches));
  }

  void check_branches(const std::vector<Branch>& branches, const std::vector<Token>& at,
                      const Token& start) const {
    std::optional<std::size_t> data;
    std::vector<bool> seen;
    for (std::size_t i = 0; i < branches.size(); ++i) {
      const auto& b = branches[i];
      auto info = defs_.find_ctor(b.ctor);
      if (!info) fail_at("unknown constructor '" + b.ctor + "'", at[i]);
      if (!data) {
        data = info->data_index;
        seen.assign(defs_.data_decls()[*data].ctors.size(), false);
      } else if (*data != info->data_index) {
        fail_at("constructor '" + b.ctor + "' belongs to another data type", at[i]);
      }
      if (seen[info->ctor_index]) fail_at("duplicated match branch '" + b.ctor + "'", at[i]);
      seen[info->ctor_index] = true;
      if (b.binders.size() != info->arity)
        fail_at("branch '" + b.ctor + "' binds " + std::to_string(b.binders.size()) +
                    " variables but the constructor has arity " + std::to_string(info->arity),
                at[i]);
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
      if (!seen[i])
        fail_at("non-exhaustive match: missing '" + defs_.data_decls()[*data].ctors[i].name + "'", start);
  }

  bool atom_start() const {
    const auto& t = peek();
    return t.kind == Tok::Lower || t.kind == Tok::Upper || t.kind == Tok::Number ||
           (t.kind == Tok::Punct && t.text == "(");
  }

  TermPtr appterm() {
    if (!atom_start()) fail("expected a term" + found());
    std::vector<Item> items;
    while (atom_start()) items.push_back(atom());

    std::size_t i = 0;
    TermPtr head;
    if (!items[0].ctor.empty()) {
      auto info = *defs_.find_ctor(items[0].ctor);
      if (items.size() - 1 < info.arity)
        throw SyntaxError("unsaturated constructor '" + items[0].ctor + "'", items[0].line, items[0].col);
      std::vector<TermPtr> args;
      for (std::size_t k = 1; k <= info.arity; ++k) args.push_back(arg_term(items[k]));
      if (items.size() > info.arity + 1)
        throw SyntaxError("constructor '" + items[0].ctor + "' applied to too many arguments",
                          items[info.arity + 1].line, items[info.arity + 1].col);
      return mk_ctor(items[0].ctor, std::move(args));
    }
    head = items[0].term;
    for (i = 1; i < items.size(); ++i) head = mk_app(head, arg_term(items[i]));
    return head;
  }

  TermPtr arg_term(const Item& it) const {
    if (it.ctor.empty()) return it.term;
    auto info = *defs_.find_ctor(it.ctor);
    if (info.arity != 0) throw SyntaxError("unsaturated constructor '" + it.ctor + "'", it.line, it.col);
    return mk_ctor(it.ctor);
  }

  // Decimal literal n stands for S (... (S O)) with n S's.
  TermPtr numeral(const Token& t) const {
    auto zero = defs_.find_ctor("O"), succ = defs_.find_ctor("S");
    if (!zero || !succ || zero->arity != 0 || succ->arity != 1)
      fail_at("numeral needs constructors O and S n to be declared", t);
    if (t.text.size() > 6 || std::stoul(t.text) > 100000) fail_at("numeral too large", t);
    TermPtr n = mk_ctor("O");
    for (unsigned long k = std::stoul(t.text); k > 0; --k) n = mk_ctor("S", {n});
    return n;
  }

  Item atom() {
    const Token& t = peek();
    Item it;
    it.line = t.line;
    it.col = t.col;
    if (t.kind == Tok::Upper) {
      if (!defs_.find_ctor(t.text)) fail("unknown constructor '" + t.text + "'");
      it.ctor = next().text;
      return it;
    }
    if (t.kind == Tok::Lower) {
      std::string name = next().text;
      bool bound = std::find(scope_.begin(), scope_.end(), name) != scope_.end();
      if (bound) {
        it.term = mk_var(name);
      } else if (defs_.find_const(name)) {
        it.term = mk_const(name);
      } else if (strict_) {
        throw SyntaxError("undeclared name '" + name + "'", t.line, t.col);
      } else {
        it.term = mk_var(name);
      }
      return it;
    }
    if (t.kind == Tok::Number) {
      it.term = numeral(next());
      return it;
    }
    expect_punct("(");
    it.term = term();
    expect_punct(")");
    return it;
  }

  std::size_t pos_ = 0;
  const std::vector<Token>& toks_;
  const GlobalDefs& defs_;
  bool strict_;
  std::vector<std::string> scope_;
};

std::size_t parse_arity(const Token& t) {
  if (t.kind != Tok::Number) throw SyntaxError("expected constructor arity", t.line, t.col);
  try {
    return static_cast<std::size_t>(std::stoul(t.text));
  } catch (const std::exception&) {
    throw SyntaxError("arity out of range", t.line, t.col);
  }
}

}  // namespace

GlobalDefs parse_defs(std::string_view text) {
  std::vector<Token> toks = lex(text);
  GlobalDefs defs;

  // Pass 1: data declarations and constant names, so bodies may refer to
  // anything declared anywhere in the file.
  struct PendingDef {
    std::string name;
    std::size_t body_pos;
  };
  std::vector<PendingDef> pending;
  std::size_t p = 0;
  auto want = [&](bool ok, const char* msg) {
    if (!ok) {
      const Token& t = toks[p];
      std::string f = t.kind == Tok::Eof ? ", found end of input" : ", found '" + t.text + "'";
      throw SyntaxError(std::string(msg) + f, t.line, t.col);
    }
  };
  auto is_punct = [&](const char* s) { return toks[p].kind == Tok::Punct && toks[p].text == s; };
  while (toks[p].kind != Tok::Eof) {
    const Token& kw = toks[p];
    if (kw.kind == Tok::Keyword && kw.text == "data") {
      ++p;
      want(toks[p].kind == Tok::Upper, "expected data type name");
      DataDecl decl{toks[p].text, {}};
      const Token name_tok = toks[p++];
      want(is_punct(":="), "expected ':='");
      ++p;
      for (;;) {
        want(toks[p].kind == Tok::Upper, "expected constructor name");
        CtorDecl c{toks[p].text, 0};
        ++p;
        c.arity = parse_arity(toks[p]);
        ++p;
        decl.ctors.push_back(std::move(c));
        if (is_punct("|")) {
          ++p;
          continue;
        }
        break;
      }
      want(is_punct(";"), "expected ';'");
      ++p;
      try {
        defs.add_data(std::move(decl));
      } catch (const SyntaxError& e) {
        throw SyntaxError(e.what(), name_tok.line, name_tok.col);
      }
    } else if (kw.kind == Tok::Keyword && kw.text == "def") {
      ++p;
      want(toks[p].kind == Tok::Lower, "expected constant name");
      const Token name_tok = toks[p++];
      want(is_punct(":="), "expected ':='");
      ++p;
      try {
        defs.declare_const(name_tok.text);
      } catch (const SyntaxError& e) {
        throw SyntaxError(e.what(), name_tok.line, name_tok.col);
      }
      pending.push_back({name_tok.text, p});
      // Skip to the terminating ';' (terms contain no ';').
      while (toks[p].kind != Tok::Eof && !is_punct(";")) ++p;
      want(is_punct(";"), "expected ';'");
      ++p;
    } else {
      want(false, "expected 'data' or 'def'");
    }
  }

  // Pass 2: constant bodies.
  for (const auto& d : pending) {
    Parser parser(toks, defs, true);
    parser.pos_ = d.body_pos;
    TermPtr body = parser.term();
    if (!parser.at_punct(";")) parser.fail("expected ';'" + parser.found());
    defs.define_const(d.name, body);
  }
  return defs;
}

TermPtr parse_term(std::string_view text, const GlobalDefs& defs) {
  std::vector<Token> toks = lex(text);
  Parser parser(toks, defs, false);
  TermPtr t = parser.term();
  if (parser.peek().kind != Tok::Eof) parser.fail("unexpected trailing input" + parser.found());
  return t;
}

}  // namespace lazyconv
