#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace lazyconv {

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Var {
  std::string name;
};

struct Lam {
  std::string binder;
  TermPtr body;
};

struct App {
  TermPtr fun;
  TermPtr arg;
};

struct Const {
  std::string name;
};

/// Saturated constructor application.
struct Ctor {
  std::string name;
  std::vector<TermPtr> args;
};

struct Branch {
  std::string ctor;
  std::vector<std::string> binders;
  TermPtr body;
};

struct Match {
  TermPtr scrutinee;
  std::vector<Branch> branches;

  const Branch* find_branch(std::string_view ctor) const;
};

struct Term {
  std::variant<Var, Lam, App, Const, Ctor, Match> node;

  template <class T> const T* as() const { return std::get_if<T>(&node); }
  template <class T> bool is() const { return std::holds_alternative<T>(node); }
};

TermPtr mk_var(std::string name);
TermPtr mk_lam(std::string binder, TermPtr body);
TermPtr mk_app(TermPtr fun, TermPtr arg);
TermPtr mk_apps(TermPtr head, const std::vector<TermPtr>& args);
TermPtr mk_const(std::string name);
TermPtr mk_ctor(std::string name, std::vector<TermPtr> args = {});
TermPtr mk_match(TermPtr scrutinee, std::vector<Branch> branches);

struct CtorDecl {
  std::string name;
  std::size_t arity = 0;
};

struct DataDecl {
  std::string name;
  std::vector<CtorDecl> ctors;
};

struct ConstDef {
  std::string name;
  TermPtr body;
};

struct CtorInfo {
  std::size_t data_index = 0;
  std::size_t ctor_index = 0;
  std::size_t arity = 0;
};

/// Data declarations and constant definitions, in declaration order.
class GlobalDefs {
 public:
  const std::vector<DataDecl>& data_decls() const { return data_; }
  const std::vector<ConstDef>& const_defs() const { return consts_; }

  std::optional<CtorInfo> find_ctor(std::string_view name) const;
  std::optional<std::size_t> find_const(std::string_view name) const;
  bool is_type_name(std::string_view name) const;

  // Registration checks only name uniqueness; bodies are validated by the parser.
  void add_data(DataDecl decl);
  void declare_const(std::string name);
  void define_const(std::string_view name, TermPtr body);

 private:
  std::vector<DataDecl> data_;
  std::vector<ConstDef> consts_;
  std::unordered_map<std::string, CtorInfo> ctor_index_;
  std::unordered_map<std::string, std::size_t> const_index_;
  std::unordered_map<std::string, std::size_t> type_index_;
};

/// A parse or well-formedness error with a 1-based source location.
class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& what, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

GlobalDefs parse_defs(std::string_view text);
TermPtr parse_term(std::string_view text, const GlobalDefs& defs);

std::string print_term(const TermPtr& t);

bool alpha_equal(const TermPtr& t, const TermPtr& u);

/// Free variable names, sorted.
std::vector<std::string> free_vars(const TermPtr& t);
bool is_closed(const TermPtr& t);
std::size_t term_size(const TermPtr& t);

/// Renames machine-generated binders (names containing '#') to readable
/// identifiers derived from their prefix, avoiding capture.
TermPtr tidy_names(const TermPtr& t);

/// Checks the well-formedness invariants of a term against `defs`: saturated
/// constructors, exhaustive non-duplicated matches, declared constants.
/// Throws SyntaxError (location 0:0) on violation.
void check_term(const TermPtr& t, const GlobalDefs& defs);

}  // namespace lazyconv
