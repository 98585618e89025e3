#pragma once

#include <cstdint>
#include <optional>

#include "lazyconv/syntax.hpp"

namespace lazyconv {

/// Reference semantics: leftmost-outermost beta / delta / match reduction on
/// terms, with capture-avoiding substitution. Shares nothing with the
/// machine beyond the AST.
struct NaiveResult {
  TermPtr term;  // null when out of fuel
  std::uint64_t contractions = 0;
  bool out_of_fuel() const { return !term; }
};

/// `fuel` bounds the number of contractions.
NaiveResult normalize_naive(const GlobalDefs& defs, const TermPtr& t, std::uint64_t fuel);

/// Contracts a uniformly chosen redex at each step instead of the leftmost
/// outermost one. For confluence checks only.
NaiveResult normalize_random_order(const GlobalDefs& defs, const TermPtr& t, std::uint64_t fuel,
                                   std::uint64_t seed);

/// One leftmost-outermost contraction; nullopt when t is normal.
std::optional<TermPtr> step_naive(const GlobalDefs& defs, const TermPtr& t);

/// Capture-avoiding t[x := u].
TermPtr substitute_naive(const TermPtr& t, const std::string& x, const TermPtr& u);

struct OracleResult {
  bool decided = false;
  bool convertible = false;
};

/// Each side is normalized with its own budget of `fuel` contractions.
OracleResult oracle_convertible(const GlobalDefs& defs, const TermPtr& t, const TermPtr& u, std::uint64_t fuel);

}  // namespace lazyconv
