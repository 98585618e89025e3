#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lazyconv/syntax.hpp"

namespace lazyconv {

/// let x1 = t1 in ... let xn = tn in lhs =?= rhs. Binding i may refer to
/// binders 1..i-1 only.
struct GeneralizedProblem {
  std::vector<std::pair<std::string, TermPtr>> bindings;
  TermPtr lhs;
  TermPtr rhs;
};

/// Hash-conses the closed subterms of both sides and binds every one that
/// occurs at least twice. Binder names start with '#', so they never clash
/// with source names.
GeneralizedProblem preshare(const TermPtr& lhs, const TermPtr& rhs);

/// The problem with no bindings.
GeneralizedProblem trivial_problem(const TermPtr& lhs, const TermPtr& rhs);

/// Substitutes the bindings back into lhs and rhs.
std::pair<TermPtr, TermPtr> unshare(const GeneralizedProblem& p);

}  // namespace lazyconv
