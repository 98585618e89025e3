#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "lazyconv/syntax.hpp"

namespace lazyconv {

/// Fixed signature of the random corpus: Bool, Nat and a few combinators.
const char* corpus_defs_text();

enum class PairLabel { Convertible, Unknown };

struct CorpusPair {
  std::shared_ptr<const GlobalDefs> defs;
  TermPtr lhs, rhs;
  PairLabel label = PairLabel::Unknown;
  std::string how;  // name of the transformation that produced rhs
};

/// Deterministic in seed. `max_size` bounds the randomly generated source
/// term; the transformed side may be somewhat larger (an unfolded constant
/// brings its body along).
std::vector<CorpusPair> gen_corpus(std::uint64_t seed, std::size_t count, std::size_t max_size);

}  // namespace lazyconv
