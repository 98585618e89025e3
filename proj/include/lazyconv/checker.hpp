#pragma once

#include <cstdint>
#include <string>

#include "lazyconv/machine.hpp"

namespace lazyconv {

enum class Verdict { Convertible, NotConvertible, UnknownFuel, UnknownDeadlock };

/// "convertible", "not convertible", "unknown (fuel)", "unknown (deadlock)".
std::string verdict_text(Verdict v);
inline bool decided(Verdict v) { return v == Verdict::Convertible || v == Verdict::NotConvertible; }

struct CheckResult {
  Verdict verdict = Verdict::UnknownFuel;
  Stats stats;
  ChannelId lhs = kNoChannel, rhs = kNoChannel;
};

/// Presharing (when enabled in opts), initial state, and the run loop.
CheckResult run_check(const GlobalDefs& defs, const TermPtr& lhs, const TermPtr& rhs, const Options& opts,
                      std::uint64_t fuel);
CheckResult run_check(const GlobalDefs& defs, const GeneralizedProblem& p, const Options& opts,
                      std::uint64_t fuel);

struct NormalizeResult {
  RunStatus status = RunStatus::OutOfFuel;
  TermPtr term;  // set when status == Done; binders tidied
  Stats stats;
};

NormalizeResult normalize(const GlobalDefs& defs, const TermPtr& t, const Options& opts, std::uint64_t fuel);

}  // namespace lazyconv
