#include "lazyconv/checker.hpp"

namespace lazyconv {

std::string verdict_text(Verdict v) {
  switch (v) {
    case Verdict::Convertible: return "convertible";
    case Verdict::NotConvertible: return "not convertible";
    case Verdict::UnknownFuel: return "unknown (fuel)";
    case Verdict::UnknownDeadlock: return "unknown (deadlock)";
  }
  return "unknown";
}

CheckResult run_check(const GlobalDefs& defs, const GeneralizedProblem& p, const Options& opts,
                      std::uint64_t fuel) {
  Machine m(defs, opts);
  m.init_conv(p);
  RunStatus st = m.run(fuel);
  CheckResult r;
  r.lhs = m.lhs_channel();
  r.rhs = m.rhs_channel();
  if (st == RunStatus::Done)
    r.verdict = m.bool_of(m.root()) ? Verdict::Convertible : Verdict::NotConvertible;
  else
    r.verdict = st == RunStatus::OutOfFuel ? Verdict::UnknownFuel : Verdict::UnknownDeadlock;
  r.stats = m.stats();
  return r;
}

CheckResult run_check(const GlobalDefs& defs, const TermPtr& lhs, const TermPtr& rhs, const Options& opts,
                      std::uint64_t fuel) {
  return run_check(defs, opts.presharing ? preshare(lhs, rhs) : trivial_problem(lhs, rhs), opts, fuel);
}

NormalizeResult normalize(const GlobalDefs& defs, const TermPtr& t, const Options& opts, std::uint64_t fuel) {
  Machine m(defs, opts);
  m.init_normalize(t);
  NormalizeResult r;
  r.status = m.run(fuel);
  if (r.status == RunStatus::Done) r.term = tidy_names(m.term_of(m.root()));
  r.stats = m.stats();
  return r;
}

}  // namespace lazyconv
