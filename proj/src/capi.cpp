#include "lazyconv.h"

#include <chrono>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lazyconv/bench.hpp"
#include "lazyconv/checker.hpp"
#include "lazyconv/oracle.hpp"

struct lc_defs {
  lazyconv::GlobalDefs defs;
};

struct lc_result {
  lazyconv::Verdict verdict;
  lazyconv::Stats stats;
  lazyconv::ChannelId lhs = lazyconv::kNoChannel, rhs = lazyconv::kNoChannel;
};

namespace {

thread_local std::string last_error;

lc_status fail(lc_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

lazyconv::Options to_options(const lc_options* o) {
  lazyconv::Options out;
  if (!o) return out;
  out.frozen = o->frozen != 0;
  out.conv_sharing = o->conv_sharing != 0;
  out.presharing = o->presharing != 0;
  out.eta = o->eta != 0;
  out.check_invariants = o->check_invariants != 0;
  return out;
}

lc_verdict to_c(lazyconv::Verdict v) {
  switch (v) {
    case lazyconv::Verdict::Convertible: return LC_CONVERTIBLE;
    case lazyconv::Verdict::NotConvertible: return LC_NOT_CONVERTIBLE;
    case lazyconv::Verdict::UnknownFuel: return LC_UNKNOWN_FUEL;
    case lazyconv::Verdict::UnknownDeadlock: return LC_UNKNOWN_DEADLOCK;
  }
  return LC_UNKNOWN_FUEL;
}

// Runs f, mapping exceptions to status codes.
template <class F> lc_status guarded(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const lazyconv::SyntaxError& e) {
    return fail(LC_ERR_PARSE, e.what());
  } catch (const lazyconv::MachineError& e) {
    return fail(LC_ERR_MACHINE, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(LC_ERR_ARG, e.what());
  } catch (const std::exception& e) {
    return fail(LC_ERR_INTERNAL, e.what());
  }
}

}  // namespace

extern "C" {

const char* lc_last_error(void) { return last_error.c_str(); }

void lc_string_free(char* s) { std::free(s); }

void lc_options_default(lc_options* opts) {
  if (!opts) return;
  opts->frozen = 1;
  opts->conv_sharing = 1;
  opts->presharing = 0;
  opts->eta = 0;
  opts->check_invariants = 0;
}

lc_status lc_defs_parse(const char* text, lc_defs** out) {
  if (!text || !out) return fail(LC_ERR_ARG, "null argument");
  return guarded([&] {
    *out = new lc_defs{lazyconv::parse_defs(text)};
    return LC_OK;
  });
}

lc_status lc_defs_load(const char* path, lc_defs** out) {
  if (!path || !out) return fail(LC_ERR_ARG, "null argument");
  std::ifstream in(path, std::ios::binary);
  if (!in) return fail(LC_ERR_IO, std::string("cannot read '") + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  if (in.bad()) return fail(LC_ERR_IO, std::string("cannot read '") + path + "'");
  std::string text = ss.str();
  return lc_defs_parse(text.c_str(), out);
}

lc_status lc_defs_bench(lc_defs** out) {
  if (!out) return fail(LC_ERR_ARG, "null argument");
  return guarded([&] {
    *out = new lc_defs{lazyconv::bench_defs()};
    return LC_OK;
  });
}

void lc_defs_free(lc_defs* defs) { delete defs; }

lc_status lc_check(const lc_defs* defs, const char* lhs, const char* rhs, const lc_options* opts, uint64_t fuel,
                   lc_trace_fn trace, void* user, lc_result** out) {
  if (!defs || !lhs || !rhs || !out) return fail(LC_ERR_ARG, "null argument");
  return guarded([&] {
    auto l = lazyconv::parse_term(lhs, defs->defs);
    auto r = lazyconv::parse_term(rhs, defs->defs);
    lazyconv::Options o = to_options(opts);
    if (trace)
      o.trace = [trace, user](const lazyconv::TraceEvent& e) { trace(lazyconv::format_trace(e).c_str(), user); };
    auto res = lazyconv::run_check(defs->defs, l, r, o, fuel);
    *out = new lc_result{res.verdict, std::move(res.stats), res.lhs, res.rhs};
    return LC_OK;
  });
}

lc_status lc_normalize(const lc_defs* defs, const char* term, const lc_options* opts, uint64_t fuel, char** nf,
                       lc_result** out) {
  if (!defs || !term || !nf) return fail(LC_ERR_ARG, "null argument");
  return guarded([&] {
    auto t = lazyconv::parse_term(term, defs->defs);
    auto res = lazyconv::normalize(defs->defs, t, to_options(opts), fuel);
    *nf = res.term ? dup(lazyconv::print_term(res.term)) : nullptr;
    if (out) {
      lazyconv::Verdict v = res.status == lazyconv::RunStatus::Done        ? lazyconv::Verdict::Convertible
                            : res.status == lazyconv::RunStatus::OutOfFuel ? lazyconv::Verdict::UnknownFuel
                                                                           : lazyconv::Verdict::UnknownDeadlock;
      *out = new lc_result{v, std::move(res.stats)};
    }
    return LC_OK;
  });
}

lc_verdict lc_result_verdict(const lc_result* r) { return r ? to_c(r->verdict) : LC_UNKNOWN_FUEL; }

const char* lc_verdict_text(lc_verdict v) {
  switch (v) {
    case LC_CONVERTIBLE: return "convertible";
    case LC_NOT_CONVERTIBLE: return "not convertible";
    case LC_UNKNOWN_FUEL: return "unknown (fuel)";
    case LC_UNKNOWN_DEADLOCK: return "unknown (deadlock)";
  }
  return "unknown";
}

lc_status lc_result_stat(const lc_result* r, const char* key, uint64_t* value) {
  if (!r || !key || !value) return fail(LC_ERR_ARG, "null argument");
  const auto& s = r->stats;
  std::string k = key;
  if (k == "transitions") *value = s.transitions;
  else if (k == "processes_created") *value = s.processes_created;
  else if (k == "conv_processes") *value = s.conv_processes;
  else if (k == "peak_queue") *value = s.peak_queue;
  else if (k == "memo_hits") *value = s.memo_hits;
  else if (k == "eval_steps_total") *value = s.eval_steps_total();
  else if (k == "invariant_violations") *value = s.invariant_violations;
  else return fail(LC_ERR_ARG, "unknown stats key '" + k + "'");
  return LC_OK;
}

uint64_t lc_result_eval_steps(const lc_result* r, uint32_t channel) { return r ? r->stats.eval_steps(channel) : 0; }
uint32_t lc_result_lhs_channel(const lc_result* r) { return r ? r->lhs : lazyconv::kNoChannel; }
uint32_t lc_result_rhs_channel(const lc_result* r) { return r ? r->rhs : lazyconv::kNoChannel; }

char* lc_result_stats_text(const lc_result* r) { return r ? dup(r->stats.to_text()) : nullptr; }

void lc_result_free(lc_result* r) { delete r; }

lc_status lc_oracle_check(const lc_defs* defs, const char* lhs, const char* rhs, uint64_t fuel, int* decided,
                          int* convertible) {
  if (!defs || !lhs || !rhs || !decided || !convertible) return fail(LC_ERR_ARG, "null argument");
  return guarded([&] {
    auto l = lazyconv::parse_term(lhs, defs->defs);
    auto r = lazyconv::parse_term(rhs, defs->defs);
    auto res = lazyconv::oracle_convertible(defs->defs, l, r, fuel);
    *decided = res.decided;
    *convertible = res.convertible;
    return LC_OK;
  });
}

lc_status lc_oracle_normalize(const lc_defs* defs, const char* term, uint64_t fuel, char** nf) {
  if (!defs || !term || !nf) return fail(LC_ERR_ARG, "null argument");
  return guarded([&] {
    auto res = lazyconv::normalize_naive(defs->defs, lazyconv::parse_term(term, defs->defs), fuel);
    *nf = res.term ? dup(lazyconv::print_term(res.term)) : nullptr;
    return LC_OK;
  });
}

size_t lc_bench_suite_count(void) { return lazyconv::bench_suites().size(); }

const char* lc_bench_suite_name(size_t i) {
  const auto& s = lazyconv::bench_suites();
  return i < s.size() ? s[i].c_str() : nullptr;
}

lc_status lc_bench_run(const char* suite, unsigned n, uint64_t fuel, lc_bench_fn cb, void* user) {
  if (!suite || !cb) return fail(LC_ERR_ARG, "null argument");
  return guarded([&] {
    for (const auto& bc : lazyconv::bench_cases(suite, n)) {
      auto t0 = std::chrono::steady_clock::now();
      auto res = lazyconv::run_check(lazyconv::bench_defs(), bc.lhs, bc.rhs, bc.opts, fuel);
      double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      lc_result r{res.verdict, std::move(res.stats), res.lhs, res.rhs};
      lc_bench_row row{bc.suite.c_str(), bc.n, bc.config.c_str(), bc.variant.c_str(),
                       to_c(res.verdict), to_c(bc.expected), &r, ms};
      cb(&row, user);
    }
    return LC_OK;
  });
}

}  // extern "C"
