// Command-line front end. Talks to the library only through lazyconv.h.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lazyconv.h"

namespace {

enum Exit { kConvertible = 0, kNotConvertible = 1, kUnknown = 2, kInputError = 3, kOracleDisagrees = 4 };

struct DefsDeleter {
  void operator()(lc_defs* d) const { lc_defs_free(d); }
};
struct ResultDeleter {
  void operator()(lc_result* r) const { lc_result_free(r); }
};
using DefsPtr = std::unique_ptr<lc_defs, DefsDeleter>;
using ResultPtr = std::unique_ptr<lc_result, ResultDeleter>;

int input_error(const std::string& what) {
  std::cerr << "error: " << what << "\n";
  return kInputError;
}

int load_defs(const std::string& path, DefsPtr& out) {
  lc_defs* d = nullptr;
  lc_status s = path.empty() ? lc_defs_parse("", &d) : lc_defs_load(path.c_str(), &d);
  if (s != LC_OK) return input_error(lc_last_error());
  out.reset(d);
  return 0;
}

bool write_stats(const std::string& path, const lc_result* r) {
  char* text = lc_result_stats_text(r);
  std::ofstream f(path);
  f << (text ? text : "");
  lc_string_free(text);
  return static_cast<bool>(f);
}

// "a,b,c" or "a..b"
bool parse_sizes(const std::string& text, std::vector<unsigned>& out) {
  try {
    auto dots = text.find("..");
    if (dots != std::string::npos) {
      unsigned lo = std::stoul(text.substr(0, dots)), hi = std::stoul(text.substr(dots + 2));
      if (lo > hi) return false;
      for (unsigned n = lo; n <= hi; ++n) out.push_back(n);
      return true;
    }
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(std::stoul(part));
    return !out.empty();
  } catch (const std::exception&) {
    return false;
  }
}

std::vector<unsigned> default_sizes(const std::string& suite) {
  if (suite == "exp2-eq") return {6, 10, 14};
  if (suite == "zero-exp2") return {10, 20, 40};
  if (suite == "ldepth") return {8, 12, 15};
  if (suite == "perfect") return {8, 9, 10, 11, 12, 13};
  if (suite == "even-odd") return {50, 100};
  if (suite == "f4-chain") return {30};
  return {8, 12, 16};
}

struct Flags {
  std::string defs, lhs, rhs, term, stats, suite, sizes;
  unsigned long long fuel = 10000000ULL;
  unsigned long long oracle_fuel = 100000ULL;
  bool no_frozen = false, no_share = false, preshare = false, eta = false, trace = false, oracle = false;

  lc_options options() const {
    lc_options o;
    lc_options_default(&o);
    o.frozen = !no_frozen;
    o.conv_sharing = !no_share;
    o.presharing = preshare;
    o.eta = eta;
    return o;
  }
};

void print_trace(const char* line, void*) { std::cout << "trace " << line << "\n"; }

int cmd_check(const Flags& f) {
  DefsPtr defs;
  if (int e = load_defs(f.defs, defs)) return e;
  lc_options o = f.options();
  lc_result* raw = nullptr;
  if (lc_check(defs.get(), f.lhs.c_str(), f.rhs.c_str(), &o, f.fuel, f.trace ? print_trace : nullptr, nullptr,
               &raw) != LC_OK)
    return input_error(lc_last_error());
  ResultPtr r(raw);
  lc_verdict v = lc_result_verdict(r.get());
  std::cout << lc_verdict_text(v) << "\n";
  if (!f.stats.empty() && !write_stats(f.stats, r.get())) return input_error("cannot write '" + f.stats + "'");
  if (f.oracle) {
    int decided = 0, conv = 0;
    if (lc_oracle_check(defs.get(), f.lhs.c_str(), f.rhs.c_str(), f.oracle_fuel, &decided, &conv) != LC_OK)
      return input_error(lc_last_error());
    if (!decided) {
      std::cout << "oracle: unknown (fuel)\n";
    } else {
      std::cout << "oracle: " << (conv ? "convertible" : "not convertible") << "\n";
      bool clash = (v == LC_CONVERTIBLE && !conv) || (v == LC_NOT_CONVERTIBLE && conv);
      if (clash) {
        std::cerr << "error: checker and oracle disagree\n";
        return kOracleDisagrees;
      }
    }
  }
  switch (v) {
    case LC_CONVERTIBLE: return kConvertible;
    case LC_NOT_CONVERTIBLE: return kNotConvertible;
    default: return kUnknown;
  }
}

int cmd_normalize(const Flags& f) {
  DefsPtr defs;
  if (int e = load_defs(f.defs, defs)) return e;
  lc_options o = f.options();
  char* nf = nullptr;
  lc_result* raw = nullptr;
  if (lc_normalize(defs.get(), f.term.c_str(), &o, f.fuel, &nf, &raw) != LC_OK) return input_error(lc_last_error());
  ResultPtr r(raw);
  std::cout << (nf ? nf : "unknown") << "\n";
  bool done = nf != nullptr;
  lc_string_free(nf);
  if (!f.stats.empty() && !write_stats(f.stats, r.get())) return input_error("cannot write '" + f.stats + "'");
  return done ? kConvertible : kUnknown;
}

struct BenchState {
  bool mismatch = false;
};

void print_row(const lc_bench_row* row, void* user) {
  uint64_t tr = 0, procs = 0, evals = 0, hits = 0;
  lc_result_stat(row->result, "transitions", &tr);
  lc_result_stat(row->result, "processes_created", &procs);
  lc_result_stat(row->result, "eval_steps_total", &evals);
  lc_result_stat(row->result, "memo_hits", &hits);
  std::printf("%-10s n=%-4u config=%-10s variant=%-10s verdict=%-18s transitions=%-10llu processes=%-9llu "
              "eval_steps=%-9llu memo_hits=%-8llu ms=%.1f\n",
              row->suite, row->n, row->config, row->variant, lc_verdict_text(row->verdict),
              static_cast<unsigned long long>(tr), static_cast<unsigned long long>(procs),
              static_cast<unsigned long long>(evals), static_cast<unsigned long long>(hits), row->millis);
  if (row->verdict != row->expected) static_cast<BenchState*>(user)->mismatch = true;
}

int cmd_bench(const Flags& f) {
  bool known = false;
  for (size_t i = 0; i < lc_bench_suite_count(); ++i)
    if (f.suite == lc_bench_suite_name(i)) known = true;
  if (!known) return input_error("unknown suite '" + f.suite + "'");
  std::vector<unsigned> sizes;
  if (f.sizes.empty()) sizes = default_sizes(f.suite);
  else if (!parse_sizes(f.sizes, sizes)) return input_error("bad --sizes '" + f.sizes + "'");
  BenchState st;
  for (unsigned n : sizes) {
    if (lc_bench_run(f.suite.c_str(), n, f.fuel, print_row, &st) != LC_OK) return input_error(lc_last_error());
    std::fflush(stdout);
  }
  return st.mismatch ? kNotConvertible : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lazy convertibility checker for lambda-terms with constants and pattern matching"};
  app.require_subcommand(1);
  Flags f;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--defs", f.defs, "definitions file");
    sub->add_option("--fuel", f.fuel, "transition budget")->check(CLI::PositiveNumber);
    sub->add_flag("--no-frozen", f.no_frozen, "disable frozen (folded) constant values");
    sub->add_flag("--no-share-conv", f.no_share, "disable sharing of convertibility processes");
    sub->add_flag("--preshare", f.preshare, "hoist repeated subterms into shared bindings first");
    sub->add_flag("--eta", f.eta, "enable eta-conversion");
    sub->add_option("--stats", f.stats, "write statistics to this file");
  };

  auto* check = app.add_subcommand("check", "decide whether two terms are convertible");
  add_common(check);
  check->add_option("--lhs", f.lhs, "left term")->required();
  check->add_option("--rhs", f.rhs, "right term")->required();
  check->add_flag("--trace", f.trace, "print each unfolding decision");
  check->add_flag("--oracle", f.oracle, "cross-check with the reference normalizer");
  check->add_option("--oracle-fuel", f.oracle_fuel, "contraction budget for the reference normalizer")
      ->check(CLI::PositiveNumber);

  auto* norm = app.add_subcommand("normalize", "print the normal form of a term");
  add_common(norm);
  norm->add_option("term,--term", f.term, "term to normalize");

  auto* bench = app.add_subcommand("bench", "run a benchmark family");
  bench->add_option("suite", f.suite, "exp2-eq, zero-exp2, ldepth, perfect, pair-order, pair-defs, even-odd, f4-chain")
      ->required();
  bench->add_option("--sizes", f.sizes, "sizes as a,b,c or lo..hi");
  bench->add_option("--fuel", f.fuel, "transition budget per run")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  if (*check) return cmd_check(f);
  if (*norm) {
    if (f.term.empty()) return input_error("normalize needs a term");
    return cmd_normalize(f);
  }
  return cmd_bench(f);
}
