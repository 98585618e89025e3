#include "lazyconv/bench.hpp"

#include <stdexcept>

namespace lazyconv {

#include "bench_defs.inc"

const char* bench_defs_text() { return kBenchDefs; }

const GlobalDefs& bench_defs() {
  static const GlobalDefs defs = parse_defs(kBenchDefs);
  return defs;
}

TermPtr nat_term(unsigned n) {
  TermPtr t = mk_ctor("O");
  for (unsigned i = 0; i < n; ++i) t = mk_ctor("S", {t});
  return t;
}

const std::vector<std::string>& bench_suites() {
  static const std::vector<std::string> names = {"exp2-eq",    "zero-exp2", "ldepth",   "perfect",
                                                 "pair-order", "pair-defs", "even-odd", "f4-chain"};
  return names;
}

bool is_bench_suite(const std::string& name) {
  for (const auto& s : bench_suites())
    if (s == name) return true;
  return false;
}

std::vector<unsigned> bench_default_sizes(const std::string& suite) {
  if (suite == "exp2-eq") return {6, 10, 14};
  if (suite == "zero-exp2") return {10, 20, 40};
  if (suite == "ldepth") return {8, 12, 15};
  if (suite == "perfect") return {8, 9, 10, 11, 12, 13};
  if (suite == "pair-order" || suite == "pair-defs") return {8, 12, 16};
  if (suite == "even-odd") return {50, 100};
  if (suite == "f4-chain") return {30};
  throw std::invalid_argument("unknown suite '" + suite + "'");
}

namespace {

TermPtr c(const char* name) { return mk_const(name); }
TermPtr app(const char* f, TermPtr x) { return mk_app(mk_const(f), std::move(x)); }
TermPtr pair(TermPtr a, TermPtr b) { return mk_ctor("MkPair", {std::move(a), std::move(b)}); }

}  // namespace

std::vector<BenchCase> bench_cases(const std::string& suite, unsigned n) {
  if (!is_bench_suite(suite)) throw std::invalid_argument("unknown suite '" + suite + "'");
  std::vector<BenchCase> out;
  auto add = [&](std::string config, std::string variant, TermPtr l, TermPtr r, Options o, Verdict v) {
    out.push_back({suite, n, std::move(config), std::move(variant), std::move(l), std::move(r), std::move(o), v});
  };
  Options full;
  Options no_share;
  no_share.conv_sharing = false;

  if (suite == "exp2-eq") {
    if (n == 0) throw std::invalid_argument("exp2-eq needs n >= 1");
    add("full", "-", app("exp2", nat_term(n)),
        app("exp2", mk_apps(c("plus"), {nat_term(n - 1), nat_term(1)})), full, Verdict::Convertible);
  } else if (suite == "zero-exp2") {
    add("full", "-", app("zero", app("exp2", nat_term(n))), app("zero", app("exp2", nat_term(n + 1))), full,
        Verdict::Convertible);
  } else if (suite == "ldepth") {
    TermPtr tree = mk_apps(c("perfect"), {nat_term(n), mk_ctor("L")});
    add("full", "-", app("ldepth", tree), app("ldepth2", tree), full, Verdict::Convertible);
  } else if (suite == "perfect") {
    if (n == 0) throw std::invalid_argument("perfect needs n >= 1");
    TermPtr l = mk_apps(c("perfect"), {nat_term(n), mk_ctor("L")});
    TermPtr r = mk_apps(c("perfect"), {nat_term(n - 1), mk_ctor("N", {mk_ctor("L"), mk_ctor("L")})});
    add("share", "-", l, r, full, Verdict::Convertible);
    add("no-share", "-", l, r, no_share, Verdict::Convertible);
    Options no_frozen;
    no_frozen.frozen = false;
    add("no-frozen", "-", l, r, no_frozen, Verdict::Convertible);
    Options bare;
    bare.frozen = false;
    bare.conv_sharing = false;
    add("bare", "-", l, r, bare, Verdict::Convertible);
  } else if (suite == "pair-order") {
    add("full", "bool-last", pair(app("exp2", nat_term(n)), mk_ctor("False")),
        pair(app("exp2", nat_term(n + 1)), mk_ctor("True")), full, Verdict::NotConvertible);
    add("full", "bool-first", pair(mk_ctor("False"), app("exp2", nat_term(n))),
        pair(mk_ctor("True"), app("exp2", nat_term(n + 1))), full, Verdict::NotConvertible);
  } else if (suite == "pair-defs") {
    add("full", "pair1", app("pair1", app("exp2", nat_term(n))),
        pair(mk_ctor("False"), app("exp2", nat_term(n))), full, Verdict::Convertible);
    add("full", "pair2", app("pair2", app("exp2", nat_term(n))),
        pair(app("exp2", nat_term(n)), mk_ctor("False")), full, Verdict::Convertible);
  } else if (suite == "even-odd") {
    if (n == 0) throw std::invalid_argument("even-odd needs n >= 1");
    add("full", "-", app("odd", nat_term(2 * n - 1)), app("even", nat_term(2 * n)), full, Verdict::Convertible);
  } else {
    TermPtr chain = nat_term(0);
    for (unsigned i = 0; i < n; ++i) chain = app("f4", chain);
    add("full", "-", chain, chain, full, Verdict::Convertible);
  }
  return out;
}

}  // namespace lazyconv
